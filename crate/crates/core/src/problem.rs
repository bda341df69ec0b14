//! Problem data model, objective evaluation, feasibility checks, and
//! synthetic instance generation.
//!
//! Conventions: `y` is M×N with samples as columns (`y[[j, i]]` is feature j
//! of sample i), `x` is M×K, `theta` is K×N with each column a point on the
//! probability simplex.

use ndarray::{Array1, Array2};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::linalg::l1_norm;

/// Absolute tolerance for feasibility checks (simplex and budget).
pub const FEAS_TOL: f64 = 1e-8;

/// An instance of the sparse mixed-membership factorization problem.
#[derive(Debug, Clone)]
pub struct ProblemInstance {
    /// Observations, M features × N samples.
    pub y: Array2<f64>,
    /// Number of subtypes.
    pub k: usize,
    /// ℓ1 budget on `x`.
    pub p: f64,
    /// Convergence tolerance.
    pub epsilon: f64,
    /// Seed for the solver's initial point.
    pub seed: u64,
}

impl ProblemInstance {
    pub fn new(y: Array2<f64>, k: usize, p: f64, epsilon: f64, seed: u64) -> Result<Self> {
        let (m, n) = y.dim();
        if m == 0 || n == 0 {
            return Err(Error::InvalidInput("y must have at least one row and column".into()));
        }
        if k == 0 {
            return Err(Error::InvalidInput("subtype count K must be >= 1".into()));
        }
        if !(p > 0.0) || !p.is_finite() {
            return Err(Error::InvalidInput("budget P must be positive and finite".into()));
        }
        if !(epsilon > 0.0) || !epsilon.is_finite() {
            return Err(Error::InvalidInput("epsilon must be positive and finite".into()));
        }
        if y.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput("y entries must be finite".into()));
        }
        Ok(Self { y, k, p, epsilon, seed })
    }

    pub fn m(&self) -> usize {
        self.y.nrows()
    }

    pub fn n(&self) -> usize {
        self.y.ncols()
    }
}

/// A candidate factorization `(x, theta)`.
#[derive(Debug, Clone, PartialEq)]
pub struct FactorPair {
    /// Subtype matrix, M×K.
    pub x: Array2<f64>,
    /// Mixture weights, K×N, columns on the simplex.
    pub theta: Array2<f64>,
}

impl FactorPair {
    /// Builds a pair, checking only that shapes are compatible. Feasibility
    /// (simplex columns, ℓ1 budget) is checked separately by
    /// [`check_feasible`].
    pub fn new(x: Array2<f64>, theta: Array2<f64>) -> Result<Self> {
        if x.ncols() != theta.nrows() {
            return Err(Error::DimensionMismatch(format!(
                "x is {}x{} but theta is {}x{}",
                x.nrows(),
                x.ncols(),
                theta.nrows(),
                theta.ncols()
            )));
        }
        Ok(Self { x, theta })
    }
}

/// Solver tolerances and resource limits.
#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    pub epsilon: f64,
    pub max_iterations: u64,
    pub max_wall_seconds: f64,
    pub workers: usize,
    /// Proportionality threshold for merging duplicate hyperplanes.
    pub dedup_tau: f64,
    /// Threshold below which a constraint row is dropped as trivial.
    pub zero_tau: f64,
    /// Minimum interior slack for a region to count as nonempty.
    pub interior_tau: f64,
    pub lp_tol: f64,
    pub qp_tol: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            epsilon: 0.01,
            max_iterations: 10_000,
            max_wall_seconds: f64::INFINITY,
            workers: 1,
            dedup_tau: 1e-9,
            zero_tau: 1e-12,
            interior_tau: 1e-8,
            lp_tol: 1e-7,
            qp_tol: 1e-7,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        let tols = [
            ("epsilon", self.epsilon),
            ("dedup_tau", self.dedup_tau),
            ("zero_tau", self.zero_tau),
            ("interior_tau", self.interior_tau),
            ("lp_tol", self.lp_tol),
            ("qp_tol", self.qp_tol),
        ];
        for (name, v) in tols {
            if !(v > 0.0) {
                return Err(Error::InvalidInput(format!("{name} must be > 0")));
            }
        }
        if !(self.max_wall_seconds > 0.0) {
            return Err(Error::InvalidInput("max_wall_seconds must be > 0".into()));
        }
        if self.workers == 0 {
            return Err(Error::InvalidInput("workers must be >= 1".into()));
        }
        Ok(())
    }
}

/// `Σ_i ‖y_i − x θ_i‖²` for a candidate pair.
pub fn objective(instance: &ProblemInstance, pair: &FactorPair) -> Result<f64> {
    let (m, n) = instance.y.dim();
    if pair.x.nrows() != m || pair.x.ncols() != instance.k {
        return Err(Error::DimensionMismatch(format!(
            "x must be {}x{}, got {}x{}",
            m,
            instance.k,
            pair.x.nrows(),
            pair.x.ncols()
        )));
    }
    if pair.theta.nrows() != instance.k || pair.theta.ncols() != n {
        return Err(Error::DimensionMismatch(format!(
            "theta must be {}x{}, got {}x{}",
            instance.k,
            n,
            pair.theta.nrows(),
            pair.theta.ncols()
        )));
    }
    let residual = &instance.y - &pair.x.dot(&pair.theta);
    Ok(residual.iter().map(|r| r * r).sum())
}

/// One violated feasibility constraint, with its magnitude.
#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    /// `|Σ_k theta_{ki} − 1|` exceeds tolerance for sample `sample`.
    SimplexSum { sample: usize, excess: f64 },
    /// `theta_{ki} < 0` beyond tolerance.
    NegativeWeight { subtype: usize, sample: usize, amount: f64 },
    /// `Σ |x_{jk}| − P` beyond tolerance.
    BudgetExcess { amount: f64 },
    /// A non-finite entry in `x` or `theta`.
    NonFinite { field: &'static str },
}

impl std::fmt::Display for Violation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Violation::SimplexSum { sample, excess } => {
                write!(f, "theta column {sample} simplex sum off by {excess:.3e}")
            }
            Violation::NegativeWeight { subtype, sample, amount } => {
                write!(f, "theta[{subtype},{sample}] negative by {amount:.3e}")
            }
            Violation::BudgetExcess { amount } => {
                write!(f, "l1 budget exceeded by {amount:.3e}")
            }
            Violation::NonFinite { field } => write!(f, "non-finite entry in {field}"),
        }
    }
}

/// Outcome of [`check_feasible`].
#[derive(Debug, Clone)]
pub struct FeasibilityReport {
    pub feasible: bool,
    pub violations: Vec<Violation>,
}

/// Checks the pair invariants at tolerance [`FEAS_TOL`]: every `theta`
/// column on the simplex and `Σ|x| ≤ P`.
pub fn check_feasible(pair: &FactorPair, p: f64) -> FeasibilityReport {
    let mut violations = Vec::new();
    if pair.x.iter().any(|v| !v.is_finite()) {
        violations.push(Violation::NonFinite { field: "x" });
    }
    if pair.theta.iter().any(|v| !v.is_finite()) {
        violations.push(Violation::NonFinite { field: "theta" });
    }
    if violations.is_empty() {
        for i in 0..pair.theta.ncols() {
            let col = pair.theta.column(i);
            let sum: f64 = col.sum();
            if (sum - 1.0).abs() > FEAS_TOL {
                violations.push(Violation::SimplexSum { sample: i, excess: (sum - 1.0).abs() });
            }
            for (k, &v) in col.iter().enumerate() {
                if v < -FEAS_TOL {
                    violations.push(Violation::NegativeWeight {
                        subtype: k,
                        sample: i,
                        amount: -v,
                    });
                }
            }
        }
        let l1 = l1_norm(&pair.x);
        if l1 > p + FEAS_TOL {
            violations.push(Violation::BudgetExcess { amount: l1 - p });
        }
    }
    FeasibilityReport { feasible: violations.is_empty(), violations }
}

/// Draws one standard normal via Box–Muller from two uniforms on the stream.
fn box_muller(rng: &mut ChaCha8Rng) -> f64 {
    let u1: f64 = 1.0 - rng.random::<f64>(); // (0, 1]
    let u2: f64 = rng.random::<f64>();
    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}

/// Synthetic instance with K = 2 subtypes.
///
/// The true `x*` has column 0 equal to 1 on the first quarter of rows,
/// column 1 equal to −1 on the second quarter, and Normal(0, 0.5²) entries in
/// both columns on the bottom half. The true `theta*` has row 0 evenly spaced
/// over [0, 1] and row 1 its complement. `y = x* theta*`, `P = ‖x*‖₁`, and
/// the same seed always reproduces the same instance bit for bit.
pub fn generate_instance(m: usize, n: usize, seed: u64) -> Result<(ProblemInstance, FactorPair)> {
    if m < 4 {
        return Err(Error::UnsupportedSize(format!("M must be >= 4, got {m}")));
    }
    if n == 0 {
        return Err(Error::UnsupportedSize("N must be >= 1".into()));
    }
    let k = 2usize;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let mut x = Array2::zeros((m, k));
    for j in 0..m / 4 {
        x[[j, 0]] = 1.0;
    }
    for j in m / 4..m / 2 {
        x[[j, 1]] = -1.0;
    }
    for j in m / 2..m {
        for c in 0..k {
            x[[j, c]] = 0.5 * box_muller(&mut rng);
        }
    }

    let mut theta = Array2::zeros((k, n));
    let row0: Array1<f64> = if n == 1 {
        Array1::from(vec![0.0])
    } else {
        Array1::from_iter((0..n).map(|i| i as f64 / (n - 1) as f64))
    };
    for i in 0..n {
        theta[[0, i]] = row0[i];
        theta[[1, i]] = 1.0 - row0[i];
    }

    let y = x.dot(&theta);
    let p = l1_norm(&x);
    let instance = ProblemInstance::new(y, k, p, 0.01, seed)?;
    let truth = FactorPair::new(x, theta)?;
    Ok((instance, truth))
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    fn paper_instance() -> ProblemInstance {
        ProblemInstance::new(array![[0.0, -1.0, -0.5]], 2, 1.0, 0.01, 0).unwrap()
    }

    #[test]
    fn objective_zero_at_exact_factorization() {
        let inst = paper_instance();
        let pair = FactorPair::new(
            array![[0.0, -1.0]],
            array![[1.0, 0.0, 0.5], [0.0, 1.0, 0.5]],
        )
        .unwrap();
        assert_eq!(objective(&inst, &pair).unwrap(), 0.0);
    }

    #[test]
    fn objective_zero_x_gives_norm_of_y() {
        let inst = paper_instance();
        let pair = FactorPair::new(
            Array2::zeros((1, 2)),
            array![[0.5, 0.5, 0.5], [0.5, 0.5, 0.5]],
        )
        .unwrap();
        let expected: f64 = inst.y.iter().map(|v| v * v).sum();
        assert_eq!(objective(&inst, &pair).unwrap(), expected);
    }

    #[test]
    fn objective_matches_scalar_expansion() {
        // y'y − 2 y'xθ + θ'x'xθ summed over samples, expanded entrywise.
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..20 {
            let y = Array2::from_shape_fn((2, 2), |_| rng.random::<f64>() * 2.0 - 1.0);
            let x = Array2::from_shape_fn((2, 2), |_| rng.random::<f64>() * 2.0 - 1.0);
            let mut theta = Array2::from_shape_fn((2, 2), |_| rng.random::<f64>());
            for i in 0..2 {
                let s = theta.column(i).sum();
                theta.column_mut(i).mapv_inplace(|v| v / s);
            }
            let inst = ProblemInstance::new(y.clone(), 2, 10.0, 0.01, 0).unwrap();
            let pair = FactorPair::new(x.clone(), theta.clone()).unwrap();

            let mut expected = 0.0;
            for i in 0..2 {
                let yi = y.column(i);
                let ti = theta.column(i);
                let yty: f64 = yi.dot(&yi);
                let xt = x.t().dot(&yi);
                let ytx_theta: f64 = xt.dot(&ti);
                let xtx = x.t().dot(&x);
                let quad: f64 = ti.dot(&xtx.dot(&ti));
                expected += yty - 2.0 * ytx_theta + quad;
            }
            let got = objective(&inst, &pair).unwrap();
            assert!((got - expected).abs() <= 1e-12 * (1.0 + expected.abs()));
        }
    }

    #[test]
    fn objective_invariant_under_label_switching() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let y = Array2::from_shape_fn((3, 2), |_| rng.random::<f64>());
        let x = Array2::from_shape_fn((3, 2), |_| rng.random::<f64>());
        let mut theta = Array2::from_shape_fn((2, 2), |_| rng.random::<f64>());
        for i in 0..2 {
            let s = theta.column(i).sum();
            theta.column_mut(i).mapv_inplace(|v| v / s);
        }
        let inst = ProblemInstance::new(y, 2, 10.0, 0.01, 0).unwrap();

        let swapped_x = ndarray::stack![ndarray::Axis(1), x.column(1), x.column(0)];
        let swapped_theta = ndarray::stack![ndarray::Axis(0), theta.row(1), theta.row(0)];
        let a = objective(&inst, &FactorPair::new(x, theta).unwrap()).unwrap();
        let b = objective(&inst, &FactorPair::new(swapped_x, swapped_theta).unwrap()).unwrap();
        assert!((a - b).abs() < 1e-14);
    }

    #[test]
    fn objective_rejects_bad_shapes() {
        let inst = paper_instance();
        let pair = FactorPair::new(
            array![[0.0, -1.0]],
            array![[1.0, 0.0], [0.0, 1.0]],
        )
        .unwrap();
        assert!(matches!(objective(&inst, &pair), Err(Error::DimensionMismatch(_))));
    }

    #[test]
    fn feasibility_accepts_paper_solution() {
        let pair = FactorPair::new(
            array![[0.0, -1.0]],
            array![[1.0, 0.0, 0.5], [0.0, 1.0, 0.5]],
        )
        .unwrap();
        let report = check_feasible(&pair, 1.0);
        assert!(report.feasible, "{:?}", report.violations);
    }

    #[test]
    fn feasibility_flags_simplex_violation() {
        let pair = FactorPair::new(array![[0.0, -1.0]], array![[0.5], [0.6]]).unwrap();
        let report = check_feasible(&pair, 1.0);
        assert!(!report.feasible);
        assert!(report.violations.iter().any(|v| matches!(
            v,
            Violation::SimplexSum { sample: 0, excess } if (excess - 0.1).abs() < 1e-12
        )));
    }

    #[test]
    fn feasibility_flags_budget_excess() {
        let pair = FactorPair::new(array![[0.7, -0.5]], array![[0.5], [0.5]]).unwrap();
        let report = check_feasible(&pair, 1.0);
        assert!(!report.feasible);
        assert!(report.violations.iter().any(|v| matches!(
            v,
            Violation::BudgetExcess { amount } if (amount - 0.2).abs() < 1e-12
        )));
    }

    #[test]
    fn generator_matches_documented_layout() {
        let (inst, truth) = generate_instance(20, 4, 123).unwrap();
        for j in 0..5 {
            assert_eq!(truth.x[[j, 0]], 1.0);
            assert_eq!(truth.x[[j, 1]], 0.0);
        }
        for j in 5..10 {
            assert_eq!(truth.x[[j, 0]], 0.0);
            assert_eq!(truth.x[[j, 1]], -1.0);
        }
        let row0: Vec<f64> = (0..4).map(|i| truth.theta[[0, i]]).collect();
        for (got, want) in row0.iter().zip([0.0, 1.0 / 3.0, 2.0 / 3.0, 1.0]) {
            assert!((got - want).abs() < 1e-15);
        }
        assert_eq!(inst.y, truth.x.dot(&truth.theta));
        assert!(check_feasible(&truth, inst.p).feasible);
    }

    #[test]
    fn generator_n1_uses_left_endpoint() {
        let (_, truth) = generate_instance(4, 1, 0).unwrap();
        assert_eq!(truth.theta[[0, 0]], 0.0);
        assert_eq!(truth.theta[[1, 0]], 1.0);
    }

    #[test]
    fn generator_is_deterministic() {
        let (a_inst, a_truth) = generate_instance(12, 3, 42).unwrap();
        let (b_inst, b_truth) = generate_instance(12, 3, 42).unwrap();
        assert_eq!(a_inst.y, b_inst.y);
        assert_eq!(a_truth.x, b_truth.x);
        assert_eq!(a_truth.theta, b_truth.theta);
        let (c_inst, _) = generate_instance(12, 3, 43).unwrap();
        assert_ne!(a_inst.y, c_inst.y);
    }

    #[test]
    fn generator_rejects_tiny_m() {
        assert!(matches!(generate_instance(3, 2, 0), Err(Error::UnsupportedSize(_))));
    }
}
