//! Lagrangian machinery for the relaxed dual problem: the two-stage
//! linearization, the qualifying-constraint hyperplanes, the per-node lower
//! bound cuts, and assembly of the relaxed dual LP for a branch-and-bound
//! node.
//!
//! Everything here treats `x` through its column-stacked vector form of
//! length MK (see [`crate::linalg::stack_columns`]). The KN qualifying
//! constraints are indexed sample-major: constraint `i*K + k` belongs to
//! sample `i`, subtype `k`.

use ndarray::{Array1, Array2, ArrayView1};

use crate::error::{Error, Result};
use crate::lp::{solve_lp, LinearProgram, LpStatus, Sense};
use crate::problem::ProblemInstance;
use crate::qp::PrimalSolution;

/// An affine function `coeffs · x̄ + constant` of the stacked `x`.
#[derive(Debug, Clone, PartialEq)]
pub struct AffineForm {
    pub coeffs: Vec<f64>,
    pub constant: f64,
}

impl AffineForm {
    pub fn zero(dim: usize) -> Self {
        Self { coeffs: vec![0.0; dim], constant: 0.0 }
    }

    pub fn eval(&self, xbar: &[f64]) -> f64 {
        debug_assert_eq!(xbar.len(), self.coeffs.len());
        self.constant + self.coeffs.iter().zip(xbar).map(|(c, v)| c * v).sum::<f64>()
    }

    pub fn add_assign(&mut self, other: &AffineForm) {
        debug_assert_eq!(self.coeffs.len(), other.coeffs.len());
        for (a, b) in self.coeffs.iter_mut().zip(&other.coeffs) {
            *a += b;
        }
        self.constant += other.constant;
    }
}

/// Everything a branch-and-bound node stores from the primal solve at its
/// linearization point: the point itself, the primal optimum and multipliers,
/// and the KN qualifying-constraint hyperplanes.
#[derive(Debug, Clone)]
pub struct NodeCutData {
    pub x_t: Array2<f64>,
    pub theta_t: Array2<f64>,
    pub lambda_t: Vec<f64>,
    pub mu_t: Array2<f64>,
    /// Qualifying constraints as affine forms of `x̄`, sample-major.
    pub qc: Vec<AffineForm>,
}

impl NodeCutData {
    /// Builds cut data from the primal solution at `x_t`.
    pub fn new(instance: &ProblemInstance, x_t: Array2<f64>, primal: &PrimalSolution) -> Self {
        let qc = qualifying_constraints(
            &instance.y,
            &primal.theta,
            &x_t,
            &primal.lambda,
            &primal.mu,
        );
        Self {
            x_t,
            theta_t: primal.theta.clone(),
            lambda_t: primal.lambda.clone(),
            mu_t: primal.mu.clone(),
            qc,
        }
    }

    pub fn num_constraints(&self) -> usize {
        self.qc.len()
    }
}

/// The Lagrangian of one sample's primal problem:
/// `y'y − 2y'xθ + θ'x'xθ − λ(θ'1 − 1) − μ'θ`.
pub fn lagrangian_value(
    y_i: &ArrayView1<f64>,
    theta_i: &ArrayView1<f64>,
    x: &Array2<f64>,
    lambda_i: f64,
    mu_i: &ArrayView1<f64>,
) -> f64 {
    let yty: f64 = y_i.dot(y_i);
    let xtheta = x.dot(theta_i);
    let ytx_theta: f64 = y_i.dot(&xtheta_view(&xtheta));
    let quad: f64 = xtheta.dot(&xtheta);
    let simplex_term = lambda_i * (theta_i.sum() - 1.0);
    let bound_term: f64 = mu_i.dot(theta_i);
    yty - 2.0 * ytx_theta + quad - simplex_term - bound_term
}

fn xtheta_view(v: &Array1<f64>) -> ArrayView1<'_, f64> {
    v.view()
}

/// The Lagrangian linearized in `x` about `x_t`; exact at `x = x_t`, affine
/// in `x` for fixed `θ`, and a pointwise underestimate of the Lagrangian
/// (their gap is `‖(x − x_t)θ‖²`).
#[derive(Debug, Clone)]
pub struct XLinearized {
    y_i: Array1<f64>,
    x_t: Array2<f64>,
    xtx_t: Array2<f64>,
    lambda_i: f64,
    mu_i: Array1<f64>,
}

/// Linearizes the Lagrangian of sample `i` with respect to `x` about `x_t`:
/// `y'y − θ'x_t'x_tθ − 2y'xθ + 2θ'x_t'xθ − λ(θ'1 − 1) − μ'θ`.
pub fn linearize_in_x(
    y_i: &ArrayView1<f64>,
    x_t: &Array2<f64>,
    lambda_i: f64,
    mu_i: &ArrayView1<f64>,
) -> XLinearized {
    XLinearized {
        y_i: y_i.to_owned(),
        x_t: x_t.clone(),
        xtx_t: x_t.t().dot(x_t),
        lambda_i,
        mu_i: mu_i.to_owned(),
    }
}

impl XLinearized {
    pub fn eval(&self, x: &Array2<f64>, theta_i: &ArrayView1<f64>) -> f64 {
        let yty: f64 = self.y_i.dot(&self.y_i);
        let quad_t: f64 = theta_i.dot(&self.xtx_t.dot(theta_i));
        let xtheta = x.dot(theta_i);
        let ytx_theta: f64 = self.y_i.dot(&xtheta);
        let cross: f64 = self.x_t.dot(theta_i).dot(&xtheta);
        let simplex_term = self.lambda_i * (theta_i.sum() - 1.0);
        let bound_term: f64 = self.mu_i.dot(theta_i);
        yty - quad_t - 2.0 * ytx_theta + 2.0 * cross - simplex_term - bound_term
    }

    /// Coefficients of the affine-in-`x̄` map for a fixed `θ_i`.
    pub fn affine_in_x(&self, theta_i: &ArrayView1<f64>) -> AffineForm {
        let (m, k) = self.x_t.dim();
        let yty: f64 = self.y_i.dot(&self.y_i);
        let quad_t: f64 = theta_i.dot(&self.xtx_t.dot(theta_i));
        let simplex_term = self.lambda_i * (theta_i.sum() - 1.0);
        let bound_term: f64 = self.mu_i.dot(theta_i);
        let xt_theta = self.x_t.dot(theta_i); // length M
        let mut coeffs = vec![0.0; m * k];
        for l in 0..k {
            for j in 0..m {
                coeffs[l * m + j] = 2.0 * theta_i[l] * (xt_theta[j] - self.y_i[j]);
            }
        }
        AffineForm { coeffs, constant: yty - quad_t - simplex_term - bound_term }
    }
}

/// The KN qualifying constraints for a node: the θ-gradient of the
/// x-linearized Lagrangian at `θ^{(t)}`,
/// `g_i(x) = −2x_t'x_tθ_i − 2x'y_i + 2(x_t'x + x'x_t)θ_i − λ_i·1 − μ_i`,
/// one affine form per (sample, subtype), sample-major. With multipliers from
/// an exact KKT point every form vanishes at `x = x_t`.
pub fn qualifying_constraints(
    y: &Array2<f64>,
    theta_t: &Array2<f64>,
    x_t: &Array2<f64>,
    lambda_t: &[f64],
    mu_t: &Array2<f64>,
) -> Vec<AffineForm> {
    let (m, k) = x_t.dim();
    let n = y.ncols();
    debug_assert_eq!(theta_t.dim(), (k, n));
    let xtx_t = x_t.t().dot(x_t);
    let mut out = Vec::with_capacity(k * n);
    for i in 0..n {
        let theta_i = theta_t.column(i);
        let xt_theta = x_t.dot(&theta_i); // length M
        let xtx_theta = xtx_t.dot(&theta_i); // length K
        for kk in 0..k {
            let mut coeffs = vec![0.0; m * k];
            for l in 0..k {
                for j in 0..m {
                    // +2 x_t[j,kk] θ_l from x_t'x θ; the l == kk column also
                    // collects −2y_j + 2(x_tθ)_j from x'y and x'x_t θ.
                    let mut c = 2.0 * x_t[[j, kk]] * theta_i[l];
                    if l == kk {
                        c += -2.0 * y[[j, i]] + 2.0 * xt_theta[j];
                    }
                    coeffs[l * m + j] = c;
                }
            }
            out.push(AffineForm {
                coeffs,
                constant: -2.0 * xtx_theta[kk] - lambda_t[i] - mu_t[[kk, i]],
            });
        }
    }
    out
}

/// The Lagrangian linearized about `(x_t, θ^{(t)})` with `θ_i` pinned to the
/// 0/1 bound vector `theta_b_i`, as an affine map of `x̄`:
/// `y'y + θ'X₀θ − 2θ'X₀θᴮ − λ(1'θᴮ − 1) − μ'θᴮ`
/// `− 2θ'x'x_tθ − 2y'xθᴮ + 2θ'(x_t'x + x'x_t)θᴮ` with `θ = θ^{(t)}`,
/// `X₀ = x_t'x_t`.
pub fn linearize_in_x_theta(
    y_i: &ArrayView1<f64>,
    theta_b_i: &[bool],
    node: &NodeCutData,
    sample: usize,
) -> AffineForm {
    let (m, k) = node.x_t.dim();
    debug_assert_eq!(theta_b_i.len(), k);
    let theta_i = node.theta_t.column(sample);
    let lambda_i = node.lambda_t[sample];
    let mu_i = node.mu_t.column(sample);
    let tb: Vec<f64> = theta_b_i.iter().map(|&b| if b { 1.0 } else { 0.0 }).collect();

    let xtx_t = node.x_t.t().dot(&node.x_t);
    let xt_theta = node.x_t.dot(&theta_i); // (x_t θ)_j
    let xt_tb: Vec<f64> = (0..m)
        .map(|j| (0..k).map(|l| node.x_t[[j, l]] * tb[l]).sum())
        .collect(); // (x_t θᴮ)_j

    let yty: f64 = y_i.dot(y_i);
    let quad_t: f64 = theta_i.dot(&xtx_t.dot(&theta_i));
    let cross_tb: f64 = (0..k).map(|l| xtx_t.dot(&theta_i)[l] * tb[l]).sum();
    let tb_sum: f64 = tb.iter().sum();
    let mu_tb: f64 = mu_i.iter().zip(&tb).map(|(m, t)| m * t).sum();
    let constant = yty + quad_t - 2.0 * cross_tb - lambda_i * (tb_sum - 1.0) - mu_tb;

    let mut coeffs = vec![0.0; m * k];
    for l in 0..k {
        for j in 0..m {
            coeffs[l * m + j] = 2.0
                * (-theta_i[l] * xt_theta[j] - y_i[j] * tb[l]
                    + xt_theta[j] * tb[l]
                    + theta_i[l] * xt_tb[j]);
        }
    }
    AffineForm { coeffs, constant }
}

/// One step on the path from the root to a candidate child: a visited node's
/// cut data paired with the 0/1 region label (KN bits, sample-major) of the
/// next node down the path. The final step carries the candidate region
/// itself.
#[derive(Debug, Clone, Copy)]
pub struct PathStep<'a> {
    pub cuts: &'a NodeCutData,
    pub theta_b: &'a [bool],
}

/// The relaxed dual LP for one candidate region. Variable order: `Q`, then
/// the MK entries of `x̄`, then the MK entries of `z`.
#[derive(Debug, Clone)]
pub struct RelaxedDualLp {
    pub lp: LinearProgram,
    pub m: usize,
    pub k: usize,
}

impl RelaxedDualLp {
    pub fn num_vars(&self) -> usize {
        self.lp.num_vars()
    }

    /// Extracts `(Q, x)` from an LP solution point.
    pub fn split_point(&self, point: &[f64]) -> (f64, Array2<f64>) {
        let mk = self.m * self.k;
        let xbar = &point[1..1 + mk];
        (point[0], crate::linalg::unstack_columns(xbar, self.m, self.k))
    }
}

/// Assembles the relaxed dual LP for the last step's region given the whole
/// path from the root, inclusive. Per step: one cut `Q ≥ Σ_i L_lin(θᴮ_i)`
/// (summed over samples) and the step's KN sign-restricted qualifying
/// constraints (`g ≤ 0` where the bit is 1, `g ≥ 0` where it is 0). Rows
/// whose coefficients and offset all fall below `zero_tau` are dropped.
pub fn assemble_relaxed_dual(
    instance: &ProblemInstance,
    path: &[PathStep<'_>],
    p: f64,
    zero_tau: f64,
) -> Result<RelaxedDualLp> {
    if path.is_empty() {
        return Err(Error::ContractViolation("relaxed dual path must be nonempty".into()));
    }
    let (m, k) = path[0].cuts.x_t.dim();
    let n = instance.n();
    let mk = m * k;
    let num_vars = 2 * mk + 1;

    let mut lp = LinearProgram::new(num_vars);
    lp.names[0] = "Q".into();
    for l in 0..k {
        for j in 0..m {
            lp.names[1 + l * m + j] = format!("x_{j}_{l}");
            lp.names[1 + mk + l * m + j] = format!("z_{j}_{l}");
        }
    }
    lp.objective[0] = 1.0;
    for idx in 0..mk {
        lp.bounds[1 + mk + idx] = (0.0, f64::INFINITY); // z ≥ 0
    }

    // Budget: Σ z ≤ P.
    let mut budget = vec![0.0; num_vars];
    for idx in 0..mk {
        budget[1 + mk + idx] = 1.0;
    }
    lp.add_row(budget, Sense::Le, p);

    // |x| ≤ z, elementwise.
    for idx in 0..mk {
        let mut row = vec![0.0; num_vars];
        row[1 + idx] = 1.0;
        row[1 + mk + idx] = -1.0;
        lp.add_row(row, Sense::Le, 0.0);
        let mut row = vec![0.0; num_vars];
        row[1 + idx] = -1.0;
        row[1 + mk + idx] = -1.0;
        lp.add_row(row, Sense::Le, 0.0);
    }

    for step in path {
        if step.theta_b.len() != k * n {
            return Err(Error::ContractViolation(format!(
                "region label must have {} bits, got {}",
                k * n,
                step.theta_b.len()
            )));
        }
        // Lagrange cut, summed over samples: Q ≥ cut(x).
        let mut cut = AffineForm::zero(mk);
        for i in 0..n {
            let bits = &step.theta_b[i * k..(i + 1) * k];
            let term = linearize_in_x_theta(&instance.y.column(i), bits, step.cuts, i);
            cut.add_assign(&term);
        }
        let mut row = vec![0.0; num_vars];
        row[0] = -1.0;
        row[1..1 + mk].copy_from_slice(&cut.coeffs);
        lp.add_row(row, Sense::Le, -cut.constant);

        // Sign-restricted qualifying constraints.
        for (idx, form) in step.cuts.qc.iter().enumerate() {
            let trivial = form.coeffs.iter().all(|c| c.abs() <= zero_tau)
                && form.constant.abs() <= zero_tau;
            if trivial {
                continue;
            }
            let mut row = vec![0.0; num_vars];
            row[1..1 + mk].copy_from_slice(&form.coeffs);
            let sense = if step.theta_b[idx] { Sense::Le } else { Sense::Ge };
            lp.add_row(row, sense, -form.constant);
        }
    }

    Ok(RelaxedDualLp { lp, m, k })
}

/// A point inside the last path step's sign region, subject to the ancestor
/// sign rows and the budget polytope. First maximizes the slack of the
/// region's own qualifying constraints, then re-solves along `tilt` while
/// keeping at least half the maximal slack. Returns `None` when the LP
/// cannot push strictly inside (degenerate sliver regions).
///
/// Linearizing the next primal at such a point instead of the relaxed-dual
/// vertex keeps sibling subtrees from regenerating identical cut geometry:
/// the vertex regularly sits on a shared region boundary, and cuts built
/// there repeat exactly across siblings. The tilt breaks the remaining
/// vertex ties generically.
pub fn deep_point_in_region(
    instance: &ProblemInstance,
    path: &[PathStep<'_>],
    p: f64,
    zero_tau: f64,
    tilt: &[f64],
) -> Result<Option<Array2<f64>>> {
    let Some((last, ancestors)) = path.split_last() else {
        return Err(Error::ContractViolation("deep point needs a nonempty path".into()));
    };
    let (m, k) = last.cuts.x_t.dim();
    let mk = m * k;
    debug_assert_eq!(tilt.len(), mk);
    // Variables: x̄, |x| carriers, slack s.
    let num_vars = 2 * mk + 1;
    let s_idx = 2 * mk;
    let mut lp = LinearProgram::new(num_vars);
    lp.objective[s_idx] = -1.0; // maximize s
    for idx in 0..mk {
        lp.bounds[mk + idx] = (0.0, f64::INFINITY);
    }
    lp.bounds[s_idx] = (0.0, p.max(1.0));

    let mut budget = vec![0.0; num_vars];
    for idx in 0..mk {
        budget[mk + idx] = 1.0;
    }
    lp.add_row(budget, Sense::Le, p);
    for idx in 0..mk {
        let mut row = vec![0.0; num_vars];
        row[idx] = 1.0;
        row[mk + idx] = -1.0;
        lp.add_row(row, Sense::Le, 0.0);
        let mut row = vec![0.0; num_vars];
        row[idx] = -1.0;
        row[mk + idx] = -1.0;
        lp.add_row(row, Sense::Le, 0.0);
    }

    let mut add_sign_rows = |step: &PathStep<'_>, slack: bool, lp: &mut LinearProgram| {
        for (idx, form) in step.cuts.qc.iter().enumerate() {
            let trivial = form.coeffs.iter().all(|c| c.abs() <= zero_tau)
                && form.constant.abs() <= zero_tau;
            if trivial {
                continue;
            }
            let mut row = vec![0.0; num_vars];
            let keep_le = step.theta_b[idx];
            for (slot, c) in row.iter_mut().zip(&form.coeffs) {
                *slot = if keep_le { *c } else { -*c };
            }
            if slack {
                row[s_idx] = 1.0;
            }
            let rhs = if keep_le { -form.constant } else { form.constant };
            lp.add_row(row, Sense::Le, rhs);
        }
    };
    for step in ancestors {
        add_sign_rows(step, false, &mut lp);
    }
    add_sign_rows(last, true, &mut lp);

    let res = solve_lp(&lp)?;
    if res.status != LpStatus::Optimal || res.point[s_idx] <= 0.0 {
        return Ok(None);
    }
    let best_slack = res.point[s_idx];

    // Second pass: wander generically while keeping half the slack.
    lp.objective = vec![0.0; num_vars];
    for (slot, t) in lp.objective.iter_mut().zip(tilt) {
        *slot = -t;
    }
    lp.bounds[s_idx] = (0.5 * best_slack, p.max(1.0));
    let tilted = solve_lp(&lp)?;
    let point = if tilted.status == LpStatus::Optimal { &tilted.point } else { &res.point };
    Ok(Some(crate::linalg::unstack_columns(&point[..mk], m, k)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{stack_columns, unstack_columns};
    use crate::qp::solve_primal;
    use ndarray::array;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_theta_col(rng: &mut ChaCha8Rng, k: usize) -> Array1<f64> {
        let mut v: Vec<f64> = (0..k).map(|_| rng.random::<f64>() + 1e-3).collect();
        let s: f64 = v.iter().sum();
        for x in v.iter_mut() {
            *x /= s;
        }
        Array1::from(v)
    }

    #[test]
    fn lagrangian_matches_objective_with_vanishing_terms() {
        // On the simplex with complementary slackness both constraint terms
        // vanish, leaving the per-sample objective.
        let y = array![0.5, -0.25];
        let x = array![[1.0, 0.0], [0.0, -1.0]];
        let theta = array![0.3, 0.7];
        let mu = array![0.0, 0.0];
        let got = lagrangian_value(&y.view(), &theta.view(), &x, -0.4, &mu.view());
        let r = &y - &x.dot(&theta);
        let want: f64 = r.iter().map(|v| v * v).sum();
        assert!((got - want).abs() < 1e-14);
    }

    #[test]
    fn lagrangian_matches_expansion_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..50 {
            let m = 2;
            let k = 3;
            let y = Array1::from_iter((0..m).map(|_| rng.random::<f64>() * 2.0 - 1.0));
            let x = Array2::from_shape_fn((m, k), |_| rng.random::<f64>() * 2.0 - 1.0);
            let theta = Array1::from_iter((0..k).map(|_| rng.random::<f64>() * 2.0 - 1.0));
            let lambda = rng.random::<f64>() * 2.0 - 1.0;
            let mu = Array1::from_iter((0..k).map(|_| rng.random::<f64>()));

            // Term-by-term scalar expansion.
            let mut want = 0.0;
            for j in 0..m {
                want += y[j] * y[j];
                let xt: f64 = (0..k).map(|l| x[[j, l]] * theta[l]).sum();
                want += -2.0 * y[j] * xt + xt * xt;
            }
            want -= lambda * (theta.iter().sum::<f64>() - 1.0);
            want -= (0..k).map(|l| mu[l] * theta[l]).sum::<f64>();

            let got = lagrangian_value(&y.view(), &theta.view(), &x, lambda, &mu.view());
            assert!((got - want).abs() < 1e-12);
        }
    }

    #[test]
    fn x_linearization_exact_at_expansion_point() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..20 {
            let y = Array1::from_iter((0..2).map(|_| rng.random::<f64>()));
            let x_t = Array2::from_shape_fn((2, 2), |_| rng.random::<f64>() * 2.0 - 1.0);
            let theta = random_theta_col(&mut rng, 2);
            let mu = Array1::from_iter((0..2).map(|_| rng.random::<f64>()));
            let lin = linearize_in_x(&y.view(), &x_t, 0.2, &mu.view());
            let direct = lagrangian_value(&y.view(), &theta.view(), &x_t, 0.2, &mu.view());
            assert!((lin.eval(&x_t, &theta.view()) - direct).abs() < 1e-12);
            // The affine-form path agrees with eval.
            let form = lin.affine_in_x(&theta.view());
            assert!((form.eval(&stack_columns(&x_t)) - direct).abs() < 1e-12);
        }
    }

    #[test]
    fn x_linearization_is_affine_in_x() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let y = Array1::from_iter((0..3).map(|_| rng.random::<f64>()));
        let x_t = Array2::from_shape_fn((3, 2), |_| rng.random::<f64>() * 2.0 - 1.0);
        let theta = random_theta_col(&mut rng, 2);
        let mu = Array1::from_iter((0..2).map(|_| rng.random::<f64>()));
        let lin = linearize_in_x(&y.view(), &x_t, -0.3, &mu.view());
        for _ in 0..10 {
            let dir = Array2::from_shape_fn((3, 2), |_| rng.random::<f64>() * 2.0 - 1.0);
            let f = |s: f64| lin.eval(&(&x_t + &dir.mapv(|d| d * s)), &theta.view());
            let second_diff = f(1.0) - 2.0 * f(0.5) + f(0.0);
            assert!(second_diff.abs() < 1e-10, "second difference {second_diff}");
        }
    }

    #[test]
    fn x_linearization_gradient_matches_finite_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let m = 2;
        let k = 2;
        let y = Array1::from_iter((0..m).map(|_| rng.random::<f64>() * 2.0 - 1.0));
        let x_t = Array2::from_shape_fn((m, k), |_| rng.random::<f64>() * 2.0 - 1.0);
        let theta = random_theta_col(&mut rng, k);
        let mu = Array1::from_iter((0..k).map(|_| rng.random::<f64>()));
        let lambda = 0.1;
        let lin = linearize_in_x(&y.view(), &x_t, lambda, &mu.view());
        let form = lin.affine_in_x(&theta.view());

        let h = 1e-6;
        for idx in 0..m * k {
            let mut plus = stack_columns(&x_t);
            let mut minus = plus.clone();
            plus[idx] += h;
            minus[idx] -= h;
            let fd = (lagrangian_value(
                &y.view(),
                &theta.view(),
                &unstack_columns(&plus, m, k),
                lambda,
                &mu.view(),
            ) - lagrangian_value(
                &y.view(),
                &theta.view(),
                &unstack_columns(&minus, m, k),
                lambda,
                &mu.view(),
            )) / (2.0 * h);
            let rel = (form.coeffs[idx] - fd).abs() / (1.0 + fd.abs());
            assert!(rel <= 1e-5, "coefficient {idx}: analytic {} fd {}", form.coeffs[idx], fd);
        }
    }

    fn paper_node() -> (ProblemInstance, NodeCutData) {
        let inst = ProblemInstance::new(array![[0.0, -1.0, -0.5]], 2, 1.0, 0.01, 0).unwrap();
        let x_t = array![[0.3, -0.6]];
        let primal = solve_primal(&inst, &x_t).unwrap();
        let node = NodeCutData::new(&inst, x_t, &primal);
        (inst, node)
    }

    #[test]
    fn qualifying_constraints_vanish_at_linearization_point() {
        let (_, node) = paper_node();
        let xbar = stack_columns(&node.x_t);
        for form in &node.qc {
            assert!(form.eval(&xbar).abs() <= 1e-6);
        }
    }

    #[test]
    fn qualifying_constraints_vanish_on_random_instances() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..50 {
            let m = 1 + (rng.random::<u32>() % 3) as usize;
            let n = 1 + (rng.random::<u32>() % 3) as usize;
            let k = 2;
            let y = Array2::from_shape_fn((m, n), |_| rng.random::<f64>() * 2.0 - 1.0);
            let x_t = Array2::from_shape_fn((m, k), |_| rng.random::<f64>() * 2.0 - 1.0);
            let inst = ProblemInstance::new(y, k, 10.0, 0.01, 0).unwrap();
            let primal = solve_primal(&inst, &x_t).unwrap();
            let node = NodeCutData::new(&inst, x_t, &primal);
            let xbar = stack_columns(&node.x_t);
            for form in &node.qc {
                assert!(form.eval(&xbar).abs() <= 1e-6, "residual {}", form.eval(&xbar));
            }
        }
    }

    #[test]
    fn qualifying_constraint_k1_matches_symbolic_expansion() {
        // K = 1 pins θ = 1, so g(x) = −2x_t'x_t − 2x'y + 4x'x_t − λ − μ
        // with every piece scalar per feature.
        let y = array![[0.7], [-0.2]];
        let x_t = array![[0.4], [0.1]];
        let inst = ProblemInstance::new(y.clone(), 1, 10.0, 0.01, 0).unwrap();
        let primal = solve_primal(&inst, &x_t).unwrap();
        let node = NodeCutData::new(&inst, x_t.clone(), &primal);
        assert_eq!(node.qc.len(), 1);
        let form = &node.qc[0];
        // Coefficients: −2y_j + 4x_t[j].
        for j in 0..2 {
            let want = -2.0 * y[[j, 0]] + 4.0 * x_t[[j, 0]];
            assert!((form.coeffs[j] - want).abs() < 1e-12);
        }
        let xtx: f64 = x_t.iter().map(|v| v * v).sum();
        let want_const = -2.0 * xtx - primal.lambda[0] - primal.mu[[0, 0]];
        assert!((form.constant - want_const).abs() < 1e-12);
    }

    #[test]
    fn qualifying_constraints_scale_affinely() {
        let (_, node) = paper_node();
        let xbar_t = stack_columns(&node.x_t);
        let dir = vec![0.37, -0.11];
        for form in &node.qc {
            let at = |s: f64| {
                let p: Vec<f64> = xbar_t.iter().zip(&dir).map(|(x, d)| x + s * d).collect();
                form.eval(&p)
            };
            let base = at(0.0);
            assert!(((at(2.0) - base) - 2.0 * (at(1.0) - base)).abs() < 1e-10);
        }
    }

    #[test]
    fn xtheta_cut_equals_lagrangian_when_theta_already_binary() {
        // With θ^{(t)} exactly 0/1, pin θᴮ to it: the cut at x_t equals the
        // Lagrangian at (x_t, θ^{(t)}).
        let inst = ProblemInstance::new(array![[0.0, -1.0, -0.5]], 2, 1.0, 0.01, 0).unwrap();
        let x_t = array![[0.0, -1.0]];
        let primal = solve_primal(&inst, &x_t).unwrap();
        let node = NodeCutData::new(&inst, x_t.clone(), &primal);
        let xbar = stack_columns(&x_t);
        for i in [0usize, 1] {
            // Samples 0 and 1 have binary optima (1,0) and (0,1).
            let theta_i = node.theta_t.column(i);
            let bits: Vec<bool> = theta_i.iter().map(|&v| v > 0.5).collect();
            let form = linearize_in_x_theta(&inst.y.column(i), &bits, &node, i);
            let want = lagrangian_value(
                &inst.y.column(i),
                &theta_i,
                &x_t,
                node.lambda_t[i],
                &node.mu_t.column(i),
            );
            assert!((form.eval(&xbar) - want).abs() <= 1e-9);
        }
    }

    #[test]
    fn xtheta_cut_matches_tangent_identity() {
        // The two-stage form equals the x-linearized base plus the
        // qualifying-constraint tangent step, for any region bits.
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for _ in 0..30 {
            let m = 2;
            let k = 2;
            let n = 2;
            let y = Array2::from_shape_fn((m, n), |_| rng.random::<f64>() * 2.0 - 1.0);
            let x_t = Array2::from_shape_fn((m, k), |_| rng.random::<f64>() * 2.0 - 1.0);
            let inst = ProblemInstance::new(y, k, 10.0, 0.01, 0).unwrap();
            let primal = solve_primal(&inst, &x_t).unwrap();
            let node = NodeCutData::new(&inst, x_t.clone(), &primal);
            let x = Array2::from_shape_fn((m, k), |_| rng.random::<f64>() * 2.0 - 1.0);
            let xbar = stack_columns(&x);
            for i in 0..n {
                let bits = [rng.random::<f64>() < 0.5, rng.random::<f64>() < 0.5];
                let form = linearize_in_x_theta(&inst.y.column(i), &bits, &node, i);
                let lin = linearize_in_x(
                    &inst.y.column(i),
                    &x_t,
                    node.lambda_t[i],
                    &node.mu_t.column(i),
                );
                let theta_i = node.theta_t.column(i);
                let base = lin.eval(&x, &theta_i);
                let mut tangent = base;
                for kk in 0..k {
                    let g = node.qc[i * k + kk].eval(&xbar);
                    let delta = if bits[kk] { 1.0 } else { 0.0 } - theta_i[kk];
                    tangent += g * delta;
                }
                assert!(
                    (form.eval(&xbar) - tangent).abs() <= 1e-9,
                    "direct {} tangent {}",
                    form.eval(&xbar),
                    tangent
                );
            }
        }
    }

    #[test]
    fn xtheta_cut_is_affine_in_x() {
        let (inst, node) = paper_node();
        let bits = vec![true, false];
        let form = linearize_in_x_theta(&inst.y.column(1), &bits, &node, 1);
        let f = |xbar: &[f64]| form.eval(xbar);
        let a = vec![0.2, 0.4];
        let b = vec![-0.5, 0.9];
        let mid: Vec<f64> = a.iter().zip(&b).map(|(p, q)| 0.5 * (p + q)).collect();
        let second_diff = f(&a) - 2.0 * f(&mid) + f(&b);
        assert!(second_diff.abs() < 1e-10);
    }

    #[test]
    fn relaxed_dual_has_expected_variable_count() {
        let (inst, node) = paper_node();
        let theta_b = vec![true; 6];
        let rd = assemble_relaxed_dual(
            &inst,
            &[PathStep { cuts: &node, theta_b: &theta_b }],
            1.0,
            1e-12,
        )
        .unwrap();
        assert_eq!(rd.num_vars(), 5); // 2·M·K + 1 with M = 1, K = 2
    }

    #[test]
    fn linearization_point_is_feasible_for_both_sign_choices() {
        // Every qualifying constraint vanishes at x_t, so either sign of each
        // constraint admits x_t.
        let (inst, node) = paper_node();
        let xbar = stack_columns(&node.x_t);
        for bits_pattern in [[true; 6], [false; 6]] {
            let rd = assemble_relaxed_dual(
                &inst,
                &[PathStep { cuts: &node, theta_b: &bits_pattern }],
                1.0,
                1e-12,
            )
            .unwrap();
            for row in &rd.lp.rows {
                // Only the qualifying-constraint rows: no Q or z involvement.
                let touches_q = row.coeffs[0] != 0.0;
                let touches_z = row.coeffs[3..5].iter().any(|&c| c != 0.0);
                if touches_q || touches_z {
                    continue;
                }
                let lhs: f64 = row.coeffs[1..3].iter().zip(&xbar).map(|(c, x)| c * x).sum();
                match row.sense {
                    Sense::Le => assert!(lhs <= row.rhs + 1e-6),
                    Sense::Ge => assert!(lhs >= row.rhs - 1e-6),
                    Sense::Eq => unreachable!(),
                }
            }
        }
    }

    #[test]
    fn empty_path_is_rejected() {
        let (inst, _) = paper_node();
        assert!(matches!(
            assemble_relaxed_dual(&inst, &[], 1.0, 1e-12),
            Err(Error::ContractViolation(_))
        ));
    }
}
