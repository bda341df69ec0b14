//! Primal problem solver: for fixed `x`, minimize `‖y_i − x θ_i‖²` over the
//! probability simplex independently for every sample, recovering the KKT
//! multipliers.
//!
//! Each per-sample problem is a K-dimensional convex QP solved by primal
//! active-set iteration on the bound constraints; the equality-constrained
//! subproblems are dense KKT solves. Multiplier sign convention:
//! `∇_θ f − λ·1 − μ = 0` with `μ ≥ 0` on active bounds.

use ndarray::{Array2, ArrayView1};

use crate::error::{Error, Result};
use crate::linalg::solve_dense;
use crate::problem::ProblemInstance;

/// Bound-activity threshold.
const ACT_TOL: f64 = 1e-9;
/// Ridge added to the KKT system when `xᵀx` is singular.
const KKT_RIDGE: f64 = 1e-12;

/// Solution of the primal problem at a fixed `x`, including multipliers.
#[derive(Debug, Clone)]
pub struct PrimalSolution {
    /// Optimal weights, K×N, columns on the simplex.
    pub theta: Array2<f64>,
    /// Multiplier of each sample's simplex equality constraint (free sign).
    pub lambda: Vec<f64>,
    /// Multipliers of the nonnegativity bounds, K×N, `≥ 0`.
    pub mu: Array2<f64>,
    /// `Σ_i ‖y_i − x θ_i‖²` at the optimum.
    pub objective: f64,
}

/// Solves the primal problem at `x_fixed`. The value is a global upper bound
/// for the full problem since `x` is pinned.
pub fn solve_primal(instance: &ProblemInstance, x_fixed: &Array2<f64>) -> Result<PrimalSolution> {
    let (m, n) = instance.y.dim();
    let k = instance.k;
    if x_fixed.nrows() != m || x_fixed.ncols() != k {
        return Err(Error::DimensionMismatch(format!(
            "x must be {}x{}, got {}x{}",
            m,
            k,
            x_fixed.nrows(),
            x_fixed.ncols()
        )));
    }
    if x_fixed.iter().any(|v| !v.is_finite()) {
        return Err(Error::ContractViolation("x must be finite".into()));
    }

    let xtx = x_fixed.t().dot(x_fixed); // K×K
    let mut theta = Array2::zeros((k, n));
    let mut lambda = vec![0.0; n];
    let mut mu = Array2::zeros((k, n));
    let mut objective = 0.0;

    for i in 0..n {
        let yi = instance.y.column(i);
        // f(θ) = θ'(x'x)θ − 2(x'y_i)'θ + y_i'y_i
        let xty = x_fixed.t().dot(&yi);
        let c: Vec<f64> = xty.iter().map(|v| -2.0 * v).collect();
        let (ti, li, mi) = solve_sample(&xtx, &c)?;
        for kk in 0..k {
            theta[[kk, i]] = ti[kk];
            mu[[kk, i]] = mi[kk];
        }
        lambda[i] = li;
        let residual = &yi.to_owned() - &x_fixed.dot(&ndarray::Array1::from(ti));
        objective += residual.iter().map(|r| r * r).sum::<f64>();
    }

    Ok(PrimalSolution { theta, lambda, mu, objective })
}

/// Solves the equality-constrained subproblem restricted to `free`:
/// `2A_FF θ_F − λ 1 = −c_F`, `Σ θ_F = 1`. Falls back to a ridged system when
/// the KKT matrix is singular.
fn eqp_solve(a: &Array2<f64>, c: &[f64], free: &[usize]) -> (Vec<f64>, f64) {
    let f = free.len();
    let dim = f + 1;
    let mut kkt = vec![vec![0.0; dim]; dim];
    let mut rhs = vec![0.0; dim];
    for (r, &kr) in free.iter().enumerate() {
        for (s, &ks) in free.iter().enumerate() {
            kkt[r][s] = 2.0 * a[[kr, ks]];
        }
        kkt[r][f] = -1.0;
        rhs[r] = -c[kr];
    }
    for s in 0..f {
        kkt[f][s] = 1.0;
    }
    rhs[f] = 1.0;

    let solution = solve_dense(&kkt, &rhs, 1e-12).unwrap_or_else(|| {
        let mut ridged = kkt.clone();
        for r in 0..f {
            ridged[r][r] += KKT_RIDGE;
        }
        solve_dense(&ridged, &rhs, 0.0).expect("ridged KKT system is nonsingular")
    });
    (solution[..f].to_vec(), solution[f])
}

/// Active-set loop for one sample: minimize `θ'Aθ + c'θ` on the simplex.
/// Returns `(θ, λ, μ)`.
fn solve_sample(a: &Array2<f64>, c: &[f64]) -> Result<(Vec<f64>, f64, Vec<f64>)> {
    let k = c.len();
    let mut theta = vec![1.0 / k as f64; k];
    let mut active = vec![false; k];
    let max_iters = 20 * (k + 1) * (k + 1);

    for _ in 0..max_iters {
        let free: Vec<usize> = (0..k).filter(|&j| !active[j]).collect();
        debug_assert!(!free.is_empty());
        let (theta_free, lam) = eqp_solve(a, c, &free);

        if theta_free.iter().all(|&v| v >= -ACT_TOL) {
            for (&j, &v) in free.iter().zip(&theta_free) {
                theta[j] = v.max(0.0);
            }
            // Multipliers on the active set from stationarity.
            let grad: Vec<f64> = (0..k)
                .map(|r| 2.0 * (0..k).map(|s| a[[r, s]] * theta[s]).sum::<f64>() + c[r])
                .collect();
            let mut mu = vec![0.0; k];
            let mut worst: Option<(usize, f64)> = None;
            for j in 0..k {
                if active[j] {
                    mu[j] = grad[j] - lam;
                    if mu[j] < -ACT_TOL && worst.map_or(true, |(_, w)| mu[j] < w) {
                        worst = Some((j, mu[j]));
                    }
                }
            }
            match worst {
                None => return Ok((theta, lam, mu)),
                Some((j, _)) => {
                    // Ties already break to the lowest index: strictly-less
                    // comparison above keeps the first minimizer.
                    active[j] = false;
                }
            }
        } else {
            // Step toward the subproblem solution until a bound blocks.
            let mut alpha = 1.0f64;
            let mut blocker = None;
            for (&j, &target) in free.iter().zip(&theta_free) {
                if target < theta[j] {
                    let step = theta[j] / (theta[j] - target);
                    if step < alpha - 1e-15 {
                        alpha = step;
                        blocker = Some(j);
                    }
                }
            }
            for (&j, &target) in free.iter().zip(&theta_free) {
                theta[j] += alpha * (target - theta[j]);
            }
            match blocker {
                Some(j) => {
                    theta[j] = 0.0;
                    active[j] = true;
                }
                None => {
                    // Degenerate: subproblem point reached despite a negative
                    // component within tolerance; clamp and re-loop.
                    for t in theta.iter_mut() {
                        *t = t.max(0.0);
                    }
                }
            }
        }
    }
    Err(Error::ContractViolation(
        "active-set iteration failed to converge on a sample".into(),
    ))
}

/// Stationarity residual `‖2xᵀxθ_i − 2xᵀy_i − λ_i·1 − μ_i‖∞` per sample;
/// mainly for tests and debug assertions.
pub fn stationarity_residual(
    x: &Array2<f64>,
    y_i: &ArrayView1<f64>,
    theta_i: &ArrayView1<f64>,
    lambda_i: f64,
    mu_i: &ArrayView1<f64>,
) -> f64 {
    let xtx = x.t().dot(x);
    let grad = xtx.dot(theta_i).mapv(|v| 2.0 * v) - x.t().dot(y_i).mapv(|v| 2.0 * v);
    grad.iter()
        .zip(mu_i.iter())
        .map(|(g, m)| (g - lambda_i - m).abs())
        .fold(0.0, f64::max)
}
