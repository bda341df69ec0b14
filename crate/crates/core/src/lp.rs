//! Dense two-phase simplex solver for small linear programs.
//!
//! Bland's rule throughout: entering variable is the lowest-index column with
//! a negative reduced cost, leaving variable breaks ratio ties by the lowest
//! basic-variable index. That rules out cycling and makes the solver a pure
//! function of its input bytes.

use crate::error::{Error, Result};

/// Default pivot/feasibility tolerance.
pub const LP_TOL: f64 = 1e-7;

const PIVOT_TOL: f64 = 1e-9;
const RATIO_TIE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Le,
    Ge,
    Eq,
}

#[derive(Debug, Clone)]
pub struct LpRow {
    pub coeffs: Vec<f64>,
    pub sense: Sense,
    pub rhs: f64,
}

/// A small dense LP: minimize `objective · v` subject to rows and per-variable
/// bounds (`±inf` for unbounded sides).
#[derive(Debug, Clone)]
pub struct LinearProgram {
    pub objective: Vec<f64>,
    pub rows: Vec<LpRow>,
    pub bounds: Vec<(f64, f64)>,
    pub names: Vec<String>,
}

impl LinearProgram {
    /// An LP over `num_vars` free variables with zero objective and no rows.
    pub fn new(num_vars: usize) -> Self {
        Self {
            objective: vec![0.0; num_vars],
            rows: Vec::new(),
            bounds: vec![(f64::NEG_INFINITY, f64::INFINITY); num_vars],
            names: (0..num_vars).map(|j| format!("v{j}")).collect(),
        }
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn add_row(&mut self, coeffs: Vec<f64>, sense: Sense, rhs: f64) {
        debug_assert_eq!(coeffs.len(), self.num_vars());
        self.rows.push(LpRow { coeffs, sense, rhs });
    }

    fn validate(&self) -> Result<()> {
        if self.num_vars() == 0 {
            return Err(Error::ContractViolation("LP must have at least one variable".into()));
        }
        if self.objective.iter().any(|c| !c.is_finite()) {
            return Err(Error::ContractViolation("LP objective must be finite".into()));
        }
        for (idx, row) in self.rows.iter().enumerate() {
            if row.coeffs.len() != self.num_vars() {
                return Err(Error::ContractViolation(format!(
                    "row {idx} has {} coefficients, expected {}",
                    row.coeffs.len(),
                    self.num_vars()
                )));
            }
            if row.coeffs.iter().any(|c| !c.is_finite()) || !row.rhs.is_finite() {
                return Err(Error::ContractViolation(format!("row {idx} has non-finite data")));
            }
        }
        for (j, &(lo, hi)) in self.bounds.iter().enumerate() {
            if lo.is_nan() || hi.is_nan() || lo > hi {
                return Err(Error::ContractViolation(format!("variable {j} has invalid bounds")));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Debug, Clone)]
pub struct LpResult {
    pub status: LpStatus,
    /// Values of the original variables; empty unless `status == Optimal`.
    pub point: Vec<f64>,
    pub objective: f64,
}

/// How one original variable maps into standard-form (nonnegative) variables.
enum VarMap {
    /// `v = std[pos] − std[neg]` (free variable).
    Split { pos: usize, neg: usize },
    /// `v = base + sign · std[idx]`.
    Shifted { idx: usize, base: f64, sign: f64 },
}

struct Tableau {
    /// `rows × (cols + 1)`; last column is the rhs.
    body: Vec<Vec<f64>>,
    basis: Vec<usize>,
    num_structural: usize,
    first_artificial: usize,
    cols: usize,
}

impl Tableau {
    fn rhs(&self, i: usize) -> f64 {
        self.body[i][self.cols]
    }

    fn pivot(&mut self, row: usize, col: usize) {
        let piv = self.body[row][col];
        let inv = 1.0 / piv;
        for v in self.body[row].iter_mut() {
            *v *= inv;
        }
        let pivot_row = self.body[row].clone();
        for (i, r) in self.body.iter_mut().enumerate() {
            if i == row {
                continue;
            }
            let factor = r[col];
            if factor == 0.0 {
                continue;
            }
            for (v, p) in r.iter_mut().zip(&pivot_row) {
                *v -= factor * p;
            }
            r[col] = 0.0; // exact after elimination
        }
        self.basis[row] = col;
    }

    /// Reduced costs `c_j − c_B B⁻¹ A_j`, recomputed from scratch.
    fn reduced_costs(&self, costs: &[f64]) -> Vec<f64> {
        let mut r = costs.to_vec();
        for (i, &b) in self.basis.iter().enumerate() {
            let cb = costs[b];
            if cb == 0.0 {
                continue;
            }
            for j in 0..self.cols {
                r[j] -= cb * self.body[i][j];
            }
        }
        r
    }

    /// One simplex phase. `banned` columns never enter. Returns `false` on
    /// unboundedness.
    fn run_phase(&mut self, costs: &[f64], ban_artificials: bool) -> bool {
        loop {
            let reduced = self.reduced_costs(costs);
            // Bland: lowest-index eligible column.
            let entering = (0..self.cols).find(|&j| {
                if ban_artificials && j >= self.first_artificial {
                    return false;
                }
                reduced[j] < -PIVOT_TOL
            });
            let Some(col) = entering else {
                return true;
            };
            let mut leave: Option<(usize, f64)> = None;
            for i in 0..self.body.len() {
                let a = self.body[i][col];
                if a > PIVOT_TOL {
                    let ratio = self.rhs(i) / a;
                    match leave {
                        None => leave = Some((i, ratio)),
                        Some((best_i, best)) => {
                            if ratio < best - RATIO_TIE_TOL
                                || (ratio <= best + RATIO_TIE_TOL
                                    && self.basis[i] < self.basis[best_i])
                            {
                                leave = Some((i, ratio.min(best)));
                            }
                        }
                    }
                }
            }
            let Some((row, _)) = leave else {
                return false;
            };
            self.pivot(row, col);
        }
    }
}

/// Solves a general small LP. Statuses cover infeasible and unbounded inputs;
/// an `Err` is returned only for malformed programs.
pub fn solve_lp(lp: &LinearProgram) -> Result<LpResult> {
    lp.validate()?;

    // Map original variables onto nonnegative standard-form variables.
    let mut var_map = Vec::with_capacity(lp.num_vars());
    let mut num_structural = 0usize;
    let mut extra_upper_rows: Vec<(usize, f64)> = Vec::new(); // (std idx, ub)
    for &(lo, hi) in &lp.bounds {
        match (lo.is_finite(), hi.is_finite()) {
            (false, false) => {
                var_map.push(VarMap::Split { pos: num_structural, neg: num_structural + 1 });
                num_structural += 2;
            }
            (true, _) => {
                if hi.is_finite() {
                    extra_upper_rows.push((num_structural, hi - lo));
                }
                var_map.push(VarMap::Shifted { idx: num_structural, base: lo, sign: 1.0 });
                num_structural += 1;
            }
            (false, true) => {
                var_map.push(VarMap::Shifted { idx: num_structural, base: hi, sign: -1.0 });
                num_structural += 1;
            }
        }
    }

    // Rewrite each row over the standard variables.
    let mut std_rows: Vec<(Vec<f64>, Sense, f64)> = Vec::with_capacity(lp.rows.len());
    for row in &lp.rows {
        let mut coeffs = vec![0.0; num_structural];
        let mut rhs = row.rhs;
        for (j, &c) in row.coeffs.iter().enumerate() {
            if c == 0.0 {
                continue;
            }
            match var_map[j] {
                VarMap::Split { pos, neg } => {
                    coeffs[pos] += c;
                    coeffs[neg] -= c;
                }
                VarMap::Shifted { idx, base, sign } => {
                    coeffs[idx] += c * sign;
                    rhs -= c * base;
                }
            }
        }
        std_rows.push((coeffs, row.sense, rhs));
    }
    for &(idx, ub) in &extra_upper_rows {
        let mut coeffs = vec![0.0; num_structural];
        coeffs[idx] = 1.0;
        std_rows.push((coeffs, Sense::Le, ub));
    }

    // Normalize rhs signs, then attach slack/artificial columns.
    let m = std_rows.len();
    let mut num_slack = 0usize;
    let mut num_artificial = 0usize;
    for (coeffs, sense, rhs) in std_rows.iter_mut() {
        if *rhs < 0.0 {
            for c in coeffs.iter_mut() {
                *c = -*c;
            }
            *rhs = -*rhs;
            *sense = match *sense {
                Sense::Le => Sense::Ge,
                Sense::Ge => Sense::Le,
                Sense::Eq => Sense::Eq,
            };
        }
        match sense {
            Sense::Le => num_slack += 1,
            Sense::Ge => {
                num_slack += 1;
                num_artificial += 1;
            }
            Sense::Eq => num_artificial += 1,
        }
    }

    let first_slack = num_structural;
    let first_artificial = num_structural + num_slack;
    let cols = first_artificial + num_artificial;
    let mut body = vec![vec![0.0; cols + 1]; m];
    let mut basis = vec![0usize; m];
    let mut next_slack = first_slack;
    let mut next_art = first_artificial;
    for (i, (coeffs, sense, rhs)) in std_rows.iter().enumerate() {
        body[i][..num_structural].copy_from_slice(coeffs);
        body[i][cols] = *rhs;
        match sense {
            Sense::Le => {
                body[i][next_slack] = 1.0;
                basis[i] = next_slack;
                next_slack += 1;
            }
            Sense::Ge => {
                body[i][next_slack] = -1.0;
                next_slack += 1;
                body[i][next_art] = 1.0;
                basis[i] = next_art;
                next_art += 1;
            }
            Sense::Eq => {
                body[i][next_art] = 1.0;
                basis[i] = next_art;
                next_art += 1;
            }
        }
    }

    let mut tab = Tableau { body, basis, num_structural, first_artificial, cols };

    let rhs_scale = tab
        .body
        .iter()
        .map(|r| r[tab.cols].abs())
        .fold(0.0f64, f64::max);
    let feas_tol = LP_TOL * (1.0 + rhs_scale);

    // Phase 1: minimize the sum of artificial variables.
    if num_artificial > 0 {
        let mut phase1_costs = vec![0.0; tab.cols];
        for c in phase1_costs.iter_mut().skip(first_artificial) {
            *c = 1.0;
        }
        let bounded = tab.run_phase(&phase1_costs, false);
        debug_assert!(bounded, "phase 1 is bounded below by zero");
        let infeas: f64 = tab
            .basis
            .iter()
            .enumerate()
            .filter(|(_, &b)| b >= first_artificial)
            .map(|(i, _)| tab.rhs(i))
            .sum();
        if infeas > feas_tol {
            return Ok(LpResult { status: LpStatus::Infeasible, point: Vec::new(), objective: 0.0 });
        }
        // Drive remaining artificials out of the basis; a row with no real
        // coefficients left is redundant and gets zeroed.
        for i in 0..m {
            if tab.basis[i] < first_artificial {
                continue;
            }
            let col = (0..first_artificial).find(|&j| tab.body[i][j].abs() > PIVOT_TOL);
            match col {
                Some(j) => tab.pivot(i, j),
                None => {
                    for v in tab.body[i].iter_mut() {
                        *v = 0.0;
                    }
                }
            }
        }
    }

    // Phase 2 over the real objective.
    let mut phase2_costs = vec![0.0; tab.cols];
    let mut obj_offset = 0.0;
    for (j, &c) in lp.objective.iter().enumerate() {
        match var_map[j] {
            VarMap::Split { pos, neg } => {
                phase2_costs[pos] += c;
                phase2_costs[neg] -= c;
            }
            VarMap::Shifted { idx, base, sign } => {
                phase2_costs[idx] += c * sign;
                obj_offset += c * base;
            }
        }
    }
    if !tab.run_phase(&phase2_costs, true) {
        return Ok(LpResult { status: LpStatus::Unbounded, point: Vec::new(), objective: 0.0 });
    }

    let mut std_point = vec![0.0; tab.num_structural];
    for (i, &b) in tab.basis.iter().enumerate() {
        if b < tab.num_structural {
            std_point[b] = tab.rhs(i);
        }
    }
    let point: Vec<f64> = var_map
        .iter()
        .map(|vm| match *vm {
            VarMap::Split { pos, neg } => std_point[pos] - std_point[neg],
            VarMap::Shifted { idx, base, sign } => base + sign * std_point[idx],
        })
        .collect();
    let objective: f64 = obj_offset
        + phase2_costs
            .iter()
            .take(tab.num_structural)
            .zip(&std_point)
            .map(|(c, v)| c * v)
            .sum::<f64>();
    Ok(LpResult { status: LpStatus::Optimal, point, objective })
}
