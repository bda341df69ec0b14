//! Branch-and-bound driver alternating the primal problem and the relaxed
//! dual problems.
//!
//! Each iteration solves the primal at the current node's `x` (upper bound),
//! builds the qualifying-constraint arrangement at that point, enumerates its
//! sign regions, solves one relaxed dual LP per region over the path from the
//! root (lower bounds), queues surviving children, then moves to the globally
//! lowest outstanding bound. The lower bound never decreases because the
//! popped key is the minimum over all outstanding bounds and children only
//! add constraints on top of their parent's LP.

use std::collections::BTreeMap;
use std::time::{Duration, Instant};

use ndarray::Array2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::arrangement::{enumerate_regions, Arrangement, SignVector};
use crate::error::{Error, Result};
use crate::lagrangian::{assemble_relaxed_dual, deep_point_in_region, NodeCutData, PathStep};
use crate::linalg::stack_columns;
use crate::lp::{solve_lp, LpStatus};
use crate::problem::{FactorPair, ProblemInstance, SolverConfig};
use crate::qp::solve_primal;

/// Seed for the arrangement root search; fixed so identical inputs explore
/// identical region orders regardless of worker count.
const ROOT_SEED: u64 = 0x0a11_fade;

/// Fraction of the way from a node's relaxed-dual vertex toward its region's
/// deep interior point at which the next primal is linearized.
const INTERIOR_STEP: f64 = 0.5;

/// Seed for the per-node tilt that picks a generic interior point.
const TILT_SEED: u64 = 0x7e1e_7011;

/// One node of the branch-and-bound tree.
#[derive(Debug, Clone)]
pub struct BnbNode {
    pub id: u64,
    pub parent: Option<u64>,
    /// Primal solve artifacts at this node's `x_opt`; filled when the node is
    /// visited.
    pub cut_data: Option<NodeCutData>,
    /// Region label (KN bits, sample-major); `None` for the root.
    pub region_label: Option<Vec<bool>>,
    /// Relaxed-dual optimizer inherited at creation; the primal linearization
    /// point once visited.
    pub x_opt: Array2<f64>,
    pub rlbd_value: f64,
    /// Iteration at which the node was created.
    pub created_at: u64,
}

/// Candidate ordering: lowest bound first; ties pop the newest node
/// (deepest dive) so fresh cuts keep accumulating along one path instead of
/// cycling through equal-bound siblings that lack each other's cuts.
#[derive(Debug, Clone, Copy, PartialEq)]
struct CandKey {
    bound: f64,
    created_at: u64,
    id: u64,
}

impl Eq for CandKey {}

impl Ord for CandKey {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.bound
            .total_cmp(&other.bound)
            .then(self.created_at.cmp(&other.created_at))
            .then(self.id.cmp(&other.id))
    }
}

impl PartialOrd for CandKey {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

/// Per-iteration record.
#[derive(Debug, Clone, Serialize)]
pub struct HistoryEntry {
    pub t: u64,
    pub pubd: f64,
    pub rlbd: f64,
    pub node: u64,
    pub regions: usize,
    pub ms: u64,
}

/// Cumulative component times.
#[derive(Debug, Clone, Copy, Default)]
pub struct Timings {
    pub primal: Duration,
    pub pre: Duration,
    pub uri: Duration,
    pub dual: Duration,
    pub total: Duration,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SolveStatus {
    Converged,
    IterationLimit,
    TimeLimit,
}

/// Mutable solver state across iterations.
#[derive(Debug)]
pub struct SolveState {
    pub nodes: Vec<BnbNode>,
    candidates: BTreeMap<CandKey, u64>,
    pub current: Option<u64>,
    pub pubd: f64,
    pub rlbd: f64,
    pub incumbent: Option<FactorPair>,
    pub t: u64,
    pub history: Vec<HistoryEntry>,
    pub timings: Timings,
}

impl SolveState {
    pub fn gap(&self) -> f64 {
        self.pubd - self.rlbd
    }

    pub fn open_nodes(&self) -> usize {
        self.candidates.len()
    }
}

/// Final outcome of a solve.
#[derive(Debug, Clone)]
pub struct SolveReport {
    pub status: SolveStatus,
    pub best: FactorPair,
    pub pubd: f64,
    pub rlbd: f64,
    pub gap: f64,
    pub iterations: u64,
    pub history: Vec<HistoryEntry>,
    pub timings: Timings,
}

#[derive(Serialize)]
struct TimingsDoc {
    primal: u64,
    pre: u64,
    uri: u64,
    dual: u64,
    total: u64,
}

#[derive(Serialize)]
struct ReportDoc<'a> {
    status: SolveStatus,
    pubd: Option<f64>,
    rlbd: Option<f64>,
    gap: Option<f64>,
    iterations: u64,
    x: Vec<Vec<f64>>,
    theta: Vec<Vec<f64>>,
    history: &'a [HistoryEntry],
    timings: TimingsDoc,
}

fn matrix_rows(m: &Array2<f64>) -> Vec<Vec<f64>> {
    m.rows().into_iter().map(|r| r.to_vec()).collect()
}

fn finite_or_none(v: f64) -> Option<f64> {
    v.is_finite().then_some(v)
}

impl SolveReport {
    /// JSON document with a stable field order; non-finite bounds become
    /// `null`, durations are integral milliseconds.
    pub fn to_json_value(&self) -> serde_json::Value {
        let doc = ReportDoc {
            status: self.status,
            pubd: finite_or_none(self.pubd),
            rlbd: finite_or_none(self.rlbd),
            gap: finite_or_none(self.gap),
            iterations: self.iterations,
            x: matrix_rows(&self.best.x),
            theta: matrix_rows(&self.best.theta),
            history: &self.history,
            timings: TimingsDoc {
                primal: self.timings.primal.as_millis() as u64,
                pre: self.timings.pre.as_millis() as u64,
                uri: self.timings.uri.as_millis() as u64,
                dual: self.timings.dual.as_millis() as u64,
                total: self.timings.total.as_millis() as u64,
            },
        };
        serde_json::to_value(doc).expect("report serialization cannot fail")
    }
}

/// Creates the initial state: a root node at a random feasible `x` drawn
/// uniformly in the box and rescaled so `‖x‖₁ = 0.9 P`.
pub fn init(instance: &ProblemInstance, config: &SolverConfig) -> Result<SolveState> {
    config.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(instance.seed);
    let (m, k) = (instance.m(), instance.k);
    let mut x0 =
        Array2::from_shape_fn((m, k), |_| (rng.random::<f64>() * 2.0 - 1.0) * instance.p);
    let l1: f64 = x0.iter().map(|v| v.abs()).sum();
    if l1 > 0.0 {
        let scale = 0.9 * instance.p / l1;
        x0.mapv_inplace(|v| v * scale);
    }
    let root = BnbNode {
        id: 0,
        parent: None,
        cut_data: None,
        region_label: None,
        x_opt: x0,
        rlbd_value: f64::NEG_INFINITY,
        created_at: 0,
    };
    Ok(SolveState {
        nodes: vec![root],
        candidates: BTreeMap::new(),
        current: Some(0),
        pubd: f64::INFINITY,
        rlbd: f64::NEG_INFINITY,
        incumbent: None,
        t: 1,
        history: Vec::new(),
        timings: Timings::default(),
    })
}

fn path_chain(nodes: &[BnbNode], id: u64) -> Vec<u64> {
    let mut chain = Vec::new();
    let mut walk = Some(id);
    while let Some(node) = walk {
        chain.push(node);
        walk = nodes[node as usize].parent;
    }
    chain.reverse(); // root → id
    chain
}

/// Path steps for the chain: each visited node's cut data paired with the
/// next node's region label.
fn chain_steps<'a>(nodes: &'a [BnbNode], chain: &[u64]) -> Vec<PathStep<'a>> {
    chain
        .windows(2)
        .map(|pair| {
            let cuts = nodes[pair[0] as usize]
                .cut_data
                .as_ref()
                .expect("visited nodes carry cut data");
            let theta_b = nodes[pair[1] as usize]
                .region_label
                .as_deref()
                .expect("non-root nodes carry a region label");
            PathStep { cuts, theta_b }
        })
        .collect()
}

/// Runs one full iteration: primal solve and bound update at the current
/// node, qualifying-constraint construction and filtering, region
/// enumeration, one relaxed dual LP per region, child insertion with
/// fathoming, and selection of the next node.
pub fn iterate(
    state: &mut SolveState,
    instance: &ProblemInstance,
    config: &SolverConfig,
) -> Result<()> {
    let t = state.t;
    let current_id = state
        .current
        .ok_or_else(|| Error::ContractViolation("iterate called with no open node".into()))?;
    let iter_start = Instant::now();
    let chain = path_chain(&state.nodes, current_id);

    // Primal problem at the node's relaxed-dual optimizer: global upper
    // bound and incumbent update.
    let clock = Instant::now();
    let x_vertex = state.nodes[current_id as usize].x_opt.clone();
    let primal_vertex = solve_primal(instance, &x_vertex)?;
    state.timings.primal += clock.elapsed();
    if primal_vertex.objective < state.pubd {
        state.pubd = primal_vertex.objective;
        state.incumbent = Some(FactorPair::new(x_vertex.clone(), primal_vertex.theta.clone())?);
    }

    // Linearization point for the node's cuts. The relaxed-dual vertex often
    // lies on a shared region boundary; sibling subtrees linearized at the
    // same boundary point rebuild identical cuts and the equal-bound frontier
    // multiplies without the lower bound moving. Stepping a fraction of the
    // way toward a deep interior point of the node's region keeps the cuts
    // local to the vertex while separating the siblings.
    let clock = Instant::now();
    let mut x_lin = x_vertex.clone();
    let mut primal_lin = primal_vertex;
    if chain.len() >= 2 {
        let steps = chain_steps(&state.nodes, &chain);
        let mk = instance.m() * instance.k;
        let mut tilt_rng = ChaCha8Rng::seed_from_u64(TILT_SEED ^ current_id.wrapping_mul(0x9e37_79b9));
        let tilt: Vec<f64> = (0..mk).map(|_| tilt_rng.random::<f64>() * 2.0 - 1.0).collect();
        if let Some(mut deep) =
            deep_point_in_region(instance, &steps, instance.p, config.zero_tau, &tilt)?
        {
            let l1: f64 = deep.iter().map(|v| v.abs()).sum();
            if l1 > instance.p {
                let scale = instance.p / l1;
                deep.mapv_inplace(|v| v * scale);
            }
            let stepped = &x_vertex + &(&deep - &x_vertex) * INTERIOR_STEP;
            let moved = stepped
                .iter()
                .zip(x_vertex.iter())
                .any(|(a, b)| (a - b).abs() > 1e-12);
            if moved {
                let primal_clock = Instant::now();
                let primal_step = solve_primal(instance, &stepped)?;
                state.timings.primal += primal_clock.elapsed();
                if primal_step.objective < state.pubd {
                    state.pubd = primal_step.objective;
                    state.incumbent =
                        Some(FactorPair::new(stepped.clone(), primal_step.theta.clone())?);
                }
                x_lin = stepped;
                primal_lin = primal_step;
            }
        }
    }
    state.timings.dual += clock.elapsed();

    // Qualifying constraints and hyperplane filtering.
    let clock = Instant::now();
    let cut_data = NodeCutData::new(instance, x_lin.clone(), &primal_lin);
    let arrangement =
        Arrangement::from_affine_forms(&cut_data.qc, config.dedup_tau, config.zero_tau);
    state.nodes[current_id as usize].cut_data = Some(cut_data);
    state.timings.pre += clock.elapsed();

    // Unique region identification.
    let clock = Instant::now();
    let regions: Vec<SignVector> = if arrangement.is_empty() {
        vec![SignVector { bits: Vec::new() }]
    } else {
        let center = stack_columns(&x_lin);
        enumerate_regions(
            &arrangement.planes,
            &center,
            instance.p,
            config.interior_tau,
            ROOT_SEED,
        )?
    };
    let labels: Vec<Vec<bool>> = regions.iter().map(|r| r.expand(&arrangement)).collect();
    let num_duals = labels.len();
    state.timings.uri += clock.elapsed();

    // Relaxed dual problem for every region, in canonical region order.
    let clock = Instant::now();
    let results: Vec<Option<(f64, Array2<f64>)>> = {
        let prefix = chain_steps(&state.nodes, &chain);
        let current_cuts = state.nodes[current_id as usize]
            .cut_data
            .as_ref()
            .expect("cut data was just stored");

        labels
            .par_iter()
            .map(|bits| {
                let mut path = prefix.clone();
                path.push(PathStep { cuts: current_cuts, theta_b: bits });
                let rd = assemble_relaxed_dual(instance, &path, instance.p, config.zero_tau)
                    .ok()?;
                let res = solve_lp(&rd.lp).ok()?;
                if res.status != LpStatus::Optimal {
                    return None;
                }
                let (q, x) = rd.split_point(&res.point);
                Some((q, x))
            })
            .collect()
    };
    state.timings.dual += clock.elapsed();

    // Children that can still beat the incumbent by more than ε survive.
    for (bits, outcome) in labels.into_iter().zip(results) {
        let Some((bound, x_child)) = outcome else { continue };
        if bound < state.pubd - config.epsilon {
            let id = state.nodes.len() as u64;
            state.nodes.push(BnbNode {
                id,
                parent: Some(current_id),
                cut_data: None,
                region_label: Some(bits),
                x_opt: x_child,
                rlbd_value: bound,
                created_at: t,
            });
            state.candidates.insert(CandKey { bound, created_at: t, id }, id);
        }
    }

    // Bound to the lowest outstanding node; an empty pool means the search
    // space is exhausted to within ε. The popped key is capped at
    // PUBD − ε: fathomed subtrees are only certified to that level, so a
    // stale candidate popped after PUBD improved must not lift RLBD past it.
    match state.candidates.pop_first() {
        Some((key, id)) => {
            state.rlbd = state.rlbd.max(key.bound.min(state.pubd - config.epsilon));
            state.current = Some(id);
        }
        None => {
            state.rlbd = state.pubd;
            state.current = None;
        }
    }
    state.t += 1;
    state.history.push(HistoryEntry {
        t,
        pubd: state.pubd,
        rlbd: state.rlbd,
        node: current_id,
        regions: num_duals,
        ms: iter_start.elapsed().as_millis() as u64,
    });
    Ok(())
}

/// Runs the full loop to convergence or a limit. `progress` fires once per
/// iteration with the new history entry and the open-node count.
pub fn run_with_progress(
    instance: &ProblemInstance,
    config: &SolverConfig,
    mut progress: impl FnMut(&HistoryEntry, usize),
) -> Result<SolveReport> {
    config.validate()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.workers)
        .build()
        .map_err(|e| Error::InvalidInput(format!("cannot build worker pool: {e}")))?;

    let mut state = init(instance, config)?;
    let started = Instant::now();
    let status = loop {
        if state.gap() <= config.epsilon {
            break SolveStatus::Converged;
        }
        if state.t > config.max_iterations {
            break SolveStatus::IterationLimit;
        }
        if started.elapsed().as_secs_f64() > config.max_wall_seconds {
            break SolveStatus::TimeLimit;
        }
        pool.install(|| iterate(&mut state, instance, config))?;
        let entry = state.history.last().expect("iterate records history");
        progress(entry, state.candidates.len());
        if state.current.is_none() {
            // Candidate pool exhausted; rlbd was raised to pubd.
            break SolveStatus::Converged;
        }
    };
    state.timings.total = started.elapsed();

    let best = state.incumbent.clone().unwrap_or_else(|| {
        // No primal was ever solved (e.g. a zero-iteration run).
        let k = instance.k;
        FactorPair::new(
            state.nodes[0].x_opt.clone(),
            Array2::from_elem((k, instance.n()), 1.0 / k as f64),
        )
        .expect("uniform pair has consistent shapes")
    });
    Ok(SolveReport {
        status,
        best,
        pubd: state.pubd,
        rlbd: state.rlbd,
        gap: state.pubd - state.rlbd,
        iterations: state.t - 1,
        history: state.history,
        timings: state.timings,
    })
}

/// [`run_with_progress`] without a callback.
pub fn run(instance: &ProblemInstance, config: &SolverConfig) -> Result<SolveReport> {
    run_with_progress(instance, config, |_, _| {})
}
