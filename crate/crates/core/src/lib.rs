//! Deterministic ε-global solver for sparse mixed-membership matrix
//! factorization.
//!
//! The problem: given an observation matrix `y` (features × samples), find a
//! sparse subtype matrix `x` and per-sample mixture weights `theta` (each
//! column on the probability simplex) minimizing `Σ_i ‖y_i − x θ_i‖²` subject
//! to `‖x‖₁ ≤ P`. The problem is biconvex, and this crate solves it to a
//! certified ε-global optimum with a Benders-style branch-and-bound scheme:
//! a convex primal problem over `theta` yields upper bounds, linearized
//! Lagrangian cuts restricted to sign regions of the qualifying-constraint
//! hyperplane arrangement yield lower bounds via small LPs.
//!
//! Module map:
//! - [`problem`]: instance data model, objective, feasibility, synthetic generator
//! - [`lp`] / [`qp`]: self-contained dense simplex LP and simplex-constrained QP solvers
//! - [`lagrangian`]: Lagrangian linearizations, qualifying constraints, relaxed dual assembly
//! - [`arrangement`]: hyperplane dedup and cell enumeration via sign vectors
//! - [`gop`]: the branch-and-bound driver with bound bookkeeping
//! - [`io`]: CSV matrices and JSON factor pairs / reports

pub use ndarray;

pub mod arrangement;
pub mod error;
pub mod gop;
pub mod io;
pub mod lagrangian;
pub mod linalg;
pub mod lp;
pub mod problem;
pub mod qp;

pub use error::{Error, Result};
pub use problem::{
    check_feasible, generate_instance, objective, FactorPair, ProblemInstance, SolverConfig,
};
