//! Coded-storage allocation over neighborhoods.
//!
//! A data object is spread over a network of storage nodes so that any node
//! can rebuild it from its closed neighborhood. The minimal-storage allocation
//! is the fractional dominating set LP
//!
//! ```text
//! minimize 1ᵀx  subject to  A x ≥ 1,  0 ≤ x ≤ 1
//! ```
//!
//! where `A` is the adjacency matrix with unit diagonal. This crate provides
//! the graph model ([`graph`]), the instance and its queries ([`problem`]),
//! the distributed proximal-center solver running as per-node state machines
//! on a synchronous network ([`pcm`]), an exact simplex reference
//! ([`oracle`]), and a random-linear-coding recovery harness ([`coding`]).

pub mod coding;
pub mod error;
pub mod graph;
pub mod oracle;
pub mod pcm;
pub mod problem;

pub use coding::{disseminate, try_recover, CodedStore, RecoveryOutcome};
pub use error::{Error, Result};
pub use graph::StorageGraph;
pub use oracle::{solve_exact, solve_regularized, LpSolution, LpStatus, ORACLE_MAX_NODES};
pub use pcm::{
    dual_gradient, dual_value, inner_minimizer, iterations_for_epsilon, solve, AlphaMode, NodeState, RoundTrace,
    SolveOptions, SolveOutcome, SolverParams,
};
pub use problem::{optimum_bounds, Allocation, FdsInstance, OptimumBounds, TOL_FEAS};
