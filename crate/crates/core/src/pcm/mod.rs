//! Distributed proximal-center solver.
//!
//! The covering LP is regularized with `(δ/2)‖x‖²`, which makes its dual
//! smooth with gradient Lipschitz constant `L = (d_max+1)²/δ`. The dual is
//! then maximized by an accelerated projected gradient method whose updates
//! decompose over closed neighborhoods. Each node holds a [`NodeState`] and
//! exchanges two scalar broadcasts per round (one in round 0):
//!
//! 1. for `k ≥ 1`, broadcast `λ_i` and receive `λ_j` from neighbors;
//! 2. compute `x̂_i = P_[0,1]((Σ_{Ω_i} λ_j − 1)/δ)`;
//! 3. broadcast `x̂_i` and receive `x̂_j` from neighbors;
//! 4. update `z_i`, `μ_i`, `λ_i`, the averages `x̄_j` for `j ∈ Ω_i`, and the
//!    repaired allocation `x_i = x̄_i + [1 − Σ_{Ω_i} x̄_j]₊`.
//!
//! The repaired iterate `x^(k)` is feasible at every round and its objective
//! approaches the LP optimum at rate `O((d_max+1)³(1+1/δ)/k²) + δ/2`.

mod dual;
mod network;
mod node;

pub use dual::{dual_gradient, dual_minimizer, dual_value, lipschitz_constant};
pub use network::{Inboxes, Message, SyncNetwork};
pub use node::NodeState;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::StorageGraph;
use crate::problem::{Allocation, FdsInstance};

/// How the step size learns the degree bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AlphaMode {
    /// `α = δ/(2(d_max+1)²)` with the true maximum degree.
    #[default]
    Dmax,
    /// `α = δ/(2N²)`: nodes only know `N`, used in place of `d_max + 1`.
    NSubstitute,
}

impl AlphaMode {
    /// The value standing in for `d_max + 1` under this mode.
    pub fn degree_bound(self, g: &StorageGraph) -> usize {
        match self {
            AlphaMode::Dmax => g.d_max() + 1,
            AlphaMode::NSubstitute => g.n(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverParams {
    pub epsilon: f64,
    pub delta: f64,
    pub alpha: f64,
    /// Index of the final round; rounds `0..=max_rounds` are executed.
    pub max_rounds: u64,
    pub alpha_mode: AlphaMode,
}

impl SolverParams {
    /// Defaults for `inst`: `δ` from the instance, `α` from `mode`, and the
    /// round budget `K_ε` with the same degree bound the step size uses.
    pub fn for_instance(inst: &FdsInstance, epsilon: f64, mode: AlphaMode) -> Result<Self> {
        let bound = mode.degree_bound(inst.graph());
        let max_rounds = iterations_for_epsilon(bound - 1, epsilon)?;
        let delta = inst.delta();
        Ok(Self {
            epsilon,
            delta,
            alpha: delta / (2.0 * (bound * bound) as f64),
            max_rounds,
            alpha_mode: mode,
        })
    }

    pub fn with_max_rounds(mut self, max_rounds: u64) -> Self {
        self.max_rounds = max_rounds;
        self
    }

    pub fn with_alpha(mut self, alpha: f64) -> Self {
        self.alpha = alpha;
        self
    }

    /// Largest admissible step `δ/(2(d_max+1)²)`, i.e. `1/(2L)`.
    pub fn max_alpha(g: &StorageGraph, delta: f64) -> f64 {
        let d = (g.d_max() + 1) as f64;
        delta / (2.0 * d * d)
    }

    pub fn validate(&self, inst: &FdsInstance) -> Result<()> {
        if self.epsilon.is_nan() || self.epsilon <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "epsilon must be positive, got {}",
                self.epsilon
            )));
        }
        if self.delta != inst.delta() {
            return Err(Error::InvalidParameter(format!(
                "solver delta {} differs from instance delta {}",
                self.delta,
                inst.delta()
            )));
        }
        let cap = Self::max_alpha(inst.graph(), self.delta) + 1e-15;
        if !(self.alpha > 0.0 && self.alpha <= cap) {
            return Err(Error::InvalidParameter(format!(
                "step size {} outside (0, {cap}]",
                self.alpha
            )));
        }
        Ok(())
    }
}

/// Clamped closed-form minimizer `P_[0,1]((λ_sum − 1)/δ)`.
pub fn inner_minimizer(lambda_neighborhood_sum: f64, delta: f64) -> Result<f64> {
    if delta.is_nan() || delta <= 0.0 {
        return Err(Error::InvalidParameter(format!("delta must be positive, got {delta}")));
    }
    Ok(inner_minimizer_unchecked(lambda_neighborhood_sum, delta))
}

#[inline]
pub(crate) fn inner_minimizer_unchecked(lambda_sum: f64, delta: f64) -> f64 {
    ((lambda_sum - 1.0) / delta).clamp(0.0, 1.0)
}

/// Round budget `K_ε`: the smallest `K ≥ 0` with
/// `32(d_max+1)³(1+1/ε)/(K+1)² ≤ ε/2`, i.e.
/// `K = ⌈√(64(d_max+1)³(1+1/ε)/ε)⌉ − 1`.
pub fn iterations_for_epsilon(d_max: usize, epsilon: f64) -> Result<u64> {
    if !(epsilon > 0.0 && epsilon.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "epsilon must be positive, got {epsilon}"
        )));
    }
    let d = (d_max + 1) as f64;
    let gap = |k: u64| 32.0 * d.powi(3) * (1.0 + 1.0 / epsilon) / ((k + 1) as f64).powi(2);
    let target = (64.0 * d.powi(3) * (1.0 + 1.0 / epsilon) / epsilon).sqrt();
    let mut k = (target.ceil() as u64).saturating_sub(1);
    // Absorb rounding in the square root.
    while k > 0 && gap(k - 1) <= epsilon / 2.0 {
        k -= 1;
    }
    while gap(k) > epsilon / 2.0 {
        k += 1;
    }
    Ok(k)
}

/// One row of the convergence trace.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoundTrace {
    pub round: u64,
    /// `1ᵀx^(k)`.
    pub objective: f64,
    pub min_slack: f64,
    /// `‖e^(k)‖`, the norm of the feasibility repair.
    pub repair_norm: f64,
    /// Scalar broadcasts per node during this round.
    pub msgs_per_node: u64,
    /// Scalar broadcasts per node up to and including this round.
    pub msgs_per_node_cum: u64,
    /// `(1ᵀx^(k) − 1ᵀx*)/1ᵀx*` when a reference optimum was supplied.
    pub rel_error: Option<f64>,
}

#[derive(Debug, Clone, Copy, Default)]
pub struct SolveOptions {
    /// `1ᵀx*` used to fill [`RoundTrace::rel_error`].
    pub reference_optimum: Option<f64>,
    /// Experiments only: stop once the relative error drops to this value.
    /// Requires `reference_optimum`.
    pub stop_at_rel_error: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct SolveOutcome {
    /// Final repaired iterate `x^(K)`.
    pub allocation: Allocation,
    /// Final running average `x̄^(K)`.
    pub averaged: Allocation,
    /// Final dual iterate `λ^(K+1)`.
    pub lambda: Vec<f64>,
    pub trace: Vec<RoundTrace>,
    pub broadcasts_per_node: Vec<u64>,
    pub deliveries: u64,
    pub locality_violations: u64,
}

impl SolveOutcome {
    pub fn rounds(&self) -> usize {
        self.trace.len()
    }

    pub fn final_round(&self) -> &RoundTrace {
        self.trace.last().expect("at least one round is always executed")
    }
}

/// Runs the distributed solver for rounds `0..=params.max_rounds`.
pub fn solve(inst: &FdsInstance, params: &SolverParams) -> Result<SolveOutcome> {
    solve_with(inst, params, SolveOptions::default(), |_, _| {})
}

/// As [`solve`], calling `observe(k, states)` after every round.
pub fn solve_with(
    inst: &FdsInstance,
    params: &SolverParams,
    options: SolveOptions,
    mut observe: impl FnMut(u64, &[NodeState]),
) -> Result<SolveOutcome> {
    params.validate(inst)?;
    if options.stop_at_rel_error.is_some() && options.reference_optimum.is_none() {
        return Err(Error::InvalidParameter("early stop needs a reference optimum".into()));
    }
    let g = inst.graph();
    let n = g.n();
    let mut nodes: Vec<NodeState> = (0..n).map(|i| NodeState::new(i, g.closed_neighborhood(i))).collect();
    let mut net = SyncNetwork::new(g);
    let mut trace = Vec::with_capacity(params.max_rounds.min(1 << 20) as usize + 1);
    let mut outgoing = vec![None; n];
    let mut x = vec![0.0; n];

    for k in 0..=params.max_rounds {
        let before = net.uniform_broadcasts().unwrap_or_else(|| max_of(net.broadcasts()));

        for (slot, node) in outgoing.iter_mut().zip(&nodes) {
            *slot = node.lambda_broadcast(k);
        }
        let inboxes = net.exchange(&outgoing);
        let mut rejected = 0;
        for (i, node) in nodes.iter_mut().enumerate() {
            rejected += u64::from(!node.receive_lambda(inboxes.get(i)));
        }

        for (slot, node) in outgoing.iter_mut().zip(nodes.iter_mut()) {
            *slot = Some(node.compute_x_hat(params.delta));
        }
        let inboxes = net.exchange(&outgoing);
        for (i, node) in nodes.iter_mut().enumerate() {
            rejected += u64::from(!node.receive_x_hat(inboxes.get(i)));
            node.complete_round(k, params.alpha);
        }
        for _ in 0..rejected {
            net.report_violation();
        }

        for node in &nodes {
            if let Some(what) = node.non_finite_field() {
                return Err(Error::NumericFailure {
                    round: k,
                    node: node.id(),
                    what,
                });
            }
        }
        observe(k, &nodes);

        for (xi, node) in x.iter_mut().zip(&nodes) {
            *xi = node.x();
        }
        let row = observe_round(&x, &nodes, k, before, &net, options.reference_optimum);
        let stop = matches!((row.rel_error, options.stop_at_rel_error), (Some(e), Some(t)) if e <= t);
        trace.push(row);
        if stop {
            break;
        }
    }

    Ok(SolveOutcome {
        allocation: Allocation(x),
        averaged: Allocation(nodes.iter().map(NodeState::x_bar).collect()),
        lambda: nodes.iter().map(NodeState::lambda).collect(),
        trace,
        broadcasts_per_node: net.broadcasts().to_vec(),
        deliveries: net.deliveries(),
        locality_violations: net.locality_violations(),
    })
}

fn max_of(values: &[u64]) -> u64 {
    values.iter().copied().max().unwrap_or(0)
}

fn observe_round(
    x: &[f64],
    nodes: &[NodeState],
    k: u64,
    broadcasts_before: u64,
    net: &SyncNetwork,
    reference: Option<f64>,
) -> RoundTrace {
    let objective: f64 = x.iter().sum();
    let min_slack = nodes
        .iter()
        .map(|s| s.omega().iter().map(|&j| x[j]).sum::<f64>() - 1.0)
        .fold(f64::INFINITY, f64::min);
    let repair_norm = nodes.iter().map(|s| s.repair() * s.repair()).sum::<f64>().sqrt();
    let cum = net.uniform_broadcasts().unwrap_or_else(|| max_of(net.broadcasts()));
    RoundTrace {
        round: k,
        objective,
        min_slack,
        repair_norm,
        msgs_per_node: cum - broadcasts_before,
        msgs_per_node_cum: cum,
        rel_error: reference.map(|opt| (objective - opt) / opt),
    }
}
