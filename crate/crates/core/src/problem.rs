//! Allocation instances and the queries used to judge an allocation.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::StorageGraph;

/// Feasibility tolerance on closed-neighborhood sums.
pub const TOL_FEAS: f64 = 1e-9;

/// An allocation problem: the network, node access probabilities, and the
/// regularization weight `δ` of the smoothed program.
#[derive(Debug, Clone)]
pub struct FdsInstance {
    graph: StorageGraph,
    access_probs: Vec<f64>,
    delta: f64,
}

impl FdsInstance {
    /// Instance with uniform access probabilities `1/N`.
    pub fn new(graph: StorageGraph, delta: f64) -> Result<Self> {
        let n = graph.n();
        Self::with_access_probs(graph, vec![1.0 / n as f64; n], delta)
    }

    pub fn with_access_probs(graph: StorageGraph, access_probs: Vec<f64>, delta: f64) -> Result<Self> {
        if graph.n() == 0 {
            return Err(Error::InvalidParameter("instance needs at least one node".into()));
        }
        if access_probs.len() != graph.n() {
            return Err(Error::LengthMismatch {
                expected: graph.n(),
                found: access_probs.len(),
            });
        }
        if let Some(i) = access_probs.iter().position(|&p| !(p > 0.0 && p <= 1.0)) {
            return Err(Error::InvalidParameter(format!(
                "access probability of node {i} is {}, expected (0, 1]",
                access_probs[i]
            )));
        }
        let total: f64 = access_probs.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidParameter(format!("access probabilities sum to {total}")));
        }
        if !(delta > 0.0 && delta.is_finite()) {
            return Err(Error::InvalidParameter(format!("delta must be positive, got {delta}")));
        }
        Ok(Self {
            graph,
            access_probs,
            delta,
        })
    }

    pub fn graph(&self) -> &StorageGraph {
        &self.graph
    }

    pub fn access_probs(&self) -> &[f64] {
        &self.access_probs
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn n(&self) -> usize {
        self.graph.n()
    }
}

/// Fraction of the object stored at each node.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Allocation(pub Vec<f64>);

impl Allocation {
    pub fn zeros(n: usize) -> Self {
        Self(vec![0.0; n])
    }

    pub fn ones(n: usize) -> Self {
        Self(vec![1.0; n])
    }

    pub fn uniform(n: usize, value: f64) -> Self {
        Self(vec![value; n])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    fn check_len(&self, n: usize) -> Result<()> {
        if self.0.len() == n {
            Ok(())
        } else {
            Err(Error::LengthMismatch {
                expected: n,
                found: self.0.len(),
            })
        }
    }

    /// Total storage `1ᵀx`.
    pub fn objective(&self) -> f64 {
        self.0.iter().sum()
    }

    /// `1ᵀx + (δ/2)‖x‖²`.
    pub fn regularized_objective(&self, delta: f64) -> f64 {
        self.objective() + 0.5 * delta * self.0.iter().map(|v| v * v).sum::<f64>()
    }

    pub fn norm(&self) -> f64 {
        self.0.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    /// Storage reachable from node `i`: `Σ_{j∈Ω_i} x_j`, summed in
    /// ascending node order.
    pub fn neighborhood_sum(&self, g: &StorageGraph, i: usize) -> f64 {
        g.closed_neighborhood(i).into_iter().map(|j| self.0[j]).sum()
    }

    /// `min_i Σ_{j∈Ω_i} x_j − 1`.
    pub fn min_slack(&self, g: &StorageGraph) -> Result<f64> {
        self.check_len(g.n())?;
        Ok((0..g.n())
            .map(|i| self.neighborhood_sum(g, i) - 1.0)
            .fold(f64::INFINITY, f64::min))
    }

    pub fn is_feasible(&self, g: &StorageGraph) -> Result<bool> {
        Ok(self.min_slack(g)? >= -TOL_FEAS)
    }

    /// Probability that a random access (node `i` with probability `p_i`)
    /// finds at least one object's worth of storage in its neighborhood.
    pub fn recovery_probability(&self, inst: &FdsInstance) -> Result<f64> {
        let g = inst.graph();
        self.check_len(g.n())?;
        Ok((0..g.n())
            .filter(|&i| self.neighborhood_sum(g, i) >= 1.0 - TOL_FEAS)
            .map(|i| inst.access_probs()[i])
            .sum())
    }
}

/// Analytic bracket on the LP optimum: `N/(d_max+1) ≤ 1ᵀx* ≤ N/(d_min+1)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OptimumBounds {
    pub lower: f64,
    pub upper: f64,
}

impl OptimumBounds {
    pub fn contains(&self, value: f64, tol: f64) -> bool {
        value >= self.lower - tol && value <= self.upper + tol
    }
}

pub fn optimum_bounds(g: &StorageGraph) -> OptimumBounds {
    let n = g.n() as f64;
    OptimumBounds {
        lower: n / (g.d_max() + 1) as f64,
        upper: n / (g.d_min() + 1) as f64,
    }
}
