//! Exact reference solutions for small instances.
//!
//! [`solve_exact`] runs a dense tableau simplex with Bland's rule on the
//! packing dual of the covering LP,
//!
//! ```text
//! maximize 1ᵀy − 1ᵀw   subject to  A y − w ≤ 1,  y, w ≥ 0,
//! ```
//!
//! whose right-hand side is nonnegative, so the slack basis is a feasible
//! start and no phase one is needed. The covering solution `x*` is read off
//! the reduced costs of the slack columns. Both objective values are
//! compared before returning; a mismatch is reported as a stall instead of
//! yielding a wrong answer.
//!
//! [`solve_regularized`] solves the strongly convex program
//! `min 1ᵀx + (δ/2)‖x‖²` over the same polytope by cyclic exact coordinate
//! ascent on its dual, certified by a primal-dual gap.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::StorageGraph;
use crate::problem::{Allocation, TOL_FEAS};

/// Largest instance either oracle accepts.
pub const ORACLE_MAX_NODES: usize = 2000;

const PIVOT_TOL: f64 = 1e-11;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LpStatus {
    Optimal,
    Infeasible,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution {
    pub x_star: Allocation,
    pub objective: f64,
    pub status: LpStatus,
    pub pivots: usize,
}

fn check_budget(g: &StorageGraph) -> Result<()> {
    if g.n() > ORACLE_MAX_NODES {
        return Err(Error::OracleBudget {
            n: g.n(),
            max: ORACLE_MAX_NODES,
        });
    }
    if g.n() == 0 {
        return Err(Error::InvalidParameter("empty graph".into()));
    }
    Ok(())
}

/// Dense simplex tableau in canonical form for a maximization problem.
struct Tableau {
    rows: usize,
    /// Row width: structural and slack columns plus the right-hand side.
    width: usize,
    cells: Vec<f64>,
    /// Reduced costs followed by the objective value.
    cost: Vec<f64>,
    basis: Vec<usize>,
}

impl Tableau {
    fn rhs_col(&self) -> usize {
        self.width - 1
    }

    fn at(&self, r: usize, c: usize) -> f64 {
        self.cells[r * self.width + c]
    }

    fn entering(&self) -> Option<usize> {
        (0..self.rhs_col()).find(|&c| self.cost[c] < -PIVOT_TOL)
    }

    fn leaving(&self, col: usize) -> Option<usize> {
        let rhs = self.rhs_col();
        let mut best: Option<(usize, f64)> = None;
        for r in 0..self.rows {
            let a = self.at(r, col);
            if a <= PIVOT_TOL {
                continue;
            }
            let ratio = self.at(r, rhs) / a;
            best = match best {
                None => Some((r, ratio)),
                Some((b, br)) => {
                    let tie = (ratio - br).abs() <= PIVOT_TOL * (1.0 + br.abs());
                    if ratio < br && !tie || tie && self.basis[r] < self.basis[b] {
                        Some((r, ratio))
                    } else {
                        Some((b, br))
                    }
                }
            };
        }
        best.map(|(r, _)| r)
    }

    fn pivot(&mut self, row: usize, col: usize) {
        let w = self.width;
        let inv = 1.0 / self.at(row, col);
        let (head, rest) = self.cells.split_at_mut(row * w);
        let (pivot_row, tail) = rest.split_at_mut(w);
        for v in pivot_row.iter_mut() {
            *v *= inv;
        }
        pivot_row[col] = 1.0;
        let eliminate = |target: &mut [f64]| {
            let factor = target[col];
            if factor != 0.0 {
                for (t, &p) in target.iter_mut().zip(pivot_row.iter()) {
                    *t -= factor * p;
                }
                target[col] = 0.0;
            }
        };
        head.chunks_exact_mut(w).for_each(eliminate);
        tail.chunks_exact_mut(w).for_each(eliminate);
        eliminate(&mut self.cost);
        self.basis[row] = col;
    }
}

/// Minimum-storage allocation `x*` of the covering LP with the box `x ≤ 1`.
pub fn solve_exact(g: &StorageGraph) -> Result<LpSolution> {
    check_budget(g)?;
    let n = g.n();
    // Columns: y (0..n), w (n..2n), slack (2n..3n), rhs.
    let width = 3 * n + 1;
    let mut cells = vec![0.0; n * width];
    for j in 0..n {
        let row = &mut cells[j * width..(j + 1) * width];
        for i in g.closed_neighborhood(j) {
            row[i] = 1.0;
        }
        row[n + j] = -1.0;
        row[2 * n + j] = 1.0;
        row[3 * n] = 1.0;
    }
    let mut cost = vec![0.0; width];
    cost[..n].fill(-1.0);
    cost[n..2 * n].fill(1.0);
    let mut tab = Tableau {
        rows: n,
        width,
        cells,
        cost,
        basis: (2 * n..3 * n).collect(),
    };

    let max_pivots = 100_000 + 200 * n;
    let mut pivots = 0;
    while let Some(col) = tab.entering() {
        let row = tab
            .leaving(col)
            .ok_or_else(|| Error::OracleStall("packing dual reported unbounded; covering LP infeasible".into()))?;
        tab.pivot(row, col);
        pivots += 1;
        if pivots > max_pivots {
            return Err(Error::OracleStall(format!("no optimum after {max_pivots} pivots")));
        }
    }

    let dual_objective = tab.cost[3 * n];
    let x = Allocation((0..n).map(|j| tab.cost[2 * n + j].clamp(0.0, 1.0)).collect());
    let objective = x.objective();
    let slack = x.min_slack(g)?;
    if slack < -TOL_FEAS {
        return Err(Error::OracleStall(format!(
            "recovered allocation violates a constraint by {}",
            -slack
        )));
    }
    if (objective - dual_objective).abs() > 1e-8 * dual_objective.abs().max(1.0) {
        return Err(Error::OracleStall(format!(
            "primal {objective} and dual {dual_objective} objectives disagree"
        )));
    }
    Ok(LpSolution {
        x_star: x,
        objective,
        status: LpStatus::Optimal,
        pivots,
    })
}

/// Unique minimizer `x•` of `1ᵀx + (δ/2)‖x‖²` over `{A x ≥ 1, 0 ≤ x ≤ 1}`.
///
/// Returns a feasible point whose regularized objective is within `1e-12`
/// (relative) of the optimum.
pub fn solve_regularized(g: &StorageGraph, delta: f64) -> Result<Allocation> {
    check_budget(g)?;
    if !(delta > 0.0 && delta.is_finite()) {
        return Err(Error::InvalidParameter(format!("delta must be positive, got {delta}")));
    }
    let n = g.n();
    let omegas: Vec<Vec<usize>> = (0..n).map(|i| g.closed_neighborhood(i)).collect();
    let mut lambda = vec![0.0; n];
    // sums[j] = (Aλ)_j
    let mut sums = vec![0.0; n];
    let mut breakpoints = Vec::new();

    let x_hat = |s: f64| ((s - 1.0) / delta).clamp(0.0, 1.0);
    let max_sweeps = 200_000;
    for sweep in 0..max_sweeps {
        for i in 0..n {
            let omega = &omegas[i];
            // Directional derivative of the dual along λ_i after a shift t.
            let slope_at = |t: f64| 1.0 - omega.iter().map(|&j| x_hat(sums[j] + t)).sum::<f64>();
            let lo = -lambda[i];
            let t = if slope_at(lo) <= 0.0 {
                lo
            } else {
                breakpoints.clear();
                for &j in omega {
                    breakpoints.push(1.0 - sums[j]);
                    breakpoints.push(1.0 + delta - sums[j]);
                }
                breakpoints.retain(|&b| b > lo);
                breakpoints.sort_by(f64::total_cmp);
                let (mut a, mut fa) = (lo, slope_at(lo));
                let mut root = None;
                for &b in breakpoints.iter() {
                    let fb = slope_at(b);
                    if fb <= 0.0 {
                        root = Some(a + (b - a) * fa / (fa - fb));
                        break;
                    }
                    (a, fa) = (b, fb);
                }
                // Past the last breakpoint every x̂_j is 1 and the slope is ≤ 0.
                root.unwrap_or(a)
            };
            if t != 0.0 {
                lambda[i] += t;
                for &j in omega {
                    sums[j] += t;
                }
            }
        }

        if sweep % 4 == 3 || sweep == 0 {
            let candidate: Vec<f64> = sums.iter().map(|&s| x_hat(s)).collect();
            let lower = lambda.iter().sum::<f64>()
                + sums
                    .iter()
                    .zip(&candidate)
                    .map(|(&s, &x)| x * (1.0 - s) + 0.5 * delta * x * x)
                    .sum::<f64>();
            let feasible = Allocation(
                (0..n)
                    .map(|i| {
                        let covered: f64 = omegas[i].iter().map(|&j| candidate[j]).sum();
                        (candidate[i] + (1.0 - covered).max(0.0)).min(1.0)
                    })
                    .collect(),
            );
            let upper = feasible.regularized_objective(delta);
            if upper - lower <= 1e-12 * upper.abs().max(1.0) {
                return Ok(feasible);
            }
        }
    }
    Err(Error::OracleStall(format!(
        "regularized oracle did not converge in {max_sweeps} sweeps"
    )))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn forced_optima() {
        let c6 = solve_exact(&StorageGraph::cycle(6)).unwrap();
        assert!((c6.objective - 2.0).abs() < 1e-9);
        let star = solve_exact(&StorageGraph::star(5)).unwrap();
        assert!((star.objective - 1.0).abs() < 1e-9);
        let p3 = solve_exact(&StorageGraph::path(3)).unwrap();
        assert!((p3.objective - 1.0).abs() < 1e-9);
        assert_eq!(p3.status, LpStatus::Optimal);
    }

    #[test]
    fn isolated_nodes_store_everything() {
        let g = StorageGraph::from_edges(4, [(0, 1)]).unwrap();
        let sol = solve_exact(&g).unwrap();
        assert!((sol.objective - 3.0).abs() < 1e-9);
        assert_eq!(sol.x_star.as_slice()[2], 1.0);
        assert_eq!(sol.x_star.as_slice()[3], 1.0);
    }

    #[test]
    fn over_budget_is_rejected() {
        let g = StorageGraph::empty(ORACLE_MAX_NODES + 1);
        assert_eq!(
            solve_exact(&g).unwrap_err(),
            Error::OracleBudget {
                n: ORACLE_MAX_NODES + 1,
                max: ORACLE_MAX_NODES
            }
        );
        assert!(solve_regularized(&g, 0.1).is_err());
    }

    #[test]
    fn regularized_on_complete_graph_is_uniform() {
        for n in [1usize, 2, 5, 9] {
            let x = solve_regularized(&StorageGraph::complete(n), 0.3).unwrap();
            for &v in x.as_slice() {
                assert!((v - 1.0 / n as f64).abs() < 1e-6, "n={n}: {v}");
            }
        }
    }

    #[test]
    fn regularized_on_c6_is_one_third() {
        let x = solve_regularized(&StorageGraph::cycle(6), 0.1).unwrap();
        for &v in x.as_slice() {
            assert!((v - 1.0 / 3.0).abs() < 1e-6, "{v}");
        }
        assert!(x.is_feasible(&StorageGraph::cycle(6)).unwrap());
    }

    #[test]
    fn regularized_rejects_bad_delta() {
        assert!(solve_regularized(&StorageGraph::cycle(5), 0.0).is_err());
    }
}
