//! Random linear coding over GF(256) as the storage back end.
//!
//! The object is split into `m` parts. A source node starts a flood; every
//! node it reaches draws `⌈x_i·m⌉` coefficient vectors uniformly from
//! `GF(256)^m` (one stored combination each) and forwards the object to its
//! neighbors not yet visited. Payloads are not materialized: an access node
//! can rebuild the object iff the combinations held in its closed
//! neighborhood have rank `m`.

pub mod gf256;

use std::collections::VecDeque;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::StorageGraph;
use crate::problem::{Allocation, TOL_FEAS};

#[derive(Debug, Clone, PartialEq)]
pub struct CodedStore {
    m: usize,
    per_node_combos: Vec<Vec<Vec<u8>>>,
    sources: Vec<usize>,
    visit_order: Vec<usize>,
    flood_edges: Vec<(usize, usize)>,
}

impl CodedStore {
    pub fn m(&self) -> usize {
        self.m
    }

    /// Coefficient vectors stored at `node`.
    pub fn combos(&self, node: usize) -> &[Vec<u8>] {
        &self.per_node_combos[node]
    }

    /// One flood source per connected component.
    pub fn sources(&self) -> &[usize] {
        &self.sources
    }

    pub fn visit_order(&self) -> &[usize] {
        &self.visit_order
    }

    /// `(from, to)` hops that carried the object during the flood.
    pub fn flood_edges(&self) -> &[(usize, usize)] {
        &self.flood_edges
    }
}

/// Number of combinations a node with allocation `x_i` stores: `⌈x_i·m⌉`,
/// capped at `m`. The ceiling absorbs float noise up to the feasibility
/// tolerance so that `x_i = 1/3, m = 6` stores exactly 2.
pub fn combos_for(x_i: f64, m: usize) -> usize {
    let scaled = x_i * m as f64 - TOL_FEAS;
    (scaled.ceil().max(0.0) as usize).min(m)
}

pub fn disseminate(g: &StorageGraph, x: &Allocation, m: usize, seed: u64) -> Result<CodedStore> {
    if m == 0 {
        return Err(Error::InvalidParameter("part count must be at least 1".into()));
    }
    if x.len() != g.n() {
        return Err(Error::LengthMismatch {
            expected: g.n(),
            found: x.len(),
        });
    }
    if let Some(i) = x.as_slice().iter().position(|v| !(v.is_finite() && *v >= 0.0)) {
        return Err(Error::InvalidParameter(format!(
            "allocation at node {i} is {}",
            x.as_slice()[i]
        )));
    }

    let n = g.n();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut per_node_combos = vec![Vec::new(); n];
    let mut visited = vec![false; n];
    let mut sources = Vec::new();
    let mut visit_order = Vec::with_capacity(n);
    let mut flood_edges = Vec::new();

    for component in g.components() {
        let source = component[rng.gen_range(0..component.len())];
        sources.push(source);
        visited[source] = true;
        let mut queue = VecDeque::from([source]);
        while let Some(u) = queue.pop_front() {
            visit_order.push(u);
            per_node_combos[u] = (0..combos_for(x.as_slice()[u], m))
                .map(|_| {
                    let mut v = vec![0u8; m];
                    rng.fill(&mut v[..]);
                    v
                })
                .collect();
            for &v in g.neighbors(u) {
                if !visited[v] {
                    visited[v] = true;
                    flood_edges.push((u, v));
                    queue.push_back(v);
                }
            }
        }
    }

    Ok(CodedStore {
        m,
        per_node_combos,
        sources,
        visit_order,
        flood_edges,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RecoveryOutcome {
    pub success: bool,
    pub rank: usize,
    /// Combinations gathered from the closed neighborhood.
    pub collected: usize,
}

/// Gathers every combination stored in `Ω_access` and checks for full rank.
pub fn try_recover(store: &CodedStore, g: &StorageGraph, access_node: usize) -> Result<RecoveryOutcome> {
    if access_node >= g.n() {
        return Err(Error::NodeOutOfRange {
            index: access_node,
            n: g.n(),
        });
    }
    if store.per_node_combos.len() != g.n() {
        return Err(Error::LengthMismatch {
            expected: g.n(),
            found: store.per_node_combos.len(),
        });
    }
    let rows: Vec<Vec<u8>> = g
        .closed_neighborhood(access_node)
        .into_iter()
        .flat_map(|j| store.per_node_combos[j].iter().cloned())
        .collect();
    let collected = rows.len();
    let rank = gf256::rank(&rows);
    Ok(RecoveryOutcome {
        success: rank == store.m,
        rank,
        collected,
    })
}
