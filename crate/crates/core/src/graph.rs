//! Storage-node networks.
//!
//! Graphs are undirected and simple. Only the open adjacency is stored; the
//! closed neighborhood `Ω_i = neighbors(i) ∪ {i}` is derived on demand, which
//! corresponds to the unit diagonal of the access matrix `A`.
//!
//! Degree convention: [`StorageGraph::closed_degree`] is `|Ω_i|`, while
//! [`StorageGraph::d_max`] and [`StorageGraph::d_min`] are *open* degrees, so
//! `d_max + 1` is the size of the largest closed neighborhood.

use std::collections::VecDeque;
use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// Undirected network of storage nodes indexed `0..n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StorageGraph {
    neighbors: Vec<Vec<usize>>,
}

impl StorageGraph {
    /// Graph on `n` nodes with no edges.
    pub fn empty(n: usize) -> Self {
        Self {
            neighbors: vec![Vec::new(); n],
        }
    }

    /// Builds a graph from an edge list. Duplicate edges are collapsed.
    pub fn from_edges(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut neighbors = vec![Vec::new(); n];
        for (i, j) in edges {
            if i >= n {
                return Err(Error::NodeOutOfRange { index: i, n });
            }
            if j >= n {
                return Err(Error::NodeOutOfRange { index: j, n });
            }
            if i == j {
                return Err(Error::InvalidParameter(format!("self-loop at node {i}")));
            }
            neighbors[i].push(j);
            neighbors[j].push(i);
        }
        for list in &mut neighbors {
            list.sort_unstable();
            list.dedup();
        }
        Ok(Self { neighbors })
    }

    pub fn path(n: usize) -> Self {
        Self::from_edges(n, (1..n).map(|i| (i - 1, i))).expect("valid path")
    }

    pub fn cycle(n: usize) -> Self {
        assert!(n >= 3, "a cycle needs at least 3 nodes");
        Self::from_edges(n, (0..n).map(|i| (i, (i + 1) % n))).expect("valid cycle")
    }

    pub fn complete(n: usize) -> Self {
        Self::from_edges(n, (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j)))).expect("valid complete graph")
    }

    /// Star with center `0` and leaves `1..n`.
    pub fn star(n: usize) -> Self {
        Self::from_edges(n, (1..n).map(|i| (0, i))).expect("valid star")
    }

    /// Erdős–Rényi `G(n, p)` drawn from a seeded ChaCha8 stream.
    pub fn erdos_renyi(n: usize, p: f64, seed: u64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::InvalidParameter(format!("edge probability {p} not in [0, 1]")));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut edges = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                if rng.gen::<f64>() < p {
                    edges.push((i, j));
                }
            }
        }
        Self::from_edges(n, edges)
    }

    /// Random geometric graph on the unit square.
    ///
    /// Node positions come from [`geometric_points`]; nodes `i` and `j` are
    /// adjacent iff their Euclidean distance is at most `radius`.
    pub fn geometric(n: usize, radius: f64, seed: u64) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParameter("node count must be at least 1".into()));
        }
        Self::from_points(&geometric_points(n, seed), radius)
    }

    /// Unit-disk graph over explicit positions.
    pub fn from_points(points: &[(f64, f64)], radius: f64) -> Result<Self> {
        if !(radius > 0.0 && radius <= std::f64::consts::SQRT_2) {
            return Err(Error::InvalidParameter(format!("radius {radius} not in (0, √2]")));
        }
        let n = points.len();
        let mut edges = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                let dx = points[i].0 - points[j].0;
                let dy = points[i].1 - points[j].1;
                if (dx * dx + dy * dy).sqrt() <= radius {
                    edges.push((i, j));
                }
            }
        }
        Self::from_edges(n, edges)
    }

    pub fn n(&self) -> usize {
        self.neighbors.len()
    }

    /// Sorted open neighborhood of `i`.
    pub fn neighbors(&self, i: usize) -> &[usize] {
        &self.neighbors[i]
    }

    /// Sorted closed neighborhood `Ω_i`.
    pub fn closed_neighborhood(&self, i: usize) -> Vec<usize> {
        let open = &self.neighbors[i];
        let at = open.partition_point(|&j| j < i);
        let mut out = Vec::with_capacity(open.len() + 1);
        out.extend_from_slice(&open[..at]);
        out.push(i);
        out.extend_from_slice(&open[at..]);
        out
    }

    /// `|Ω_i|`.
    pub fn closed_degree(&self, i: usize) -> usize {
        self.neighbors[i].len() + 1
    }

    /// Largest open degree. Zero for the empty graph.
    pub fn d_max(&self) -> usize {
        self.neighbors.iter().map(Vec::len).max().unwrap_or(0)
    }

    /// Smallest open degree. Zero for the empty graph.
    pub fn d_min(&self) -> usize {
        self.neighbors.iter().map(Vec::len).min().unwrap_or(0)
    }

    pub fn edge_count(&self) -> usize {
        self.neighbors.iter().map(Vec::len).sum::<usize>() / 2
    }

    pub fn contains_edge(&self, i: usize, j: usize) -> bool {
        i < self.n() && self.neighbors[i].binary_search(&j).is_ok()
    }

    /// Edges `(i, j)` with `i < j`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.neighbors
            .iter()
            .enumerate()
            .flat_map(|(i, list)| list.iter().filter(move |&&j| j > i).map(move |&j| (i, j)))
    }

    /// Full scan of the adjacency invariants: symmetry, no self-loops,
    /// sorted and duplicate-free lists, indices in range.
    pub fn is_well_formed(&self) -> bool {
        let n = self.n();
        self.neighbors.iter().enumerate().all(|(i, list)| {
            list.windows(2).all(|w| w[0] < w[1]) && list.iter().all(|&j| j < n && j != i && self.contains_edge(j, i))
        })
    }

    /// Connected components, each sorted, ordered by smallest member.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.n()];
        let mut out = Vec::new();
        for start in 0..self.n() {
            if seen[start] {
                continue;
            }
            seen[start] = true;
            let mut comp = vec![start];
            let mut queue = VecDeque::from([start]);
            while let Some(u) = queue.pop_front() {
                for &v in &self.neighbors[u] {
                    if !seen[v] {
                        seen[v] = true;
                        comp.push(v);
                        queue.push_back(v);
                    }
                }
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }

    pub fn is_connected(&self) -> bool {
        self.components().len() <= 1
    }

    /// The `ell`-th power: `i ~ j` iff their hop distance is in `1..=ell`.
    pub fn power(&self, ell: usize) -> Result<Self> {
        if ell == 0 {
            return Err(Error::InvalidParameter("hop count must be at least 1".into()));
        }
        if ell == 1 {
            return Ok(self.clone());
        }
        let n = self.n();
        let mut dist = vec![usize::MAX; n];
        let mut neighbors = Vec::with_capacity(n);
        for src in 0..n {
            let mut reached = Vec::new();
            let mut queue = VecDeque::from([src]);
            dist[src] = 0;
            while let Some(u) = queue.pop_front() {
                if dist[u] == ell {
                    continue;
                }
                for &v in &self.neighbors[u] {
                    if dist[v] == usize::MAX {
                        dist[v] = dist[u] + 1;
                        reached.push(v);
                        queue.push_back(v);
                    }
                }
            }
            dist[src] = usize::MAX;
            for &v in &reached {
                dist[v] = usize::MAX;
            }
            reached.sort_unstable();
            neighbors.push(reached);
        }
        Ok(Self { neighbors })
    }

    /// Relabels nodes: node `i` of `self` becomes node `perm[i]`.
    pub fn permuted(&self, perm: &[usize]) -> Result<Self> {
        if perm.len() != self.n() {
            return Err(Error::LengthMismatch {
                expected: self.n(),
                found: perm.len(),
            });
        }
        let mut seen = vec![false; perm.len()];
        for &p in perm {
            if p >= perm.len() || std::mem::replace(&mut seen[p], true) {
                return Err(Error::InvalidParameter("not a permutation".into()));
            }
        }
        Self::from_edges(self.n(), self.edges().map(|(i, j)| (perm[i], perm[j])))
    }

    /// Parses the plain edge-list format: a first line holding the node
    /// count, then one whitespace-separated `i j` pair per line (0-based).
    /// Blank lines are skipped.
    pub fn read_edge_list(text: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate().map(|(idx, l)| (idx + 1, l.trim()));
        let (first_line, header) = lines.by_ref().find(|(_, l)| !l.is_empty()).ok_or(Error::Parse {
            line: 1,
            message: "missing node count".into(),
        })?;
        let n: usize = header.parse().map_err(|_| Error::Parse {
            line: first_line,
            message: format!("expected node count, found `{header}`"),
        })?;

        let mut edges = Vec::new();
        for (line, content) in lines {
            if content.is_empty() {
                continue;
            }
            let bad = |message: String| Error::Parse { line, message };
            let mut tokens = content.split_whitespace();
            let mut index = || -> Result<usize> {
                let tok = tokens.next().ok_or_else(|| bad("expected `i j`".into()))?;
                let v: usize = tok.parse().map_err(|_| bad(format!("malformed index `{tok}`")))?;
                if v >= n {
                    return Err(bad(format!("index {v} out of range for {n} nodes")));
                }
                Ok(v)
            };
            let i = index()?;
            let j = index()?;
            if tokens.next().is_some() {
                return Err(bad("trailing tokens after `i j`".into()));
            }
            if i == j {
                return Err(bad(format!("self-loop at node {i}")));
            }
            edges.push((i, j));
        }
        Self::from_edges(n, edges)
    }

    pub fn write_edge_list(&self) -> String {
        let mut out = format!("{}\n", self.n());
        for (i, j) in self.edges() {
            writeln!(out, "{i} {j}").expect("writing to a String cannot fail");
        }
        out
    }
}

/// Node positions for [`StorageGraph::geometric`].
///
/// The stream is `ChaCha8Rng::seed_from_u64(seed)`; node `i` takes two
/// consecutive `f64` draws (x then y), each uniform on `[0, 1)`.
pub fn geometric_points(n: usize, seed: u64) -> Vec<(f64, f64)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| {
            let x = rng.gen::<f64>();
            let y = rng.gen::<f64>();
            (x, y)
        })
        .collect()
}
