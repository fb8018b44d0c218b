//! Synchronous broadcast network.
//!
//! Each exchange phase is a barrier: nodes hand the engine at most one
//! scalar to broadcast, the engine routes every broadcast along the graph's
//! edges, and each node gets an inbox with one message per neighbor that
//! spoke. The engine counts broadcasts per node and audits every delivery
//! against the adjacency it was built from.

use crate::graph::StorageGraph;

/// A scalar received from a neighbor.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Message {
    pub from: usize,
    pub value: f64,
}

#[derive(Debug, Clone)]
pub struct SyncNetwork {
    neighbors: Vec<Vec<usize>>,
    /// Receiver `i` owns `buffer[offsets[i]..offsets[i + 1]]`.
    offsets: Vec<usize>,
    filled: Vec<usize>,
    buffer: Vec<Message>,
    broadcasts: Vec<u64>,
    deliveries: u64,
    locality_violations: u64,
}

/// Inboxes of one exchange phase, indexed by receiver.
#[derive(Debug, Clone, Copy)]
pub struct Inboxes<'a> {
    offsets: &'a [usize],
    filled: &'a [usize],
    buffer: &'a [Message],
}

impl<'a> Inboxes<'a> {
    pub fn len(&self) -> usize {
        self.filled.len()
    }

    pub fn is_empty(&self) -> bool {
        self.filled.is_empty()
    }

    /// Messages delivered to node `i`, in ascending sender order.
    pub fn get(&self, i: usize) -> &'a [Message] {
        let start = self.offsets[i];
        &self.buffer[start..start + self.filled[i]]
    }

    pub fn iter(&self) -> impl Iterator<Item = &'a [Message]> + 'a {
        let this = *self;
        (0..this.len()).map(move |i| this.get(i))
    }
}

impl<'a> IntoIterator for Inboxes<'a> {
    type Item = &'a [Message];
    type IntoIter = Box<dyn Iterator<Item = &'a [Message]> + 'a>;

    fn into_iter(self) -> Self::IntoIter {
        Box::new(self.iter())
    }
}

impl SyncNetwork {
    pub fn new(g: &StorageGraph) -> Self {
        let n = g.n();
        let mut offsets = Vec::with_capacity(n + 1);
        offsets.push(0);
        for i in 0..n {
            offsets.push(offsets[i] + g.neighbors(i).len());
        }
        let slots = offsets[n];
        Self {
            neighbors: (0..n).map(|i| g.neighbors(i).to_vec()).collect(),
            offsets,
            filled: vec![0; n],
            buffer: vec![Message { from: 0, value: 0.0 }; slots],
            broadcasts: vec![0; n],
            deliveries: 0,
            locality_violations: 0,
        }
    }

    pub fn n(&self) -> usize {
        self.neighbors.len()
    }

    /// Routes one exchange phase. `outgoing[i]` is node `i`'s broadcast, or
    /// `None` if it stays silent.
    pub fn exchange(&mut self, outgoing: &[Option<f64>]) -> Inboxes<'_> {
        assert_eq!(outgoing.len(), self.n(), "one outgoing slot per node");
        for (from, value) in outgoing.iter().enumerate() {
            if value.is_some() {
                self.broadcasts[from] += 1;
            }
        }
        for (to, adjacent) in self.neighbors.iter().enumerate() {
            let inbox = &mut self.buffer[self.offsets[to]..self.offsets[to + 1]];
            let mut len = 0;
            for &from in adjacent {
                if let Some(value) = outgoing[from] {
                    inbox[len] = Message { from, value };
                    len += 1;
                }
            }
            self.filled[to] = len;
            self.deliveries += len as u64;
        }
        // Delivery audit, compiled into debug and test builds.
        if cfg!(debug_assertions) {
            self.audit();
        }
        self.inboxes()
    }

    fn inboxes(&self) -> Inboxes<'_> {
        Inboxes {
            offsets: &self.offsets,
            filled: &self.filled,
            buffer: &self.buffer,
        }
    }

    fn audit(&mut self) {
        let mut violations = 0;
        for (i, adjacent) in self.neighbors.iter().enumerate() {
            let mut rest = adjacent.iter();
            for msg in self.inboxes().get(i) {
                if !rest.any(|&j| j == msg.from) {
                    violations += 1;
                    rest = adjacent.iter();
                }
            }
        }
        self.locality_violations += violations;
    }

    /// Records a receiver rejecting a message from outside its neighborhood.
    pub fn report_violation(&mut self) {
        self.locality_violations += 1;
    }

    /// Broadcasts issued by each node so far.
    pub fn broadcasts(&self) -> &[u64] {
        &self.broadcasts
    }

    /// The per-node broadcast count if every node has issued the same number.
    pub fn uniform_broadcasts(&self) -> Option<u64> {
        let first = *self.broadcasts.first()?;
        self.broadcasts.iter().all(|&b| b == first).then_some(first)
    }

    /// Point-to-point scalar deliveries so far.
    pub fn deliveries(&self) -> u64 {
        self.deliveries
    }

    pub fn locality_violations(&self) -> u64 {
        self.locality_violations
    }
}
