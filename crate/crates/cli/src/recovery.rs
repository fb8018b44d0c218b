//! Monte-Carlo check that every node can rebuild the object from its
//! neighborhood under a given allocation.

use std::path::Path;

use fds_core::{disseminate, try_recover, Allocation, StorageGraph};
use serde::Serialize;

use crate::error::{CliError, Result};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RecoveryReport {
    pub m: usize,
    pub trials: u64,
    /// Fraction of trials in which node `i` recovered the object.
    pub per_node: Vec<f64>,
    /// Fraction of (trial, node) pairs that succeeded.
    pub overall: f64,
    /// Fraction of trials in which every node succeeded.
    pub all_nodes: f64,
}

/// Trial `t` disseminates with seed `base_seed + t`.
pub fn verify_recovery(
    g: &StorageGraph,
    x: &Allocation,
    m: usize,
    trials: u64,
    base_seed: u64,
) -> Result<RecoveryReport> {
    if trials == 0 {
        return Err(CliError::Config("trials must be at least 1".into()));
    }
    let n = g.n();
    let mut hits = vec![0u64; n];
    let mut full = 0u64;
    for t in 0..trials {
        let store = disseminate(g, x, m, base_seed.wrapping_add(t))?;
        let mut all = true;
        for (i, h) in hits.iter_mut().enumerate() {
            let ok = try_recover(&store, g, i)?.success;
            *h += ok as u64;
            all &= ok;
        }
        full += all as u64;
    }
    let per_node: Vec<f64> = hits.iter().map(|&h| h as f64 / trials as f64).collect();
    let overall = if n == 0 {
        1.0
    } else {
        hits.iter().sum::<u64>() as f64 / (trials * n as u64) as f64
    };
    Ok(RecoveryReport {
        m,
        trials,
        per_node,
        overall,
        all_nodes: full as f64 / trials as f64,
    })
}

/// Reads an allocation as a JSON array or as whitespace/comma separated numbers.
pub fn read_allocation(path: &Path) -> Result<Allocation> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read allocation {}: {e}", path.display())))?;
    if text.trim_start().starts_with('[') {
        return serde_json::from_str(&text).map_err(|e| CliError::Config(format!("allocation: {e}")));
    }
    text.split(|c: char| c.is_whitespace() || c == ',')
        .filter(|s| !s.is_empty())
        .map(|s| {
            s.parse::<f64>()
                .map_err(|_| CliError::Config(format!("allocation: bad number `{s}`")))
        })
        .collect::<Result<Vec<_>>>()
        .map(Allocation)
}
