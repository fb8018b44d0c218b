//! Solver experiments: one run per seed, each writing a trace CSV and a
//! JSON summary into its own subdirectory of the output directory.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use fds_core::pcm::solve_with;
use fds_core::{
    iterations_for_epsilon, optimum_bounds, solve_exact, Error, FdsInstance, RoundTrace, SolveOptions, SolveOutcome,
    SolverParams, StorageGraph,
};
use serde::Serialize;

use crate::config::ExperimentConfig;
use crate::error::{CliError, Result};
use crate::plot;

pub const TRACE_HEADER: &str = "round,objective,min_slack,msgs_per_node_cum,rel_error";

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunSummary {
    pub seed: u64,
    pub graph: String,
    pub n: usize,
    pub edges: usize,
    pub d_min: usize,
    pub d_max: usize,
    pub ell: usize,
    pub epsilon: f64,
    pub delta: f64,
    pub alpha: f64,
    pub alpha_mode: fds_core::AlphaMode,
    pub k_epsilon: u64,
    pub rounds_run: u64,
    pub lower_bound: f64,
    pub upper_bound: f64,
    pub oracle_objective: Option<f64>,
    pub final_objective: f64,
    pub final_min_slack: f64,
    pub final_rel_error: Option<f64>,
    pub msgs_per_node: u64,
    pub locality_violations: u64,
    pub wall_time_secs: f64,
}

#[derive(Debug)]
pub struct RunResult {
    pub summary: RunSummary,
    pub outcome: SolveOutcome,
    pub dir: PathBuf,
}

/// Builds the storage graph for one seed, applying the hop power.
pub fn build_graph(config: &ExperimentConfig, seed: u64) -> Result<StorageGraph> {
    let g = config.graph.build(seed)?;
    if config.ell > 1 {
        Ok(g.power(config.ell)?)
    } else {
        Ok(g)
    }
}

pub fn oracle_objective(g: &StorageGraph) -> Result<f64> {
    match solve_exact(g) {
        Ok(sol) => Ok(sol.objective),
        Err(e @ Error::OracleBudget { .. }) => Err(CliError::OracleBudget(e)),
        Err(e) => Err(e.into()),
    }
}

/// Runs every configured seed; results are returned in seed order.
pub fn run_experiment(config: &ExperimentConfig) -> Result<Vec<RunResult>> {
    config.validate()?;
    ensure_dir(&config.out_dir)?;
    let overlay = match &config.overlay {
        Some(p) => Some(plot::read_trace(p)?),
        None => None,
    };
    config
        .seeds
        .iter()
        .map(|&seed| run_seed(config, seed, overlay.as_deref()))
        .collect()
}

fn run_seed(config: &ExperimentConfig, seed: u64, overlay: Option<&[(u64, f64)]>) -> Result<RunResult> {
    let start = Instant::now();
    let g = build_graph(config, seed)?;
    let bounds = optimum_bounds(&g);
    let reference = if config.oracle {
        Some(oracle_objective(&g)?)
    } else {
        None
    };

    let inst = FdsInstance::new(g.clone(), config.delta())?;
    let mut params = SolverParams::for_instance(&inst, config.epsilon, config.alpha_mode)?;
    let k_epsilon = params.max_rounds;
    if let Some(r) = config.max_rounds {
        params = params.with_max_rounds(r);
    }
    let options = SolveOptions {
        reference_optimum: reference,
        stop_at_rel_error: config.stop_at_rel_error,
    };
    let outcome = solve_with(&inst, &params, options, |_, _| {})?;
    let last = outcome.final_round();

    let summary = RunSummary {
        seed,
        graph: config.graph.describe(),
        n: g.n(),
        edges: g.edge_count(),
        d_min: g.d_min(),
        d_max: g.d_max(),
        ell: config.ell,
        epsilon: config.epsilon,
        delta: params.delta,
        alpha: params.alpha,
        alpha_mode: params.alpha_mode,
        k_epsilon,
        rounds_run: last.round,
        lower_bound: bounds.lower,
        upper_bound: bounds.upper,
        oracle_objective: reference,
        final_objective: last.objective,
        final_min_slack: last.min_slack,
        final_rel_error: last.rel_error,
        msgs_per_node: last.msgs_per_node_cum,
        locality_violations: outcome.locality_violations,
        wall_time_secs: start.elapsed().as_secs_f64(),
    };

    let dir = config.out_dir.join(format!("seed-{seed}"));
    ensure_dir(&dir)?;
    write_atomic(&dir, "trace.csv", trace_csv(&outcome.trace).as_bytes())?;
    let json = serde_json::to_string_pretty(&summary).expect("summary serializes");
    write_atomic(&dir, "summary.json", json.as_bytes())?;
    if config.plot {
        let svg = plot::convergence_svg(&points(&outcome.trace), overlay)?;
        write_atomic(&dir, "convergence.svg", svg.as_bytes())?;
    }
    Ok(RunResult { summary, outcome, dir })
}

fn points(trace: &[RoundTrace]) -> Vec<(u64, f64)> {
    trace
        .iter()
        .filter_map(|r| r.rel_error.map(|e| (r.msgs_per_node_cum, e)))
        .collect()
}

/// Renders the trace with full round-trip precision.
pub fn trace_csv(trace: &[RoundTrace]) -> String {
    let mut out = String::with_capacity(48 * (trace.len() + 1));
    out.push_str(TRACE_HEADER);
    out.push('\n');
    for r in trace {
        let rel = r.rel_error.map(|e| format!("{e:e}")).unwrap_or_default();
        let _ = writeln!(
            out,
            "{},{:e},{:e},{},{}",
            r.round, r.objective, r.min_slack, r.msgs_per_node_cum, rel
        );
    }
    out
}

pub fn ensure_dir(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|source| CliError::Output {
        path: dir.to_path_buf(),
        source,
    })
}

/// Writes through a temporary file in `dir` and renames it into place.
pub fn write_atomic(dir: &Path, name: &str, bytes: &[u8]) -> Result<()> {
    let err = |source| CliError::Output {
        path: dir.to_path_buf(),
        source,
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(err)?;
    tmp.write_all(bytes).map_err(err)?;
    #[cfg(unix)]
    {
        use std::os::unix::fs::PermissionsExt;
        tmp.as_file()
            .set_permissions(std::fs::Permissions::from_mode(0o644))
            .map_err(err)?;
    }
    tmp.persist(dir.join(name)).map_err(|e| err(e.error))?;
    Ok(())
}

/// Round budget table used by `fds bounds`.
pub fn k_table(g: &StorageGraph, epsilons: &[f64]) -> Result<Vec<(f64, u64)>> {
    epsilons
        .iter()
        .map(|&e| Ok((e, iterations_for_epsilon(g.d_max(), e)?)))
        .collect()
}
