use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use fds_cli::config::{FileConfig, FlagConfig, OUT_DIR_ENV};
use fds_cli::{resolve, run, CliError, Result};
use fds_core::{optimum_bounds, solve, AlphaMode, FdsInstance, SolverParams};

/// Minimal-storage allocation for neighborhood-recoverable coded storage.
///
/// Settings resolve with precedence: command-line flags, then the TOML file
/// given by --config, then built-in defaults. The output directory falls
/// back to $FDS_OUT_DIR and then to the current directory.
///
/// Exit codes: 0 success, 1 invalid settings, 2 unreadable graph,
/// 3 oracle size budget exceeded, 4 unwritable output directory.
#[derive(Parser)]
#[command(name = "fds", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the distributed solver and write trace.csv and summary.json per seed.
    Run(RunArgs),
    /// Estimate per-node recovery rates by random linear coding.
    VerifyRecovery(VerifyArgs),
    /// Print degree statistics, optimum bounds, and round budgets.
    Bounds(GraphArgs),
}

#[derive(Args, Clone)]
struct GraphArgs {
    /// Edge-list file: first line N, then one `u v` pair per line.
    #[arg(long, conflicts_with = "geometric")]
    graph: Option<PathBuf>,
    /// Random geometric graph on the unit square: node count and radius.
    #[arg(long, num_args = 2, value_names = ["N", "R"])]
    geometric: Option<Vec<String>>,
    /// Hop radius: neighborhoods become ℓ-hop neighborhoods.
    #[arg(long)]
    ell: Option<usize>,
    /// Seed for graph generation (repeat for several runs).
    #[arg(long = "seed")]
    seeds: Vec<u64>,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Dmax,
    NSubstitute,
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    graph: GraphArgs,
    /// TOML file with defaults for any of these settings.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Target relative accuracy; sets the round budget.
    #[arg(long)]
    epsilon: Option<f64>,
    /// Regularization weight (default: epsilon).
    #[arg(long)]
    delta: Option<f64>,
    /// Step-size rule: maximum degree, or node count in its place.
    #[arg(long, value_enum)]
    alpha_mode: Option<ModeArg>,
    /// Override the number of rounds.
    #[arg(long)]
    max_rounds: Option<u64>,
    /// Solve the LP exactly and report relative errors.
    #[arg(long)]
    oracle: bool,
    /// Stop early once the relative error reaches this value (needs --oracle).
    #[arg(long)]
    stop_at_rel_error: Option<f64>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write convergence.svg (needs --oracle).
    #[arg(long)]
    plot: bool,
    /// Trace CSV drawn next to this run in the plot.
    #[arg(long)]
    overlay: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    #[command(flatten)]
    graph: GraphArgs,
    /// Number of source symbols the object is split into.
    #[arg(long, default_value_t = 64)]
    m: usize,
    /// Number of independent dissemination trials.
    #[arg(long, default_value_t = 100)]
    trials: u64,
    /// Allocation file (JSON array or plain numbers); otherwise the exact LP optimum.
    #[arg(long, conflicts_with = "solve")]
    allocation: Option<PathBuf>,
    /// Use the distributed solver's output at this epsilon instead of the LP optimum.
    #[arg(long)]
    solve: Option<f64>,
    /// Print the report as JSON.
    #[arg(long)]
    json: bool,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run(args) => cmd_run(args),
        Command::VerifyRecovery(args) => cmd_verify(args),
        Command::Bounds(args) => cmd_bounds(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn geometric(args: &GraphArgs) -> Result<Option<(usize, f64)>> {
    let Some(v) = &args.geometric else { return Ok(None) };
    let bad = || CliError::Config(format!("--geometric expects N R, got {} {}", v[0], v[1]));
    Ok(Some((
        v[0].parse().map_err(|_| bad())?,
        v[1].parse().map_err(|_| bad())?,
    )))
}

fn flags_from(graph: &GraphArgs) -> Result<FlagConfig> {
    Ok(FlagConfig {
        graph: graph.graph.clone(),
        geometric: geometric(graph)?,
        ell: graph.ell,
        seeds: graph.seeds.clone(),
        ..Default::default()
    })
}

fn env_out_dir() -> Option<PathBuf> {
    std::env::var_os(OUT_DIR_ENV)
        .filter(|v| !v.is_empty())
        .map(PathBuf::from)
}

fn cmd_run(args: RunArgs) -> Result<()> {
    let file = match &args.config {
        Some(p) => FileConfig::load(p)?,
        None => FileConfig::default(),
    };
    let flags = FlagConfig {
        epsilon: args.epsilon,
        delta: args.delta,
        alpha_mode: args.alpha_mode.map(|m| match m {
            ModeArg::Dmax => AlphaMode::Dmax,
            ModeArg::NSubstitute => AlphaMode::NSubstitute,
        }),
        max_rounds: args.max_rounds,
        oracle: args.oracle,
        stop_at_rel_error: args.stop_at_rel_error,
        out_dir: args.out,
        plot: args.plot,
        overlay: args.overlay,
        ..flags_from(&args.graph)?
    };
    let config = resolve(flags, file, env_out_dir())?;
    for r in run::run_experiment(&config)? {
        let s = &r.summary;
        let rel = s
            .final_rel_error
            .map(|e| format!("{e:.3e}"))
            .unwrap_or_else(|| "-".into());
        println!(
            "seed {}: N={} rounds={} objective={:.6} rel_error={} -> {}",
            s.seed,
            s.n,
            s.rounds_run,
            s.final_objective,
            rel,
            r.dir.display()
        );
    }
    Ok(())
}

/// Resolves a graph-only command (no epsilon needed) from its flags.
fn graph_config(graph: &GraphArgs) -> Result<fds_cli::ExperimentConfig> {
    let flags = FlagConfig {
        epsilon: Some(1.0),
        ..flags_from(graph)?
    };
    resolve(flags, FileConfig::default(), None)
}

fn cmd_verify(args: VerifyArgs) -> Result<()> {
    let config = graph_config(&args.graph)?;
    let seed = config.seeds[0];
    let g = run::build_graph(&config, seed)?;
    let x = match (&args.allocation, args.solve) {
        (Some(path), _) => fds_cli::read_allocation(path)?,
        (None, Some(eps)) => {
            let inst = FdsInstance::new(g.clone(), eps)?;
            solve(&inst, &SolverParams::for_instance(&inst, eps, AlphaMode::Dmax)?)?.allocation
        }
        (None, None) => match fds_core::solve_exact(&g) {
            Ok(sol) => sol.x_star,
            Err(e @ fds_core::Error::OracleBudget { .. }) => return Err(CliError::OracleBudget(e)),
            Err(e) => return Err(e.into()),
        },
    };
    let report = fds_cli::verify_recovery(&g, &x, args.m, args.trials, seed)?;
    if args.json {
        println!("{}", serde_json::to_string_pretty(&report).expect("report serializes"));
        return Ok(());
    }
    println!("node,x,success_rate");
    for (i, rate) in report.per_node.iter().enumerate() {
        println!("{i},{:.6},{rate:.4}", x.as_slice()[i]);
    }
    println!(
        "overall {:.4}  all-nodes {:.4}  (m={}, trials={})",
        report.overall, report.all_nodes, report.m, report.trials
    );
    Ok(())
}

fn cmd_bounds(args: GraphArgs) -> Result<()> {
    let config = graph_config(&args)?;
    let g = run::build_graph(&config, config.seeds[0])?;
    let b = optimum_bounds(&g);
    println!("N {}", g.n());
    println!("edges {}", g.edge_count());
    println!("d_min {}", g.d_min());
    println!("d_max {}", g.d_max());
    println!("lower {}", b.lower);
    println!("upper {}", b.upper);
    for (eps, k) in run::k_table(&g, &[1.0, 0.1, 0.01])? {
        println!("K({eps}) {k}");
    }
    Ok(())
}
