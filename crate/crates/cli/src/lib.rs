//! Library half of the `fds` command-line tool: configuration resolution,
//! experiment runs with CSV/JSON/SVG output, and recovery verification.

pub mod config;
pub mod error;
pub mod plot;
pub mod recovery;
pub mod run;

pub use config::{resolve, ExperimentConfig, FileConfig, FlagConfig, GraphSource, OUT_DIR_ENV};
pub use error::{CliError, Result};
pub use recovery::{read_allocation, verify_recovery, RecoveryReport};
pub use run::{build_graph, run_experiment, trace_csv, RunResult, RunSummary, TRACE_HEADER};
