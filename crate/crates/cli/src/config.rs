//! Experiment configuration.
//!
//! Values resolve with precedence command-line flags, then the TOML config
//! file, then built-in defaults. The output directory additionally falls
//! back to `$FDS_OUT_DIR` before the default `.`.

use std::path::{Path, PathBuf};

use fds_core::{AlphaMode, StorageGraph};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

/// Environment variable naming the default output directory.
pub const OUT_DIR_ENV: &str = "FDS_OUT_DIR";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GraphSource {
    File(PathBuf),
    Geometric { n: usize, radius: f64 },
}

impl GraphSource {
    /// Loads or generates the graph. Geometric graphs use `seed`.
    pub fn build(&self, seed: u64) -> Result<StorageGraph> {
        match self {
            GraphSource::File(path) => {
                let text = std::fs::read_to_string(path).map_err(|e| CliError::GraphRead {
                    path: path.clone(),
                    message: e.to_string(),
                })?;
                StorageGraph::read_edge_list(&text).map_err(|e| CliError::GraphRead {
                    path: path.clone(),
                    message: e.to_string(),
                })
            }
            GraphSource::Geometric { n, radius } => Ok(StorageGraph::geometric(*n, *radius, seed)?),
        }
    }

    pub fn describe(&self) -> String {
        match self {
            GraphSource::File(p) => p.display().to_string(),
            GraphSource::Geometric { n, radius } => format!("geometric n={n} radius={radius}"),
        }
    }
}

/// Fully resolved settings for one `run` or `verify-recovery` invocation.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentConfig {
    pub graph: GraphSource,
    pub epsilon: f64,
    /// Defaults to `epsilon`.
    pub delta: Option<f64>,
    pub alpha_mode: AlphaMode,
    pub ell: usize,
    pub max_rounds: Option<u64>,
    pub oracle: bool,
    /// Experiments only: stop once the relative error reaches this value.
    pub stop_at_rel_error: Option<f64>,
    pub out_dir: PathBuf,
    pub plot: bool,
    /// External trace (same CSV schema) drawn next to ours in the plot.
    pub overlay: Option<PathBuf>,
    pub seeds: Vec<u64>,
}

impl ExperimentConfig {
    pub fn new(graph: GraphSource, epsilon: f64) -> Self {
        Self {
            graph,
            epsilon,
            delta: None,
            alpha_mode: AlphaMode::Dmax,
            ell: 1,
            max_rounds: None,
            oracle: false,
            stop_at_rel_error: None,
            out_dir: PathBuf::from("."),
            plot: false,
            overlay: None,
            seeds: vec![0],
        }
    }

    pub fn delta(&self) -> f64 {
        self.delta.unwrap_or(self.epsilon)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.epsilon > 0.0 && self.epsilon.is_finite()) {
            return Err(CliError::Config(format!(
                "epsilon must be positive, got {}",
                self.epsilon
            )));
        }
        if let Some(d) = self.delta {
            if !(d > 0.0 && d.is_finite()) {
                return Err(CliError::Config(format!("delta must be positive, got {d}")));
            }
        }
        if self.ell == 0 {
            return Err(CliError::Config("ell must be at least 1".into()));
        }
        if let GraphSource::Geometric { n, radius } = self.graph {
            if n == 0 {
                return Err(CliError::Config("geometric graph needs at least one node".into()));
            }
            if !(radius > 0.0 && radius <= std::f64::consts::SQRT_2) {
                return Err(CliError::Config(format!("radius {radius} not in (0, √2]")));
            }
        }
        if self.seeds.is_empty() {
            return Err(CliError::Config("at least one seed is required".into()));
        }
        if self.stop_at_rel_error.is_some() && !self.oracle {
            return Err(CliError::Config("early stop needs the oracle".into()));
        }
        if self.plot && !self.oracle {
            return Err(CliError::Config("the convergence plot needs the oracle".into()));
        }
        Ok(())
    }
}

/// Optional settings read from a TOML file.
#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct FileConfig {
    pub graph: Option<PathBuf>,
    pub geometric: Option<GeometricSpec>,
    pub epsilon: Option<f64>,
    pub delta: Option<f64>,
    pub alpha_mode: Option<AlphaMode>,
    pub ell: Option<usize>,
    pub max_rounds: Option<u64>,
    pub oracle: Option<bool>,
    pub stop_at_rel_error: Option<f64>,
    pub out_dir: Option<PathBuf>,
    pub plot: Option<bool>,
    pub overlay: Option<PathBuf>,
    pub seeds: Option<Vec<u64>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeometricSpec {
    pub n: usize,
    pub radius: f64,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))
    }
}

/// Settings given on the command line; `None` means "not given".
#[derive(Debug, Clone, Default, PartialEq)]
pub struct FlagConfig {
    pub graph: Option<PathBuf>,
    pub geometric: Option<(usize, f64)>,
    pub epsilon: Option<f64>,
    pub delta: Option<f64>,
    pub alpha_mode: Option<AlphaMode>,
    pub ell: Option<usize>,
    pub max_rounds: Option<u64>,
    pub oracle: bool,
    pub stop_at_rel_error: Option<f64>,
    pub out_dir: Option<PathBuf>,
    pub plot: bool,
    pub overlay: Option<PathBuf>,
    pub seeds: Vec<u64>,
}

/// Combines flags, file, environment, and defaults into one config.
pub fn resolve(flags: FlagConfig, file: FileConfig, env_out_dir: Option<PathBuf>) -> Result<ExperimentConfig> {
    let graph = match (flags.graph, flags.geometric) {
        (Some(_), Some(_)) => return Err(CliError::Config("give either --graph or --geometric".into())),
        (Some(p), None) => Some(GraphSource::File(p)),
        (None, Some((n, radius))) => Some(GraphSource::Geometric { n, radius }),
        (None, None) => match (file.graph, file.geometric) {
            (Some(_), Some(_)) => return Err(CliError::Config("config file sets both graph and geometric".into())),
            (Some(p), None) => Some(GraphSource::File(p)),
            (None, Some(g)) => Some(GraphSource::Geometric {
                n: g.n,
                radius: g.radius,
            }),
            (None, None) => None,
        },
    };
    let graph = graph.ok_or_else(|| CliError::Config("no graph given (--graph or --geometric)".into()))?;
    let epsilon = flags
        .epsilon
        .or(file.epsilon)
        .ok_or_else(|| CliError::Config("no target accuracy given (--epsilon)".into()))?;

    let config = ExperimentConfig {
        graph,
        epsilon,
        delta: flags.delta.or(file.delta),
        alpha_mode: flags.alpha_mode.or(file.alpha_mode).unwrap_or_default(),
        ell: flags.ell.or(file.ell).unwrap_or(1),
        max_rounds: flags.max_rounds.or(file.max_rounds),
        oracle: flags.oracle || file.oracle.unwrap_or(false),
        stop_at_rel_error: flags.stop_at_rel_error.or(file.stop_at_rel_error),
        out_dir: flags
            .out_dir
            .or(file.out_dir)
            .or(env_out_dir)
            .unwrap_or_else(|| PathBuf::from(".")),
        plot: flags.plot || file.plot.unwrap_or(false),
        overlay: flags.overlay.or(file.overlay),
        seeds: if flags.seeds.is_empty() {
            file.seeds.unwrap_or_else(|| vec![0])
        } else {
            flags.seeds
        },
    };
    config.validate()?;
    Ok(config)
}
