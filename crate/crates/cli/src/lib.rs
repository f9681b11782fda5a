//! Driver for the experiment pipeline: configuration, stage dispatch,
//! artifacts and plots.
//!
//! Stages and the files they read and write (all inside the output
//! directory):
//!
//! | stage        | reads                               | writes                                   |
//! |--------------|-------------------------------------|------------------------------------------|
//! | `geometry`   | config                              | `geometry.json`                          |
//! | `profile`    | `geometry.json`                     | `profile_edge{i}.txt`, `profiles.json`   |
//! | `solve2d`    | `geometry.json`                     | `solution_{k}.txt`, `solve2d.json`       |
//! | `solvegraph` | `profile_edge{i}.txt`               | `graph.txt`, `graph_check.json`          |
//! | `converge`   | `solve2d.json`, solutions, `graph.txt` | `convergence.json`                    |
//! | `report`     | all of the above                    | `summary.txt`, `*.svg`                   |
//! | `check`      | all of the above                    | `check.json`                             |
//!
//! A failing stage writes `failure.json` with a machine-readable kind and
//! message, and the binary exits with a nonzero status.

pub mod boundary;
pub mod checks;
pub mod config;
pub mod pipeline;
pub mod svg;

use config::SchemaError;
use hj_core::convergence::ConvergenceError;
use hj_core::format::FormatError;
use hj_core::graph::GraphError;
use hj_core::hamiltonian::GeometryError;
use hj_core::hj2d::Hj2dError;
use hj_core::level_set::LevelSetError;
use serde_json::{json, Value};
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use thiserror::Error;

pub use pipeline::run_stage;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Subcommand {
    Geometry,
    Profile,
    Solve2d,
    SolveGraph,
    Converge,
    Report,
    Check,
}

impl Subcommand {
    pub const ALL: [Subcommand; 7] = [
        Self::Geometry,
        Self::Profile,
        Self::Solve2d,
        Self::SolveGraph,
        Self::Converge,
        Self::Report,
        Self::Check,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Self::Geometry => "geometry",
            Self::Profile => "profile",
            Self::Solve2d => "solve2d",
            Self::SolveGraph => "solvegraph",
            Self::Converge => "converge",
            Self::Report => "report",
            Self::Check => "check",
        }
    }
}

impl fmt::Display for Subcommand {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Subcommand {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| format!("unknown subcommand `{s}`"))
    }
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Config(#[from] SchemaError),
    #[error("missing artifact {}; run the earlier stage first", .path.display())]
    MissingArtifact { path: PathBuf },
    #[error("{}: {source}", .path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{}: {source}", .path.display())]
    Format {
        path: PathBuf,
        #[source]
        source: FormatError,
    },
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Orbit(#[from] LevelSetError),
    #[error(transparent)]
    Solver(#[from] Hj2dError),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Convergence(#[from] ConvergenceError),
    #[error("{0}")]
    Stage(String),
    #[error("check suites failed: {}", .0.join(", "))]
    ChecksFailed(Vec<String>),
}

impl CliError {
    pub fn kind(&self) -> &'static str {
        match self {
            Self::Config(_) => "config",
            Self::MissingArtifact { .. } => "missing_artifact",
            Self::Io { .. } => "io",
            Self::Format { .. } => "format",
            Self::Geometry(_) => "geometry",
            Self::Orbit(_) => "orbit",
            Self::Solver(_) => "solver",
            Self::Graph(_) => "graph",
            Self::Convergence(_) => "convergence",
            Self::Stage(_) => "stage",
            Self::ChecksFailed(_) => "checks_failed",
        }
    }

    pub fn to_json(&self, stage: Option<Subcommand>) -> Value {
        let mut v = json!({
            "kind": self.kind(),
            "message": self.to_string(),
            "stage": stage.map(|s| s.name()),
        });
        match self {
            Self::Config(e) => {
                v["violations"] = e
                    .violations
                    .iter()
                    .map(|x| json!({"path": x.path, "message": x.message}))
                    .collect();
            }
            Self::MissingArtifact { path } => v["path"] = json!(path.display().to_string()),
            Self::ChecksFailed(s) => v["suites"] = json!(s),
            _ => {}
        }
        v
    }
}

/// Output directory with the file names shared by all stages.
#[derive(Debug, Clone)]
pub struct Artifacts {
    pub dir: PathBuf,
}

impl Artifacts {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        Self { dir: dir.into() }
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.dir.join(name)
    }

    pub fn profile(&self, edge: usize) -> PathBuf {
        self.path(&format!("profile_edge{edge}.txt"))
    }

    pub fn solution(&self, k: usize) -> PathBuf {
        self.path(&format!("solution_{k}.txt"))
    }

    pub fn read(&self, path: &Path) -> Result<String, CliError> {
        if !path.exists() {
            return Err(CliError::MissingArtifact {
                path: path.to_path_buf(),
            });
        }
        fs::read_to_string(path).map_err(|source| CliError::Io {
            path: path.to_path_buf(),
            source,
        })
    }

    pub fn read_json(&self, name: &str) -> Result<Value, CliError> {
        let path = self.path(name);
        let text = self.read(&path)?;
        serde_json::from_str(&text).map_err(|e| CliError::Stage(format!("{}: {e}", path.display())))
    }

    pub fn write(&self, name: &str, text: &str) -> Result<(), CliError> {
        let path = self.path(name);
        fs::create_dir_all(&self.dir).map_err(|source| CliError::Io {
            path: self.dir.clone(),
            source,
        })?;
        fs::write(&path, text).map_err(|source| CliError::Io { path, source })
    }

    pub fn write_json(&self, name: &str, v: &Value) -> Result<(), CliError> {
        let mut text = serde_json::to_string_pretty(v).expect("serializable value");
        text.push('\n');
        self.write(name, &text)
    }

    pub fn remove(&self, name: &str) {
        let _ = fs::remove_file(self.path(name));
    }
}

/// Reads and validates the config, resolves the output directory and runs
/// one stage. On failure `failure.json` is written next to the artifacts
/// when the directory is known.
pub fn run(sub: Subcommand, config_path: &Path, out: Option<PathBuf>) -> Result<(), CliError> {
    configure_threads();
    let parsed = fs::read_to_string(config_path)
        .map_err(|source| CliError::Io {
            path: config_path.to_path_buf(),
            source,
        })
        .and_then(|text| Ok(config::parse_config(&text)?));
    let cfg = match parsed {
        Ok(cfg) => cfg,
        Err(e) => {
            if let Some(dir) = &out {
                let _ = Artifacts::new(dir).write_json("failure.json", &e.to_json(Some(sub)));
            }
            return Err(e);
        }
    };
    let dir = out.unwrap_or_else(|| {
        if cfg.output.is_absolute() {
            cfg.output.clone()
        } else {
            config_path
                .parent()
                .unwrap_or(Path::new("."))
                .join(&cfg.output)
        }
    });
    let art = Artifacts::new(dir);
    art.remove("failure.json");
    let result = run_stage(sub, &cfg, &art);
    if let Err(e) = &result {
        let _ = art.write_json("failure.json", &e.to_json(Some(sub)));
    }
    result
}

/// Sizes the global thread pool from `HJ_AVERAGER_THREADS` when set.
pub fn configure_threads() {
    if let Some(n) = std::env::var("HJ_AVERAGER_THREADS")
        .ok()
        .and_then(|s| s.trim().parse::<usize>().ok())
        .filter(|n| *n > 0)
    {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
}
