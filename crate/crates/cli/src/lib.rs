//! Command implementations behind the `trilevel` binary.
//!
//! Each command returns `Result<_, CliError>`; [`CliError::exit_code`] maps
//! failures onto the documented process exit codes.

pub mod commands;
pub mod csv;
pub mod svg;

use std::io;
use std::path::PathBuf;

use thiserror::Error;
use trilevel::{ConfigError, SimulateError, SolverKind};

pub use commands::{cmd_check, cmd_figure, cmd_run, cmd_sweep, FIGURE_PANELS};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_SOLVER: i32 = 3;
pub const EXIT_IO: i32 = 4;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Config(#[from] ConfigError),
    #[error("solver failed: {0}")]
    Solver(#[from] SimulateError),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error("{failed} of {total} checks failed")]
    CheckFailed { failed: usize, total: usize },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::CheckFailed { .. } => EXIT_CHECK_FAILED,
            CliError::Config(_) => EXIT_CONFIG,
            CliError::Solver(_) => EXIT_SOLVER,
            CliError::Io { .. } => EXIT_IO,
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: io::Error) -> Self {
        CliError::Io {
            path: path.into(),
            source,
        }
    }
}

/// Global flags; each one, when set, replaces the config file's value.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Overrides {
    pub tol: Option<f64>,
    pub t_end: Option<f64>,
    pub dt_out: Option<f64>,
    pub solver: Option<SolverKind>,
}

impl Overrides {
    pub fn apply(&self, cfg: &mut trilevel::RunConfig) -> Result<(), ConfigError> {
        if let Some(tol) = self.tol {
            cfg.tol = tol;
        }
        if let Some(t_end) = self.t_end {
            cfg.t_end = t_end;
        }
        if let Some(dt_out) = self.dt_out {
            cfg.dt_out = dt_out;
        }
        if let Some(solver) = self.solver {
            cfg.solver = solver;
        }
        cfg.validate()
    }
}
