//! Configuration files, CSV output, parameter sweeps and the validation
//! suite around [`geonflow_core`].

pub mod config;
pub mod output;
pub mod sweep;
pub mod validation;

pub use geonflow_core as core;

use geonflow_core::evolution::{evolve, RunRecord, Termination};

use config::{ConfigError, RunConfig};

/// Process exit status of a run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum ExitStatus {
    /// Any termination other than a stepper failure, collapse included.
    Clean = 0,
    ConfigError = 1,
    StepperFailure = 2,
}

impl ExitStatus {
    pub fn of(run: &RunRecord) -> Self {
        match run.termination {
            Termination::StepperFailure(_) => Self::StepperFailure,
            _ => Self::Clean,
        }
    }

    pub fn code(self) -> i32 {
        self as i32
    }
}

/// Builds the initial data and grid described by `cfg` and evolves them.
pub fn execute(cfg: &RunConfig) -> Result<RunRecord, ConfigError> {
    cfg.validate()?;
    let solver = cfg.solver_config();
    let grid = solver.grid()?;
    let state = cfg.initial_state(&grid)?;
    let run = evolve(&state, &cfg.background_gauge()?, &grid, &solver)?;
    Ok(match cfg.data_spec()? {
        Some(spec) => run.with_data(spec),
        None => run,
    })
}
