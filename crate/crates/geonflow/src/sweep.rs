//! Parameter sweeps: one independent run per value, executed in parallel.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use geonflow_core::evolution::{RunRecord, Termination};
use rayon::prelude::*;

use crate::config::RunConfig;
use crate::output::{termination_kind, write_run_files};
use crate::{execute, ExitStatus};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Axis {
    Alpha,
    Dimension,
}

impl Axis {
    fn name(self) -> &'static str {
        match self {
            Axis::Alpha => "alpha",
            Axis::Dimension => "n",
        }
    }

    fn apply(self, base: &RunConfig, value: f64) -> RunConfig {
        let mut cfg = base.clone();
        match self {
            Axis::Alpha => cfg.alpha = value,
            Axis::Dimension => cfg.n = value as usize,
        }
        cfg.out = None;
        cfg
    }
}

#[derive(Debug)]
pub struct SweepEntry {
    pub value: f64,
    pub file: PathBuf,
    pub outcome: Result<RunRecord, String>,
}

impl SweepEntry {
    pub fn status(&self) -> ExitStatus {
        match &self.outcome {
            Ok(run) if matches!(run.termination, Termination::StepperFailure(_)) => ExitStatus::StepperFailure,
            Ok(_) => ExitStatus::Clean,
            Err(_) => ExitStatus::ConfigError,
        }
    }
}

fn file_name(axis: Axis, value: f64) -> String {
    format!("{}_{value}.csv", axis.name())
}

/// Runs every value and writes `<axis>_<value>.csv` plus `summary.csv`
/// into `dir`. A failing run is recorded in the summary without
/// affecting the others.
pub fn run_sweep(base: &RunConfig, axis: Axis, values: &[f64], dir: &Path) -> io::Result<Vec<SweepEntry>> {
    fs::create_dir_all(dir)?;
    let entries: Vec<SweepEntry> = values
        .par_iter()
        .map(|&value| {
            let cfg = axis.apply(base, value);
            let file = dir.join(file_name(axis, value));
            let outcome = execute(&cfg).map_err(|e| e.to_string()).and_then(|run| {
                write_run_files(&file, &run).map_err(|e| e.to_string())?;
                Ok(run)
            });
            SweepEntry { value, file, outcome }
        })
        .collect();
    let mut w = io::BufWriter::new(fs::File::create(dir.join("summary.csv"))?);
    write_summary(&mut w, axis, &entries)?;
    w.flush()?;
    Ok(entries)
}

pub fn write_summary<W: Write>(w: &mut W, axis: Axis, entries: &[SweepEntry]) -> io::Result<()> {
    writeln!(w, "# columns: {},termination,t_end,steps", axis.name())?;
    for e in entries {
        match &e.outcome {
            Ok(run) => writeln!(
                w,
                "{:.11e},{},{:.11e},{}",
                e.value,
                termination_kind(&run.termination),
                run.end_time(),
                run.steps
            )?,
            Err(msg) => writeln!(w, "{:.11e},error: {},,", e.value, msg.replace(',', ";"))?,
        }
    }
    Ok(())
}
