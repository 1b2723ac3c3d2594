//! Run configuration, read from and written to TOML.

use std::fs;
use std::path::{Path, PathBuf};

use geonflow_core::evolution::{InnerBoundary, SolverConfig, TimeStepper};
use geonflow_core::initial_data::build_initial_state;
use geonflow_core::{BackgroundGauge, FlowError, InitialDataSpec, MetricState, RadialGrid};
use serde::{Deserialize, Serialize};

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Read { path: PathBuf, source: std::io::Error },
    #[error("cannot parse {path}: {source}")]
    Parse { path: PathBuf, source: toml::de::Error },
    #[error(transparent)]
    Invalid(#[from] FlowError),
    #[error("{0}")]
    Other(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    Alpha,
    Tangherlini,
    /// Euclidean space outside the unit ball.
    Flat,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum GaugeKind {
    Flat,
    PowerLaw,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum StepperKind {
    Implicit,
    Explicit,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum InnerKind {
    MinimalSphere,
    Background,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub family: Family,
    pub alpha: f64,
    pub n: usize,
    pub gauge: GaugeKind,
    /// Exponent of the power-law gauge; defaults to the data's `α`.
    pub gauge_alpha: Option<f64>,
    pub r_c: f64,
    pub nodes: usize,
    pub stepper: StepperKind,
    pub cfl: f64,
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub t_max: f64,
    pub collapse_threshold: f64,
    pub blowup_threshold: f64,
    pub snapshot_times: Vec<f64>,
    pub sample_interval: f64,
    pub max_steps: usize,
    /// Defaults to `minimal-sphere`, or `background` for flat data.
    pub inner: Option<InnerKind>,
    pub out: Option<PathBuf>,
    /// Runs are always deterministic; `false` is rejected.
    pub deterministic: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        let s = SolverConfig::default();
        Self {
            family: Family::Alpha,
            alpha: 3.0,
            n: 3,
            gauge: GaugeKind::PowerLaw,
            gauge_alpha: None,
            r_c: s.r_c,
            nodes: s.nodes,
            stepper: StepperKind::Implicit,
            cfl: 0.5,
            rel_tol: s.rel_tol,
            abs_tol: s.abs_tol,
            t_max: s.t_max,
            collapse_threshold: s.collapse_threshold,
            blowup_threshold: s.blowup_threshold,
            snapshot_times: s.snapshot_times,
            sample_interval: s.sample_interval,
            max_steps: s.max_steps,
            inner: None,
            out: None,
            deterministic: true,
        }
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = fs::read_to_string(path).map_err(|source| ConfigError::Read { path: path.into(), source })?;
        toml::from_str(&text).map_err(|source| ConfigError::Parse { path: path.into(), source })
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("RunConfig always serialises")
    }

    pub fn data_spec(&self) -> Result<Option<InitialDataSpec>, FlowError> {
        match self.family {
            Family::Alpha => InitialDataSpec::alpha_family(self.alpha, self.n).map(Some),
            Family::Tangherlini => InitialDataSpec::tangherlini(self.n).map(Some),
            Family::Flat => Ok(None),
        }
    }

    pub fn background_gauge(&self) -> Result<BackgroundGauge, FlowError> {
        match self.gauge {
            GaugeKind::Flat => Ok(BackgroundGauge::Flat),
            GaugeKind::PowerLaw => {
                let default = match self.family {
                    Family::Tangherlini => self.n.saturating_sub(2) as f64,
                    _ => self.alpha,
                };
                BackgroundGauge::power_law(self.gauge_alpha.unwrap_or(default))
            }
        }
    }

    pub fn inner_boundary(&self) -> InnerBoundary {
        match self.inner {
            Some(InnerKind::MinimalSphere) => InnerBoundary::MinimalSphere,
            Some(InnerKind::Background) => InnerBoundary::Background,
            None if self.family == Family::Flat => InnerBoundary::Background,
            None => InnerBoundary::MinimalSphere,
        }
    }

    pub fn solver_config(&self) -> SolverConfig {
        SolverConfig {
            r_c: self.r_c,
            nodes: self.nodes,
            stepper: match self.stepper {
                StepperKind::Implicit => TimeStepper::Implicit,
                StepperKind::Explicit => TimeStepper::Explicit { cfl: self.cfl },
            },
            rel_tol: self.rel_tol,
            abs_tol: self.abs_tol,
            t_max: self.t_max,
            collapse_threshold: self.collapse_threshold,
            blowup_threshold: self.blowup_threshold,
            snapshot_times: self.snapshot_times.clone(),
            sample_interval: self.sample_interval,
            max_steps: self.max_steps,
            inner: self.inner_boundary(),
        }
    }

    /// Checks everything that can be checked without running.
    pub fn validate(&self) -> Result<(), ConfigError> {
        if !self.deterministic {
            return Err(ConfigError::Other("non-deterministic runs are not supported".into()));
        }
        self.solver_config().validate()?;
        self.data_spec()?;
        self.background_gauge()?;
        if self.n < 2 {
            return Err(FlowError::UnsupportedDimension(self.n).into());
        }
        Ok(())
    }

    pub fn initial_state(&self, grid: &RadialGrid) -> Result<MetricState, FlowError> {
        match self.data_spec()? {
            Some(spec) => build_initial_state(&spec, grid),
            None => MetricState::flat(self.n, grid),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_round_trip() {
        let cfg = RunConfig::default();
        assert_eq!(toml::from_str::<RunConfig>(&cfg.to_toml()).unwrap(), cfg);
    }

    #[test]
    fn partial_file_uses_defaults() {
        let cfg: RunConfig = toml::from_str("family = \"tangherlini\"\nn = 4\ninner = \"background\"").unwrap();
        assert_eq!(cfg.family, Family::Tangherlini);
        assert_eq!(cfg.nodes, 2001);
        assert_eq!(cfg.background_gauge().unwrap(), BackgroundGauge::PowerLaw(2.0));
        assert_eq!(cfg.inner_boundary(), InnerBoundary::Background);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(toml::from_str::<RunConfig>("colour = 3").is_err());
        let cfg = RunConfig { deterministic: false, ..Default::default() };
        assert!(cfg.validate().is_err());
        let cfg = RunConfig { alpha: -1.0, ..Default::default() };
        assert!(cfg.validate().is_err());
        let cfg = RunConfig { family: Family::Flat, ..Default::default() };
        assert_eq!(cfg.inner_boundary(), InnerBoundary::Background);
        assert!(cfg.validate().is_ok());
    }
}
