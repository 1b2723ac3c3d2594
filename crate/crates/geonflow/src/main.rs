use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use geonflow::config::{ConfigError, Family, GaugeKind, InnerKind, RunConfig, StepperKind};
use geonflow::core::barrier::{
    barrier_psi_mode, collapse_time_bound, sharp_collapse_time, BarrierMode, BarrierParams, EulerCoeff,
};
use geonflow::output::{termination_label, write_run_files, write_series};
use geonflow::sweep::{run_sweep, Axis};
use geonflow::validation::{all_hard_pass, run_suite};
use geonflow::{execute, ExitStatus};

#[derive(Parser)]
#[command(
    name = "geonflow",
    version,
    about = "Ricci-DeTurck flow of rotationally symmetric throats",
    allow_negative_numbers = true
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evolve one set of initial data and write its history as CSV.
    Evolve(RunArgs),
    /// Tabulate the area barrier and its collapse time.
    Barrier(BarrierArgs),
    /// Evolve one run per value of α or n, in parallel.
    Sweep(SweepArgs),
    /// Run the built-in acceptance suite.
    Validate {
        /// Only these criteria, e.g. `1,10`.
        #[arg(long, value_delimiter = ',')]
        only: Vec<u8>,
    },
}

/// Run settings. Flags override the configuration file.
#[derive(Args, Clone, Default)]
struct RunArgs {
    /// TOML configuration file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Initial data family.
    #[arg(long, value_enum)]
    family: Option<Family>,
    /// Shape parameter of the α-family.
    #[arg(long)]
    alpha: Option<f64>,
    /// Manifold dimension.
    #[arg(long)]
    n: Option<usize>,
    /// Background metric for the DeTurck field.
    #[arg(long, value_enum)]
    gauge: Option<GaugeKind>,
    /// Exponent of the power-law background; defaults to α (n-2 for Tangherlini).
    #[arg(long)]
    gauge_alpha: Option<f64>,
    /// Outer radius of the grid.
    #[arg(long)]
    rc: Option<f64>,
    /// Number of grid nodes.
    #[arg(long = "N")]
    nodes: Option<usize>,
    /// Time integrator.
    #[arg(long, value_enum)]
    stepper: Option<StepperKind>,
    /// Fraction of the explicit stability limit.
    #[arg(long)]
    cfl: Option<f64>,
    /// Relative tolerance of the implicit stepper.
    #[arg(long)]
    rtol: Option<f64>,
    /// Absolute tolerance of the implicit stepper.
    #[arg(long)]
    atol: Option<f64>,
    /// Final time.
    #[arg(long)]
    t_max: Option<f64>,
    /// Collapse once the throat area drops below this fraction of its start value.
    #[arg(long)]
    collapse_threshold: Option<f64>,
    /// Times at which full profiles are written, e.g. `0,0.5,1`.
    #[arg(long, value_delimiter = ',')]
    snapshots: Option<Vec<f64>>,
    /// Minimum spacing of series rows; 0 writes every step.
    #[arg(long)]
    sample_interval: Option<f64>,
    /// Step budget before the run counts as a stepper failure.
    #[arg(long)]
    max_steps: Option<usize>,
    /// Inner boundary condition.
    #[arg(long, value_enum)]
    inner: Option<InnerKind>,
    /// Output CSV; standard output when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Write the merged configuration to this file.
    #[arg(long)]
    save_config: Option<PathBuf>,
}

impl RunArgs {
    fn resolve(&self) -> Result<RunConfig, ConfigError> {
        let mut c = match &self.config {
            Some(p) => RunConfig::load(p)?,
            None => RunConfig::default(),
        };
        macro_rules! set {
            ($($flag:ident => $field:ident),*) => {$(
                if let Some(v) = self.$flag.clone() { c.$field = v; }
            )*};
        }
        set!(family => family, alpha => alpha, n => n, gauge => gauge, rc => r_c, nodes => nodes,
             stepper => stepper, cfl => cfl, rtol => rel_tol, atol => abs_tol, t_max => t_max,
             collapse_threshold => collapse_threshold, snapshots => snapshot_times,
             sample_interval => sample_interval, max_steps => max_steps);
        if self.gauge_alpha.is_some() {
            c.gauge_alpha = self.gauge_alpha;
        }
        if self.inner.is_some() {
            c.inner = self.inner;
        }
        if self.out.is_some() {
            c.out = self.out.clone();
        }
        c.validate()?;
        if let Some(p) = &self.save_config {
            std::fs::write(p, c.to_toml()).map_err(|e| ConfigError::Other(format!("{}: {e}", p.display())))?;
        }
        Ok(c)
    }
}

#[derive(Args)]
struct BarrierArgs {
    /// Curvature floor: the initial scalar curvature is at least -a2.
    #[arg(long, default_value_t = 0.0)]
    a2: f64,
    /// Initial throat area divided by 4π.
    #[arg(long, default_value_t = 1.0)]
    delta: f64,
    /// Use the projective-plane coefficient 2π instead of 4π.
    #[arg(long)]
    projective: bool,
    /// Growth coefficient read directly off the maximum-principle bound.
    #[arg(long)]
    sharp: bool,
    /// End of the table; defaults to the collapse time, or 2.
    #[arg(long)]
    t_max: Option<f64>,
    /// Rows in the table.
    #[arg(long, default_value_t = 21)]
    points: usize,
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long, value_delimiter = ',', conflicts_with = "ns", required_unless_present = "ns")]
    alphas: Vec<f64>,
    #[arg(long, value_delimiter = ',')]
    ns: Vec<usize>,
    #[arg(long, default_value = "sweep")]
    out_dir: PathBuf,
    #[command(flatten)]
    run: RunArgs,
}

fn evolve_cmd(args: &RunArgs) -> ExitStatus {
    let cfg = match args.resolve() {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitStatus::ConfigError;
        }
    };
    let run = match execute(&cfg) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitStatus::ConfigError;
        }
    };
    let written = match &cfg.out {
        Some(p) => write_run_files(p, &run).map(|_| ()),
        None => match write_series(&mut std::io::stdout().lock(), &run) {
            Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => Ok(()),
            other => other,
        },
    };
    if let Err(e) = written {
        eprintln!("error: {e}");
        return ExitStatus::ConfigError;
    }
    eprintln!("{} after {} steps", termination_label(&run.termination), run.steps);
    ExitStatus::of(&run)
}

fn barrier_cmd(a: &BarrierArgs) -> ExitStatus {
    let euler = if a.projective { EulerCoeff::ProjectivePlane } else { EulerCoeff::Sphere };
    let p = match BarrierParams::new(a.a2, a.delta, euler) {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitStatus::ConfigError;
        }
    };
    let (mode, t_star) = if a.sharp {
        (BarrierMode::Sharp, Some(sharp_collapse_time(&p)))
    } else {
        (BarrierMode::AsWritten, collapse_time_bound(&p))
    };
    let t_end = a.t_max.or(t_star).unwrap_or(2.0);
    let points = a.points.max(2);
    let mut table = match t_star {
        Some(t) => format!("# t*: {t:.11e}\n"),
        None => String::from("# no collapse bound\n"),
    };
    table.push_str("# columns: t,psi\n");
    for i in 0..points {
        let t = t_end * i as f64 / (points - 1) as f64;
        match barrier_psi_mode(t, &p, mode) {
            Ok(v) => table.push_str(&format!("{t:.11e},{v:.11e}\n")),
            Err(e) => {
                eprintln!("error: {e}");
                return ExitStatus::ConfigError;
            }
        }
    }
    // A closed pipe (e.g. `| head`) is not an error for a table dump.
    let _ = std::io::stdout().lock().write_all(table.as_bytes());
    ExitStatus::Clean
}

fn sweep_cmd(a: &SweepArgs) -> ExitStatus {
    let mut base = match a.run.resolve() {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitStatus::ConfigError;
        }
    };
    let (axis, values): (Axis, Vec<f64>) = if a.ns.is_empty() {
        (Axis::Alpha, a.alphas.clone())
    } else {
        (Axis::Dimension, a.ns.iter().map(|&n| n as f64).collect())
    };
    if axis == Axis::Dimension && a.run.family.is_none() && a.run.config.is_none() {
        base.family = Family::Tangherlini;
    }
    let entries = match run_sweep(&base, axis, &values, &a.out_dir) {
        Ok(e) => e,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitStatus::ConfigError;
        }
    };
    for e in &entries {
        match &e.outcome {
            Ok(run) => println!("{} -> {}", e.value, termination_label(&run.termination)),
            Err(msg) => println!("{} -> error: {msg}", e.value),
        }
    }
    entries.iter().map(|e| e.status()).max().unwrap_or(ExitStatus::Clean)
}

fn main() -> ExitCode {
    // Usage errors share the configuration-error status; 2 means a stepper failure.
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    let status = match &cli.command {
        Command::Evolve(args) => evolve_cmd(args),
        Command::Barrier(args) => barrier_cmd(args),
        Command::Sweep(args) => sweep_cmd(args),
        Command::Validate { only } => {
            let results = run_suite(only);
            for r in &results {
                println!("{r}");
            }
            if all_hard_pass(&results) {
                ExitStatus::Clean
            } else {
                ExitStatus::ConfigError
            }
        }
    };
    ExitCode::from(status.code() as u8)
}
