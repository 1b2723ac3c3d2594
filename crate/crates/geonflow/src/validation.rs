//! The built-in acceptance suite behind `geonflow validate`.
//!
//! Resolutions were chosen by convergence studies on a uniform grid: the
//! neck of a collapsing throat is only a few cells wide, so the collapse
//! criteria need far more nodes than the identities do.

use std::f64::consts::PI;
use std::fmt;

use geonflow_core::barrier::{
    barrier_psi, collapse_time_bound, critical_a_squared, BarrierParams, EulerCoeff,
};
use geonflow_core::diagnostics::{
    extract_boundary_pulse, is_boundary_clean, re_expansion_after_onset, throat_area_at, worst_2d_ratio,
    worst_tangherlini_ratio, DEFAULT_WINDOW,
};
use geonflow_core::evolution::{evolve, initial_slope_check, InnerBoundary, RunRecord, SolverConfig, Termination};
use geonflow_core::geometry::scalar_curvature;
use geonflow_core::initial_data::{build_initial_state, infimum_initial_r};
use geonflow_core::{BackgroundGauge, FlowError, InitialDataSpec, MetricState, RadialGrid};
use rayon::prelude::*;

pub const CRITERIA: [u8; 12] = [1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12];

/// Grid for the identities and short runs.
pub const BASE_NODES: usize = 2001;
/// Grid for the collapse runs.
pub const COLLAPSE_NODES: usize = 128_001;
/// Grid for `α = 3`, whose neck is the narrowest: on 128001 nodes its
/// throat curvature turns over below `10³` as the neck drops under a few
/// cells.
pub const NARROW_NECK_NODES: usize = 256_001;

/// Tolerance of the collapse runs. Spatial error dominates there; tighter
/// values move the collapse time by less than `1e-5` relative.
pub const COLLAPSE_RTOL: f64 = 1e-4;

fn collapse_nodes(alpha: f64) -> usize {
    if alpha >= 3.0 {
        NARROW_NECK_NODES
    } else {
        COLLAPSE_NODES
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CriterionResult {
    pub id: u8,
    pub title: &'static str,
    pub passed: bool,
    /// Soft criteria are logged but never fail the suite.
    pub hard: bool,
    pub detail: String,
}

impl fmt::Display for CriterionResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let verdict = match (self.passed, self.hard) {
            (true, _) => "PASS",
            (false, true) => "FAIL",
            (false, false) => "WARN",
        };
        write!(f, "criterion {:>2} {verdict}  {}: {}", self.id, self.title, self.detail)
    }
}

fn result(id: u8, title: &'static str, passed: bool, detail: String) -> CriterionResult {
    CriterionResult { id, title, passed, hard: true, detail }
}

fn failed(id: u8, title: &'static str, e: FlowError) -> CriterionResult {
    result(id, title, false, format!("error: {e}"))
}

fn alpha_run(alpha: f64, n: usize, gauge: BackgroundGauge, cfg: &SolverConfig) -> Result<RunRecord, FlowError> {
    let spec = InitialDataSpec::alpha_family(alpha, n)?;
    let grid = cfg.grid()?;
    let state = build_initial_state(&spec, &grid)?;
    Ok(evolve(&state, &gauge, &grid, cfg)?.with_data(spec))
}

fn collapse_cfg(nodes: usize, t_max: f64) -> SolverConfig {
    SolverConfig { nodes, t_max, rel_tol: COLLAPSE_RTOL, abs_tol: COLLAPSE_RTOL * 1e-3, ..Default::default() }
}

fn base_cfg(t_max: f64) -> SolverConfig {
    SolverConfig { nodes: BASE_NODES, t_max, ..Default::default() }
}

/// Collapse runs for `α ∈ {1, 2, 2.5, 3}`, shared by several criteria.
pub struct CollapseRuns {
    pub alphas: Vec<f64>,
    pub runs: Vec<Result<RunRecord, FlowError>>,
}

impl CollapseRuns {
    pub fn compute() -> Self {
        let alphas = vec![1.0, 2.0, 2.5, 3.0];
        let runs = alphas
            .par_iter()
            .map(|&a| alpha_run(a, 3, BackgroundGauge::PowerLaw(a), &collapse_cfg(collapse_nodes(a), 3.0)))
            .collect();
        Self { alphas, runs }
    }

    pub fn get(&self, alpha: f64) -> Result<&RunRecord, FlowError> {
        let i = self.alphas.iter().position(|&a| a == alpha).ok_or(FlowError::Config("alpha not in the set"))?;
        self.runs[i].as_ref().map_err(Clone::clone)
    }
}

pub fn initial_slope() -> CriterionResult {
    const TITLE: &str = "initial slope of the throat area";
    let grid = match RadialGrid::throat(10.0, BASE_NODES) {
        Ok(g) => g,
        Err(e) => return failed(1, TITLE, e),
    };
    let table = match initial_slope_check(&[1.0, 2.0, 2.5, 3.0, 4.0, 8.0], 3, &grid, None) {
        Ok(t) => t,
        Err(e) => return failed(1, TITLE, e),
    };
    let mut ok = true;
    let mut parts = Vec::new();
    for row in &table.rows {
        let good = if row.alpha == 2.0 {
            (row.measured - row.expected).abs() < 0.05
        } else {
            row.rel_error < 0.01
        };
        ok &= good;
        parts.push(format!("α={} {:.5} vs {:.5}", row.alpha, row.measured, row.expected));
    }
    result(1, TITLE, ok, parts.join("; "))
}

pub fn flat_fixed_point() -> CriterionResult {
    const TITLE: &str = "flat fixed point";
    let run = || -> Result<f64, FlowError> {
        let cfg = SolverConfig {
            nodes: BASE_NODES,
            t_max: 1.0,
            snapshot_times: vec![0.0, 0.25, 0.5, 0.75, 1.0],
            inner: InnerBoundary::Background,
            ..Default::default()
        };
        let grid = cfg.grid()?;
        let state = MetricState::flat(3, &grid)?;
        let run = evolve(&state, &BackgroundGauge::Flat, &grid, &cfg)?;
        if run.termination != Termination::ReachedHorizon || run.snapshots.len() != 5 {
            return Err(FlowError::Config("flat run did not reach t = 1"));
        }
        Ok(run
            .snapshots
            .iter()
            .flat_map(|snap| snap.s.iter().zip(&state.s).map(|(s, s0)| (s - s0).abs() / s0))
            .fold(0.0, f64::max))
    };
    match run() {
        Ok(drift) => result(2, TITLE, drift < 1e-4, format!("max relative drift in S {drift:.3e}")),
        Err(e) => failed(2, TITLE, e),
    }
}

fn max_abs_r(spec: &InitialDataSpec, nodes: usize) -> Result<(f64, f64), FlowError> {
    let grid = RadialGrid::throat(10.0, nodes)?;
    let state = build_initial_state(spec, &grid)?;
    let r = scalar_curvature(&state, &grid);
    Ok((r.iter().fold(0.0, |m, x| m.max(x.abs())), grid.spacing()))
}

pub fn schwarzschild_flatness() -> CriterionResult {
    const TITLE: &str = "scalar flatness of Schwarzschild data";
    let mut ok = true;
    let mut parts = Vec::new();
    for n in [3, 4, 5] {
        match InitialDataSpec::tangherlini(n).and_then(|s| max_abs_r(&s, BASE_NODES)) {
            Ok((m, h)) => {
                ok &= m < 50.0 * h * h;
                parts.push(format!("n={n} max|R| {m:.3e} (limit {:.3e})", 50.0 * h * h));
            }
            Err(e) => return failed(3, TITLE, e),
        }
    }
    result(3, TITLE, ok, parts.join("; "))
}

pub fn collapse_reproduction(runs: &CollapseRuns) -> CriterionResult {
    const TITLE: &str = "collapse for α in {1, 2, 2.5, 3}";
    let mut ok = true;
    let mut parts = Vec::new();
    for &a in &runs.alphas {
        match runs.get(a) {
            Ok(run) => {
                let peak = run.samples.iter().map(|s| s.r_throat).fold(f64::NEG_INFINITY, f64::max);
                let good = run.collapse_time().is_some() && peak > 1e3;
                ok &= good;
                parts.push(format!("α={a} N={} {:?} R_throat peak {peak:.3e}", run.grid.len(), run.termination));
            }
            Err(e) => return failed(4, TITLE, e),
        }
    }
    result(4, TITLE, ok, parts.join("; "))
}

pub fn large_alpha_collapse() -> CriterionResult {
    const TITLE: &str = "collapse for α in {4, 5, 6, 8}";
    let alphas = [4.0, 5.0, 6.0, 8.0];
    let cfg = base_cfg(60.0);
    let runs: Vec<_> = alphas.par_iter().map(|&a| alpha_run(a, 3, BackgroundGauge::PowerLaw(a), &cfg)).collect();
    let mut ok = true;
    let mut parts = Vec::new();
    for (a, run) in alphas.iter().zip(runs) {
        let run = match run {
            Ok(r) => r,
            Err(e) => return failed(5, TITLE, e),
        };
        let good = match run.termination {
            Termination::Collapsed(_) => re_expansion_after_onset(&run).is_none(),
            Termination::CurvatureBlowup(_) => true,
            _ => false,
        };
        ok &= good;
        parts.push(format!("α={a} {:?}", run.termination));
    }
    result(5, TITLE, ok, parts.join("; "))
}

pub fn barrier_dominance(runs: &CollapseRuns) -> CriterionResult {
    const TITLE: &str = "area barrier for three-dimensional Schwarzschild";
    let run = match runs.get(1.0) {
        Ok(r) => r,
        Err(e) => return failed(6, TITLE, e),
    };
    let p = BarrierParams::new(0.0, 1.0, EulerCoeff::Sphere).expect("valid barrier parameters");
    let slack = 0.02 * 4.0 * PI;
    let mut clean = 0usize;
    let mut worst_clean = f64::INFINITY;
    let mut worst_all = f64::INFINITY;
    for s in &run.samples {
        let margin = barrier_psi(s.t, &p).unwrap_or(f64::NAN) + slack - s.s_throat;
        worst_all = worst_all.min(margin);
        if is_boundary_clean(s) {
            clean += 1;
            worst_clean = worst_clean.min(margin);
        }
    }
    let t_c = run.collapse_time();
    let ok = clean > 0 && worst_clean >= 0.0 && t_c.is_some_and(|t| t <= 1.05);
    result(
        6,
        TITLE,
        ok,
        format!(
            "t_c {t_c:?}; worst margin {worst_clean:.3e} over {clean} boundary-clean samples, {worst_all:.3e} over all {}",
            run.samples.len()
        ),
    )
}

pub fn two_dimensional(runs: &CollapseRuns) -> CriterionResult {
    const TITLE: &str = "no collapse in two dimensions";
    let t_c = match runs.get(1.0).map(|r| r.collapse_time()) {
        Ok(Some(t)) => t,
        Ok(None) => return result(7, TITLE, false, "reference run did not collapse".into()),
        Err(e) => return failed(7, TITLE, e),
    };
    let cfg = base_cfg(5.0 * t_c);
    let alphas = [1.0, 2.0];
    let out: Vec<_> = alphas
        .par_iter()
        .map(|&a| -> Result<(RunRecord, f64), FlowError> {
            let run = alpha_run(a, 2, BackgroundGauge::PowerLaw(a), &cfg)?;
            let grid = cfg.grid()?;
            let a2 = infimum_initial_r(&build_initial_state(&InitialDataSpec::alpha_family(a, 2)?, &grid)?, &grid);
            Ok((run, a2))
        })
        .collect();
    let mut ok = true;
    let mut parts = Vec::new();
    for (a, r) in alphas.iter().zip(out) {
        let (run, a2) = match r {
            Ok(x) => x,
            Err(e) => return failed(7, TITLE, e),
        };
        let ratio = worst_2d_ratio(&run, a2);
        ok &= run.termination == Termination::ReachedHorizon && ratio <= 1.01;
        parts.push(format!("α={a} {:?} at t_max {:.4}; worst S/bound {ratio:.5}", run.termination, cfg.t_max));
    }
    result(7, TITLE, ok, parts.join("; "))
}

pub fn tangherlini_decay() -> CriterionResult {
    const TITLE: &str = "Tangherlini decay bound";
    let cfg = base_cfg(10.0);
    let mut ok = true;
    let mut parts = Vec::new();
    for n in [4, 5] {
        let r = InitialDataSpec::tangherlini(n).and_then(|spec| {
            let grid = cfg.grid()?;
            let state = build_initial_state(&spec, &grid)?;
            let gauge = BackgroundGauge::power_law(spec.alpha())?;
            let run = evolve(&state, &gauge, &grid, &cfg)?;
            Ok((worst_tangherlini_ratio(&run)?, run.termination))
        });
        match r {
            Ok((ratio, term)) => {
                ok &= ratio <= 1.05;
                parts.push(format!("n={n} {term:?}; worst S/bound {ratio:.4}"));
            }
            Err(e) => return failed(8, TITLE, e),
        }
    }
    result(8, TITLE, ok, parts.join("; "))
}

pub fn cross_gauge() -> CriterionResult {
    const TITLE: &str = "flat background gauge";
    const NODES: usize = 4001;
    const WINDOW: f64 = 0.05;
    let alphas = [2.0, 3.0];
    let out: Vec<_> = alphas
        .par_iter()
        .map(|&a| -> Result<(Termination, f64), FlowError> {
            let long = SolverConfig { r_c: 20.0, nodes: NODES, t_max: 60.0, ..Default::default() };
            let flat = alpha_run(a, 3, BackgroundGauge::Flat, &long)?;
            let short = SolverConfig { t_max: WINDOW, ..long };
            let power = alpha_run(a, 3, BackgroundGauge::PowerLaw(a), &short)?;
            let diff = power
                .samples
                .iter()
                .map(|s| (throat_area_at(&flat.samples, s.t) - s.s_throat).abs() / s.s_throat)
                .fold(0.0, f64::max);
            Ok((flat.termination, diff))
        })
        .collect();
    let mut ok = true;
    let mut parts = Vec::new();
    for (a, r) in alphas.iter().zip(out) {
        match r {
            Ok((term, diff)) => {
                ok &= matches!(term, Termination::Collapsed(_)) && diff < 0.02;
                parts.push(format!("α={a} {term:?}; throat difference {:.2}%", 100.0 * diff));
            }
            Err(e) => return failed(9, TITLE, e),
        }
    }
    result(9, TITLE, ok, parts.join("; "))
}

pub fn barrier_identities() -> CriterionResult {
    const TITLE: &str = "barrier identities";
    let t = |a2: f64| {
        let p = BarrierParams::new(a2, 1.0, EulerCoeff::Sphere).expect("valid barrier parameters");
        collapse_time_bound(&p).unwrap_or(f64::NAN)
    };
    let t0 = t(0.0);
    let crit = critical_a_squared(1.0).unwrap_or(f64::NAN);
    let log_branch = t(4.0 / 3.0);
    let log_exact = 1.5 * ((2.0f64 / 3.0).exp() - 1.0);
    let jump = (t(4.0 / 3.0 + 1e-6) - log_exact).abs().max((t(4.0 / 3.0 - 1e-6) - log_exact).abs());
    let ok = (t0 - 1.0).abs() <= 4.0 * f64::EPSILON
        && crit == 10.0 / 3.0
        && (log_branch - log_exact).abs() < 1e-10
        && jump < 1e-4;
    result(
        10,
        TITLE,
        ok,
        format!("t*(0,1) {t0:.15}; a²_crit {crit:.15}; log-branch t* {log_branch:.12}; continuity gap {jump:.2e}"),
    )
}

pub fn grid_convergence(runs: &CollapseRuns) -> CriterionResult {
    const TITLE: &str = "grid convergence";
    let fine = match runs.get(3.0).map(|r| r.collapse_time()) {
        Ok(t) => t,
        Err(e) => return failed(11, TITLE, e),
    };
    let coarse = alpha_run(3.0, 3, BackgroundGauge::PowerLaw(3.0), &collapse_cfg(COLLAPSE_NODES, 3.0));
    let coarse = match coarse {
        Ok(r) => r.collapse_time(),
        Err(e) => return failed(11, TITLE, e),
    };
    let change = match (coarse, fine) {
        (Some(c), Some(f)) => (c - f).abs() / f,
        _ => f64::INFINITY,
    };
    let spec = InitialDataSpec::tangherlini(3).expect("n = 3 is supported");
    let errs: Result<Vec<f64>, FlowError> = [501, 1001, 2001].iter().map(|&m| max_abs_r(&spec, m).map(|x| x.0)).collect();
    let errs = match errs {
        Ok(e) => e,
        Err(e) => return failed(11, TITLE, e),
    };
    let order = (errs[1] / errs[2]).log2();
    result(
        11,
        TITLE,
        change < 0.01 && order >= 1.8,
        format!(
            "α=3 t_c {coarse:?} -> {fine:?} (change {:.3}%); R order {:.3} ({:.2e}, {:.2e}, {:.2e})",
            100.0 * change,
            order,
            errs[0],
            errs[1],
            errs[2]
        ),
    )
}

/// Collapse time, `(t, max R)` per snapshot, and `|R(0,1)|`.
type PulseSummary = (f64, Vec<(f64, f64)>, f64);

pub fn boundary_pulse() -> CriterionResult {
    const TITLE: &str = "outer boundary pulse dissipates";
    let run = || -> Result<PulseSummary, FlowError> {
        let cfg = SolverConfig { r_c: 100.0, nodes: 40_001, t_max: 3.0, ..Default::default() };
        let first = alpha_run(3.0, 3, BackgroundGauge::PowerLaw(3.0), &cfg)?;
        let t_c = first.collapse_time().ok_or(FlowError::Config("α = 3 run at r_c = 100 did not collapse"))?;
        let cfg = SolverConfig { snapshot_times: vec![0.1 * t_c, 0.5 * t_c, 0.9 * t_c], ..cfg };
        let second = alpha_run(3.0, 3, BackgroundGauge::PowerLaw(3.0), &cfg)?;
        let r0 = second.samples[0].r_throat.abs();
        let profiles = extract_boundary_pulse(&second, DEFAULT_WINDOW)?;
        Ok((t_c, profiles.iter().map(|p| (p.t, p.max())).collect(), r0))
    };
    match run() {
        Ok((t_c, maxima, r0)) => {
            let decays = maxima.first().map(|x| x.1) > maxima.last().map(|x| x.1);
            let below = maxima.iter().all(|&(_, m)| m.abs() < r0);
            let listed: Vec<String> = maxima.iter().map(|(t, m)| format!("{m:.3e} at t={t:.4}")).collect();
            CriterionResult {
                id: 12,
                title: TITLE,
                passed: decays,
                hard: false,
                detail: format!(
                    "t_c {t_c:.5}; outer-window max R {}; below |R(0,1)| = {r0:.3}: {below}",
                    listed.join(", ")
                ),
            }
        }
        Err(e) => CriterionResult { hard: false, ..failed(12, TITLE, e) },
    }
}

/// Runs the selected criteria (all when `only` is empty) in order.
pub fn run_suite(only: &[u8]) -> Vec<CriterionResult> {
    let wanted = |id: u8| only.is_empty() || only.contains(&id);
    let collapse = [4, 6, 7, 11].iter().any(|&i| wanted(i)).then(CollapseRuns::compute);
    let mut out = Vec::new();
    for id in CRITERIA.into_iter().filter(|&i| wanted(i)) {
        let shared = collapse.as_ref();
        out.push(match id {
            1 => initial_slope(),
            2 => flat_fixed_point(),
            3 => schwarzschild_flatness(),
            4 => collapse_reproduction(shared.expect("collapse runs computed")),
            5 => large_alpha_collapse(),
            6 => barrier_dominance(shared.expect("collapse runs computed")),
            7 => two_dimensional(shared.expect("collapse runs computed")),
            8 => tangherlini_decay(),
            9 => cross_gauge(),
            10 => barrier_identities(),
            11 => grid_convergence(shared.expect("collapse runs computed")),
            12 => boundary_pulse(),
            _ => unreachable!(),
        });
    }
    out
}

/// True when every hard criterion passed.
pub fn all_hard_pass(results: &[CriterionResult]) -> bool {
    results.iter().all(|r| r.passed || !r.hard)
}
