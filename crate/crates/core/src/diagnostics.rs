//! Post-processing of runs: bound margins, the outer-boundary pulse and
//! figure tables.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt::Write;

#[allow(unused_imports)] // shadowed by inherent methods when std is linked
use num_traits::Float;

use crate::barrier::{area_bound_2d, barrier_psi, max_principle_bound, tangherlini_bound, BarrierParams};
use crate::evolution::{RunRecord, Sample};
use crate::geometry::scalar_curvature;
use crate::{BackgroundGauge, FlowError, InitialFamily};

/// Fraction of `[r_min, r_c]` treated as the outer window.
pub const DEFAULT_WINDOW: f64 = 0.1;

/// Relative throat-curvature level below which the outer window counts as
/// quiet.
pub const CLEAN_FRACTION: f64 = 0.1;

/// Most negative margin and where it occurred.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Violation {
    pub t: f64,
    pub margin: f64,
}

/// Margins of one run against the analytic bounds, one entry per sample.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundReport {
    pub times: Vec<f64>,
    /// `min_r R(t,·) - max_principle_bound(t)`.
    pub mp_margins: Vec<f64>,
    /// `Ψ(t) - S_throat(t)`.
    pub barrier_margins: Vec<f64>,
    /// Largest `R` in the outer window.
    pub pulse: Vec<f64>,
    /// Whether the pulse is below [`CLEAN_FRACTION`] of `|R_throat|`.
    pub clean: Vec<bool>,
    /// `0.05 a² + 10 h²`.
    pub mp_tolerance: f64,
    /// The pulse stayed below a tenth of `|min R(0,·)|` after the start, so
    /// the maximum-principle bound is expected to hold.
    pub mp_applicable: bool,
    pub worst_mp: Option<Violation>,
    pub worst_barrier: Option<Violation>,
}

impl BoundReport {
    /// Samples whose maximum-principle margin is below `-mp_tolerance`.
    pub fn mp_violations(&self) -> impl Iterator<Item = Violation> + '_ {
        self.times
            .iter()
            .zip(&self.mp_margins)
            .filter(move |(_, &m)| m < -self.mp_tolerance)
            .map(|(&t, &margin)| Violation { t, margin })
    }
}

fn worst(times: &[f64], margins: &[f64]) -> Option<Violation> {
    times
        .iter()
        .zip(margins)
        .map(|(&t, &margin)| Violation { t, margin })
        .min_by(|a, b| a.margin.total_cmp(&b.margin))
}

/// Whether the outer window is quiet relative to the throat at `s`.
pub fn is_boundary_clean(s: &Sample) -> bool {
    s.outer_r_max.abs() < CLEAN_FRACTION * s.r_throat.abs()
}

/// Compares a run with the maximum-principle bound and the area barrier.
pub fn check_bounds(run: &RunRecord, p: &BarrierParams, n: usize) -> Result<BoundReport, FlowError> {
    if run.snapshots.is_empty() {
        return Err(FlowError::NeedsSnapshots);
    }
    let h = run.grid.spacing();
    let times: Vec<f64> = run.samples.iter().map(|s| s.t).collect();
    let mp_margins: Vec<f64> = run.samples.iter().map(|s| s.r_min - max_principle_bound(s.t, p.a2, n)).collect();
    let barrier_margins = run
        .samples
        .iter()
        .map(|s| Ok(barrier_psi(s.t, p)? - s.s_throat))
        .collect::<Result<Vec<f64>, FlowError>>()?;
    let pulse: Vec<f64> = run.samples.iter().map(|s| s.outer_r_max).collect();
    let clean = run.samples.iter().map(is_boundary_clean).collect();
    let r0_min = run.samples.first().map_or(0.0, |s| s.r_min);
    let t0 = run.samples.first().map_or(0.0, |s| s.t);
    let mp_applicable = run
        .samples
        .iter()
        .filter(|s| s.t > t0)
        .all(|s| s.outer_r_max.abs() < CLEAN_FRACTION * r0_min.abs());
    Ok(BoundReport {
        worst_mp: worst(&times, &mp_margins),
        worst_barrier: worst(&times, &barrier_margins),
        times,
        mp_margins,
        barrier_margins,
        pulse,
        clean,
        mp_tolerance: 0.05 * p.a2 + 10.0 * h * h,
        mp_applicable,
    })
}

/// Scalar curvature on the outer window of one snapshot.
#[derive(Debug, Clone, PartialEq)]
pub struct PulseProfile {
    pub t: f64,
    pub r: Vec<f64>,
    pub curvature: Vec<f64>,
}

impl PulseProfile {
    pub fn max(&self) -> f64 {
        self.curvature.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }
}

/// `[0.1, 0.5, 0.9] · t_end`, the profile times used for the pulse plot.
pub fn pulse_snapshot_times(t_end: f64) -> [f64; 3] {
    [0.1 * t_end, 0.5 * t_end, 0.9 * t_end]
}

/// Outer-window curvature profiles of every snapshot (at least three).
pub fn extract_boundary_pulse(run: &RunRecord, window_fraction: f64) -> Result<Vec<PulseProfile>, FlowError> {
    if !(window_fraction > 0.0 && window_fraction < 1.0) {
        return Err(FlowError::Domain { what: "window fraction", value: window_fraction });
    }
    if run.snapshots.len() < 3 {
        return Err(FlowError::NeedsSnapshots);
    }
    let g = &run.grid;
    let w0 = g.outer_window_start(window_fraction);
    Ok(run
        .snapshots
        .iter()
        .map(|snap| {
            let r = scalar_curvature(snap, g);
            PulseProfile { t: snap.t, r: (w0..g.len()).map(|i| g.r(i)).collect(), curvature: r[w0..].to_vec() }
        })
        .collect())
}

/// First time after the throat area starts to fall at which it rises again.
pub fn re_expansion_after_onset(run: &RunRecord) -> Option<f64> {
    let s = &run.samples;
    let onset = s.windows(2).position(|w| w[1].s_throat < w[0].s_throat)?;
    s[onset..]
        .windows(2)
        .find(|w| w[1].s_throat > w[0].s_throat * (1.0 + 1e-12))
        .map(|w| w[1].t)
}

/// Largest `S_throat / area_bound_2d` over the run.
pub fn worst_2d_ratio(run: &RunRecord, a2: f64) -> f64 {
    let s0 = run.samples.first().map_or(0.0, |s| s.s_throat);
    run.samples.iter().map(|s| s.s_throat / area_bound_2d(s.t, a2, s0)).fold(0.0, f64::max)
}

/// Largest `S_throat / tangherlini_bound` over the first half of the run.
pub fn worst_tangherlini_ratio(run: &RunRecord) -> Result<f64, FlowError> {
    let half = 0.5 * run.end_time();
    let mut worst = 0.0f64;
    for s in run.samples.iter().filter(|s| s.t <= half) {
        worst = worst.max(s.s_throat / tangherlini_bound(s.t, run.n)?);
    }
    Ok(worst)
}

/// Column-per-run table ready for plotting.
#[derive(Debug, Clone, PartialEq)]
pub struct FigureTable {
    pub figure: u8,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl FigureTable {
    /// Comma-separated text: a `# columns:` header, then one line per row.
    pub fn to_csv(&self) -> String {
        let mut out = format!("# columns: {}\n", self.columns.join(","));
        for row in &self.rows {
            let mut first = true;
            for x in row {
                if !first {
                    out.push(',');
                }
                first = false;
                let _ = write!(out, "{x:.11e}");
            }
            out.push('\n');
        }
        out
    }
}

/// Rows of the time-series figures.
pub const FIGURE_ROWS: usize = 201;

/// Window shown in the early-time figure.
pub const EARLY_WINDOW: f64 = 0.02;

struct Expected {
    n: Option<usize>,
    flat: bool,
    values: &'static [f64],
    tangherlini: bool,
}

fn expected(figure: u8) -> Result<Expected, FlowError> {
    let e = |n, flat, values, tangherlini| Ok(Expected { n, flat, values, tangherlini });
    match figure {
        1 => e(Some(3), false, &[1.0, 2.0, 2.5, 3.0], false),
        2 => e(Some(3), false, &[4.0, 5.0, 6.0, 8.0], false),
        3 => e(Some(2), false, &[], false),
        4 => e(Some(3), false, &[1.0, 2.0, 4.0, 8.0], false),
        5 => e(None, false, &[4.0, 5.0, 6.0, 7.0], true),
        6 => e(Some(3), true, &[2.0, 3.0, 4.0, 5.0], false),
        7 => e(Some(3), false, &[3.0], false),
        _ => Err(FlowError::FigureMismatch { figure, reason: "figures are numbered 1 to 7" }),
    }
}

fn label(run: &RunRecord, figure: u8, tangherlini: bool) -> Result<(f64, String), FlowError> {
    let spec = run.data.ok_or(FlowError::FigureMismatch { figure, reason: "run carries no initial-data label" })?;
    if tangherlini {
        let ok = spec.family == InitialFamily::Tangherlini || spec.alpha() == (spec.n - 2) as f64;
        if !ok {
            return Err(FlowError::FigureMismatch { figure, reason: "expected Tangherlini data" });
        }
        Ok((spec.n as f64, format!("n={}", spec.n)))
    } else {
        Ok((spec.alpha(), format!("alpha={}", spec.alpha())))
    }
}

/// Linear interpolation of the throat area at `t`; NaN outside the run.
pub fn throat_area_at(samples: &[Sample], t: f64) -> f64 {
    let i = samples.partition_point(|s| s.t < t);
    if i == samples.len() {
        return f64::NAN;
    }
    if samples[i].t == t || i == 0 {
        return if samples[i].t == t { samples[i].s_throat } else { f64::NAN };
    }
    let (a, b) = (&samples[i - 1], &samples[i]);
    a.s_throat + (t - a.t) / (b.t - a.t) * (b.s_throat - a.s_throat)
}

/// Tabulates the runs behind one of the paper's figures, checking that
/// they have the figure's parameters: throat-area histories for
/// figures 1 to 6, outer-window curvature profiles for figure 7.
pub fn emit_figure_data(runs: &[RunRecord], figure: u8) -> Result<FigureTable, FlowError> {
    let exp = expected(figure)?;
    if runs.is_empty() {
        return Err(FlowError::FigureMismatch { figure, reason: "no runs given" });
    }
    let mut labelled = Vec::with_capacity(runs.len());
    for run in runs {
        if exp.n.is_some_and(|n| n != run.n) {
            return Err(FlowError::FigureMismatch { figure, reason: "wrong dimension" });
        }
        let flat = run.gauge == BackgroundGauge::Flat;
        if flat != exp.flat {
            return Err(FlowError::FigureMismatch { figure, reason: "wrong background gauge" });
        }
        labelled.push((label(run, figure, exp.tangherlini)?, run));
    }
    if figure == 6 {
        if labelled.iter().any(|((v, _), _)| !exp.values.contains(v)) {
            return Err(FlowError::FigureMismatch { figure, reason: "parameter outside the figure's set" });
        }
    } else if !exp.values.is_empty() {
        let mut got: Vec<f64> = labelled.iter().map(|((v, _), _)| *v).collect();
        got.sort_by(f64::total_cmp);
        if got != exp.values {
            return Err(FlowError::FigureMismatch { figure, reason: "parameter set differs from the figure's" });
        }
    }

    if figure == 7 {
        let run = labelled[0].1;
        let profiles = extract_boundary_pulse(run, DEFAULT_WINDOW)?;
        let mut columns = alloc::vec![String::from("r")];
        columns.extend(profiles.iter().map(|p| format!("R(t={:.6})", p.t)));
        let rows = (0..profiles[0].r.len())
            .map(|i| core::iter::once(profiles[0].r[i]).chain(profiles.iter().map(|p| p.curvature[i])).collect())
            .collect();
        return Ok(FigureTable { figure, columns, rows });
    }

    let t_end = if figure == 4 {
        EARLY_WINDOW
    } else {
        labelled.iter().map(|(_, r)| r.end_time()).fold(0.0, f64::max)
    };
    let mut columns = alloc::vec![String::from("t")];
    columns.extend(labelled.iter().map(|((_, name), _)| name.clone()));
    let rows = (0..FIGURE_ROWS)
        .map(|i| {
            let t = t_end * i as f64 / (FIGURE_ROWS - 1) as f64;
            core::iter::once(t).chain(labelled.iter().map(|(_, r)| throat_area_at(&r.samples, t))).collect()
        })
        .collect();
    Ok(FigureTable { figure, columns, rows })
}
