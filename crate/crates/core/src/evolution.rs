//! Method-of-lines integration of the Hamilton–DeTurck system in `(A, S)`.
//!
//! With `E = e^{-2A}`, `G = e^{-2B}`, `k = n - 1`, `u = S'/(kS)` and the
//! background gauge `p = ψ'`, `q = ψ''`:
//!
//! ```text
//! A_t = E [A'' - A'² + k u² - q + A'p]
//!     + kG [A'/r - 2u/r + 1/r² + q + (A' + 2/r)p - 2up]
//! S_t = E [S'' - S'²/S - pS'] + kG S'(p + 1/r) - k(k-1) G S / r²
//! ```
//!
//! At the outer end the sphere has prescribed mean curvature `λ` and the
//! DeTurck vector vanishes:
//!
//! ```text
//! S' = λ e^A S,    A' = ψ' + λ e^A - k G e^{2A} (1/r + ψ')
//! ```
//!
//! At the throat `S' = 0` and `A' = -1`. For the power-law background
//! `ψ'(1) = -1`, so this is the same pair with `λ = 0`; for other
//! backgrounds the throat condition on `A'` is kept as stated rather than
//! the vanishing of `V`, which drives `A` to blow up at the boundary.
//!
//! All conditions are imposed with one-sided second-order stencils and
//! solved for the boundary node, so only interior nodes are integrated in
//! time.

use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)] // shadowed by inherent methods when std is linked
use num_traits::Float;

use crate::geometry::{inv_warp_sq, scalar_curvature, Psi};
use crate::ode::{ExplicitHeun, OdeSystem, Rosenbrock23, StepFailure, Stepper};
use crate::{sphere_volume, BackgroundGauge, FlowError, InitialDataSpec, MetricState, RadialGrid, Side};

/// Mean-curvature data imposed at the inner end.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum InnerBoundary {
    /// `S' = 0` and `A' = -1`: the inner sphere is minimal.
    #[default]
    MinimalSphere,
    /// `H` takes its background value and `V = 0`, as at the outer end.
    Background,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TimeStepper {
    /// Adaptive Rosenbrock 2(3) with a banded Jacobian.
    Implicit,
    /// Heun at `cfl` times the explicit stability limit.
    Explicit { cfl: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    pub r_c: f64,
    pub nodes: usize,
    pub stepper: TimeStepper,
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub t_max: f64,
    /// Collapse is declared once the throat area falls below this fraction
    /// of its initial value.
    pub collapse_threshold: f64,
    /// Ceiling on `max |∂²S/∂r²|`.
    pub blowup_threshold: f64,
    pub snapshot_times: Vec<f64>,
    /// Minimum spacing of recorded samples; zero records every step.
    pub sample_interval: f64,
    pub max_steps: usize,
    pub inner: InnerBoundary,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            r_c: 10.0,
            nodes: 2001,
            stepper: TimeStepper::Implicit,
            rel_tol: 1e-6,
            abs_tol: 1e-9,
            t_max: 10.0,
            collapse_threshold: 1e-3,
            blowup_threshold: 1e8,
            snapshot_times: Vec::new(),
            sample_interval: 0.0,
            max_steps: 1_000_000,
            inner: InnerBoundary::MinimalSphere,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<(), FlowError> {
        if !(self.collapse_threshold > 0.0 && self.collapse_threshold < 1.0) {
            return Err(FlowError::Config("collapse threshold must lie in (0, 1)"));
        }
        if !(self.rel_tol > 0.0 && self.abs_tol > 0.0) {
            return Err(FlowError::Config("tolerances must be positive"));
        }
        if !(self.t_max > 0.0 && self.t_max.is_finite()) {
            return Err(FlowError::Config("t_max must be positive and finite"));
        }
        if !(self.blowup_threshold > 0.0) {
            return Err(FlowError::Config("blow-up threshold must be positive"));
        }
        if !(self.sample_interval >= 0.0) {
            return Err(FlowError::Config("sample interval must be non-negative"));
        }
        if let TimeStepper::Explicit { cfl } = self.stepper {
            if !(cfl > 0.0 && cfl <= 1.0) {
                return Err(FlowError::Config("CFL factor must lie in (0, 1]"));
            }
        }
        if self.snapshot_times.iter().any(|t| !(*t >= 0.0)) {
            return Err(FlowError::Config("snapshot times must be non-negative"));
        }
        if !(self.r_c > 1.0) || self.nodes < 5 {
            return Err(FlowError::Config("grid needs r_c > 1 and at least 5 nodes"));
        }
        Ok(())
    }

    /// The throat-anchored grid `[1, r_c]` with `nodes` points.
    pub fn grid(&self) -> Result<RadialGrid, FlowError> {
        RadialGrid::throat(self.r_c, self.nodes)
    }
}

/// One row of the run history.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sample {
    pub t: f64,
    pub s_throat: f64,
    pub r_throat: f64,
    pub r_min: f64,
    pub r_max: f64,
    /// Mean curvature at the outer boundary.
    pub h_outer: f64,
    pub max_abs_d2s: f64,
    /// Largest scalar curvature in the outer tenth of the domain.
    pub outer_r_max: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Termination {
    Collapsed(f64),
    ReachedHorizon,
    CurvatureBlowup(f64),
    StepperFailure(f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RunWarning {
    /// The initial data missed a boundary condition; the boundary node was
    /// moved by `shift` (the larger of `|ΔA|` and `|ΔS|/S`).
    InitialBoundaryMismatch { side: Side, shift: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunRecord {
    pub n: usize,
    pub gauge: BackgroundGauge,
    pub grid: RadialGrid,
    pub samples: Vec<Sample>,
    pub termination: Termination,
    pub snapshots: Vec<MetricState>,
    pub warnings: Vec<RunWarning>,
    pub steps: usize,
    pub rejected_steps: usize,
    /// Initial data the run started from, when the caller records it.
    pub data: Option<InitialDataSpec>,
}

impl RunRecord {
    /// Labels the run with the initial data it started from.
    pub fn with_data(mut self, spec: InitialDataSpec) -> Self {
        self.data = Some(spec);
        self
    }

    /// Time at which the run stopped.
    pub fn end_time(&self) -> f64 {
        match self.termination {
            Termination::Collapsed(t) | Termination::CurvatureBlowup(t) | Termination::StepperFailure(t) => t,
            Termination::ReachedHorizon => self.samples.last().map_or(0.0, |s| s.t),
        }
    }

    pub fn collapse_time(&self) -> Option<f64> {
        match self.termination {
            Termination::Collapsed(t) => Some(t),
            _ => None,
        }
    }
}

/// Background mean curvature `(n-1) e^{-ψ} (1/r + ψ')` of the sphere of
/// radius `r`.
pub fn lambda_value(gauge: &BackgroundGauge, r: f64, n: usize) -> Result<f64, FlowError> {
    if n < 2 {
        return Err(FlowError::UnsupportedDimension(n));
    }
    let psi = gauge.psi(r)?;
    Ok((n - 1) as f64 * (-psi.value).exp() * (1.0 / r + psi.d1))
}

/// Mean curvatures imposed at the two ends.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryData {
    pub inner: f64,
    pub outer: f64,
}

impl BoundaryData {
    pub fn new(gauge: &BackgroundGauge, grid: &RadialGrid, n: usize, inner: InnerBoundary) -> Result<Self, FlowError> {
        let inner = match inner {
            InnerBoundary::MinimalSphere => 0.0,
            InnerBoundary::Background => lambda_value(gauge, grid.r_min(), n)?,
        };
        Ok(Self { inner, outer: lambda_value(gauge, grid.r_c(), n)? })
    }
}

/// Pointwise right-hand side at one node.
#[inline]
#[allow(clippy::too_many_arguments)]
fn point_rhs(k: f64, g: f64, r: f64, a: f64, a1: f64, a2: f64, s: f64, s1: f64, s2: f64, psi: &Psi) -> (f64, f64) {
    let e = (-2.0 * a).exp();
    let (p, q) = (psi.d1, psi.d2);
    let u = s1 / (k * s);
    let ir = 1.0 / r;
    let at = e * (a2 - a1 * a1 + k * u * u - q + a1 * p)
        + k * g * (a1 * ir - 2.0 * u * ir + ir * ir + q + (a1 + 2.0 * ir) * p - 2.0 * u * p);
    let st = e * (s2 - s1 * s1 / s - p * s1) + k * g * s1 * (p + ir) - k * (k - 1.0) * g * s * ir * ir;
    (at, st)
}

/// The semi-discrete system on interior nodes, packed as
/// `[A₁, S₁, A₂, S₂, …]`.
#[derive(Debug, Clone)]
pub struct FlowSystem {
    n: usize,
    inner: InnerBoundary,
    vol: f64,
    grid: RadialGrid,
    psi: Vec<Psi>,
    lambda: BoundaryData,
}

impl FlowSystem {
    pub fn new(n: usize, gauge: &BackgroundGauge, grid: &RadialGrid, inner: InnerBoundary) -> Result<Self, FlowError> {
        if n < 2 {
            return Err(FlowError::UnsupportedDimension(n));
        }
        Ok(Self {
            n,
            inner,
            vol: sphere_volume(n - 1),
            grid: *grid,
            psi: gauge.tabulate(grid)?,
            lambda: BoundaryData::new(gauge, grid, n, inner)?,
        })
    }

    pub fn boundary_data(&self) -> BoundaryData {
        self.lambda
    }

    /// Interior values of `state` in solver order.
    pub fn pack(&self, state: &MetricState) -> Vec<f64> {
        let m = self.grid.len();
        let mut y = Vec::with_capacity(2 * (m - 2));
        for i in 1..m - 1 {
            y.push(state.a[i]);
            y.push(state.s[i]);
        }
        y
    }

    /// Full-grid fields from interior values, boundary nodes solved.
    pub fn unpack(&self, t: f64, y: &[f64]) -> Result<MetricState, FlowError> {
        let (a, s) = self.expand(y)?;
        MetricState::new(self.n, t, a, s)
    }

    fn expand(&self, y: &[f64]) -> Result<(Vec<f64>, Vec<f64>), FlowError> {
        let m = self.grid.len();
        let mut a = vec![0.0; m];
        let mut s = vec![0.0; m];
        for i in 1..m - 1 {
            a[i] = y[2 * (i - 1)];
            s[i] = y[2 * (i - 1) + 1];
        }
        if a[1..m - 1].iter().chain(&s[1..m - 1]).any(|x| !x.is_finite()) || s[1..m - 1].iter().any(|&x| x <= 0.0) {
            return Err(FlowError::InvalidState("non-finite or non-positive interior values"));
        }
        a[0] = 3.0 * a[1] - 3.0 * a[2] + a[3];
        a[m - 1] = 3.0 * a[m - 2] - 3.0 * a[m - 3] + a[m - 4];
        self.solve_boundary(Side::Inner, &mut a, &mut s)?;
        self.solve_boundary(Side::Outer, &mut a, &mut s)?;
        Ok((a, s))
    }

    /// Overwrites the boundary node on `side` so that both boundary
    /// conditions hold, using `a` at that node as the Newton start.
    pub fn solve_boundary(&self, side: Side, a: &mut [f64], s: &mut [f64]) -> Result<(), FlowError> {
        let m = self.grid.len();
        let (b, near, far) = match side {
            Side::Inner => (0, 1, 2),
            Side::Outer => (m - 1, m - 2, m - 3),
        };
        let (ab, sb) = self.boundary_node(side, a[b], [a[near], a[far]], [s[near], s[far]])?;
        a[b] = ab;
        s[b] = sb;
        Ok(())
    }

    /// Boundary values from the two nearest interior nodes on `side`.
    fn boundary_node(&self, side: Side, guess: f64, a: [f64; 2], s: [f64; 2]) -> Result<(f64, f64), FlowError> {
        let h = self.grid.spacing();
        let (b, c0, lambda) = match side {
            Side::Inner => (0, -1.5 / h, self.lambda.inner),
            Side::Outer => (self.grid.len() - 1, 1.5 / h, self.lambda.outer),
        };
        let sign = if side == Side::Inner { 1.0 } else { -1.0 };
        let rest_a = sign * (4.0 * a[0] - a[1]) / (2.0 * h);
        let rest_s = sign * (4.0 * s[0] - s[1]) / (2.0 * h);
        if side == Side::Inner && self.inner == InnerBoundary::MinimalSphere {
            let (ab, sb) = ((-1.0 - rest_a) / c0, rest_s / -c0);
            return if sb > 0.0 && ab.is_finite() { Ok((ab, sb)) } else { Err(FlowError::BoundaryFailure(side)) };
        }
        let r = self.grid.r(b);
        let psi = self.psi[b];
        let k = (self.n - 1) as f64;
        let w = 1.0 / r + psi.d1;
        let area = |ab: f64| rest_s / (lambda * ab.exp() - c0);
        let mut ab = guess;
        for _ in 0..60 {
            let sb = area(ab);
            if !(sb > 0.0 && sb.is_finite()) {
                return Err(FlowError::BoundaryFailure(side));
            }
            let el = lambda * ab.exp();
            let kge = k * inv_warp_sq(self.n, self.vol, r, sb) * (2.0 * ab).exp();
            let f = c0 * ab + rest_a - psi.d1 - el + kge * w;
            let df = c0 - el + w * kge * (2.0 + 2.0 / k * el / (el - c0));
            let step = f / df;
            ab -= step;
            if !ab.is_finite() {
                return Err(FlowError::BoundaryFailure(side));
            }
            if step.abs() <= 1e-14 * (1.0 + ab.abs()) {
                return Ok((ab, area(ab)));
            }
        }
        Err(FlowError::BoundaryFailure(side))
    }

    /// Pointwise `(A_t, S_t)` on every node of a full-grid state; boundary
    /// entries use one-sided stencils.
    pub fn pointwise_rhs(&self, a: &[f64], s: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let m = self.grid.len();
        let k = (self.n - 1) as f64;
        let mut at = vec![0.0; m];
        let mut st = vec![0.0; m];
        for i in 0..m {
            let r = self.grid.r(i);
            let g = inv_warp_sq(self.n, self.vol, r, s[i]);
            let (x, y) = point_rhs(
                k,
                g,
                r,
                a[i],
                self.grid.d1(a, i),
                self.grid.d2(a, i),
                s[i],
                self.grid.d1(s, i),
                self.grid.d2(s, i),
                &self.psi[i],
            );
            at[i] = x;
            st[i] = y;
        }
        (at, st)
    }

    /// Throat area as a function of the packed interior state.
    pub fn throat_area(&self, y: &[f64]) -> Result<f64, FlowError> {
        Ok(self.expand(y)?.1[0])
    }
}

impl OdeSystem for FlowSystem {
    fn dim(&self) -> usize {
        2 * (self.grid.len() - 2)
    }

    fn bandwidth(&self) -> (usize, usize) {
        (3, 3)
    }

    fn rhs(&self, _t: f64, y: &[f64], dy: &mut [f64]) -> Result<(), FlowError> {
        let m = self.grid.len();
        let last = y.len() - 2;
        if y.iter().any(|x| !x.is_finite()) || y.iter().skip(1).step_by(2).any(|&x| x <= 0.0) {
            return Err(FlowError::InvalidState("non-finite or non-positive interior values"));
        }
        let a_guess = |i: usize, j: usize, l: usize| 3.0 * y[i] - 3.0 * y[j] + y[l];
        let inner = self.boundary_node(Side::Inner, a_guess(0, 2, 4), [y[0], y[2]], [y[1], y[3]])?;
        let outer = self.boundary_node(
            Side::Outer,
            a_guess(last, last - 2, last - 4),
            [y[last], y[last - 2]],
            [y[last + 1], y[last - 1]],
        )?;
        // Node i of the full grid; 0 and m-1 are the boundary values.
        let node = |i: usize| -> (f64, f64) {
            if i == 0 {
                inner
            } else if i == m - 1 {
                outer
            } else {
                (y[2 * (i - 1)], y[2 * (i - 1) + 1])
            }
        };
        let k = (self.n - 1) as f64;
        let h = self.grid.spacing();
        let (ih, ih2) = (0.5 / h, 1.0 / (h * h));
        let (mut prev, mut cur) = (node(0), node(1));
        for i in 1..m - 1 {
            let next = node(i + 1);
            let r = self.grid.r(i);
            let g = inv_warp_sq(self.n, self.vol, r, cur.1);
            let (x, z) = point_rhs(
                k,
                g,
                r,
                cur.0,
                (next.0 - prev.0) * ih,
                (next.0 - 2.0 * cur.0 + prev.0) * ih2,
                cur.1,
                (next.1 - prev.1) * ih,
                (next.1 - 2.0 * cur.1 + prev.1) * ih2,
                &self.psi[i],
            );
            if !(x.is_finite() && z.is_finite()) {
                return Err(FlowError::InvalidState("non-finite right-hand side"));
            }
            dy[2 * (i - 1)] = x;
            dy[2 * (i - 1) + 1] = z;
            prev = cur;
            cur = next;
        }
        Ok(())
    }

    fn stable_explicit_dt(&self, y: &[f64]) -> f64 {
        let h = self.grid.spacing();
        let e_max = y.iter().step_by(2).map(|a| (-2.0 * a).exp()).fold(0.0, f64::max);
        h * h / (2.0 * e_max)
    }
}

/// Pointwise `(A_t, S_t)` for `state` on every node.
pub fn rhs(state: &MetricState, gauge: &BackgroundGauge, grid: &RadialGrid) -> Result<(Vec<f64>, Vec<f64>), FlowError> {
    state.validate()?;
    if state.len() != grid.len() {
        return Err(FlowError::InvalidState("state and grid sizes differ"));
    }
    let sys = FlowSystem::new(state.dim(), gauge, grid, InnerBoundary::MinimalSphere)?;
    Ok(sys.pointwise_rhs(&state.a, &state.s))
}

/// Replaces both boundary nodes of `state` by the values the boundary
/// conditions dictate. Returns the largest shift, `max(|ΔA|, |ΔS|/S)`, per
/// side.
pub fn apply_boundary_conditions(
    state: &mut MetricState,
    gauge: &BackgroundGauge,
    grid: &RadialGrid,
    inner: InnerBoundary,
) -> Result<(f64, f64), FlowError> {
    state.validate()?;
    let sys = FlowSystem::new(state.dim(), gauge, grid, inner)?;
    let m = grid.len();
    let before = [(state.a[0], state.s[0]), (state.a[m - 1], state.s[m - 1])];
    sys.solve_boundary(Side::Inner, &mut state.a, &mut state.s)?;
    sys.solve_boundary(Side::Outer, &mut state.a, &mut state.s)?;
    let shift = |(a0, s0): (f64, f64), i: usize| (state.a[i] - a0).abs().max((state.s[i] - s0).abs() / s0);
    Ok((shift(before[0], 0), shift(before[1], m - 1)))
}

const MISMATCH_TOL: f64 = 1e-6;
const OUTER_WINDOW: f64 = 0.1;

fn sample_of(state: &MetricState, grid: &RadialGrid) -> Sample {
    let m = grid.len();
    let r = scalar_curvature(state, grid);
    let w0 = grid.outer_window_start(OUTER_WINDOW);
    let max_abs_d2s = (0..m).map(|i| grid.d2(&state.s, i).abs()).fold(0.0, f64::max);
    Sample {
        t: state.t,
        s_throat: state.s[0],
        r_throat: r[0],
        r_min: r.iter().copied().fold(f64::INFINITY, f64::min),
        r_max: r.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        h_outer: (-state.a[m - 1]).exp() * grid.d1(&state.s, m - 1) / state.s[m - 1],
        max_abs_d2s,
        outer_r_max: r[w0..].iter().copied().fold(f64::NEG_INFINITY, f64::max),
    }
}

/// Evolves `initial` until the horizon, collapse of the throat, curvature
/// blow-up or stepper failure.
pub fn evolve(
    initial: &MetricState,
    gauge: &BackgroundGauge,
    grid: &RadialGrid,
    cfg: &SolverConfig,
) -> Result<RunRecord, FlowError> {
    cfg.validate()?;
    initial.validate()?;
    if initial.len() != grid.len() {
        return Err(FlowError::Config("initial state does not match the grid"));
    }
    match cfg.stepper {
        TimeStepper::Implicit => {
            let mut st = Rosenbrock23::new(cfg.rel_tol, cfg.abs_tol);
            run(&mut st, initial, gauge, grid, cfg)
        }
        TimeStepper::Explicit { cfl } => run(&mut ExplicitHeun { cfl }, initial, gauge, grid, cfg),
    }
}

fn run<St: Stepper>(
    stepper: &mut St,
    initial: &MetricState,
    gauge: &BackgroundGauge,
    grid: &RadialGrid,
    cfg: &SolverConfig,
) -> Result<RunRecord, FlowError> {
    let n = initial.dim();
    let sys = FlowSystem::new(n, gauge, grid, cfg.inner)?;
    let mut state = initial.clone();
    let (in_shift, out_shift) = apply_boundary_conditions(&mut state, gauge, grid, cfg.inner)?;
    let mut warnings = Vec::new();
    for (side, shift) in [(Side::Inner, in_shift), (Side::Outer, out_shift)] {
        if shift > MISMATCH_TOL {
            warnings.push(RunWarning::InitialBoundaryMismatch { side, shift });
        }
    }

    let t0 = state.t;
    let mut snap_times: Vec<f64> = cfg.snapshot_times.iter().copied().filter(|&s| s <= cfg.t_max).collect();
    snap_times.sort_by(|a, b| a.partial_cmp(b).unwrap());
    snap_times.dedup();
    let mut snap_iter = snap_times.into_iter().peekable();
    let mut snapshots = Vec::new();
    while let Some(&ts) = snap_iter.peek() {
        if ts > t0 {
            break;
        }
        snapshots.push(state.clone());
        snap_iter.next();
    }

    let s0 = state.s[0];
    let first = sample_of(&state, grid);
    let mut samples = vec![first];
    let mut last = first;
    let mut t = t0;
    let mut y = sys.pack(&state);
    let mut steps = 0usize;

    let termination = loop {
        if t >= cfg.t_max {
            break Termination::ReachedHorizon;
        }
        if steps >= cfg.max_steps {
            break Termination::StepperFailure(t);
        }
        let t_stop = snap_iter.peek().copied().unwrap_or(cfg.t_max).min(cfg.t_max);
        match stepper.advance(&sys, &mut t, &mut y, t_stop) {
            Ok(()) => {}
            Err(StepFailure::StepTooSmall { .. }) | Err(StepFailure::Evaluation(_)) => {
                break Termination::StepperFailure(t);
            }
        }
        steps += 1;
        let current = match sys.unpack(t, &y) {
            Ok(s) => s,
            Err(_) => break Termination::StepperFailure(t),
        };
        let smp = sample_of(&current, grid);
        if snap_iter.peek() == Some(&t) {
            snapshots.push(current.clone());
            snap_iter.next();
        }
        let level = cfg.collapse_threshold * s0;
        if smp.s_throat < level {
            let frac = (last.s_throat - level) / (last.s_throat - smp.s_throat);
            samples.push(smp);
            break Termination::Collapsed(last.t + frac * (smp.t - last.t));
        }
        if !(smp.max_abs_d2s <= cfg.blowup_threshold) {
            samples.push(smp);
            break Termination::CurvatureBlowup(t);
        }
        let recorded = samples.last().map_or(f64::NEG_INFINITY, |s| s.t);
        if cfg.sample_interval == 0.0 || t - recorded >= cfg.sample_interval || t >= cfg.t_max {
            samples.push(smp);
        }
        last = smp;
        state = current;
    };
    if let Some(l) = samples.last() {
        if l.t < last.t {
            samples.push(last);
        }
    }
    let _ = state;

    Ok(RunRecord {
        n,
        gauge: *gauge,
        grid: *grid,
        samples,
        termination,
        snapshots,
        warnings,
        steps,
        rejected_steps: stepper.rejected(),
        data: None,
    })
}

/// One row of the initial-slope table.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SlopeRow {
    pub alpha: f64,
    pub measured: f64,
    pub expected: f64,
    pub rel_error: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SlopeTable {
    pub rows: Vec<SlopeRow>,
    /// Least-squares slope of the measured values against `α`.
    pub fit_slope: f64,
    pub fit_intercept: f64,
}

/// `∂S/∂t` at the throat, from one-sided stencils on `state` as given.
///
/// The data are not first projected onto the discrete boundary conditions:
/// that moves the throat node by `O(h³)`, which the second difference turns
/// into an `O(h)` error.
pub fn initial_throat_slope(sys: &FlowSystem, state: &MetricState) -> Result<f64, FlowError> {
    state.validate()?;
    let (_, st) = sys.pointwise_rhs(&state.a, &state.s);
    Ok(st[0])
}

/// Measures `∂S/∂t(0, 1)` for α-family data and compares with `4π(α - 2)`
/// (three dimensions). The gauge defaults to `PowerLaw(α)`.
pub fn initial_slope_check(
    alphas: &[f64],
    n: usize,
    grid: &RadialGrid,
    gauge: Option<BackgroundGauge>,
) -> Result<SlopeTable, FlowError> {
    if n != 3 {
        return Err(FlowError::UnsupportedDimension(n));
    }
    let mut rows = Vec::with_capacity(alphas.len());
    for &alpha in alphas {
        let spec = InitialDataSpec::alpha_family(alpha, n)?;
        let state = crate::initial_data::build_initial_state(&spec, grid)?;
        let g = match gauge {
            Some(g) => g,
            None => BackgroundGauge::power_law(alpha)?,
        };
        let sys = FlowSystem::new(n, &g, grid, InnerBoundary::MinimalSphere)?;
        let measured = initial_throat_slope(&sys, &state)?;
        let expected = 4.0 * core::f64::consts::PI * (alpha - 2.0);
        let rel_error = if expected != 0.0 { (measured - expected).abs() / expected.abs() } else { measured.abs() };
        rows.push(SlopeRow { alpha, measured, expected, rel_error });
    }
    let (fit_slope, fit_intercept) = least_squares(rows.iter().map(|r| (r.alpha, r.measured)));
    Ok(SlopeTable { rows, fit_slope, fit_intercept })
}

fn least_squares<I: Iterator<Item = (f64, f64)> + Clone>(pts: I) -> (f64, f64) {
    let m = pts.clone().count() as f64;
    let (sx, sy) = pts.clone().fold((0.0, 0.0), |(a, b), (x, y)| (a + x, b + y));
    let (mx, my) = (sx / m, sy / m);
    let (sxy, sxx) = pts.fold((0.0, 0.0), |(a, b), (x, y)| (a + (x - mx) * (y - my), b + (x - mx) * (x - mx)));
    let slope = if sxx > 0.0 { sxy / sxx } else { f64::NAN };
    (slope, my - slope * mx)
}
