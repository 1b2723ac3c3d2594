//! Comparison gauges.
//!
//! * Gaussian polar coordinates `ds² = dr² + F²(t,r) g(S^{n-1})`, with `r`
//!   the proper distance from the throat. The flow is a constrained system:
//!
//!   ```text
//!   F_t = F'' + (n-2) F'²/F + V F' - (n-2)/F
//!   V'  = -(n-1) F''/F
//!   ```
//!
//!   It is not parabolic. [`PolarSystem`] integrates it with the explicit
//!   stepper and re-solves the constraint on every right-hand-side call.
//! * Area-radius coordinates `ds² = f² dr² + r² g(S^{n-1})`, a single
//!   parabolic equation for `f` that only makes sense without a minimal
//!   sphere.
//! * The conformal gauge `A = B`, usable as a flow only for `n = 2`.

use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)] // shadowed by inherent methods when std is linked
use num_traits::Float;

use crate::evolution::Termination;
use crate::initial_data::simpson;
use crate::ode::{ExplicitHeun, OdeSystem, StepFailure, Stepper};
use crate::{sphere_volume, FlowError, InitialDataSpec, RadialGrid};

/// Areal radius `F` on a proper-distance grid whose first node is the throat.
#[derive(Debug, Clone, PartialEq)]
pub struct PolarState {
    pub n: usize,
    pub t: f64,
    pub grid: RadialGrid,
    pub f: Vec<f64>,
    /// Shift from the constraint, with `V = 0` and `H = 0` at the throat.
    pub v: Vec<f64>,
}

impl PolarState {
    pub fn new(n: usize, t: f64, grid: RadialGrid, f: Vec<f64>) -> Result<Self, FlowError> {
        if n < 2 {
            return Err(FlowError::UnsupportedDimension(n));
        }
        if f.len() != grid.len() {
            return Err(FlowError::InvalidState("state and grid sizes differ"));
        }
        check_positive(&f)?;
        let v = shift_from(&f, &grid, n);
        Ok(Self { n, t, grid, f, v })
    }

    /// Maps α-family data on the isotropic interval `[1, r_iso]` to the polar
    /// chart: `r_iso(ℓ)` solves `dr/dℓ = 1/β(r)` (classical RK4, one step per
    /// cell) and `F = r β(r)`.
    pub fn from_initial_data(spec: &InitialDataSpec, r_iso: f64, nodes: usize) -> Result<Self, FlowError> {
        spec.validate()?;
        if !(r_iso > 1.0) {
            return Err(FlowError::Domain { what: "outer isotropic radius", value: r_iso });
        }
        let length = proper_length(spec, r_iso);
        let grid = RadialGrid::new(0.0, length, nodes)?;
        let h = grid.spacing();
        let rate = |r: f64| 1.0 / spec.beta(r);
        let mut r = 1.0;
        let mut f = Vec::with_capacity(nodes);
        f.push(spec.areal_radius(r));
        for _ in 1..nodes {
            let k1 = rate(r);
            let k2 = rate(r + 0.5 * h * k1);
            let k3 = rate(r + 0.5 * h * k2);
            let k4 = rate(r + h * k3);
            r += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
            f.push(spec.areal_radius(r));
        }
        Self::new(spec.n, 0.0, grid, f)
    }

    /// Areas `S = V_{n-1} F^{n-1}`.
    pub fn area(&self) -> Vec<f64> {
        let vol = sphere_volume(self.n - 1);
        self.f.iter().map(|&f| vol * f.powi(self.n as i32 - 1)).collect()
    }

    pub fn mean_curvature(&self) -> Vec<f64> {
        mean_curvature_of(&self.f, &self.grid, self.n)
    }
}

/// `∫_1^{r_iso} β dr`, the proper distance from the throat.
pub fn proper_length(spec: &InitialDataSpec, r_iso: f64) -> f64 {
    simpson(|x| spec.beta(x.exp()) * x.exp(), 0.0, r_iso.ln(), 20_000)
}

fn check_positive(f: &[f64]) -> Result<(), FlowError> {
    if f.iter().all(|&x| x > 0.0 && x.is_finite()) {
        Ok(())
    } else {
        Err(FlowError::InvalidState("areal radius must be positive"))
    }
}

/// `F'` with the throat reflection `F(-r) = F(r)`.
#[inline]
fn d1_reflect(u: &[f64], grid: &RadialGrid, i: usize) -> f64 {
    if i == 0 {
        0.0
    } else {
        grid.d1(u, i)
    }
}

#[inline]
fn d2_reflect(u: &[f64], grid: &RadialGrid, i: usize) -> f64 {
    if i == 0 {
        let h = grid.spacing();
        2.0 * (u[1] - u[0]) / (h * h)
    } else {
        grid.d2(u, i)
    }
}

/// `H = (n-1) F'/F`, zero at the throat.
fn mean_curvature_of(f: &[f64], grid: &RadialGrid, n: usize) -> Vec<f64> {
    let k = (n - 1) as f64;
    (0..f.len()).map(|i| k * d1_reflect(f, grid, i) / f[i]).collect()
}

/// `V = -H - (1/(n-1)) ∫₀^r H²` by the trapezoid rule.
fn shift_from(f: &[f64], grid: &RadialGrid, n: usize) -> Vec<f64> {
    let hs = mean_curvature_of(f, grid, n);
    let k = (n - 1) as f64;
    let dx = grid.spacing();
    let mut acc = 0.0;
    let mut v = Vec::with_capacity(hs.len());
    for i in 0..hs.len() {
        if i > 0 {
            acc += 0.5 * dx * (hs[i - 1] * hs[i - 1] + hs[i] * hs[i]);
        }
        v.push(-hs[i] - acc / k);
    }
    v
}

/// Shift field solving the constraint with `C(t) = 0` and `H(t, r₀) = 0`.
pub fn polar_constraint_v(state: &PolarState) -> Vec<f64> {
    shift_from(&state.f, &state.grid, state.n)
}

fn polar_rhs_with(f: &[f64], v: &[f64], grid: &RadialGrid, n: usize, out: &mut [f64]) {
    let c = (n - 2) as f64;
    for (i, o) in out.iter_mut().enumerate() {
        let (f0, f1, f2) = (f[i], d1_reflect(f, grid, i), d2_reflect(f, grid, i));
        *o = f2 + c * f1 * f1 / f0 + v[i] * f1 - c / f0;
    }
}

/// `∂F/∂t` on every node, one-sided at the outer end.
pub fn polar_rhs(state: &PolarState) -> Result<Vec<f64>, FlowError> {
    check_positive(&state.f)?;
    let v = polar_constraint_v(state);
    let mut out = vec![0.0; state.f.len()];
    polar_rhs_with(&state.f, &v, &state.grid, state.n, &mut out);
    Ok(out)
}

/// `∂S/∂t = S'' + V S' - 8π`, the area form for `n = 3`.
pub fn polar_area_rhs(state: &PolarState) -> Result<Vec<f64>, FlowError> {
    if state.n != 3 {
        return Err(FlowError::UnsupportedDimension(state.n));
    }
    check_positive(&state.f)?;
    let s = state.area();
    let v = polar_constraint_v(state);
    let g = &state.grid;
    Ok((0..s.len())
        .map(|i| d2_reflect(&s, g, i) + v[i] * d1_reflect(&s, g, i) - 8.0 * core::f64::consts::PI)
        .collect())
}

/// `R = -2H' - (n/(n-1)) H² + (n-1)(n-2) F^{-2}`.
pub fn polar_scalar_curvature(state: &PolarState) -> Vec<f64> {
    let (f, g) = (&state.f, &state.grid);
    let n = state.n as f64;
    let k = n - 1.0;
    (0..f.len())
        .map(|i| {
            let (f0, f1, f2) = (f[i], d1_reflect(f, g, i), d2_reflect(f, g, i));
            let h = k * f1 / f0;
            let dh = k * (f2 / f0 - f1 * f1 / (f0 * f0));
            -2.0 * dh - n / k * h * h + k * (n - 2.0) / (f0 * f0)
        })
        .collect()
}

/// Outer-boundary closure of the polar system.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum PolarClosure {
    /// `V(t, r_c) = 0`, forcing `H(t, r_c) = -(1/(n-1)) ∫ H² ≤ 0`.
    #[default]
    ShiftVanishes,
    /// `H(t, r_c) = λ`, as in the background-connection solver.
    MeanCurvature(f64),
}

/// The polar system on nodes `0 ..= m-2`; the outer node follows from the
/// closure.
#[derive(Debug, Clone)]
pub struct PolarSystem {
    n: usize,
    grid: RadialGrid,
    closure: PolarClosure,
}

impl PolarSystem {
    pub fn new(n: usize, grid: RadialGrid, closure: PolarClosure) -> Result<Self, FlowError> {
        if n < 2 {
            return Err(FlowError::UnsupportedDimension(n));
        }
        if let PolarClosure::MeanCurvature(l) = closure {
            if !l.is_finite() {
                return Err(FlowError::Domain { what: "boundary mean curvature", value: l });
            }
        }
        Ok(Self { n, grid, closure })
    }

    pub fn pack(&self, state: &PolarState) -> Vec<f64> {
        state.f[..state.f.len() - 1].to_vec()
    }

    /// Full-grid `F` with the outer node set by the closure.
    pub fn expand(&self, y: &[f64]) -> Result<Vec<f64>, FlowError> {
        check_positive(y)?;
        let m = self.grid.len();
        let mut f = Vec::with_capacity(m);
        f.extend_from_slice(y);
        f.push(y[m - 2]);
        self.close(&mut f)?;
        Ok(f)
    }

    pub fn unpack(&self, t: f64, y: &[f64]) -> Result<PolarState, FlowError> {
        PolarState::new(self.n, t, self.grid, self.expand(y)?)
    }

    /// Sets `F[m-1]` from the one-sided `F'(r_c) = F H_c/(n-1)`.
    fn close(&self, f: &mut [f64]) -> Result<(), FlowError> {
        let m = f.len();
        let h = self.grid.spacing();
        let k = (self.n - 1) as f64;
        let base = 18.0 * f[m - 2] - 9.0 * f[m - 3] + 2.0 * f[m - 4];
        let outer = |hc: f64| base / (11.0 - 6.0 * h * hc / k);
        match self.closure {
            PolarClosure::MeanCurvature(l) => f[m - 1] = outer(l),
            PolarClosure::ShiftVanishes => {
                // H² integral over the cells that do not touch F[m-1].
                let hs = |f: &[f64], i: usize| k * d1_reflect(f, &self.grid, i) / f[i];
                let mut inner = 0.0;
                for i in 1..m - 2 {
                    let (a, b) = (hs(f, i - 1), hs(f, i));
                    inner += 0.5 * h * (a * a + b * b);
                }
                let h3 = hs(f, m - 3);
                let mut hc = 0.0;
                let mut converged = false;
                for _ in 0..100 {
                    f[m - 1] = outer(hc);
                    let (h2, h1) = (hs(f, m - 2), hs(f, m - 1));
                    let total = inner + 0.5 * h * (h3 * h3 + h2 * h2) + 0.5 * h * (h2 * h2 + h1 * h1);
                    let next = -total / k;
                    if (next - hc).abs() <= 1e-14 * (1.0 + next.abs()) {
                        converged = true;
                        hc = next;
                        break;
                    }
                    hc = next;
                }
                if !converged {
                    return Err(FlowError::BoundaryFailure(crate::Side::Outer));
                }
                f[m - 1] = outer(hc);
            }
        }
        if f[m - 1] > 0.0 && f[m - 1].is_finite() {
            Ok(())
        } else {
            Err(FlowError::BoundaryFailure(crate::Side::Outer))
        }
    }
}

impl OdeSystem for PolarSystem {
    fn dim(&self) -> usize {
        self.grid.len() - 1
    }

    /// The shift couples every node to every other.
    fn bandwidth(&self) -> (usize, usize) {
        let d = self.dim() - 1;
        (d, d)
    }

    fn rhs(&self, _t: f64, y: &[f64], dy: &mut [f64]) -> Result<(), FlowError> {
        let f = self.expand(y)?;
        let v = shift_from(&f, &self.grid, self.n);
        polar_rhs_with(&f, &v, &self.grid, self.n, dy);
        if dy.iter().all(|x| x.is_finite()) {
            Ok(())
        } else {
            Err(FlowError::InvalidState("non-finite right-hand side"))
        }
    }

    fn stable_explicit_dt(&self, y: &[f64]) -> f64 {
        let h = self.grid.spacing();
        let vmax = match self.expand(y) {
            Ok(f) => shift_from(&f, &self.grid, self.n).iter().fold(0.0, |m, v| m.max(v.abs())),
            Err(_) => return 0.0,
        };
        0.5 * h * h / (1.0 + 0.5 * h * vmax)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PolarConfig {
    pub t_max: f64,
    /// Fraction of the explicit stability limit.
    pub cfl: f64,
    /// Collapse when the throat area drops below this fraction of its
    /// initial value.
    pub collapse_threshold: f64,
    pub snapshot_times: Vec<f64>,
    /// Minimum spacing between recorded samples; `0` records every step.
    pub sample_interval: f64,
    pub max_steps: usize,
}

impl Default for PolarConfig {
    fn default() -> Self {
        Self {
            t_max: 1.0,
            cfl: 0.8,
            collapse_threshold: 1e-3,
            snapshot_times: Vec::new(),
            sample_interval: 0.0,
            max_steps: 10_000_000,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolarSample {
    pub t: f64,
    pub s_throat: f64,
    pub h_outer: f64,
    pub v_outer: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PolarRun {
    pub n: usize,
    pub closure: PolarClosure,
    pub samples: Vec<PolarSample>,
    pub snapshots: Vec<PolarState>,
    pub termination: Termination,
    pub steps: usize,
}

fn polar_sample(state: &PolarState) -> PolarSample {
    let m = state.f.len();
    let h = state.mean_curvature();
    PolarSample {
        t: state.t,
        s_throat: sphere_volume(state.n - 1) * state.f[0].powi(state.n as i32 - 1),
        h_outer: h[m - 1],
        v_outer: state.v[m - 1],
    }
}

/// Integrates the polar system from `initial` until collapse or `t_max`.
pub fn evolve_polar(initial: &PolarState, closure: PolarClosure, cfg: &PolarConfig) -> Result<PolarRun, FlowError> {
    if !(cfg.t_max > initial.t) || !(cfg.cfl > 0.0 && cfg.cfl <= 1.0) {
        return Err(FlowError::Config("need t_max beyond the start and cfl in (0, 1]"));
    }
    if !(cfg.collapse_threshold > 0.0 && cfg.collapse_threshold < 1.0) {
        return Err(FlowError::Config("collapse threshold must lie in (0, 1)"));
    }
    let sys = PolarSystem::new(initial.n, initial.grid, closure)?;
    let mut y = sys.pack(initial);
    let start = sys.unpack(initial.t, &y)?;
    let mut stepper = ExplicitHeun { cfl: cfg.cfl };

    let mut snap_times: Vec<f64> = cfg.snapshot_times.iter().copied().filter(|&s| s <= cfg.t_max).collect();
    snap_times.sort_by(|a, b| a.total_cmp(b));
    snap_times.dedup();
    let mut snaps = snap_times.into_iter().peekable();
    let mut snapshots = Vec::new();
    while snaps.peek().is_some_and(|&s| s <= start.t) {
        snapshots.push(start.clone());
        snaps.next();
    }

    let first = polar_sample(&start);
    let level = cfg.collapse_threshold * first.s_throat;
    let mut samples = vec![first];
    let mut last = first;
    let mut t = start.t;
    let mut steps = 0;
    let termination = loop {
        if t >= cfg.t_max {
            break Termination::ReachedHorizon;
        }
        if steps >= cfg.max_steps {
            break Termination::StepperFailure(t);
        }
        let t_stop = snaps.peek().copied().unwrap_or(cfg.t_max).min(cfg.t_max);
        match stepper.advance(&sys, &mut t, &mut y, t_stop) {
            Ok(()) => {}
            Err(StepFailure::StepTooSmall { .. }) | Err(StepFailure::Evaluation(_)) => {
                break Termination::StepperFailure(t);
            }
        }
        steps += 1;
        let state = match sys.unpack(t, &y) {
            Ok(s) => s,
            Err(_) => break Termination::StepperFailure(t),
        };
        let smp = polar_sample(&state);
        if snaps.peek() == Some(&t) {
            snapshots.push(state.clone());
            snaps.next();
        }
        if smp.s_throat < level {
            let frac = (last.s_throat - level) / (last.s_throat - smp.s_throat);
            samples.push(smp);
            break Termination::Collapsed(last.t + frac * (smp.t - last.t));
        }
        let recorded = samples.last().map_or(f64::NEG_INFINITY, |s| s.t);
        if cfg.sample_interval == 0.0 || t - recorded >= cfg.sample_interval || t >= cfg.t_max {
            samples.push(smp);
        }
        last = smp;
    };
    if samples.last().is_some_and(|s| s.t < last.t) {
        samples.push(last);
    }
    Ok(PolarRun { n: initial.n, closure, samples, snapshots, termination, steps })
}

/// Right side of the area-radius equation for `f = e^A` in
/// `ds² = f² dr² + r² g(S^{n-1})`.
pub fn area_radius_rhs(f: &[f64], grid: &RadialGrid, n: usize) -> Result<Vec<f64>, FlowError> {
    if n < 2 {
        return Err(FlowError::UnsupportedDimension(n));
    }
    if f.len() != grid.len() {
        return Err(FlowError::InvalidState("state and grid sizes differ"));
    }
    if let Some(&bad) = f.iter().find(|&&x| !(x > 0.0)) {
        return Err(FlowError::Domain { what: "area-radius metric coefficient", value: bad });
    }
    let c = (n - 2) as f64;
    Ok((0..f.len())
        .map(|i| {
            let (r, u) = (grid.r(i), f[i]);
            let (u1, u2) = (grid.d1(f, i), grid.d2(f, i));
            u2 / (u * u) - 2.0 * u1 * u1 / (u * u * u) + (c / r - 1.0 / (r * u * u)) * u1 - c / (r * r * u) * (u * u - 1.0)
        })
        .collect())
}

/// `∂A/∂t = e^{-2A}(A'' + A'/r)`, the `n = 2` conformal-gauge flow.
pub fn conformal_2d_rhs(a: &[f64], grid: &RadialGrid) -> Vec<f64> {
    (0..a.len())
        .map(|i| (-2.0 * a[i]).exp() * (grid.d2(a, i) + grid.d1(a, i) / grid.r(i)))
        .collect()
}

/// How far the conformal ansatz `A = B` is from being a flow for `n ≥ 3`.
///
/// The restriction on the background forces
/// `ψ' = r e^{2A} (C(t) - I)` with `I(r) = ∫ e^{-2A} A'²/r`. The ansatz
/// survives only if `ψ' e^{-2A}/r + I` stays independent of `r` as `A`
/// evolves. Returns the spread over the grid of its time derivative at the
/// given data (zero for `n = 2`, where the restriction is void).
pub fn conformal_obstruction(a: &[f64], grid: &RadialGrid, n: usize) -> Result<f64, FlowError> {
    if n < 2 {
        return Err(FlowError::UnsupportedDimension(n));
    }
    if a.len() != grid.len() {
        return Err(FlowError::InvalidState("state and grid sizes differ"));
    }
    if n == 2 {
        return Ok(0.0);
    }
    let m = a.len();
    let h = grid.spacing();
    let c = (n - 2) as f64;
    let k = (n - 1) as f64;
    let d1: Vec<f64> = (0..m).map(|i| grid.d1(a, i)).collect();
    let e: Vec<f64> = a.iter().map(|x| (-2.0 * x).exp()).collect();

    let cumtrapz = |g: &dyn Fn(usize) -> f64| {
        let mut acc = 0.0;
        let mut out = vec![0.0; m];
        for i in 1..m {
            acc += 0.5 * h * (g(i - 1) + g(i));
            out[i] = acc;
        }
        out
    };
    let integral = cumtrapz(&|i| e[i] * d1[i] * d1[i] / grid.r(i));
    let psi1: Vec<f64> = (0..m).map(|i| -grid.r(i) / e[i] * integral[i]).collect();
    let at: Vec<f64> = (0..m)
        .map(|i| {
            let r = grid.r(i);
            e[i] * (grid.d2(a, i) + k / r * d1[i] + c * psi1[i] * (d1[i] + 1.0 / r))
        })
        .collect();
    let at1: Vec<f64> = (0..m).map(|i| grid.d1(&at, i)).collect();
    let dt_integral = cumtrapz(&|i| 2.0 * e[i] * d1[i] * (at1[i] - at[i] * d1[i]) / grid.r(i));
    let q = (0..m).map(|i| -2.0 * at[i] * psi1[i] * e[i] / grid.r(i) + dt_integral[i]);
    let (lo, hi) = q.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), x| (lo.min(x), hi.max(x)));
    Ok(hi - lo)
}

#[cfg(test)]
mod tests {
    use super::*;
    use core::f64::consts::PI;

    fn cylinder(n: usize, nodes: usize) -> PolarState {
        let grid = RadialGrid::new(0.0, 5.0, nodes).unwrap();
        PolarState::new(n, 0.0, grid, vec![1.0; nodes]).unwrap()
    }

    #[test]
    fn cylinder_shrinks_uniformly() {
        let st = cylinder(3, 51);
        assert!(st.v.iter().all(|&v| v == 0.0));
        let ds = polar_area_rhs(&st).unwrap();
        assert!(ds.iter().all(|&x| (x + 8.0 * PI).abs() < 1e-10));
        let r = polar_scalar_curvature(&st);
        assert!(r.iter().all(|&x| (x - 2.0).abs() < 1e-12));
    }

    #[test]
    fn shift_vanishes_at_throat_and_is_negative_outside() {
        let spec = InitialDataSpec::alpha_family(2.0, 3).unwrap();
        let st = PolarState::from_initial_data(&spec, 10.0, 2001).unwrap();
        assert_eq!(st.v[0], 0.0);
        let h = st.mean_curvature();
        for i in 1..st.v.len() {
            if h[i] > 0.0 {
                assert!(st.v[i] < 0.0);
            }
        }
    }

    #[test]
    fn flat_area_radius_is_fixed() {
        let grid = RadialGrid::new(1.0, 10.0, 101).unwrap();
        let rhs = area_radius_rhs(&vec![1.0; 101], &grid, 3).unwrap();
        assert!(rhs.iter().all(|&x| x == 0.0));
        let c = 1.5;
        let rhs = area_radius_rhs(&vec![c; 101], &grid, 3).unwrap();
        for (i, x) in rhs.iter().enumerate() {
            let r = grid.r(i);
            assert!((x + (c * c - 1.0) / (r * r * c)).abs() < 1e-12);
        }
        assert!(area_radius_rhs(&vec![0.0; 101], &grid, 3).is_err());
    }

    #[test]
    fn conformal_examples() {
        let grid = RadialGrid::new(1.0, 3.0, 2001).unwrap();
        let log: Vec<f64> = grid.nodes().map(|r| r.ln()).collect();
        assert!(conformal_2d_rhs(&log, &grid).iter().all(|x| x.abs() < 1e-5));
        let sq: Vec<f64> = grid.nodes().map(|r| r * r).collect();
        let rhs = conformal_2d_rhs(&sq, &grid);
        for (i, x) in rhs.iter().enumerate() {
            let r = grid.r(i);
            assert!((x - 4.0 * (-2.0 * r * r).exp()).abs() < 1e-8);
        }
    }

    #[test]
    fn closure_modes_hold() {
        let spec = InitialDataSpec::alpha_family(3.0, 3).unwrap();
        let st = PolarState::from_initial_data(&spec, 10.0, 801).unwrap();
        let sys = PolarSystem::new(3, st.grid, PolarClosure::ShiftVanishes).unwrap();
        let closed = sys.unpack(0.0, &sys.pack(&st)).unwrap();
        let m = closed.f.len();
        assert!(closed.v[m - 1].abs() < 1e-12);
        assert!(closed.mean_curvature()[m - 1] < 0.0);

        let sys = PolarSystem::new(3, st.grid, PolarClosure::MeanCurvature(0.3)).unwrap();
        let closed = sys.unpack(0.0, &sys.pack(&st)).unwrap();
        assert!((closed.mean_curvature()[m - 1] - 0.3).abs() < 1e-12);
    }
}
