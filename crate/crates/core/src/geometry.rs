//! Metric representation and pointwise geometric quantities.
//!
//! A [`MetricState`] stores `A` and the sphere area `S` on a [`RadialGrid`].
//! The warping coefficient never appears explicitly: wherever `e^{-2B}` is
//! needed it is rebuilt from the algebraic identity
//! `e^{-2B} = (V_{n-1} r^{n-1} / S)^{2/(n-1)}`, which stays well conditioned
//! as `S → 0`.

use alloc::vec::Vec;

#[allow(unused_imports)] // shadowed by inherent methods when std is linked
use num_traits::Float;

use crate::{sphere_volume, FlowError, RadialGrid};

/// Fields `A` and `S` of a rotationally symmetric metric at one flow time.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricState {
    n: usize,
    pub t: f64,
    pub a: Vec<f64>,
    pub s: Vec<f64>,
}

impl MetricState {
    pub fn new(n: usize, t: f64, a: Vec<f64>, s: Vec<f64>) -> Result<Self, FlowError> {
        if n < 2 {
            return Err(FlowError::UnsupportedDimension(n));
        }
        if a.len() != s.len() {
            return Err(FlowError::InvalidState("A and S have different lengths"));
        }
        let state = Self { n, t, a, s };
        state.validate()?;
        Ok(state)
    }

    /// Flat Euclidean data `A = 0`, `S = V_{n-1} r^{n-1}`.
    pub fn flat(n: usize, grid: &RadialGrid) -> Result<Self, FlowError> {
        let vol = sphere_volume(n.saturating_sub(1));
        let a = alloc::vec![0.0; grid.len()];
        let s = grid.nodes().map(|r| vol * r.powi(n as i32 - 1)).collect();
        Self::new(n, 0.0, a, s)
    }

    pub fn validate(&self) -> Result<(), FlowError> {
        if self.a.iter().any(|x| !x.is_finite()) {
            return Err(FlowError::InvalidState("A is not finite"));
        }
        if self.s.iter().any(|x| !(x.is_finite() && *x > 0.0)) {
            return Err(FlowError::InvalidState("S must be finite and positive"));
        }
        Ok(())
    }

    /// Manifold dimension.
    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.a.len()
    }

    pub fn is_empty(&self) -> bool {
        self.a.is_empty()
    }

    /// Warping coefficient `B`, recovered from `S`.
    pub fn b(&self, grid: &RadialGrid) -> Vec<f64> {
        let k = (self.n - 1) as f64;
        let vol = sphere_volume(self.n - 1);
        self.s
            .iter()
            .zip(grid.nodes())
            .map(|(&s, r)| (s / (vol * r.powf(k))).ln() / k)
            .collect()
    }
}

/// Conformal factor of the background metric `e^{2ψ}(dr² + r² g(S^{n-1}))`,
/// which fixes the DeTurck vector field.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BackgroundGauge {
    Flat,
    /// `ψ = (2/α) ln(1 + r^{-α})`.
    PowerLaw(f64),
}

/// `ψ` and its first two derivatives at one radius.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Psi {
    pub value: f64,
    pub d1: f64,
    pub d2: f64,
}

impl BackgroundGauge {
    pub fn power_law(alpha: f64) -> Result<Self, FlowError> {
        if !(alpha.is_finite() && alpha > 0.0) {
            return Err(FlowError::Domain { what: "gauge exponent", value: alpha });
        }
        Ok(Self::PowerLaw(alpha))
    }

    /// Analytic `(ψ, ψ', ψ'')` at `r`.
    pub fn psi(&self, r: f64) -> Result<Psi, FlowError> {
        if !(r > 0.0) {
            return Err(FlowError::Domain { what: "radius", value: r });
        }
        Ok(match *self {
            Self::Flat => Psi { value: 0.0, d1: 0.0, d2: 0.0 },
            Self::PowerLaw(alpha) => {
                let w = r.powf(-alpha);
                let g = w / (1.0 + w);
                Psi {
                    value: 2.0 / alpha * w.ln_1p(),
                    d1: -2.0 * g / r,
                    d2: (2.0 * g + 2.0 * alpha * g / (1.0 + w)) / (r * r),
                }
            }
        })
    }

    /// `ψ` tabulated on every node of `grid`.
    pub fn tabulate(&self, grid: &RadialGrid) -> Result<Vec<Psi>, FlowError> {
        grid.nodes().map(|r| self.psi(r)).collect()
    }
}

/// `e^{-2B} = (V_{n-1} r^{n-1} / S)^{2/(n-1)}`.
#[inline]
pub(crate) fn inv_warp_sq(n: usize, vol: f64, r: f64, s: f64) -> f64 {
    match n {
        2 => {
            let x = vol * r / s;
            x * x
        }
        3 => vol * r * r / s,
        _ => {
            let k = (n - 1) as f64;
            (vol * r.powf(k) / s).powf(2.0 / k)
        }
    }
}

/// Scalar curvature at one point from `A, A', S, S', S''`.
#[inline]
#[allow(clippy::too_many_arguments)]
pub(crate) fn scalar_curvature_point(
    n: usize,
    vol: f64,
    r: f64,
    a: f64,
    a1: f64,
    s: f64,
    s1: f64,
    s2: f64,
) -> f64 {
    let k = (n - 1) as f64;
    let e = (-2.0 * a).exp();
    let sig = s1 / s;
    let g = inv_warp_sq(n, vol, r, s);
    e * (-2.0 * s2 / s + 2.0 * a1 * sig + (k - 1.0) / k * sig * sig) + k * (k - 1.0) * g / (r * r)
}

/// DeTurck vector component `V` at one point.
#[inline]
#[allow(clippy::too_many_arguments)]
pub(crate) fn deturck_point(
    n: usize,
    vol: f64,
    r: f64,
    a: f64,
    a1: f64,
    s: f64,
    s1: f64,
    psi: &Psi,
) -> f64 {
    let k = (n - 1) as f64;
    let e = (-2.0 * a).exp();
    let g = inv_warp_sq(n, vol, r, s);
    e * (a1 - psi.d1 - s1 / s) + k * g * (1.0 / r + psi.d1)
}

fn check_len(state: &MetricState, grid: &RadialGrid) {
    assert_eq!(state.len(), grid.len(), "state and grid sizes differ");
}

/// Mean curvature `H = e^{-A} S'/S` of the coordinate spheres.
pub fn mean_curvature(state: &MetricState, grid: &RadialGrid) -> Vec<f64> {
    check_len(state, grid);
    (0..grid.len())
        .map(|i| (-state.a[i]).exp() * grid.d1(&state.s, i) / state.s[i])
        .collect()
}

/// Scalar curvature of `e^{2A}dr² + (S/V_{n-1})^{2/(n-1)} g(S^{n-1})`.
///
/// In terms of `σ = S'/S` and `k = n - 1`:
///
/// ```text
/// R = e^{-2A} [ -2 S''/S + 2 A' σ + ((k-1)/k) σ² ] + k (k-1) e^{-2B} / r²
/// ```
///
/// which is `-2 ∂_s H - (n/(n-1)) H² + (n-1)(n-2)(S/V)^{-2/(n-1)}` written in
/// the coordinate `r` instead of proper distance `s`.
pub fn scalar_curvature(state: &MetricState, grid: &RadialGrid) -> Vec<f64> {
    check_len(state, grid);
    let n = state.dim();
    let vol = sphere_volume(n - 1);
    (0..grid.len())
        .map(|i| {
            scalar_curvature_point(
                n,
                vol,
                grid.r(i),
                state.a[i],
                grid.d1(&state.a, i),
                state.s[i],
                grid.d1(&state.s, i),
                grid.d2(&state.s, i),
            )
        })
        .collect()
}

/// DeTurck vector `X = V ∂_r` built from the flowing and background
/// connections.
pub fn deturck_vector(
    state: &MetricState,
    gauge: &BackgroundGauge,
    grid: &RadialGrid,
) -> Result<Vec<f64>, FlowError> {
    check_len(state, grid);
    let n = state.dim();
    let vol = sphere_volume(n - 1);
    (0..grid.len())
        .map(|i| {
            let r = grid.r(i);
            let psi = gauge.psi(r)?;
            Ok(deturck_point(
                n,
                vol,
                r,
                state.a[i],
                grid.d1(&state.a, i),
                state.s[i],
                grid.d1(&state.s, i),
                &psi,
            ))
        })
        .collect()
}

/// Willmore energy `W = ¼∮H²` and Hawking mass of the sphere at node `i`
/// (three dimensions only).
pub fn willmore_and_hawking(
    state: &MetricState,
    grid: &RadialGrid,
    i: usize,
) -> Result<(f64, f64), FlowError> {
    if state.dim() != 3 {
        return Err(FlowError::UnsupportedDimension(state.dim()));
    }
    check_len(state, grid);
    let h = (-state.a[i]).exp() * grid.d1(&state.s, i) / state.s[i];
    Ok(willmore_hawking_from(h, state.s[i]))
}

/// `(W, m_H)` for a round sphere of area `s` and mean curvature `h`.
pub fn willmore_hawking_from(h: f64, s: f64) -> (f64, f64) {
    use core::f64::consts::PI;
    let w = 0.25 * h * h * s;
    let m = s.sqrt() / (16.0 * PI.powf(1.5)) * (4.0 * PI - w);
    (w, m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use core::f64::consts::PI;

    #[test]
    fn psi_values() {
        let p = BackgroundGauge::Flat.psi(2.0).unwrap();
        assert_eq!((p.value, p.d1, p.d2), (0.0, 0.0, 0.0));
        let p = BackgroundGauge::PowerLaw(2.0).psi(1.0).unwrap();
        assert!((p.value - 2.0f64.ln()).abs() < 1e-15);
        assert!((p.d1 + 1.0).abs() < 1e-15);
        assert!(BackgroundGauge::Flat.psi(0.0).is_err());
        assert!(BackgroundGauge::PowerLaw(1.0).psi(-1.0).is_err());
        assert!(BackgroundGauge::power_law(0.0).is_err());
    }

    #[test]
    fn psi_derivatives_match_finite_differences() {
        for &alpha in &[0.5, 1.0, 2.0, 3.0, 8.0] {
            let g = BackgroundGauge::PowerLaw(alpha);
            for &r in &[1.0, 1.3, 2.0, 5.0, 10.0] {
                let d = 1e-4;
                let p = g.psi(r).unwrap();
                let (m, q) = (g.psi(r - d).unwrap(), g.psi(r + d).unwrap());
                let fd1 = (q.value - m.value) / (2.0 * d);
                let fd2 = (q.value - 2.0 * p.value + m.value) / (d * d);
                assert!((fd1 - p.d1).abs() < 1e-7, "ψ' α={alpha} r={r}");
                assert!((fd2 - p.d2).abs() < 1e-5 * (1.0 + p.d2.abs()), "ψ'' α={alpha} r={r}");
                let e = 1e-5;
                let fdd = (g.psi(r + e).unwrap().d1 - g.psi(r - e).unwrap().d1) / (2.0 * e);
                assert!((fdd - p.d2).abs() < 1e-7);
            }
        }
    }

    #[test]
    fn flat_mean_and_scalar_curvature() {
        let grid = RadialGrid::throat(10.0, 901).unwrap();
        let st = MetricState::flat(3, &grid).unwrap();
        let h = mean_curvature(&st, &grid);
        let i = grid.nodes().position(|r| (r - 2.0).abs() < 1e-12).unwrap();
        assert!((h[i] - 1.0).abs() < 1e-4);
        let rs = scalar_curvature(&st, &grid);
        assert!(rs.iter().all(|x| x.abs() < 1e-3));
        let v = deturck_vector(&st, &BackgroundGauge::Flat, &grid).unwrap();
        assert!(v.iter().all(|x| x.abs() < 1e-3));
    }

    #[test]
    fn willmore_examples() {
        let (w, m) = willmore_hawking_from(0.0, 4.0 * PI);
        assert_eq!(w, 0.0);
        assert!((m - 0.5).abs() < 1e-14);
        let r = 3.0;
        let (w, m) = willmore_hawking_from(2.0 / r, 4.0 * PI * r * r);
        assert!((w - 4.0 * PI).abs() < 1e-12);
        assert!(m.abs() < 1e-12);
    }

    #[test]
    fn willmore_needs_three_dimensions() {
        let grid = RadialGrid::throat(5.0, 11).unwrap();
        let st = MetricState::flat(4, &grid).unwrap();
        assert_eq!(
            willmore_and_hawking(&st, &grid, 0),
            Err(FlowError::UnsupportedDimension(4))
        );
    }

    #[test]
    fn invalid_states_rejected() {
        assert!(MetricState::new(3, 0.0, alloc::vec![0.0; 3], alloc::vec![1.0, -1.0, 1.0]).is_err());
        assert!(MetricState::new(3, 0.0, alloc::vec![f64::NAN; 3], alloc::vec![1.0; 3]).is_err());
        assert!(MetricState::new(1, 0.0, alloc::vec![0.0; 3], alloc::vec![1.0; 3]).is_err());
    }
}
