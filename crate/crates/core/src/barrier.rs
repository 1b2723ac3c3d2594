//! Closed-form curvature bounds and area barriers.
//!
//! Along the flow the scalar curvature obeys `R ≥ -a²/(1 + 2a²t/n)`, where
//! `-a²` is the infimum of the initial scalar curvature. In three dimensions
//! the area of a minimal sphere is then bounded above by the solution `Ψ` of
//!
//! ```text
//! Ψ' - 3a²Ψ/(6 + 4t) = -c,    Ψ(0) = c δ,
//! ```
//!
//! with `c = 4π` for a two-sphere and `c = 2π` for the `ℝP²` cross-section
//! of the geon. A zero of `Ψ` bounds the collapse time from above.


#[allow(unused_imports)] // shadowed by inherent methods when std is linked
use num_traits::Float;

use crate::FlowError;
use core::f64::consts::PI;

/// `|3a² - 4|` below which the logarithmic branch of `Ψ` is used.
pub const LOG_BRANCH_EPS: f64 = 1e-9;

/// Euler-characteristic factor on the right-hand side of the barrier ODE.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum EulerCoeff {
    /// `c = 4π`: a minimal two-sphere, or the double cover of the geon.
    #[default]
    Sphere,
    /// `c = 2π`: the `ℝP²` cross-section of the geon itself.
    ProjectivePlane,
}

impl EulerCoeff {
    pub fn value(self) -> f64 {
        match self {
            Self::Sphere => 4.0 * PI,
            Self::ProjectivePlane => 2.0 * PI,
        }
    }
}

/// Which comparison ODE the barrier solves.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BarrierMode {
    /// Growth coefficient `3a²/(6 + 4t)`.
    #[default]
    AsWritten,
    /// Growth coefficient `(a²/2)/(1 + 2a²t/3)`, read directly off the
    /// maximum-principle bound.
    Sharp,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BarrierParams {
    pub a2: f64,
    /// Initial throat area divided by `4π`.
    pub delta: f64,
    pub euler: EulerCoeff,
}

impl BarrierParams {
    pub fn new(a2: f64, delta: f64, euler: EulerCoeff) -> Result<Self, FlowError> {
        if !(a2.is_finite() && a2 >= 0.0) {
            return Err(FlowError::Domain { what: "a²", value: a2 });
        }
        if !(delta.is_finite() && delta > 0.0) {
            return Err(FlowError::Domain { what: "delta", value: delta });
        }
        Ok(Self { a2, delta, euler })
    }

    /// `γ = 3a² - 4`.
    pub fn gamma(&self) -> f64 {
        3.0 * self.a2 - 4.0
    }

    fn c(&self) -> f64 {
        self.euler.value()
    }
}

/// Lower bound `-a²/(1 + 2a²t/n)` on scalar curvature.
pub fn max_principle_bound(t: f64, a2: f64, n: usize) -> f64 {
    -a2 / (1.0 + 2.0 * a2 * t / n as f64)
}

/// Upper barrier `Ψ(t)` for the minimal-sphere area (three dimensions).
pub fn barrier_psi(t: f64, p: &BarrierParams) -> Result<f64, FlowError> {
    barrier_psi_mode(t, p, BarrierMode::AsWritten)
}

pub fn barrier_psi_mode(t: f64, p: &BarrierParams, mode: BarrierMode) -> Result<f64, FlowError> {
    if !(t >= 0.0) {
        return Err(FlowError::Domain { what: "time", value: t });
    }
    Ok(match mode {
        BarrierMode::AsWritten => psi_as_written(t, p),
        BarrierMode::Sharp => psi_sharp(t, p),
    })
}

fn psi_as_written(t: f64, p: &BarrierParams) -> f64 {
    let c = p.c();
    let tau = 1.0 + 2.0 * t / 3.0;
    let gamma = p.gamma();
    if gamma.abs() < LOG_BRANCH_EPS {
        c * tau * (p.delta - 1.5 * tau.ln())
    } else {
        // τ[6/γ + (δ - 6/γ) τ^{γ/4}] rearranged so that nothing cancels as γ → 0.
        let x = 0.25 * gamma * tau.ln();
        c * tau * (p.delta * x.exp() - 6.0 / gamma * x.exp_m1())
    }
}

fn psi_sharp(t: f64, p: &BarrierParams) -> f64 {
    let kappa = 2.0 * p.a2 / 3.0;
    let weight = |s: f64| (1.0 + kappa * s).powf(-0.75);
    let integral = adaptive_simpson(&weight, 0.0, t, 1e-9);
    (1.0 + kappa * t).powf(0.75) * (p.c() * p.delta - p.c() * integral)
}

/// Positive zero of `Ψ`, if the barrier forces collapse.
///
/// A zero exists exactly when `γδ < 6`.
pub fn collapse_time_bound(p: &BarrierParams) -> Option<f64> {
    let gamma = p.gamma();
    if gamma * p.delta >= 6.0 {
        return None;
    }
    if gamma.abs() < LOG_BRANCH_EPS {
        return Some(1.5 * (2.0 * p.delta / 3.0).exp_m1());
    }
    // (1 + 2t/3)^{γ/4} = 6/(6 - γδ)
    let log_tau = -4.0 / gamma * (-gamma * p.delta / 6.0).ln_1p();
    Some(1.5 * log_tau.exp_m1())
}

/// Zero of the sharp-mode barrier, located by bracketing and bisection.
pub fn sharp_collapse_time(p: &BarrierParams) -> f64 {
    let f = |t: f64| psi_sharp(t, p);
    let mut hi = p.delta.max(1e-3);
    while f(hi) > 0.0 {
        hi *= 2.0;
    }
    bisect(f, 0.0, hi, 1e-12)
}

/// Critical `a²` for a minimal sphere of area `4πδ`: `(4 + 6/δ)/3`.
pub fn critical_a_squared(delta: f64) -> Result<f64, FlowError> {
    if !(delta > 0.0) {
        return Err(FlowError::Domain { what: "delta", value: delta });
    }
    Ok((4.0 + 6.0 / delta) / 3.0)
}

/// Two-dimensional bound `|Σ|(t) ≤ |Σ|(0) √(1 + a²t)`.
pub fn area_bound_2d(t: f64, a2: f64, s0: f64) -> f64 {
    s0 * (1.0 + a2 * t).sqrt()
}

/// Tangherlini throat bound `V_{n-1} exp(-(n-1)(n-2)t/2)`.
pub fn tangherlini_bound(t: f64, n: usize) -> Result<f64, FlowError> {
    if n < 3 {
        return Err(FlowError::UnsupportedDimension(n));
    }
    let k = (n - 1) as f64;
    Ok(crate::sphere_volume(n - 1) * (-0.5 * k * (k - 1.0) * t).exp())
}

/// Root of a sign-changing `f` on `[lo, hi]` to relative tolerance `rtol`.
pub fn bisect<F: Fn(f64) -> f64>(f: F, mut lo: f64, mut hi: f64, rtol: f64) -> f64 {
    let f_lo = f(lo);
    for _ in 0..400 {
        let mid = 0.5 * (lo + hi);
        if (f(mid) > 0.0) == (f_lo > 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= rtol * hi.abs().max(f64::MIN_POSITIVE) {
            break;
        }
    }
    0.5 * (lo + hi)
}

fn adaptive_simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, rtol: f64) -> f64 {
    if b <= a {
        return 0.0;
    }
    let (fa, fb, fm) = (f(a), f(b), f(0.5 * (a + b)));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    let tol = rtol * whole.abs().max(f64::MIN_POSITIVE);
    simpson_step(f, a, b, fa, fm, fb, whole, tol, 50)
}

#[allow(clippy::too_many_arguments)]
fn simpson_step<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
    let (flm, frm) = (f(lm), f(rm));
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let diff = left + right - whole;
    if depth == 0 || diff.abs() <= 15.0 * tol {
        left + right + diff / 15.0
    } else {
        simpson_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
            + simpson_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(a2: f64, delta: f64) -> BarrierParams {
        BarrierParams::new(a2, delta, EulerCoeff::Sphere).unwrap()
    }

    #[test]
    fn max_principle_examples() {
        assert_eq!(max_principle_bound(7.0, 0.0, 3), 0.0);
        assert_eq!(max_principle_bound(0.0, 5.0, 3), -5.0);
        assert!((max_principle_bound(1.0, 3.0, 3) + 1.0).abs() < 1e-15);
    }

    #[test]
    fn barrier_examples() {
        let p = params(0.0, 1.0);
        for &t in &[0.0, 0.3, 0.9, 1.5] {
            let psi = barrier_psi(t, &p).unwrap();
            assert!((psi - 4.0 * PI * (1.0 - t)).abs() < 1e-12, "t={t}");
        }
        let p = params(4.0 / 3.0, 1.0);
        for &t in &[0.0, 0.5, 1.0, 2.0] {
            let tau = 1.0 + 2.0 * t / 3.0;
            let expect = tau * (4.0 * PI - 6.0 * PI * tau.ln());
            assert!((barrier_psi(t, &p).unwrap() - expect).abs() < 1e-12);
        }
        let p = BarrierParams::new(2.5, 0.7, EulerCoeff::ProjectivePlane).unwrap();
        assert!((barrier_psi(0.0, &p).unwrap() - 2.0 * PI * 0.7).abs() < 1e-14);
        assert!(barrier_psi(-0.1, &p).is_err());
    }

    #[test]
    fn collapse_examples() {
        assert!((collapse_time_bound(&params(0.0, 1.0)).unwrap() - 1.0).abs() < 1e-14);
        let t_log = collapse_time_bound(&params(4.0 / 3.0, 1.0)).unwrap();
        assert!((t_log - 1.5 * ((2.0f64 / 3.0).exp() - 1.0)).abs() < 1e-10);
        assert_eq!(collapse_time_bound(&params(10.0 / 3.0 + 1.0, 1.0)), None);
        assert!(collapse_time_bound(&params(3.3, 1.0)).is_some());
    }

    #[test]
    fn critical_values() {
        assert_eq!(critical_a_squared(1.0).unwrap(), 10.0 / 3.0);
        assert!((critical_a_squared(2.0).unwrap() - 7.0 / 3.0).abs() < 1e-15);
        assert!((critical_a_squared(1e12).unwrap() - 4.0 / 3.0).abs() < 1e-10);
        assert!(critical_a_squared(0.0).is_err());
    }

    #[test]
    fn simple_bounds() {
        assert_eq!(area_bound_2d(5.0, 0.0, 2.0), 2.0);
        assert!((area_bound_2d(3.0, 1.0, 2.0 * PI) - 4.0 * PI).abs() < 1e-14);
        assert!((tangherlini_bound(0.0, 3).unwrap() - 4.0 * PI).abs() < 1e-14);
        assert!((tangherlini_bound(1.0, 3).unwrap() - 4.0 * PI / core::f64::consts::E).abs() < 1e-13);
        assert!(tangherlini_bound(0.0, 2).is_err());
    }

    #[test]
    fn sharp_mode_matches_closed_form() {
        // ∫₀ᵗ (1 + κs)^{-3/4} ds = (4/κ)((1 + κt)^{1/4} - 1).
        for &(a2, delta) in &[(0.5, 1.0), (2.0, 1.0), (4.0, 0.5)] {
            let p = params(a2, delta);
            let kappa = 2.0 * a2 / 3.0;
            for &t in &[0.0, 0.4, 1.3] {
                let integral = 4.0 / kappa * ((1.0 + kappa * t).powf(0.25) - 1.0);
                let expect = (1.0 + kappa * t).powf(0.75) * 4.0 * PI * (delta - integral);
                let got = barrier_psi_mode(t, &p, BarrierMode::Sharp).unwrap();
                assert!((got - expect).abs() <= 1e-8 * expect.abs().max(1.0));
            }
        }
        let p = params(0.0, 1.0);
        assert!((sharp_collapse_time(&p) - 1.0).abs() < 1e-10);
    }
}
