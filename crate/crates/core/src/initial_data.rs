//! Initial data: the α-family of throat metrics and its Tangherlini members.
//!
//! The family `dρ²/(1 - (ρ₀/ρ)^α) + ρ² g(S^{n-1})` is brought to isotropic
//! form `β(r)² (dr² + r² g(S^{n-1}))` with
//!
//! ```text
//! β(r) = 2^{-2/α} (1 + r^{-α})^{2/α}
//! ```
//!
//! after fixing `ρ₀ = 1` and the integration constant `r₀ = 2^{1/α}`, so the
//! minimal sphere sits at `r = 1` with area `V_{n-1}`. Then `A = ln β` and
//! `S = V_{n-1} (r β)^{n-1}`.

use alloc::vec::Vec;

#[allow(unused_imports)] // shadowed by inherent methods when std is linked
use num_traits::Float;

use crate::geometry::scalar_curvature;
use crate::{sphere_volume, FlowError, MetricState, RadialGrid};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum InitialFamily {
    /// Any exponent `α > 0`.
    Alpha(f64),
    /// Time-symmetric Schwarzschild–Tangherlini slice, `α = n - 2`.
    Tangherlini,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InitialDataSpec {
    pub family: InitialFamily,
    pub n: usize,
}

impl InitialDataSpec {
    pub fn alpha_family(alpha: f64, n: usize) -> Result<Self, FlowError> {
        let spec = Self { family: InitialFamily::Alpha(alpha), n };
        spec.validate()?;
        Ok(spec)
    }

    pub fn tangherlini(n: usize) -> Result<Self, FlowError> {
        let spec = Self { family: InitialFamily::Tangherlini, n };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<(), FlowError> {
        match self.family {
            InitialFamily::Alpha(a) if !(a.is_finite() && a > 0.0) => {
                Err(FlowError::Domain { what: "alpha", value: a })
            }
            InitialFamily::Tangherlini if self.n < 3 => Err(FlowError::UnsupportedDimension(self.n)),
            _ if self.n < 2 => Err(FlowError::UnsupportedDimension(self.n)),
            _ => Ok(()),
        }
    }

    pub fn alpha(&self) -> f64 {
        match self.family {
            InitialFamily::Alpha(a) => a,
            InitialFamily::Tangherlini => (self.n - 2) as f64,
        }
    }

    /// Isotropic conformal factor `β(r)`.
    pub fn beta(&self, r: f64) -> f64 {
        self.log_beta(r).exp()
    }

    /// `A(0, r) = ln β(r)`.
    pub fn log_beta(&self, r: f64) -> f64 {
        let alpha = self.alpha();
        2.0 / alpha * (r.powf(-alpha).ln_1p() - core::f64::consts::LN_2)
    }

    /// `S(0, r) = V_{n-1} (r β)^{n-1}`.
    pub fn area(&self, r: f64) -> f64 {
        sphere_volume(self.n - 1) * (r * self.beta(r)).powi(self.n as i32 - 1)
    }

    /// Areal radius `ρ = r β(r)` of the isotropic sphere of radius `r`.
    pub fn areal_radius(&self, r: f64) -> f64 {
        r * self.beta(r)
    }
}

/// Samples the initial data on `grid`, which must start at the throat.
pub fn build_initial_state(spec: &InitialDataSpec, grid: &RadialGrid) -> Result<MetricState, FlowError> {
    spec.validate()?;
    if grid.r_min() != 1.0 {
        return Err(FlowError::InvalidGrid("initial data need r_min = 1"));
    }
    let a: Vec<f64> = grid.nodes().map(|r| spec.log_beta(r)).collect();
    let s: Vec<f64> = grid.nodes().map(|r| spec.area(r)).collect();
    MetricState::new(spec.n, 0.0, a, s)
}

/// `a² = max(0, -min_i R(0, r_i))`, the infimum taken over grid nodes.
pub fn infimum_initial_r(state: &MetricState, grid: &RadialGrid) -> f64 {
    let r = scalar_curvature(state, grid);
    let min = r.iter().copied().fold(f64::INFINITY, f64::min);
    (-min).max(0.0)
}

const QUAD_INTERVALS: usize = 10_000;

pub(crate) fn simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, m: usize) -> f64 {
    let m = m + m % 2;
    let h = (b - a) / m as f64;
    let mut acc = f(a) + f(b);
    for i in 1..m {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        acc += w * f(a + i as f64 * h);
    }
    acc * h / 3.0
}

/// Proper radial distance from the throat to `ρ` in the areal chart.
///
/// Substituting `ρ = ρ₀(1 + w²)` removes the inverse-square-root singularity
/// at the throat.
fn areal_chart_distance(alpha: f64, rho: f64) -> f64 {
    let w_max = (rho - 1.0).max(0.0).sqrt();
    let integrand = |w: f64| {
        if w == 0.0 {
            2.0 / alpha.sqrt()
        } else {
            let g = -(-alpha * (w * w).ln_1p()).exp_m1();
            2.0 * w / g.sqrt()
        }
    };
    simpson(integrand, 0.0, w_max, QUAD_INTERVALS)
}

/// Inverts `ρ = r β(r)` on `r ≥ 1` by bisection.
pub fn isotropic_radius(spec: &InitialDataSpec, rho: f64) -> Result<f64, FlowError> {
    if !(rho >= 1.0) {
        return Err(FlowError::Domain { what: "areal radius", value: rho });
    }
    let mut lo = 1.0;
    let mut hi = rho * 2f64.powf(2.0 / spec.alpha()) + 1.0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if spec.areal_radius(mid) < rho {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 4.0 * f64::EPSILON * hi {
            break;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Checks the isotropic transformation at the given areal radii: sphere
/// areas must agree between the two charts, and so must proper radial
/// distance from the throat (computed by independent quadratures in each
/// chart). Returns the worst relative mismatch.
pub fn verify_isotropic_transform(spec: &InitialDataSpec, samples: &[f64]) -> Result<f64, FlowError> {
    spec.validate()?;
    let alpha = spec.alpha();
    let vol = sphere_volume(spec.n - 1);
    let mut worst = 0.0f64;
    for &rho in samples {
        let r = isotropic_radius(spec, rho)?;
        let area_rho = vol * rho.powi(spec.n as i32 - 1);
        worst = worst.max((spec.area(r) - area_rho).abs() / area_rho);
        let l_rho = areal_chart_distance(alpha, rho);
        // x = ln r keeps the resolution uniform across scales.
        let l_r = simpson(|x| spec.beta(x.exp()) * x.exp(), 0.0, r.ln(), QUAD_INTERVALS);
        if l_rho > 1e-12 {
            worst = worst.max((l_rho - l_r).abs() / l_rho);
        } else {
            worst = worst.max((l_rho - l_r).abs());
        }
    }
    Ok(worst)
}
