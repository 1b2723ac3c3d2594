//! Rotationally symmetric Ricci-DeTurck flow on manifolds with an essential
//! minimal hypersphere.
//!
//! The metric is written in isotropic-type coordinates
//!
//! ```text
//! ds² = e^{2A(t,r)} dr² + r² e^{2B(t,r)} g(S^{n-1})
//! ```
//!
//! on `r ∈ [1, r_c]`, with the minimal sphere ("throat") at `r = 1`. The
//! solver evolves `A` together with the area `S = V_{n-1} r^{n-1} e^{(n-1)B}`
//! of the coordinate spheres.
//!
//! The crate is `no_std` (it needs `alloc`). File formats, configuration and
//! the command line live in the `geonflow` crate.
#![no_std]
#![deny(unsafe_code)]
#![allow(clippy::needless_range_loop, clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod barrier;
pub mod diagnostics;
mod error;
pub mod evolution;
pub mod geometry;
pub mod grid;
pub mod initial_data;
pub mod ode;
pub mod polar;

pub use error::{FlowError, Side};
pub use evolution::{evolve, RunRecord, SolverConfig, Termination, TimeStepper};
pub use geometry::{BackgroundGauge, MetricState};
pub use grid::RadialGrid;
pub use initial_data::{InitialDataSpec, InitialFamily};

/// Volume of the unit `k`-sphere, `2π^{(k+1)/2} / Γ((k+1)/2)`.
///
/// `V_1 = 2π`, `V_2 = 4π`, `V_3 = 2π²`.
pub fn sphere_volume(k: usize) -> f64 {
    use core::f64::consts::PI;
    // V_k = 2π/(k-1) · V_{k-2}, seeded with V_0 = 2 and V_1 = 2π.
    match k {
        0 => 2.0,
        1 => 2.0 * PI,
        _ => 2.0 * PI / (k as f64 - 1.0) * sphere_volume(k - 2),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use core::f64::consts::PI;

    #[test]
    fn unit_sphere_volumes() {
        assert!((sphere_volume(1) - 2.0 * PI).abs() < 1e-14);
        assert!((sphere_volume(2) - 4.0 * PI).abs() < 1e-14);
        assert!((sphere_volume(3) - 2.0 * PI * PI).abs() < 1e-13);
        assert!((sphere_volume(4) - 8.0 * PI * PI / 3.0).abs() < 1e-13);
        // Γ(5/2) = 3√π/4
        let v4 = 2.0 * PI.powf(2.5) / (0.75 * PI.sqrt());
        assert!((sphere_volume(4) - v4).abs() < 1e-12);
    }
}
