use std::f64::consts::PI;

use geonflow_core::barrier::{
    barrier_psi, collapse_time_bound, critical_a_squared, max_principle_bound, BarrierParams, EulerCoeff,
};
use geonflow_core::initial_data::isotropic_radius;
use geonflow_core::{InitialDataSpec, RadialGrid};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn collapse_bound_exists_iff_gamma_delta_below_six(a2 in 0.0f64..8.0, delta in 0.1f64..10.0) {
        let p = BarrierParams::new(a2, delta, EulerCoeff::Sphere).unwrap();
        let gd = (3.0 * a2 - 4.0) * delta;
        match collapse_time_bound(&p) {
            Some(t) => {
                prop_assert!(gd < 6.0);
                prop_assert!(t > 0.0);
                prop_assert!(barrier_psi(t, &p).unwrap().abs() < 1e-7 * 4.0 * PI * delta);
                prop_assert!(barrier_psi(0.5 * t, &p).unwrap() > 0.0);
            }
            None => prop_assert!(gd >= 6.0),
        }
    }

    #[test]
    fn critical_value_separates_collapse(delta in 0.1f64..10.0) {
        let crit = critical_a_squared(delta).unwrap();
        let below = BarrierParams::new(0.999 * crit, delta, EulerCoeff::Sphere).unwrap();
        let above = BarrierParams::new(1.001 * crit, delta, EulerCoeff::Sphere).unwrap();
        prop_assert!(collapse_time_bound(&below).is_some());
        prop_assert!(collapse_time_bound(&above).is_none());
    }

    #[test]
    fn curvature_floor_rises_to_zero(a2 in 0.0f64..8.0, t in 0.0f64..10.0, n in 2usize..8) {
        let b = max_principle_bound(t, a2, n);
        prop_assert!(b <= 0.0 && b >= -a2);
        prop_assert!(max_principle_bound(t + 1.0, a2, n) >= b);
    }

    #[test]
    fn alpha_family_is_inversion_symmetric(alpha in 0.3f64..8.0, r in 1.0f64..50.0) {
        let spec = InitialDataSpec::alpha_family(alpha, 3).unwrap();
        let lhs = spec.beta(1.0 / r);
        let rhs = r * r * spec.beta(r);
        prop_assert!((lhs - rhs).abs() <= 1e-12 * rhs);
    }

    #[test]
    fn isotropic_radius_inverts_areal_radius(alpha in 0.5f64..8.0, rho in 1.0f64..1e3) {
        let spec = InitialDataSpec::alpha_family(alpha, 3).unwrap();
        let r = isotropic_radius(&spec, rho).unwrap();
        prop_assert!(r >= 1.0);
        prop_assert!((spec.areal_radius(r) - rho).abs() <= 1e-10 * rho);
    }

    #[test]
    fn stencils_are_exact_on_cubics(c in prop::array::uniform4(-3.0f64..3.0), nodes in 5usize..40) {
        let g = RadialGrid::new(1.0, 4.0, nodes).unwrap();
        let p = |x: f64| c[0] + c[1] * x + c[2] * x * x + c[3] * x * x * x;
        let u: Vec<f64> = g.nodes().map(p).collect();
        for i in 0..nodes {
            let x = g.r(i);
            let (d1, d2) = (c[1] + 2.0 * c[2] * x + 3.0 * c[3] * x * x, 2.0 * c[2] + 6.0 * c[3] * x);
            if i == 0 || i == nodes - 1 {
                prop_assert!((g.d1(&u, i) - d1).abs() < 1e-8 * (1.0 + d1.abs()) * nodes as f64);
                prop_assert!((g.d2(&u, i) - d2).abs() < 1e-7 * (1.0 + d2.abs()) * (nodes * nodes) as f64);
            } else if c[3] == 0.0 {
                prop_assert!((g.d2(&u, i) - d2).abs() < 1e-7 * (nodes * nodes) as f64);
            }
        }
    }
}
