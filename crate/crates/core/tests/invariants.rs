use geonflow_core::barrier::{BarrierParams, EulerCoeff};
use geonflow_core::diagnostics::check_bounds;
use geonflow_core::initial_data::{build_initial_state, infimum_initial_r};
use geonflow_core::{evolve, BackgroundGauge, InitialDataSpec, RadialGrid, SolverConfig, Termination};

fn alpha_run(alpha: f64, nodes: usize, t_max: f64, snaps: Vec<f64>) -> (geonflow_core::RunRecord, f64) {
    let spec = InitialDataSpec::alpha_family(alpha, 3).unwrap();
    let grid = RadialGrid::throat(10.0, nodes).unwrap();
    let st = build_initial_state(&spec, &grid).unwrap();
    let a2 = -infimum_initial_r(&st, &grid).min(0.0);
    let cfg = SolverConfig { nodes, t_max, rel_tol: 1e-5, abs_tol: 1e-8, snapshot_times: snaps, ..SolverConfig::default() };
    (evolve(&st, &BackgroundGauge::PowerLaw(alpha), &grid, &cfg).unwrap(), a2)
}

#[test]
fn throat_stays_minimal_along_the_flow() {
    let (run, _) = alpha_run(3.0, 1001, 0.3, vec![0.05, 0.1, 0.2, 0.3]);
    assert_eq!(run.snapshots.len(), 4);
    let dh = 2.0 * run.grid.spacing();
    for snap in &run.snapshots {
        let (a, s) = (&snap.a, &snap.s);
        let h: Vec<f64> = (1..s.len() - 1).map(|i| (-a[i]).exp() * (s[i + 1] - s[i - 1]) / dh / s[i]).collect();
        let h_max = h.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        let h_throat = (-a[0]).exp() * (-3.0 * s[0] + 4.0 * s[1] - s[2]) / dh / s[0];
        assert!(h_throat.abs() < 1e-6 * h_max, "t={} H(1)={h_throat:e} max={h_max:e}", snap.t);
        assert!(s.iter().all(|&x| x >= s[0]), "throat is not the smallest sphere at t={}", snap.t);
    }
}

#[test]
fn thin_neck_stays_under_its_barrier() {
    let (run, a2) = alpha_run(1.0, 4001, 2.0, vec![0.0]);
    assert!(matches!(run.termination, Termination::Collapsed(_)), "{:?}", run.termination);
    let p = BarrierParams::new(a2, 1.0, EulerCoeff::Sphere).unwrap();
    let rep = check_bounds(&run, &p, 3).unwrap();
    let worst = rep.worst_barrier.map_or(f64::INFINITY, |v| v.margin);
    assert!(worst > -0.02 * 4.0 * std::f64::consts::PI, "worst barrier margin {worst}");
    let last = run.samples.last().unwrap();
    assert!(last.s_throat < 1e-2 * run.samples[0].s_throat);
}
