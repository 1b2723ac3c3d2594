use geonflow::config::{Family, GaugeKind, InnerKind, RunConfig, StepperKind};
use proptest::prelude::*;

fn any_config() -> impl Strategy<Value = RunConfig> {
    (
        (prop_oneof![Just(Family::Alpha), Just(Family::Tangherlini), Just(Family::Flat)], 0.1f64..10.0, 2usize..8),
        (prop_oneof![Just(GaugeKind::Flat), Just(GaugeKind::PowerLaw)], proptest::option::of(0.1f64..10.0)),
        (1.5f64..200.0, 5usize..100_000, prop_oneof![Just(StepperKind::Implicit), Just(StepperKind::Explicit)]),
        (1e-9f64..1e-2, 1e-12f64..1e-3, 1e-3f64..100.0),
        (proptest::collection::vec(0.0f64..10.0, 0..4), proptest::option::of(prop_oneof![
            Just(InnerKind::MinimalSphere),
            Just(InnerKind::Background)
        ])),
    )
        .prop_map(|((family, alpha, n), (gauge, gauge_alpha), (r_c, nodes, stepper), (rel_tol, abs_tol, t_max), (snapshot_times, inner))| {
            RunConfig {
                family,
                alpha,
                n,
                gauge,
                gauge_alpha,
                r_c,
                nodes,
                stepper,
                rel_tol,
                abs_tol,
                t_max,
                snapshot_times,
                inner,
                out: Some("out/run.csv".into()),
                ..Default::default()
            }
        })
}

proptest! {
    #[test]
    fn toml_round_trip_is_identity(cfg in any_config()) {
        let text = cfg.to_toml();
        let back: RunConfig = toml::from_str(&text).unwrap();
        prop_assert_eq!(&back, &cfg);
        prop_assert_eq!(back.to_toml(), text);
    }
}
