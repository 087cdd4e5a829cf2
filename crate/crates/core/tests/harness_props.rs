use maxcool::harness::{fit_exponential_rate, ExperimentConfig};
use proptest::prelude::*;

proptest! {
    #[test]
    fn config_survives_a_kv_round_trip(
        e in 0.05f64..=1.0,
        seed in any::<u64>(),
        grid_n in 64usize..4096,
        particles in 100usize..1_000_000,
    ) {
        let cfg = ExperimentConfig { e, seed, grid_n, particles, ..ExperimentConfig::default() };
        let back = ExperimentConfig::from_kv(&cfg.to_kv()).unwrap();
        prop_assert_eq!(&back, &cfg);
        prop_assert_eq!(back.content_hash(), cfg.content_hash());
    }

    #[test]
    fn exact_exponentials_are_fitted_exactly(rate in -2.0f64..2.0, c in -3.0f64..3.0, n in 5usize..60) {
        let series: Vec<(f64, f64)> = (0..n).map(|i| {
            let t = i as f64 * 0.25;
            (t, (c - rate * t).exp())
        }).collect();
        let fit = fit_exponential_rate(&series, (0.0, f64::INFINITY)).unwrap();
        prop_assert!((fit.rate - rate).abs() < 1e-9);
        prop_assert!((fit.intercept - c).abs() < 1e-9);
    }
}

#[test]
fn hash_tracks_content() {
    let a = ExperimentConfig::default();
    let mut b = a.clone();
    b.set("e", "0.5").unwrap();
    assert_ne!(a.content_hash(), b.content_hash());
    b.set("e", &a.e.to_string()).unwrap();
    assert_eq!(a.content_hash(), b.content_hash());
}
