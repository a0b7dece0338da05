use fran_core::sim::{
    edge_outcomes, edge_signature, run_experiment, run_experiment_with_edges, run_trial, Estimate,
};
use fran_core::{Strategy, SystemConfig};

fn small() -> SystemConfig {
    SystemConfig {
        pairs: 3,
        library_size: 10,
        subfiles: 10,
        connectivity: 2,
        ..SystemConfig::default()
    }
}

#[test]
fn trials_are_reproducible() {
    let cfg = small();
    for t in 0..5 {
        assert_eq!(
            run_trial(42, t, &cfg).unwrap(),
            run_trial(42, t, &cfg).unwrap()
        );
    }
    assert_ne!(
        run_trial(42, 0, &cfg).unwrap(),
        run_trial(43, 0, &cfg).unwrap()
    );
}

#[test]
fn parallel_experiment_equals_sequential_trials() {
    let cfg = small();
    let agg = run_experiment(&cfg, 12, 7).unwrap();
    let sequential: Vec<_> = (0..12).map(|t| run_trial(7, t, &cfg).unwrap()).collect();
    assert_eq!(agg.results, sequential);
    assert_eq!(agg, run_experiment(&cfg, 12, 7).unwrap());

    let totals: Vec<f64> = sequential
        .iter()
        .map(|r| r.total(Strategy::Coded))
        .collect();
    assert_eq!(
        agg.summary(Strategy::Coded).total,
        Estimate::from_samples(&totals)
    );
}

#[test]
fn single_trial_has_zero_half_width() {
    let cfg = small();
    let agg = run_experiment(&cfg, 1, 3).unwrap();
    let r = run_trial(3, 0, &cfg).unwrap();
    for s in Strategy::ALL {
        let sum = agg.summary(s);
        assert_eq!(sum.total.mean, r.total(s));
        assert_eq!(sum.total.ci95, 0.0);
        assert_eq!(sum.fronthaul.mean, r.fronthaul(s));
    }
    assert!(run_experiment(&cfg, 0, 3).is_err());
}

#[test]
fn per_trial_strategy_ordering_and_latency_composition() {
    let cfg = small();
    for t in 0..20 {
        let r = run_trial(11, t, &cfg).unwrap();
        let [u, m, c] =
            [Strategy::Unicast, Strategy::Multicast, Strategy::Coded].map(|s| r.total(s));
        assert!(c <= m && m <= u);
        for s in Strategy::ALL {
            assert_eq!(r.total(s), r.fronthaul(s).max(r.edge_latency));
            assert_eq!(r.fronthaul(s), r.bits(s) / cfg.fronthaul_capacity);
        }
        assert_eq!(r.edge_latency, cfg.file_bits / r.min_rate);
    }
}

#[test]
fn fronthaul_ignores_power_and_edge_ignores_capacity() {
    let base = small();
    let louder = SystemConfig {
        snr_db: 35.0,
        ..base.clone()
    };
    let wider = SystemConfig {
        fronthaul_capacity: 7.5,
        ..base.clone()
    };
    for t in 0..6 {
        let r = run_trial(5, t, &base).unwrap();
        let p = run_trial(5, t, &louder).unwrap();
        let c = run_trial(5, t, &wider).unwrap();
        assert_eq!(r.fronthaul_latency, p.fronthaul_latency);
        assert_eq!(r.fronthaul_bits, p.fronthaul_bits);
        assert_eq!(r.edge_latency, c.edge_latency);
        assert_eq!(r.min_rate, c.min_rate);
    }
    assert_eq!(edge_signature(&base), edge_signature(&wider));
    assert_ne!(edge_signature(&base), edge_signature(&louder));
}

#[test]
fn cache_extremes() {
    let none = SystemConfig {
        cache_fraction: 0.0,
        ..small()
    };
    let full = SystemConfig {
        cache_fraction: 1.0,
        ..small()
    };
    for t in 0..10 {
        let r = run_trial(8, t, &none).unwrap();
        assert_eq!(r.bits(Strategy::Coded), r.bits(Strategy::Multicast));
        let r = run_trial(8, t, &full).unwrap();
        for s in Strategy::ALL {
            assert_eq!(r.bits(s), 0.0);
            assert_eq!(r.fronthaul(s), 0.0);
            assert_eq!(r.total(s), r.edge_latency);
        }
    }
}

#[test]
fn zero_capacity_trials_are_counted_not_averaged() {
    let cfg = SystemConfig {
        fronthaul_capacity: 0.0,
        cache_fraction: 0.5,
        ..small()
    };
    let agg = run_experiment(&cfg, 8, 2).unwrap();
    for s in Strategy::ALL {
        let inf = agg
            .results
            .iter()
            .filter(|r| r.total(s).is_infinite())
            .count();
        assert_eq!(agg.summary(s).infinite_trials, inf);
        assert!(inf > 0);
        if inf < 8 {
            assert!(agg.summary(s).total.mean.is_finite());
        }
    }
}

#[test]
fn reused_edge_outcomes_change_nothing() {
    let cfg = small();
    let edges = edge_outcomes(&cfg, 6, 21).unwrap();
    let other_mu = SystemConfig {
        cache_fraction: 0.7,
        fronthaul_capacity: 1.0,
        ..cfg.clone()
    };
    assert_eq!(
        run_experiment_with_edges(&other_mu, 6, 21, Some(&edges)).unwrap(),
        run_experiment(&other_mu, 6, 21).unwrap()
    );
    assert!(run_experiment_with_edges(&cfg, 7, 21, Some(&edges)).is_err());
}

#[test]
fn estimate_half_width_oracle() {
    let xs = [1.0, 2.0, 4.0, 7.0];
    let e = Estimate::from_samples(&xs);
    // mean 3.5, sample variance 7, half-width 1.96 * sqrt(7) / 2
    assert!((e.mean - 3.5).abs() < 1e-15);
    assert!((e.ci95 - 1.96 * 7f64.sqrt() / 2.0).abs() < 1e-12);
    assert!((e.lower() - (3.5 - e.ci95)).abs() < 1e-15);
}
