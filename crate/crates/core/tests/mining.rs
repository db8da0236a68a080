use narm::encoding::Scheme;
use narm::fitness::{dominates, Measure};
use narm::miner::{generate_planted, mine, MiningConfig};
use narm::optimizers::{AcoRParams, Algorithm, BatParams, OptimizerConfig, PsoParams};
use narm::rule::Metrics;

fn algorithms() -> [Algorithm; 3] {
    [
        Algorithm::Pso(PsoParams::default()),
        Algorithm::Bat(BatParams::default()),
        Algorithm::AcoR(AcoRParams::default()),
    ]
}

#[test]
fn larger_budget_does_not_lower_mean_best_score() {
    let (ds, _) = generate_planted(4, 400, 0.6, 21).unwrap();
    let measures = [Measure::Support, Measure::Confidence, Measure::Interestingness, Measure::Amplitude];
    for alg in algorithms() {
        let mean_best = |evals: usize| {
            (0..5u64)
                .map(|seed| {
                    let cfg = MiningConfig::weighted(
                        Scheme::Gaussian,
                        &measures,
                        vec![0.25; 4],
                        OptimizerConfig::new(alg.clone(), 20, evals, seed),
                    );
                    mine(&ds, &cfg).unwrap().rules[0].score
                })
                .sum::<f64>()
                / 5.0
        };
        let (small, large) = (mean_best(400), mean_best(4_000));
        assert!(large >= small, "{}: {large} < {small}", alg.name());
    }
}

#[test]
fn concurrent_runs_match_sequential_runs() {
    let (ds, _) = generate_planted(4, 300, 0.6, 5).unwrap();
    let configs: Vec<MiningConfig> = algorithms()
        .into_iter()
        .enumerate()
        .map(|(i, alg)| {
            MiningConfig::pareto(
                Scheme::CutPoint,
                &[Measure::Support, Measure::Confidence, Measure::Comprehensibility],
                OptimizerConfig::new(alg, 15, 900, i as u64),
            )
        })
        .collect();
    let sequential: Vec<_> = configs.iter().map(|c| mine(&ds, c).unwrap()).collect();
    let concurrent: Vec<_> = std::thread::scope(|s| {
        let handles: Vec<_> = configs.iter().map(|c| s.spawn(|| mine(&ds, c).unwrap())).collect();
        handles.into_iter().map(|h| h.join().unwrap()).collect()
    });
    assert_eq!(sequential, concurrent);
}

#[test]
fn stored_metrics_revalidate_and_fronts_are_non_dominated() {
    let (ds, _) = generate_planted(5, 300, 0.5, 13).unwrap();
    for (alg, scheme) in algorithms().into_iter().zip([Scheme::Triplet, Scheme::AeAv, Scheme::Gaussian]) {
        let mut cfg = MiningConfig::pareto(
            scheme,
            &[Measure::Confidence, Measure::Interestingness, Measure::Amplitude],
            OptimizerConfig::new(alg, 20, 2_000, 4),
        );
        cfg.min_confidence = 0.5;
        let set = mine(&ds, &cfg).unwrap();
        for r in &set.rules {
            assert_eq!(Metrics::evaluate(&r.rule, &ds, cfg.interestingness).unwrap(), r.metrics);
            assert!(r.metrics.confidence >= 0.5);
            for other in &set.rules {
                assert!(!dominates(other.objectives.values(), r.objectives.values()).unwrap());
            }
        }
    }
}

/// With only support and confidence as objectives, rules whose intervals
/// span the observed domains reach (1, 1) and dominate everything else, so
/// the front holds nothing but such rules.
#[test]
fn support_confidence_front_collapses_to_full_domain_rules() {
    let (ds, _) = generate_planted(4, 1000, 0.6, 0).unwrap();
    let cfg = MiningConfig::pareto(
        Scheme::Triplet,
        &[Measure::Support, Measure::Confidence],
        OptimizerConfig::new(Algorithm::Pso(PsoParams::default()), 50, 20_000, 0),
    );
    let set = mine(&ds, &cfg).unwrap();
    assert!(!set.rules.is_empty());
    for r in &set.rules {
        assert_eq!((r.metrics.support, r.metrics.confidence), (1.0, 1.0));
        assert_eq!(r.metrics.amplitude, 0.0);
    }
}
