//! Cross-module properties exercised through the public API.

mod common;

use wcboost::boost::{
    run_worstclass_boost, training_guarantee_report, BoostConfig, StopReason,
};
use wcboost::dataset::LabeledDataset;
use wcboost::hedge::sufficient_rounds;
use wcboost::weak::oracle_weak_learner;

fn five_class_data() -> LabeledDataset {
    let labels: Vec<usize> = (0..60).map(|i| i % 5).collect();
    let features: Vec<Vec<f64>> = (0..60).map(|i| vec![i as f64, (i % 11) as f64]).collect();
    LabeledDataset::new(features, labels, 5).unwrap()
}

/// The training-error guarantee holds across seeds for both parameter
/// pairs, with the round budget set by the regret bound.
#[test]
fn training_guarantee_holds_for_oracle_learners() {
    let data = five_class_data();
    for (gamma, theta) in [(0.1, 0.75), (0.2, 0.5)] {
        let rounds = sufficient_rounds(5, gamma).unwrap();
        for seed in 0..20u64 {
            let learner = oracle_weak_learner(gamma, theta, seed).unwrap();
            let config = BoostConfig::new(theta, gamma)
                .unwrap()
                .with_max_rounds(rounds)
                .with_patience(rounds + 1)
                .with_seed(seed);
            let result = run_worstclass_boost(&data, &learner, &config).unwrap();
            assert_eq!(result.stop_reason, StopReason::CompletedRounds);
            assert!(
                result.final_train_report.worst_class_error < 1.0 - theta,
                "gamma={gamma}, theta={theta}, seed={seed}: {} >= {}",
                result.final_train_report.worst_class_error,
                1.0 - theta
            );
            let report = training_guarantee_report(&result, &config);
            assert!(report.preconditions_held);
            assert_eq!(report.conclusion_holds, Some(true));
        }
    }
}

/// Round counts inferred from the regret bound match hand-derived values.
#[test]
fn sufficient_rounds_reference_points() {
    assert_eq!(sufficient_rounds(5, 0.1).unwrap(), 322);
    assert_eq!(sufficient_rounds(5, 0.0995).unwrap(), 326);
    assert_eq!(sufficient_rounds(5, 0.2).unwrap(), 81);
}

/// The regret recorded by the booster matches an independent accumulation
/// over the logged rounds.
#[test]
fn booster_regret_matches_external_recomputation() {
    let data = five_class_data();
    let learner = oracle_weak_learner(0.15, 0.6, 9).unwrap();
    let config = BoostConfig::new(0.6, 0.15)
        .unwrap()
        .with_max_rounds(80)
        .with_patience(100);
    let result = run_worstclass_boost(&data, &learner, &config).unwrap();

    let mut played = 0.0f64;
    let mut cumulative = [0.0f64; 5];
    for record in result.log.rounds.iter().filter(|r| r.hypothesis_index.is_some()) {
        let weights = record.weights.as_slice();
        let mut dot = 0.0;
        for k in 0..5 {
            dot += weights[k] * f64::from(record.feedback.get(k));
            cumulative[k] += f64::from(record.feedback.get(k));
        }
        played += dot;
        let best = cumulative.iter().copied().fold(f64::INFINITY, f64::min);
        assert!((record.running_regret - (played - best)).abs() < 1e-9);
    }
}
