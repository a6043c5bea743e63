//! Brute-force counters independent of the library's implementation paths,
//! plus tiny fixtures. Everything here recomputes from first principles
//! with plain loops so the main code has something honest to disagree with.
#![allow(dead_code)] // each test binary uses its own slice of this module

use wcboost::dataset::LabeledDataset;
use wcboost::ensemble::Hypothesis;

/// Hypothesis reading its prediction out of feature 0, which the fixtures
/// set to the instance index.
pub struct Table(pub Vec<usize>);

impl Hypothesis for Table {
    fn predict(&self, features: &[f64]) -> usize {
        self.0[features[0] as usize]
    }
}

/// Dataset with features `[i]` so `Table` can address instances.
pub fn indexed_dataset(labels: &[usize], num_classes: usize) -> LabeledDataset {
    let features = (0..labels.len()).map(|i| vec![i as f64]).collect();
    LabeledDataset::new(features, labels.to_vec(), num_classes).unwrap()
}

/// Per-class error rates by direct counting.
pub fn per_class_errors(preds: &[usize], labels: &[usize], num_classes: usize) -> Vec<f64> {
    (0..num_classes)
        .map(|class| {
            let mut total = 0usize;
            let mut wrong = 0usize;
            for (&pred, &label) in preds.iter().zip(labels) {
                if label == class {
                    total += 1;
                    if pred != class {
                        wrong += 1;
                    }
                }
            }
            wrong as f64 / total as f64
        })
        .collect()
}

/// Pooled error rate by direct counting.
pub fn pooled_error(preds: &[usize], labels: &[usize]) -> f64 {
    let wrong = preds
        .iter()
        .zip(labels)
        .filter(|(p, l)| p != l)
        .count();
    wrong as f64 / labels.len() as f64
}

/// Max of the per-class rates.
pub fn worst_error(per_class: &[f64]) -> f64 {
    per_class.iter().copied().fold(0.0, f64::max)
}

/// Zero-one penalty per class: 1 iff error >= 1 - theta.
pub fn penalties(per_class: &[f64], theta: f64) -> Vec<u8> {
    per_class
        .iter()
        .map(|&e| u8::from(e >= 1.0 - theta))
        .collect()
}

/// Weighted misclassification sum by direct accumulation.
pub fn weighted_error(preds: &[usize], labels: &[usize], weights: &[f64]) -> f64 {
    preds
        .iter()
        .zip(labels)
        .zip(weights)
        .map(|((p, l), &w)| if p != l { w } else { 0.0 })
        .sum()
}

/// Class-weighted error along the other route: `sum_k w_k err_k`.
pub fn class_weighted_error(per_class: &[f64], class_weights: &[f64]) -> f64 {
    per_class
        .iter()
        .zip(class_weights)
        .map(|(&e, &w)| e * w)
        .sum()
}

/// Majority vote by explicit tallying, smallest class index on ties.
pub fn majority_vote(member_preds: &[usize], num_classes: usize) -> usize {
    let mut tally = vec![0usize; num_classes];
    for &p in member_preds {
        tally[p] += 1;
    }
    let mut best = 0;
    for k in 1..num_classes {
        if tally[k] > tally[best] {
            best = k;
        }
    }
    best
}

/// All label assignments of length `n` over `K` classes where every class
/// appears at least once.
pub fn all_full_labelings(n: usize, num_classes: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let total = num_classes.pow(n as u32);
    for code in 0..total {
        let mut value = code;
        let mut labels = Vec::with_capacity(n);
        let mut seen = vec![false; num_classes];
        for _ in 0..n {
            let label = value % num_classes;
            seen[label] = true;
            labels.push(label);
            value /= num_classes;
        }
        if seen.iter().all(|&s| s) {
            out.push(labels);
        }
    }
    out
}

/// All prediction vectors of length `n` over `K` classes.
pub fn all_predictions(n: usize, num_classes: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let total = num_classes.pow(n as u32);
    for code in 0..total {
        let mut value = code;
        let mut preds = Vec::with_capacity(n);
        for _ in 0..n {
            preds.push(value % num_classes);
            value /= num_classes;
        }
        out.push(preds);
    }
    out
}
