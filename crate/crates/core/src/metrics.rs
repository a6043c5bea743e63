//! Class-wise error rates, the worst-class error, and the zero-one class
//! penalty with its complementary feedback vector.

use serde::{Deserialize, Serialize};

use crate::dataset::LabeledDataset;
use crate::ensemble::Hypothesis;
use crate::error::{Error, Result};
use crate::weights::FeedbackVector;

/// Per-class error rates of one hypothesis, together with the worst-class
/// error (their maximum) and the pooled error over the whole sample.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassErrorReport {
    /// Error rate per class, indexed by 0-based class.
    pub per_class_error: Vec<f64>,
    /// `max_k per_class_error[k]`.
    pub worst_class_error: f64,
    /// Error rate over the pooled sample (not the mean of class rates).
    pub average_error: f64,
}

impl ClassErrorReport {
    /// Builds a report from per-class wrong counts, keeping the exact
    /// count/size rational semantics.
    pub fn from_counts(wrong: &[usize], counts: &[usize]) -> Self {
        debug_assert_eq!(wrong.len(), counts.len());
        let per_class_error: Vec<f64> = wrong
            .iter()
            .zip(counts)
            .map(|(&w, &n)| w as f64 / n as f64)
            .collect();
        let worst_class_error = per_class_error.iter().copied().fold(0.0, f64::max);
        let total: usize = counts.iter().sum();
        let total_wrong: usize = wrong.iter().sum();
        let average_error = total_wrong as f64 / total as f64;
        Self {
            per_class_error,
            worst_class_error,
            average_error,
        }
    }

    /// 0-based class attaining the worst error; smallest index on ties.
    pub fn worst_class(&self) -> usize {
        let mut best = 0;
        for (k, &e) in self.per_class_error.iter().enumerate().skip(1) {
            if e > self.per_class_error[best] {
                best = k;
            }
        }
        best
    }
}

/// Per-class wrong-prediction counts of `h` on `data`, one pass.
pub fn per_class_wrong_counts<H: Hypothesis + ?Sized>(
    h: &H,
    data: &LabeledDataset,
) -> Vec<usize> {
    let mut wrong = vec![0usize; data.num_classes()];
    for (features, label) in data.instances() {
        if h.predict(features) != label {
            wrong[label] += 1;
        }
    }
    wrong
}

/// Per-class error rates of `h` on `data`.
pub fn per_class_errors<H: Hypothesis + ?Sized>(h: &H, data: &LabeledDataset) -> Vec<f64> {
    per_class_wrong_counts(h, data)
        .iter()
        .zip(data.class_counts())
        .map(|(&w, &n)| w as f64 / n as f64)
        .collect()
}

/// Fraction of class-`class` instances misclassified by `h`.
///
/// `class` is 0-based; an out-of-range class has no instances and reports
/// `EmptyClass` with the 1-based id.
pub fn class_wise_error<H: Hypothesis + ?Sized>(
    h: &H,
    data: &LabeledDataset,
    class: usize,
) -> Result<f64> {
    if class >= data.num_classes() {
        return Err(Error::EmptyClass(class + 1));
    }
    let mut wrong = 0usize;
    let mut total = 0usize;
    for (features, label) in data.instances() {
        if label == class {
            total += 1;
            if h.predict(features) != class {
                wrong += 1;
            }
        }
    }
    debug_assert!(total > 0);
    Ok(wrong as f64 / total as f64)
}

/// Full error report of `h` on `data`: per-class rates, their max, and the
/// pooled average.
pub fn worst_class_error<H: Hypothesis + ?Sized>(
    h: &H,
    data: &LabeledDataset,
) -> ClassErrorReport {
    ClassErrorReport::from_counts(&per_class_wrong_counts(h, data), data.class_counts())
}

/// Zero-one penalty from an already computed class error rate:
/// 1 iff `error >= 1 - theta`. The comparison is `>=`, so an error exactly at
/// the bound counts as a penalty.
pub fn penalty_from_error(error: f64, theta: f64) -> u8 {
    u8::from(error >= 1.0 - theta)
}

fn check_theta(theta: f64) -> Result<()> {
    if !(0.0..1.0).contains(&theta) {
        return Err(Error::Config(format!("theta must be in [0, 1), got {theta}")));
    }
    Ok(())
}

/// Zero-one penalty of `h` for class `class` (0-based) at bound `theta`.
pub fn zero_one_penalty<H: Hypothesis + ?Sized>(
    h: &H,
    data: &LabeledDataset,
    class: usize,
    theta: f64,
) -> Result<u8> {
    check_theta(theta)?;
    Ok(penalty_from_error(class_wise_error(h, data, class)?, theta))
}

/// Zero-one penalties for all classes at bound `theta`.
pub fn zero_one_penalties(per_class_errors: &[f64], theta: f64) -> Result<Vec<u8>> {
    check_theta(theta)?;
    Ok(per_class_errors
        .iter()
        .map(|&e| penalty_from_error(e, theta))
        .collect())
}

/// Feedback vector of one round: the exact complement of the zero-one
/// penalties, so `r_k = 1` iff class `k`'s error is strictly below
/// `1 - theta`.
pub fn feedback_from_errors(per_class_errors: &[f64], theta: f64) -> Result<FeedbackVector> {
    let penalties = zero_one_penalties(per_class_errors, theta)?;
    FeedbackVector::new(penalties.iter().map(|&p| 1 - p).collect())
}
