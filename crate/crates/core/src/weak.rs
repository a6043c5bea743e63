//! Weak-learner contracts, the class-weighted objective reduction, the
//! learnability check, and a synthetic oracle learner for exercising the
//! booster's guarantee end to end.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::dataset::LabeledDataset;
use crate::ensemble::Hypothesis;
use crate::error::{Error, Result};
use crate::metrics::{per_class_errors, zero_one_penalties};
use crate::weights::ClassWeights;

/// Default `epsilon` padding used when deriving `gamma`.
pub const DEFAULT_EPSILON: f64 = 0.0005;

/// Slack allowed in comparisons against `1/2 - gamma`. Decimal `gamma`
/// values are not exactly representable, so an exact rational statistic such
/// as `2/5 <= 1/2 - 1/10` would otherwise fail by one ulp.
pub const GAMMA_TOLERANCE: f64 = 1e-9;

/// A learning algorithm that minimizes the class-weighted error
/// `sum_k w_k R_k(h)`. Training must be deterministic given the data, the
/// weights, and the learner's own seed.
pub trait WeakLearner {
    type Output: Hypothesis;

    fn train(&self, data: &LabeledDataset, class_weights: &ClassWeights) -> Self::Output;
}

/// A learning algorithm that minimizes a per-instance weighted error; used
/// by the average-error baseline, where the Hedge game runs over instances.
pub trait InstanceWeightedLearner {
    type Output: Hypothesis;

    fn train_weighted(&self, data: &LabeledDataset, instance_weights: &[f64]) -> Self::Output;
}

/// Per-instance weights realizing the class-weighted objective: instance i
/// with label k gets `w_k / n_k`, so the weighted misclassification sum
/// equals `sum_k w_k R_k(h)` exactly.
pub fn instance_weights_from_class_weights(
    data: &LabeledDataset,
    class_weights: &ClassWeights,
) -> Result<Vec<f64>> {
    if class_weights.len() != data.num_classes() {
        return Err(Error::Contract(format!(
            "{} class weights for {} classes",
            class_weights.len(),
            data.num_classes()
        )));
    }
    let counts = data.class_counts();
    Ok(data
        .labels()
        .iter()
        .map(|&k| class_weights.get(k) / counts[k] as f64)
        .collect())
}

/// `sum_i weight_i I(h(x_i) != y_i)`.
pub fn weighted_error<H: Hypothesis + ?Sized>(
    h: &H,
    data: &LabeledDataset,
    instance_weights: &[f64],
) -> f64 {
    debug_assert_eq!(instance_weights.len(), data.len());
    data.instances()
        .zip(instance_weights)
        .map(|((features, label), &w)| if h.predict(features) != label { w } else { 0.0 })
        .sum()
}

/// Parameters of the weak-learnability test: the class-error bound `theta`,
/// the required edge `gamma` over the 1/2 penalty threshold, and the
/// `epsilon` padding that produced `gamma` (kept for reporting).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeakLearnabilityCheck {
    pub theta: f64,
    pub gamma: f64,
    pub epsilon: f64,
}

impl WeakLearnabilityCheck {
    pub fn new(theta: f64, gamma: f64, epsilon: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&theta) {
            return Err(Error::Config(format!("theta must be in [0, 1), got {theta}")));
        }
        if !(gamma > 0.0 && gamma < 0.5) {
            return Err(Error::Config(format!(
                "gamma must be in (0, 1/2), got {gamma}"
            )));
        }
        if epsilon.is_nan() || epsilon <= 0.0 {
            return Err(Error::Config(format!(
                "epsilon must be positive, got {epsilon}"
            )));
        }
        Ok(Self {
            theta,
            gamma,
            epsilon,
        })
    }

    /// The penalty-mean threshold `1/2 - gamma`.
    pub fn threshold(&self) -> f64 {
        0.5 - self.gamma
    }
}

/// Mean zero-one penalty of `h` over classes and whether it stays within
/// `1/2 - gamma`. The mean times K is always the exact integer count of
/// failing classes.
pub fn check_weak_learnability<H: Hypothesis + ?Sized>(
    h: &H,
    data: &LabeledDataset,
    check: &WeakLearnabilityCheck,
) -> (bool, f64) {
    let errors = per_class_errors(h, data);
    let penalties = zero_one_penalties(&errors, check.theta).expect("theta validated");
    penalty_outcome(&penalties, check)
}

/// `w . r`: the total weight of the classes whose error stays strictly
/// below `1 - theta`. A round is only useful to the guarantee when this
/// clears `1/2 + gamma`.
pub fn weighted_feedback<H: Hypothesis + ?Sized>(
    h: &H,
    data: &LabeledDataset,
    class_weights: &ClassWeights,
    theta: f64,
) -> f64 {
    let errors = per_class_errors(h, data);
    errors
        .iter()
        .zip(0..class_weights.len())
        .filter(|&(e, _)| *e < 1.0 - theta)
        .map(|(_, k)| class_weights.get(k))
        .sum()
}

/// Check outcome from already computed penalties.
pub fn penalty_outcome(penalties: &[u8], check: &WeakLearnabilityCheck) -> (bool, f64) {
    let failing: u32 = penalties.iter().map(|&p| u32::from(p)).sum();
    let mean = f64::from(failing) / penalties.len() as f64;
    (mean <= check.threshold() + GAMMA_TOLERANCE, mean)
}

/// The `gamma` schedule `floor(0.8 K) / K - 1/2 - epsilon`, computed with
/// integer arithmetic for the floor so ties never depend on the binary
/// representation of 0.8.
pub fn default_gamma(num_classes: usize, epsilon: f64) -> Result<f64> {
    if num_classes < 2 {
        return Err(Error::Config(format!(
            "need at least 2 classes, got {num_classes}"
        )));
    }
    if !(epsilon > 0.0 && epsilon < 0.01) {
        return Err(Error::Config(format!(
            "epsilon must be in (0, 0.01), got {epsilon}"
        )));
    }
    let floored = (4 * num_classes) / 5;
    let gamma = floored as f64 / num_classes as f64 - 0.5 - epsilon;
    if gamma <= 0.0 {
        return Err(Error::Config(format!(
            "gamma rule yields {gamma} for {num_classes} classes; supply gamma explicitly"
        )));
    }
    Ok(gamma)
}

/// A test-double learner that satisfies weak learnability by construction:
/// each round it fails exactly the `floor(K (1/2 - gamma))` classes with the
/// smallest current weights (ties to the lowest index) by misclassifying
/// just enough of their instances to cross the `1 - theta` bound, and
/// classifies every other class perfectly.
#[derive(Debug, Clone)]
pub struct OracleLearner {
    gamma: f64,
    theta: f64,
    seed: u64,
}

/// Builds an [`OracleLearner`].
pub fn oracle_weak_learner(gamma: f64, theta: f64, seed: u64) -> Result<OracleLearner> {
    if !(gamma > 0.0 && gamma < 0.5) {
        return Err(Error::Config(format!(
            "gamma must be in (0, 1/2), got {gamma}"
        )));
    }
    if !(0.0..1.0).contains(&theta) {
        return Err(Error::Config(format!("theta must be in [0, 1), got {theta}")));
    }
    Ok(OracleLearner { gamma, theta, seed })
}

impl OracleLearner {
    /// Number of classes failed per round.
    pub fn failing_classes(&self, num_classes: usize) -> usize {
        // floor with a small guard: K (1/2 - gamma) is an exact integer for
        // decimal gamma values like 0.1, but one ulp below it in binary
        floor_with_guard(num_classes as f64 * (0.5 - self.gamma))
    }

    /// Smallest per-class wrong count whose rate crosses `1 - theta`, under
    /// the same f64 comparison the penalty uses.
    fn cutoff(&self, class_size: usize) -> usize {
        let bound = 1.0 - self.theta;
        let mut c = (bound * class_size as f64).ceil() as usize;
        c = c.min(class_size);
        while c > 0 && (c - 1) as f64 / class_size as f64 >= bound {
            c -= 1;
        }
        c.max(1)
    }
}

fn floor_with_guard(x: f64) -> usize {
    (x + GAMMA_TOLERANCE).floor() as usize
}

impl WeakLearner for OracleLearner {
    type Output = SyntheticHypothesis;

    fn train(&self, data: &LabeledDataset, class_weights: &ClassWeights) -> Self::Output {
        let k = data.num_classes();
        debug_assert_eq!(class_weights.len(), k);
        let mut order: Vec<usize> = (0..k).collect();
        order.sort_by(|&a, &b| {
            class_weights
                .get(a)
                .total_cmp(&class_weights.get(b))
                .then(a.cmp(&b))
        });
        let mut failing = vec![false; k];
        for &class in order.iter().take(self.failing_classes(k)) {
            failing[class] = true;
        }

        let mut lookup = HashMap::with_capacity(data.len());
        let mut seen = vec![0usize; k];
        for (features, label) in data.instances() {
            let key: Vec<u64> = features.iter().map(|v| v.to_bits()).collect();
            lookup.insert(key, (label, seen[label]));
            seen[label] += 1;
        }
        let cutoffs = data
            .class_counts()
            .iter()
            .map(|&n| self.cutoff(n))
            .collect();
        let wrong_offset = if k > 1 {
            1 + (self.seed % (k as u64 - 1)) as usize
        } else {
            0
        };
        SyntheticHypothesis {
            lookup,
            failing,
            cutoffs,
            wrong_offset,
            num_classes: k,
        }
    }
}

/// The oracle learner's output: a lookup over the training features that
/// misclassifies the first `cutoff` instances of each failing class and is
/// correct everywhere else. Unseen feature vectors map to class 0.
#[derive(Debug, Clone)]
pub struct SyntheticHypothesis {
    lookup: HashMap<Vec<u64>, (usize, usize)>,
    failing: Vec<bool>,
    cutoffs: Vec<usize>,
    wrong_offset: usize,
    num_classes: usize,
}

impl Hypothesis for SyntheticHypothesis {
    fn predict(&self, features: &[f64]) -> usize {
        let key: Vec<u64> = features.iter().map(|v| v.to_bits()).collect();
        match self.lookup.get(&key) {
            Some(&(class, rank)) => {
                if self.failing[class] && rank < self.cutoffs[class] {
                    (class + self.wrong_offset) % self.num_classes
                } else {
                    class
                }
            }
            None => 0,
        }
    }
}
