//! Axis-aligned decision trees trained on weighted samples.
//!
//! Splits greedily minimize weighted Gini impurity over midpoint thresholds
//! between consecutive distinct feature values. Ties between equally good
//! splits break to the lowest feature index, then the lowest threshold, so
//! training is fully deterministic.

use serde::{Deserialize, Serialize};

use crate::dataset::LabeledDataset;
use crate::ensemble::Hypothesis;
use crate::error::Result;
use crate::weak::{
    check_weak_learnability, instance_weights_from_class_weights, weighted_error,
    weighted_feedback, InstanceWeightedLearner, WeakLearnabilityCheck, WeakLearner,
    GAMMA_TOLERANCE,
};
use crate::weights::ClassWeights;

/// Serializes 0-based class indices as the 1-based ids used by every file
/// format.
mod one_based {
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(value: &usize, serializer: S) -> Result<S::Ok, S::Error> {
        (value + 1).serialize(serializer)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(deserializer: D) -> Result<usize, D::Error> {
        let raw = usize::deserialize(deserializer)?;
        if raw == 0 {
            return Err(serde::de::Error::custom("class ids are 1-based"));
        }
        Ok(raw - 1)
    }
}

/// A tree node: either a split `x[feature] <= threshold ? left : right` or a
/// leaf holding the predicted class.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum TreeNode {
    Split {
        feature: usize,
        threshold: f64,
        left: Box<TreeNode>,
        right: Box<TreeNode>,
    },
    Leaf {
        #[serde(with = "one_based")]
        class: usize,
    },
}

impl TreeNode {
    fn predict(&self, features: &[f64]) -> usize {
        match self {
            TreeNode::Leaf { class } => *class,
            TreeNode::Split {
                feature,
                threshold,
                left,
                right,
            } => {
                if features[*feature] <= *threshold {
                    left.predict(features)
                } else {
                    right.predict(features)
                }
            }
        }
    }

    fn depth(&self) -> usize {
        match self {
            TreeNode::Leaf { .. } => 0,
            TreeNode::Split { left, right, .. } => 1 + left.depth().max(right.depth()),
        }
    }

    fn collect_leaf_classes(&self, seen: &mut [bool]) {
        match self {
            TreeNode::Leaf { class } => seen[*class] = true,
            TreeNode::Split { left, right, .. } => {
                left.collect_leaf_classes(seen);
                right.collect_leaf_classes(seen);
            }
        }
    }
}

/// A trained decision tree. Serializes to a JSON document of nested split
/// nodes (`feature`, `threshold`, `left`, `right`) and leaves (`class`,
/// 1-based).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecisionTree {
    root: TreeNode,
}

impl DecisionTree {
    pub fn root(&self) -> &TreeNode {
        &self.root
    }

    /// Longest root-to-leaf path; a single leaf has depth 0.
    pub fn depth(&self) -> usize {
        self.root.depth()
    }

    /// True when every class in `0..num_classes` is predicted by some leaf.
    pub fn covers_all_classes(&self, num_classes: usize) -> bool {
        let mut seen = vec![false; num_classes];
        self.root.collect_leaf_classes(&mut seen);
        seen.iter().all(|&s| s)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(json: &str) -> Result<Self> {
        Ok(serde_json::from_str(json)?)
    }
}

impl Hypothesis for DecisionTree {
    fn predict(&self, features: &[f64]) -> usize {
        self.root.predict(features)
    }
}

/// How far [`TreeLearner`] grows a tree before returning it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GrowthRule {
    /// Always grow to `max_depth`.
    FullDepth,
    /// Return the shallowest depth in `1..=max_depth` whose tree passes the
    /// weak-learnability check and whose weighted feedback `w . r` clears
    /// `1/2 + gamma`; falls back to `max_depth` when none does. Keeping
    /// members this weak mirrors stopping a learner as soon as its
    /// performance clears the learnability bar.
    MinimalLearnable(WeakLearnabilityCheck),
    /// Return the shallowest depth whose weighted training error drops below
    /// `1/2 - gamma`; the classical edge condition of instance-weighted
    /// boosting.
    MinimalEdge { gamma: f64 },
}

/// Weighted decision-tree learner.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TreeLearner {
    pub max_depth: usize,
    pub growth: GrowthRule,
    /// Recorded for provenance; the greedy split search is deterministic and
    /// does not consume randomness.
    pub seed: u64,
}

impl TreeLearner {
    pub fn new(max_depth: usize) -> Self {
        Self {
            max_depth: max_depth.max(1),
            growth: GrowthRule::FullDepth,
            seed: 0,
        }
    }

    /// Depth-1 tree learner.
    pub fn stump() -> Self {
        Self::new(1)
    }

    pub fn with_growth(mut self, growth: GrowthRule) -> Self {
        self.growth = growth;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }
}

impl WeakLearner for TreeLearner {
    type Output = DecisionTree;

    fn train(&self, data: &LabeledDataset, class_weights: &ClassWeights) -> DecisionTree {
        let weights = instance_weights_from_class_weights(data, class_weights)
            .expect("class weights must match the dataset");
        match &self.growth {
            GrowthRule::MinimalLearnable(check) => {
                let mut tree = fit_tree(data, &weights, 1);
                for depth in 1..=self.max_depth {
                    if depth > 1 {
                        tree = fit_tree(data, &weights, depth);
                    }
                    // the member must clear the learnability bar, its
                    // weighted feedback must clear 1/2 + gamma, and every
                    // class must hold some region; region-less hypotheses
                    // make the per-round pass sets churn too much for the
                    // majority vote to settle
                    if check_weak_learnability(&tree, data, check).0
                        && weighted_feedback(&tree, data, class_weights, check.theta)
                            >= 0.5 + check.gamma - GAMMA_TOLERANCE
                        && tree.covers_all_classes(data.num_classes())
                    {
                        break;
                    }
                }
                tree
            }
            _ => fit_tree(data, &weights, self.max_depth),
        }
    }
}

impl InstanceWeightedLearner for TreeLearner {
    type Output = DecisionTree;

    fn train_weighted(&self, data: &LabeledDataset, instance_weights: &[f64]) -> DecisionTree {
        match &self.growth {
            GrowthRule::MinimalEdge { gamma } => {
                let mut tree = fit_tree(data, instance_weights, 1);
                for depth in 1..=self.max_depth {
                    if depth > 1 {
                        tree = fit_tree(data, instance_weights, depth);
                    }
                    if weighted_error(&tree, data, instance_weights)
                        < 0.5 - gamma + GAMMA_TOLERANCE
                    {
                        break;
                    }
                }
                tree
            }
            _ => fit_tree(data, instance_weights, self.max_depth),
        }
    }
}

/// Trains a weighted tree of at most `max_depth` levels. `seed` does not
/// influence the deterministic split search; it is part of the training
/// contract and echoed into provenance records by callers.
pub fn train_weighted_tree(
    data: &LabeledDataset,
    class_weights: &ClassWeights,
    max_depth: usize,
    seed: u64,
) -> Result<DecisionTree> {
    let _ = seed;
    let weights = instance_weights_from_class_weights(data, class_weights)?;
    Ok(fit_tree(data, &weights, max_depth.max(1)))
}

/// Greedy weighted-Gini fit on the given per-instance weights.
pub fn fit_tree(data: &LabeledDataset, instance_weights: &[f64], max_depth: usize) -> DecisionTree {
    debug_assert_eq!(instance_weights.len(), data.len());
    let indices: Vec<usize> = (0..data.len()).collect();
    let root = build_node(data, instance_weights, indices, max_depth);
    DecisionTree { root }
}

struct SplitChoice {
    feature: usize,
    threshold: f64,
    impurity: f64,
}

fn build_node(
    data: &LabeledDataset,
    weights: &[f64],
    indices: Vec<usize>,
    depth_left: usize,
) -> TreeNode {
    let k = data.num_classes();
    let mut class_weight = vec![0.0f64; k];
    let mut class_count = vec![0usize; k];
    for &i in &indices {
        class_weight[data.label(i)] += weights[i];
        class_count[data.label(i)] += 1;
    }
    let total_weight: f64 = sum_sorted(&class_weight);
    let weighted_classes = class_weight.iter().filter(|&&w| w > 0.0).count();

    // leaf when out of depth, weight-pure, or nothing left to separate
    if depth_left == 0 || weighted_classes <= 1 {
        return TreeNode::Leaf {
            class: majority_class(&class_weight, &class_count),
        };
    }

    let Some(split) = best_split(data, weights, &indices, total_weight) else {
        return TreeNode::Leaf {
            class: majority_class(&class_weight, &class_count),
        };
    };

    let (left_idx, right_idx): (Vec<usize>, Vec<usize>) = indices
        .into_iter()
        .partition(|&i| data.features(i)[split.feature] <= split.threshold);
    debug_assert!(!left_idx.is_empty() && !right_idx.is_empty());
    TreeNode::Split {
        feature: split.feature,
        threshold: split.threshold,
        left: Box::new(build_node(data, weights, left_idx, depth_left - 1)),
        right: Box::new(build_node(data, weights, right_idx, depth_left - 1)),
    }
}

/// Best (feature, threshold) by weighted Gini; `None` when every feature is
/// constant on the node. Zero-gain splits are still returned so structures
/// like XOR separate at deeper levels.
fn best_split(
    data: &LabeledDataset,
    weights: &[f64],
    indices: &[usize],
    total_weight: f64,
) -> Option<SplitChoice> {
    let k = data.num_classes();
    let mut best: Option<SplitChoice> = None;
    let mut full_weight = vec![0.0f64; k];
    for &i in indices {
        full_weight[data.label(i)] += weights[i];
    }
    let mut sorted = indices.to_vec();
    for feature in 0..data.dim() {
        sorted.sort_by(|&a, &b| data.features(a)[feature].total_cmp(&data.features(b)[feature]));

        let mut left_weight = vec![0.0f64; k];
        let mut left_total = 0.0f64;
        let mut left_sumsq = 0.0f64; // sum of squared class weights on the left

        for pos in 0..sorted.len() - 1 {
            let i = sorted[pos];
            let label = data.label(i);
            let w = weights[i];
            left_sumsq += w * (2.0 * left_weight[label] + w);
            left_weight[label] += w;
            left_total += w;

            let here = data.features(i)[feature];
            let next = data.features(sorted[pos + 1])[feature];
            if here == next {
                continue;
            }
            // the midpoint of adjacent floats can round up to `next`, which
            // would put every instance on the left; fall back to `here`
            let mut threshold = 0.5 * (here + next);
            if threshold >= next {
                threshold = here;
            }

            let right_total = total_weight - left_total;
            let right_sumsq = right_sumsq_from(&full_weight, &left_weight);
            let impurity = gini(left_total, left_sumsq) + gini(right_total, right_sumsq);
            let better = match &best {
                None => true,
                Some(b) => impurity < b.impurity,
            };
            if better {
                best = Some(SplitChoice {
                    feature,
                    threshold,
                    impurity,
                });
            }
        }
    }
    best
}

fn right_sumsq_from(full: &[f64], left: &[f64]) -> f64 {
    full.iter()
        .zip(left)
        .map(|(&f, &l)| {
            let r = f - l;
            r * r
        })
        .sum()
}

/// Weighted Gini mass of one side: `W - sum_k c_k^2 / W`.
fn gini(total: f64, sumsq: f64) -> f64 {
    if total <= 0.0 {
        0.0
    } else {
        total - sumsq / total
    }
}

/// Class with the largest weight; unweighted counts break a zero-weight
/// node, and remaining ties go to the smallest class index.
fn majority_class(class_weight: &[f64], class_count: &[usize]) -> usize {
    let any_weight = class_weight.iter().any(|&w| w > 0.0);
    let mut best = 0;
    for k in 1..class_weight.len() {
        let better = if any_weight {
            class_weight[k] > class_weight[best]
        } else {
            class_count[k] > class_count[best]
        };
        if better {
            best = k;
        }
    }
    best
}

/// Sum in ascending value order, so the result does not depend on class
/// numbering.
fn sum_sorted(values: &[f64]) -> f64 {
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    sorted.iter().sum()
}
