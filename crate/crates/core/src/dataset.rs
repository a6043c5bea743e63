//! Labeled samples and their per-class partition.
//!
//! Labels are 0-based inside the library. The file formats in [`crate::io`]
//! use 1-based labels and convert at the boundary, as do error messages and
//! exported tables.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A fixed-dimension sample with labels in `0..num_classes`.
///
/// Invariants, enforced at construction:
/// - every feature vector has the same dimension and only finite entries,
/// - every label is `< num_classes`,
/// - every class has at least one instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabeledDataset {
    features: Vec<Vec<f64>>,
    labels: Vec<usize>,
    num_classes: usize,
    class_counts: Vec<usize>,
}

impl LabeledDataset {
    pub fn new(features: Vec<Vec<f64>>, labels: Vec<usize>, num_classes: usize) -> Result<Self> {
        if features.len() != labels.len() {
            return Err(Error::Contract(format!(
                "{} feature vectors but {} labels",
                features.len(),
                labels.len()
            )));
        }
        if num_classes == 0 {
            return Err(Error::Config("num_classes must be at least 1".into()));
        }
        let dim = features.first().map_or(0, Vec::len);
        for row in &features {
            if row.len() != dim {
                return Err(Error::Contract(format!(
                    "feature dimension mismatch: expected {}, got {}",
                    dim,
                    row.len()
                )));
            }
            if row.iter().any(|v| !v.is_finite()) {
                return Err(Error::Contract("non-finite feature value".into()));
            }
        }
        let mut class_counts = vec![0usize; num_classes];
        for &label in &labels {
            if label >= num_classes {
                return Err(Error::Contract(format!(
                    "label {} out of range for {} classes",
                    label, num_classes
                )));
            }
            class_counts[label] += 1;
        }
        if let Some(k) = class_counts.iter().position(|&c| c == 0) {
            return Err(Error::EmptyClass(k + 1));
        }
        Ok(Self {
            features,
            labels,
            num_classes,
            class_counts,
        })
    }

    /// Number of instances `n`.
    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    /// Feature dimension `d`.
    pub fn dim(&self) -> usize {
        self.features.first().map_or(0, Vec::len)
    }

    pub fn num_classes(&self) -> usize {
        self.num_classes
    }

    /// Per-class instance counts `n_k`, indexed by 0-based class.
    pub fn class_counts(&self) -> &[usize] {
        &self.class_counts
    }

    pub fn features(&self, i: usize) -> &[f64] {
        &self.features[i]
    }

    pub fn label(&self, i: usize) -> usize {
        self.labels[i]
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn instances(&self) -> impl Iterator<Item = (&[f64], usize)> {
        self.features
            .iter()
            .map(Vec::as_slice)
            .zip(self.labels.iter().copied())
    }

    /// Splits instance indices into the per-class sets `S_1..S_K`.
    ///
    /// The sets are disjoint, cover `0..n`, and set `k` holds exactly the
    /// indices labeled `k`, in ascending order. Emptiness is ruled out by the
    /// constructor, which rejects any class without instances.
    pub fn partition_by_class(&self) -> Vec<Vec<usize>> {
        let mut sets = vec![Vec::new(); self.num_classes];
        for (i, &label) in self.labels.iter().enumerate() {
            sets[label].push(i);
        }
        sets
    }

    /// New dataset holding the given instances (same class count).
    ///
    /// Fails with `EmptyClass` if some class loses all its instances.
    pub fn subset(&self, indices: &[usize]) -> Result<Self> {
        let features = indices.iter().map(|&i| self.features[i].clone()).collect();
        let labels = indices.iter().map(|&i| self.labels[i]).collect();
        Self::new(features, labels, self.num_classes)
    }

    /// Stratified split into (train, holdout) with `train_ratio` of each
    /// class going to the train side. Every class needs at least 2 instances
    /// so both sides stay valid datasets.
    pub fn split_stratified(&self, train_ratio: f64, seed: u64) -> Result<(Self, Self)> {
        if !(train_ratio > 0.0 && train_ratio < 1.0) {
            return Err(Error::Config(format!(
                "train_ratio must be in (0, 1), got {train_ratio}"
            )));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut train_idx = Vec::new();
        let mut holdout_idx = Vec::new();
        for (k, mut members) in self.partition_by_class().into_iter().enumerate() {
            if members.len() < 2 {
                return Err(Error::Config(format!(
                    "class {} has {} instance(s); need at least 2 to split",
                    k + 1,
                    members.len()
                )));
            }
            members.shuffle(&mut rng);
            let mut take = (members.len() as f64 * train_ratio).round() as usize;
            take = take.clamp(1, members.len() - 1);
            train_idx.extend_from_slice(&members[..take]);
            holdout_idx.extend_from_slice(&members[take..]);
        }
        train_idx.sort_unstable();
        holdout_idx.sort_unstable();
        Ok((self.subset(&train_idx)?, self.subset(&holdout_idx)?))
    }
}
