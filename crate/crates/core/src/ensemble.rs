//! The hypothesis contract and unweighted majority-vote ensembles.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A trained multi-class predictor. `predict` must be a pure function of the
/// features once training has finished.
pub trait Hypothesis {
    /// Predicted class index in `0..num_classes`.
    fn predict(&self, features: &[f64]) -> usize;
}

impl<H: Hypothesis + ?Sized> Hypothesis for &H {
    fn predict(&self, features: &[f64]) -> usize {
        (**self).predict(features)
    }
}

impl<H: Hypothesis + ?Sized> Hypothesis for Box<H> {
    fn predict(&self, features: &[f64]) -> usize {
        (**self).predict(features)
    }
}

/// An ordered list of hypotheses combined by unweighted majority vote.
/// Vote-count ties go to the smallest class index, so predictions are
/// reproducible and invariant under permuting the members.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Ensemble<H> {
    members: Vec<H>,
    num_classes: usize,
}

impl<H: Hypothesis> Ensemble<H> {
    pub fn new(members: Vec<H>, num_classes: usize) -> Result<Self> {
        if members.is_empty() {
            return Err(Error::Contract("ensemble needs at least one member".into()));
        }
        if num_classes == 0 {
            return Err(Error::Contract("ensemble needs at least one class".into()));
        }
        Ok(Self {
            members,
            num_classes,
        })
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn members(&self) -> &[H] {
        &self.members
    }

    pub fn num_classes(&self) -> usize {
        self.num_classes
    }

    /// Class with the most member votes; ties break to the smallest index.
    pub fn majority_vote(&self, features: &[f64]) -> usize {
        let mut votes = vec![0usize; self.num_classes];
        for member in &self.members {
            let class = member.predict(features);
            debug_assert!(class < self.num_classes);
            votes[class] += 1;
        }
        argmax_lowest(&votes)
    }
}

impl<H: Hypothesis> Hypothesis for Ensemble<H> {
    fn predict(&self, features: &[f64]) -> usize {
        self.majority_vote(features)
    }
}

/// Index of the largest value, smallest index on ties.
pub(crate) fn argmax_lowest(values: &[usize]) -> usize {
    let mut best = 0;
    for (i, &v) in values.iter().enumerate().skip(1) {
        if v > values[best] {
            best = i;
        }
    }
    best
}
