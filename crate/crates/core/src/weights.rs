//! Points on the probability simplex and binary feedback vectors.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance on `|sum - 1|` for simplex membership.
pub const SIMPLEX_TOLERANCE: f64 = 1e-9;

/// A point on the simplex: non-negative entries summing to 1 within
/// [`SIMPLEX_TOLERANCE`]. Used both for the K class weights of the
/// worst-class game and the n instance weights of the average-error game.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ClassWeights(Vec<f64>);

impl ClassWeights {
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::Contract("empty weight vector".into()));
        }
        if weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
            return Err(Error::Contract(
                "weights must be finite and non-negative".into(),
            ));
        }
        let sum: f64 = weights.iter().sum();
        if (sum - 1.0).abs() > SIMPLEX_TOLERANCE {
            return Err(Error::Contract(format!(
                "weights sum to {sum}, expected 1 within {SIMPLEX_TOLERANCE}"
            )));
        }
        Ok(Self(weights))
    }

    /// Uniform weights `1/K`.
    pub fn uniform(len: usize) -> Result<Self> {
        if len == 0 {
            return Err(Error::Contract("empty weight vector".into()));
        }
        Ok(Self(vec![1.0 / len as f64; len]))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn get(&self, k: usize) -> f64 {
        self.0[k]
    }

    /// Inner product with a binary feedback vector of the same length.
    pub fn dot(&self, feedback: &FeedbackVector) -> f64 {
        debug_assert_eq!(self.len(), feedback.len());
        self.0
            .iter()
            .zip(feedback.as_slice())
            .map(|(w, &r)| w * f64::from(r))
            .sum()
    }
}

/// Per-expert success indicators for one round, entries in `{0, 1}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct FeedbackVector(Vec<u8>);

impl FeedbackVector {
    pub fn new(entries: Vec<u8>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::Contract("empty feedback vector".into()));
        }
        if entries.iter().any(|&r| r > 1) {
            return Err(Error::Contract("feedback entries must be 0 or 1".into()));
        }
        Ok(Self(entries))
    }

    pub fn from_successes(successes: &[bool]) -> Self {
        Self(successes.iter().map(|&s| u8::from(s)).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[u8] {
        &self.0
    }

    pub fn get(&self, k: usize) -> u8 {
        self.0[k]
    }
}
