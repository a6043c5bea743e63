//! Hedge (exponential weights) over a simplex of experts, regret accounting,
//! and the learning-rate schedule.
//!
//! In the worst-class game the experts are the K classes; in the
//! average-error baseline they are the n instances. Both share this module.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::weights::{ClassWeights, FeedbackVector};

/// The Hedge player's state: current weights, learning rate, round counter,
/// and the per-expert sum of past feedback bits.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HedgeState {
    weights: ClassWeights,
    eta: f64,
    round: usize,
    cumulative_feedback: Vec<f64>,
}

impl HedgeState {
    /// Uniform initial weights `1/K` at round 0.
    pub fn new(num_experts: usize, eta: f64) -> Result<Self> {
        if num_experts < 2 {
            return Err(Error::Config(format!(
                "Hedge needs at least 2 experts, got {num_experts}"
            )));
        }
        if !eta.is_finite() || eta < 0.0 {
            return Err(Error::Config(format!(
                "eta must be finite and non-negative, got {eta}"
            )));
        }
        Ok(Self {
            weights: ClassWeights::uniform(num_experts)?,
            eta,
            round: 0,
            cumulative_feedback: vec![0.0; num_experts],
        })
    }

    pub fn weights(&self) -> &ClassWeights {
        &self.weights
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    pub fn round(&self) -> usize {
        self.round
    }

    /// `cumulative_feedback[k] = sum_{t <= round} r_{k,t}`.
    pub fn cumulative_feedback(&self) -> &[f64] {
        &self.cumulative_feedback
    }

    /// Minimum over experts of the cumulative feedback; the best fixed
    /// weight vector in hindsight sits on that vertex of the simplex.
    pub fn min_cumulative_feedback(&self) -> f64 {
        self.cumulative_feedback
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min)
    }
}

/// Uniform initial Hedge weights over `num_experts` experts.
pub fn init_weights(num_experts: usize, eta: f64) -> Result<HedgeState> {
    HedgeState::new(num_experts, eta)
}

/// The default learning-rate schedule `sqrt(8 ln(K) / T)` over K experts,
/// which keeps the regret of any T-round run within `sqrt(T ln(K) / 2)`.
///
/// The worst-class game passes K = number of classes. Callers that prefer a
/// sample-size schedule pass the sample size instead (see
/// [`crate::boost::EtaRule`]).
pub fn default_eta(num_experts: usize, rounds: usize) -> f64 {
    debug_assert!(num_experts >= 2);
    debug_assert!(rounds >= 1);
    (8.0 * (num_experts as f64).ln() / rounds as f64).sqrt()
}

/// One multiplicative-weights step: `w'_k = w_k e^{-eta r_k} / Z`.
///
/// Experts with feedback 1 (already satisfying their bound) lose weight;
/// failing experts gain relative weight. The exponents are shifted by their
/// maximum before exponentiation, and the normalizer sums the scaled terms
/// in sorted order so that permuting experts permutes the output bit-exactly.
pub fn hedge_update(state: &HedgeState, feedback: &FeedbackVector) -> Result<HedgeState> {
    let k = state.weights.len();
    if feedback.len() != k {
        return Err(Error::Contract(format!(
            "feedback has {} entries, state has {} experts",
            feedback.len(),
            k
        )));
    }
    let eta = state.eta;
    let all_ones = feedback.as_slice().iter().all(|&r| r == 1);
    let shift = if all_ones { -eta } else { 0.0 };
    let scaled: Vec<f64> = state
        .weights
        .as_slice()
        .iter()
        .zip(feedback.as_slice())
        .map(|(&w, &r)| w * (-eta * f64::from(r) - shift).exp())
        .collect();
    let mut terms = scaled.clone();
    terms.sort_by(f64::total_cmp);
    let normalizer: f64 = terms.iter().sum();
    if !(normalizer.is_finite() && normalizer > 0.0) {
        return Err(Error::Contract(format!(
            "degenerate Hedge normalizer {normalizer}"
        )));
    }
    let weights = ClassWeights::new(scaled.iter().map(|&s| s / normalizer).collect())?;
    let mut cumulative_feedback = state.cumulative_feedback.clone();
    for (c, &r) in cumulative_feedback.iter_mut().zip(feedback.as_slice()) {
        *c += f64::from(r);
    }
    Ok(HedgeState {
        weights,
        eta,
        round: state.round + 1,
        cumulative_feedback,
    })
}

/// Round-by-round history of (weights played, feedback received).
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct RegretLedger {
    rounds: Vec<(ClassWeights, FeedbackVector)>,
}

impl RegretLedger {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, weights: ClassWeights, feedback: FeedbackVector) -> Result<()> {
        if weights.len() != feedback.len() {
            return Err(Error::Contract(format!(
                "weights have {} entries, feedback has {}",
                weights.len(),
                feedback.len()
            )));
        }
        if let Some((first, _)) = self.rounds.first() {
            if first.len() != weights.len() {
                return Err(Error::Contract("ledger dimension changed".into()));
            }
        }
        self.rounds.push((weights, feedback));
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.rounds.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rounds.is_empty()
    }

    pub fn rounds(&self) -> &[(ClassWeights, FeedbackVector)] {
        &self.rounds
    }

    /// `sum_t w_t . r_t - min_k sum_t r_{k,t}`.
    ///
    /// The inner minimum of a linear function over the simplex is attained
    /// at a vertex, so it is taken over coordinates of the cumulative
    /// feedback, never by numerical optimization. An empty ledger has
    /// regret 0.
    pub fn regret(&self) -> f64 {
        let Some((first, _)) = self.rounds.first() else {
            return 0.0;
        };
        let k = first.len();
        let mut played = 0.0;
        let mut cumulative = vec![0.0f64; k];
        for (weights, feedback) in &self.rounds {
            played += weights.dot(feedback);
            for (c, &r) in cumulative.iter_mut().zip(feedback.as_slice()) {
                *c += f64::from(r);
            }
        }
        let best_fixed = cumulative.iter().copied().fold(f64::INFINITY, f64::min);
        played - best_fixed
    }

    /// Writes the weight trajectory as CSV rows `round,k,weight,feedback`
    /// with 1-based rounds and class ids.
    pub fn write_trajectory_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "round,k,weight,feedback")?;
        for (t, (weights, feedback)) in self.rounds.iter().enumerate() {
            for k in 0..weights.len() {
                writeln!(
                    out,
                    "{},{},{},{}",
                    t + 1,
                    k + 1,
                    weights.get(k),
                    feedback.get(k)
                )?;
            }
        }
        Ok(())
    }

    /// Time-averaged weight per expert.
    pub fn mean_weights(&self) -> Vec<f64> {
        let Some((first, _)) = self.rounds.first() else {
            return Vec::new();
        };
        let mut sums = vec![0.0f64; first.len()];
        for (weights, _) in &self.rounds {
            for (s, &w) in sums.iter_mut().zip(weights.as_slice()) {
                *s += w;
            }
        }
        let t = self.rounds.len() as f64;
        sums.iter_mut().for_each(|s| *s /= t);
        sums
    }
}

/// Smallest round count T for which the Hedge regret bound
/// `sqrt(T ln(K) / 2)` stays within `gamma T / 2`, i.e.
/// `T = ceil(2 ln(K) / gamma^2)`.
pub fn sufficient_rounds(num_experts: usize, gamma: f64) -> Result<usize> {
    if num_experts < 2 {
        return Err(Error::Config(format!(
            "need at least 2 experts, got {num_experts}"
        )));
    }
    if !(gamma > 0.0 && gamma < 0.5) {
        return Err(Error::Config(format!(
            "gamma must be in (0, 1/2), got {gamma}"
        )));
    }
    let t = (2.0 * (num_experts as f64).ln() / (gamma * gamma)).ceil();
    Ok((t as usize).max(1))
}
