//! The worst-class booster, the average-error baseline, stopping rules,
//! round logging, and the generalization-bound calculator.
//!
//! Each round of the worst-class game trains a hypothesis on the
//! class-weighted sample, marks every class whose error stayed strictly
//! below `1 - theta` as a success, and Hedge-updates the class weights with
//! that feedback. A hypothesis joins the ensemble only while the mean
//! zero-one penalty stays within `1/2 - gamma`; the first failure ends the
//! run with the ensemble built so far.

use serde::{Deserialize, Serialize};

use crate::dataset::LabeledDataset;
use crate::ensemble::{Ensemble, Hypothesis};
use crate::error::{Error, Result};
use crate::hedge::{default_eta, hedge_update, sufficient_rounds, HedgeState};
use crate::metrics::{
    feedback_from_errors, per_class_errors, worst_class_error, zero_one_penalties,
    ClassErrorReport,
};
use crate::weak::{
    penalty_outcome, weighted_error, InstanceWeightedLearner, WeakLearnabilityCheck, WeakLearner,
    DEFAULT_EPSILON, GAMMA_TOLERANCE,
};
use crate::weights::{ClassWeights, FeedbackVector};

/// Two successive `w_t . r_t` values within this distance count as
/// unchanged for stall detection.
pub const STALL_TOLERANCE: f64 = 1e-12;

/// How the Hedge learning rate is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EtaRule {
    /// `sqrt(8 ln(K) / T)` over the game's expert count (classes for the
    /// worst-class game, instances for the average baseline).
    Auto,
    /// `sqrt(8 ln(n) / T)` with n the sample size, regardless of the game.
    AutoSampleSize,
    /// A fixed positive value.
    Fixed(f64),
}

/// Run parameters shared by both boosters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoostConfig {
    /// Accuracy floor; every class's training error is pushed below
    /// `1 - theta`.
    pub theta: f64,
    /// Weak learner's edge over the 1/2 penalty threshold.
    pub gamma: f64,
    /// Padding recorded alongside gamma.
    pub epsilon: f64,
    /// Round budget; `None` resolves to [`sufficient_rounds`] for the game's
    /// expert count.
    pub max_rounds: Option<usize>,
    pub eta: EtaRule,
    /// Stop after this many consecutive rounds with an unchanged
    /// `w_t . r_t`.
    pub patience: usize,
    pub seed: u64,
}

impl BoostConfig {
    pub fn new(theta: f64, gamma: f64) -> Result<Self> {
        let config = Self {
            theta,
            gamma,
            epsilon: DEFAULT_EPSILON,
            max_rounds: None,
            eta: EtaRule::Auto,
            patience: 50,
            seed: 0,
        };
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..1.0).contains(&self.theta) {
            return Err(Error::Config(format!(
                "theta must be in [0, 1), got {}",
                self.theta
            )));
        }
        if !(self.gamma > 0.0 && self.gamma < 0.5) {
            return Err(Error::Config(format!(
                "gamma must be in (0, 1/2), got {}",
                self.gamma
            )));
        }
        if self.epsilon.is_nan() || self.epsilon <= 0.0 {
            return Err(Error::Config(format!(
                "epsilon must be positive, got {}",
                self.epsilon
            )));
        }
        if self.max_rounds == Some(0) {
            return Err(Error::Config("max_rounds must be positive".into()));
        }
        if self.patience == 0 {
            return Err(Error::Config("patience must be positive".into()));
        }
        if let EtaRule::Fixed(eta) = self.eta {
            if !(eta.is_finite() && eta > 0.0) {
                return Err(Error::Config(format!(
                    "fixed eta must be positive and finite, got {eta}"
                )));
            }
        }
        Ok(())
    }

    pub fn with_max_rounds(mut self, rounds: usize) -> Self {
        self.max_rounds = Some(rounds);
        self
    }

    pub fn with_patience(mut self, patience: usize) -> Self {
        self.patience = patience;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    fn resolve_rounds(&self, num_experts: usize) -> Result<usize> {
        match self.max_rounds {
            Some(t) => Ok(t),
            None => sufficient_rounds(num_experts, self.gamma),
        }
    }

    fn resolve_eta(&self, num_experts: usize, sample_size: usize, rounds: usize) -> f64 {
        match self.eta {
            EtaRule::Auto => default_eta(num_experts, rounds),
            EtaRule::AutoSampleSize => default_eta(sample_size, rounds),
            EtaRule::Fixed(eta) => eta,
        }
    }
}

/// Why a run ended.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum StopReason {
    /// Every scheduled round completed.
    #[serde(rename = "completed_T")]
    CompletedRounds,
    #[serde(rename = "weak_learnability_failed")]
    WeakLearnabilityFailed,
    #[serde(rename = "stalled")]
    Stalled,
}

/// One audited round.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoundRecord {
    /// 1-based round number.
    pub round: usize,
    /// Weights the round was played with (K entries for the worst-class
    /// game, n for the average baseline).
    pub weights: ClassWeights,
    /// Feedback the environment returned for those weights.
    pub feedback: FeedbackVector,
    /// Unweighted per-class error rates of this round's hypothesis.
    pub per_class_errors: Vec<f64>,
    /// Slot in the final ensemble; `None` when the gate rejected the round.
    pub hypothesis_index: Option<usize>,
    /// `w_t . r_t`.
    pub weighted_feedback: f64,
    /// Regret of the game so far, over accepted rounds.
    pub running_regret: f64,
    /// Whether the weak-learnability gate passed.
    pub gate_satisfied: bool,
    /// Gate statistic: mean zero-one penalty for the worst-class game,
    /// weighted error for the average baseline.
    pub gate_statistic: f64,
}

/// Full audit trail of a run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoundLog {
    pub rounds: Vec<RoundRecord>,
    /// Hedge weights after the last update.
    pub final_weights: ClassWeights,
}

impl RoundLog {
    /// Rounds whose hypothesis joined the ensemble.
    pub fn accepted(&self) -> impl Iterator<Item = &RoundRecord> {
        self.rounds.iter().filter(|r| r.hypothesis_index.is_some())
    }

    /// Writes `round,k,weight,feedback` rows, 1-based, one row per expert
    /// and round.
    pub fn write_trajectory_csv<W: std::io::Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "round,k,weight,feedback")?;
        for record in &self.rounds {
            for k in 0..record.weights.len() {
                writeln!(
                    out,
                    "{},{},{},{}",
                    record.round,
                    k + 1,
                    record.weights.get(k),
                    record.feedback.get(k)
                )?;
            }
        }
        Ok(())
    }

    /// Time-averaged weight per expert over all logged rounds.
    pub fn mean_weights(&self) -> Vec<f64> {
        let Some(first) = self.rounds.first() else {
            return Vec::new();
        };
        let mut sums = vec![0.0f64; first.weights.len()];
        for record in &self.rounds {
            for (s, &w) in sums.iter_mut().zip(record.weights.as_slice()) {
                *s += w;
            }
        }
        let t = self.rounds.len() as f64;
        sums.iter_mut().for_each(|s| *s /= t);
        sums
    }
}

/// Outcome of a boosting run.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(bound(serialize = "H: Serialize", deserialize = "H: Deserialize<'de>"))]
pub struct BoostResult<H> {
    pub ensemble: Ensemble<H>,
    pub log: RoundLog,
    pub stop_reason: StopReason,
    /// Error report of the final majority vote on the training data.
    pub final_train_report: ClassErrorReport,
}

/// Tracks consecutive rounds with an unchanged `w_t . r_t`.
struct StallDetector {
    patience: usize,
    previous: Option<f64>,
    streak: usize,
}

impl StallDetector {
    fn new(patience: usize) -> Self {
        Self {
            patience,
            previous: None,
            streak: 0,
        }
    }

    /// Returns true when the value has now been static for `patience`
    /// consecutive rounds.
    fn observe(&mut self, value: f64) -> bool {
        match self.previous {
            Some(prev) if (value - prev).abs() <= STALL_TOLERANCE => self.streak += 1,
            _ => self.streak = 0,
        }
        self.previous = Some(value);
        self.streak >= self.patience
    }
}

/// Runs the worst-class booster: Hedge over K class weights, feedback
/// `r_k = 1` iff class k's error stays strictly below `1 - theta`, and the
/// per-round learnability gate on the mean zero-one penalty.
pub fn run_worstclass_boost<L: WeakLearner>(
    data: &LabeledDataset,
    learner: &L,
    config: &BoostConfig,
) -> Result<BoostResult<L::Output>> {
    config.validate()?;
    let k = data.num_classes();
    if k < 2 {
        return Err(Error::Config(format!(
            "boosting needs at least 2 classes, got {k}"
        )));
    }
    let rounds = config.resolve_rounds(k)?;
    let eta = config.resolve_eta(k, data.len(), rounds);
    let check = WeakLearnabilityCheck::new(config.theta, config.gamma, config.epsilon)?;

    let mut state = HedgeState::new(k, eta)?;
    let mut members = Vec::new();
    let mut records = Vec::with_capacity(rounds);
    let mut stall = StallDetector::new(config.patience);
    let mut played_sum = 0.0f64;
    let mut stop_reason = StopReason::CompletedRounds;

    for round in 1..=rounds {
        let weights = state.weights().clone();
        let hypothesis = learner.train(data, &weights);
        let errors = per_class_errors(&hypothesis, data);
        let penalties = zero_one_penalties(&errors, config.theta)?;
        let feedback = feedback_from_errors(&errors, config.theta)?;
        let (gate_ok, penalty_mean) = penalty_outcome(&penalties, &check);
        let weighted_feedback = weights.dot(&feedback);

        if !gate_ok {
            records.push(RoundRecord {
                round,
                weights,
                feedback,
                per_class_errors: errors,
                hypothesis_index: None,
                weighted_feedback,
                running_regret: played_sum - state.min_cumulative_feedback(),
                gate_satisfied: false,
                gate_statistic: penalty_mean,
            });
            stop_reason = StopReason::WeakLearnabilityFailed;
            break;
        }

        played_sum += weighted_feedback;
        state = hedge_update(&state, &feedback)?;
        members.push(hypothesis);
        records.push(RoundRecord {
            round,
            weights,
            feedback,
            per_class_errors: errors,
            hypothesis_index: Some(members.len() - 1),
            weighted_feedback,
            running_regret: played_sum - state.min_cumulative_feedback(),
            gate_satisfied: true,
            gate_statistic: penalty_mean,
        });

        if stall.observe(weighted_feedback) {
            stop_reason = StopReason::Stalled;
            break;
        }
    }

    finish_run(data, members, records, state, stop_reason, k)
}

/// Runs the standard average-error baseline: the same game played over n
/// instance weights, feedback `r_i = 1` iff instance i is classified
/// correctly, and the classical edge gate `weighted error < 1/2 - gamma`.
pub fn run_average_boost<L: InstanceWeightedLearner>(
    data: &LabeledDataset,
    learner: &L,
    config: &BoostConfig,
) -> Result<BoostResult<L::Output>> {
    config.validate()?;
    let n = data.len();
    if n < 2 {
        return Err(Error::Config(format!(
            "boosting needs at least 2 instances, got {n}"
        )));
    }
    let rounds = config.resolve_rounds(n)?;
    let eta = config.resolve_eta(n, n, rounds);
    let edge_threshold = 0.5 - config.gamma;

    let mut state = HedgeState::new(n, eta)?;
    let mut members = Vec::new();
    let mut records = Vec::with_capacity(rounds.min(4096));
    let mut stall = StallDetector::new(config.patience);
    let mut played_sum = 0.0f64;
    let mut stop_reason = StopReason::CompletedRounds;

    for round in 1..=rounds {
        let weights = state.weights().clone();
        let hypothesis = learner.train_weighted(data, weights.as_slice());
        let errors = per_class_errors(&hypothesis, data);
        let error_weighted = weighted_error(&hypothesis, data, weights.as_slice());
        let successes: Vec<bool> = data
            .instances()
            .map(|(features, label)| hypothesis.predict(features) == label)
            .collect();
        let feedback = FeedbackVector::from_successes(&successes);
        let gate_ok = error_weighted < edge_threshold + GAMMA_TOLERANCE;
        let weighted_feedback = weights.dot(&feedback);

        if !gate_ok {
            records.push(RoundRecord {
                round,
                weights,
                feedback,
                per_class_errors: errors,
                hypothesis_index: None,
                weighted_feedback,
                running_regret: played_sum - state.min_cumulative_feedback(),
                gate_satisfied: false,
                gate_statistic: error_weighted,
            });
            stop_reason = StopReason::WeakLearnabilityFailed;
            break;
        }

        played_sum += weighted_feedback;
        state = hedge_update(&state, &feedback)?;
        members.push(hypothesis);
        records.push(RoundRecord {
            round,
            weights,
            feedback,
            per_class_errors: errors,
            hypothesis_index: Some(members.len() - 1),
            weighted_feedback,
            running_regret: played_sum - state.min_cumulative_feedback(),
            gate_satisfied: true,
            gate_statistic: error_weighted,
        });

        if stall.observe(weighted_feedback) {
            stop_reason = StopReason::Stalled;
            break;
        }
    }

    finish_run(data, members, records, state, stop_reason, data.num_classes())
}

fn finish_run<H: Hypothesis>(
    data: &LabeledDataset,
    members: Vec<H>,
    records: Vec<RoundRecord>,
    state: HedgeState,
    stop_reason: StopReason,
    num_classes: usize,
) -> Result<BoostResult<H>> {
    if members.is_empty() {
        return Err(Error::NoWeakHypothesis);
    }
    let ensemble = Ensemble::new(members, num_classes)?;
    let final_train_report = worst_class_error(&ensemble, data);
    Ok(BoostResult {
        ensemble,
        log: RoundLog {
            rounds: records,
            final_weights: state.weights().clone(),
        },
        stop_reason,
        final_train_report,
    })
}

/// Whether the run satisfied both hypotheses of the training-error
/// guarantee (per-round learnability and the regret budget) and, when it
/// did, whether the guaranteed conclusion held.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GuaranteeReport {
    /// Rounds whose hypothesis was accepted.
    pub rounds_played: usize,
    /// All rounds passed the learnability gate.
    pub weak_learnability_held: bool,
    /// 1-based round of the first gate failure, if any.
    pub first_violation_round: Option<usize>,
    /// Minimum over rounds of `1/2 - gamma - penalty_mean`.
    pub min_slack: f64,
    /// Regret realized over the accepted rounds.
    pub realized_regret: f64,
    /// The regret budget `gamma T / 2` the guarantee assumes.
    pub regret_budget: f64,
    pub regret_within_budget: bool,
    /// Both hypotheses of the guarantee held.
    pub preconditions_held: bool,
    pub stop_reason: StopReason,
    pub worst_class_training_error: f64,
    /// `1 - theta`.
    pub error_bound: f64,
    /// `Some(worst < 1 - theta)` when the run completed all rounds with
    /// preconditions held; `None` otherwise.
    pub conclusion_holds: Option<bool>,
    /// For every class where more than half the members kept their error
    /// below `1 - theta`, so did the ensemble.
    pub majority_vote_consistent: bool,
    pub notes: Vec<String>,
}

/// Audits a completed worst-class run against the training-error
/// guarantee's two hypotheses and its conclusion.
pub fn training_guarantee_report<H>(
    result: &BoostResult<H>,
    config: &BoostConfig,
) -> GuaranteeReport {
    let threshold = 0.5 - config.gamma;
    let mut min_slack = f64::INFINITY;
    let mut first_violation_round = None;
    for record in &result.log.rounds {
        min_slack = min_slack.min(threshold - record.gate_statistic);
        if !record.gate_satisfied && first_violation_round.is_none() {
            first_violation_round = Some(record.round);
        }
    }
    let weak_learnability_held = first_violation_round.is_none();

    // regret over accepted rounds, recomputed from the log
    let mut played = 0.0f64;
    let mut cumulative: Option<Vec<f64>> = None;
    let mut rounds_played = 0usize;
    for record in result.log.accepted() {
        played += record.weighted_feedback;
        let cum = cumulative.get_or_insert_with(|| vec![0.0; record.feedback.len()]);
        for (c, &r) in cum.iter_mut().zip(record.feedback.as_slice()) {
            *c += f64::from(r);
        }
        rounds_played += 1;
    }
    let best_fixed = cumulative
        .as_ref()
        .map(|cum| cum.iter().copied().fold(f64::INFINITY, f64::min))
        .unwrap_or(0.0);
    let realized_regret = played - best_fixed;
    let regret_budget = config.gamma * rounds_played as f64 / 2.0;
    let regret_within_budget = realized_regret <= regret_budget + GAMMA_TOLERANCE;

    let preconditions_held = weak_learnability_held && regret_within_budget;
    let worst = result.final_train_report.worst_class_error;
    let error_bound = 1.0 - config.theta;
    let conclusion_holds = if preconditions_held && result.stop_reason == StopReason::CompletedRounds
    {
        Some(worst < error_bound)
    } else {
        None
    };

    // contrapositive of the majority-vote counting step: a class kept below
    // the bound by more than half the members is kept below it by the vote
    let num_classes = result.final_train_report.per_class_error.len();
    let mut majority_vote_consistent = true;
    for k in 0..num_classes {
        let passing = result
            .log
            .accepted()
            .filter(|r| r.per_class_errors[k] < error_bound)
            .count();
        if 2 * passing > rounds_played
            && result.final_train_report.per_class_error[k] >= error_bound
        {
            majority_vote_consistent = false;
        }
    }

    GuaranteeReport {
        rounds_played,
        weak_learnability_held,
        first_violation_round,
        min_slack,
        realized_regret,
        regret_budget,
        regret_within_budget,
        preconditions_held,
        stop_reason: result.stop_reason,
        worst_class_training_error: worst,
        error_bound,
        conclusion_holds,
        majority_vote_consistent,
        notes: vec![
            "weak learnability is checked on the realized sample's penalties; \
             the distributional condition is not observable at training time"
                .into(),
        ],
    }
}

/// A generalization bound value and whether it exceeds 1 (vacuous).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub value: f64,
    pub vacuous: bool,
}

/// The worst-class generalization bound
/// `1 - theta + 2 C / sqrt(n) + 3 sqrt(ln(2/delta) / (2n))`, evaluated at
/// the smallest class size `n = min_k n_k`. `C` bounds the hypothesis set's
/// empirical Rademacher complexity as `C / sqrt(n)` and is caller-supplied.
pub fn generalization_bound(
    theta: f64,
    complexity: f64,
    min_class_size: usize,
    delta: f64,
) -> Result<BoundReport> {
    if !(0.0..1.0).contains(&theta) {
        return Err(Error::Config(format!("theta must be in [0, 1), got {theta}")));
    }
    if !(complexity > 0.0 && complexity.is_finite()) {
        return Err(Error::Config(format!(
            "complexity constant must be positive, got {complexity}"
        )));
    }
    if min_class_size == 0 {
        return Err(Error::Config("min class size must be positive".into()));
    }
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::Config(format!("delta must be in (0, 1), got {delta}")));
    }
    let n = min_class_size as f64;
    let value = (1.0 - theta) + 2.0 * complexity / n.sqrt() + 3.0 * ((2.0 / delta).ln() / (2.0 * n)).sqrt();
    Ok(BoundReport {
        value,
        vacuous: value > 1.0,
    })
}
