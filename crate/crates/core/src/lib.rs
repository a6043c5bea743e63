//! Boosting that bounds the worst-class training error.
//!
//! The booster plays a Hedge game over per-class weights: each round a weak
//! learner trains on the class-weighted sample, every class reports whether
//! its error stayed below `1 - theta`, and the weights shift toward the
//! failing classes. The unweighted majority vote of the accepted hypotheses
//! then keeps every class's training error below `1 - theta` once the weak
//! learner's edge and the round count line up.
//!
//! Module map:
//! - [`dataset`], [`weights`], [`metrics`], [`ensemble`]: domain types,
//!   per-class partitioning, error/penalty metrics, majority votes.
//! - [`hedge`]: the multiplicative-weights player, regret accounting, and
//!   the learning-rate schedule.
//! - [`weak`], [`tree`]: weak-learner contracts, the class-weighted
//!   objective reduction, decision trees, and a synthetic oracle learner.
//! - [`boost`]: the worst-class booster, the average-error baseline,
//!   stopping rules, round logs, and the generalization-bound calculator.
//! - [`synth`]: Gaussian-blob generators for the balanced and imbalanced
//!   benchmark datasets.
//! - [`io`]: CSV / JSON-lines dataset files and model serialization helpers.

pub mod boost;
pub mod dataset;
pub mod ensemble;
pub mod error;
pub mod hedge;
pub mod io;
pub mod metrics;
pub mod synth;
pub mod tree;
pub mod weak;
pub mod weights;

pub use boost::{
    generalization_bound, run_average_boost, run_worstclass_boost,
    training_guarantee_report, BoostConfig, BoostResult, BoundReport, EtaRule, RoundLog,
    RoundRecord, StopReason, GuaranteeReport,
};
pub use dataset::LabeledDataset;
pub use ensemble::{Ensemble, Hypothesis};
pub use error::{Error, Result};
pub use hedge::{default_eta, hedge_update, init_weights, sufficient_rounds, HedgeState, RegretLedger};
pub use io::{load_csv, load_dataset, load_jsonl, save_csv, save_jsonl};
pub use metrics::{
    class_wise_error, feedback_from_errors, per_class_errors, worst_class_error,
    zero_one_penalties, zero_one_penalty, ClassErrorReport,
};
pub use synth::{gen_balanced_toy, gen_imbalanced_toy, BlobSpec, ClassBlob};
pub use tree::{fit_tree, train_weighted_tree, DecisionTree, GrowthRule, TreeLearner};
pub use weak::{
    check_weak_learnability, default_gamma, instance_weights_from_class_weights,
    oracle_weak_learner, weighted_error, InstanceWeightedLearner, OracleLearner,
    WeakLearnabilityCheck, WeakLearner, DEFAULT_EPSILON,
};
pub use weights::{ClassWeights, FeedbackVector, SIMPLEX_TOLERANCE};
