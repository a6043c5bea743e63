//! Trained-model files: everything needed to re-evaluate or inspect a run.

use std::path::Path;

use clap::ValueEnum;
use serde::{Deserialize, Serialize};

use wcboost::boost::{BoostConfig, BoostResult, RoundLog, StopReason};
use wcboost::ensemble::Ensemble;
use wcboost::metrics::ClassErrorReport;
use wcboost::tree::DecisionTree;

use crate::error::CliError;

#[derive(
    Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize, ValueEnum,
)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    /// Hedge over class weights bounding the worst-class training error.
    WorstclassBoost,
    /// Hedge over instance weights minimizing the average training error.
    AverageBoost,
    /// One unweighted tree, no boosting.
    PlainTree,
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let name = match self {
            Method::WorstclassBoost => "worstclass_boost",
            Method::AverageBoost => "average_boost",
            Method::PlainTree => "plain_tree",
        };
        f.write_str(name)
    }
}

/// A trained model on disk: the ensemble members plus the full round log
/// and the configuration that produced them.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ModelFile {
    pub method: Method,
    pub num_classes: usize,
    pub feature_dim: usize,
    pub max_depth: usize,
    pub config: BoostConfig,
    /// `None` for the plain tree, which is not a boosting run.
    pub stop_reason: Option<StopReason>,
    pub final_train_report: ClassErrorReport,
    pub members: Vec<DecisionTree>,
    pub log: Option<RoundLog>,
}

impl ModelFile {
    pub fn from_boost(
        method: Method,
        result: BoostResult<DecisionTree>,
        config: BoostConfig,
        feature_dim: usize,
        max_depth: usize,
    ) -> Self {
        let num_classes = result.ensemble.num_classes();
        Self {
            method,
            num_classes,
            feature_dim,
            max_depth,
            config,
            stop_reason: Some(result.stop_reason),
            final_train_report: result.final_train_report,
            members: result.ensemble.members().to_vec(),
            log: Some(result.log),
        }
    }

    pub fn ensemble(&self) -> Result<Ensemble<DecisionTree>, CliError> {
        Ok(Ensemble::new(self.members.clone(), self.num_classes)?)
    }

    pub fn save<P: AsRef<Path>>(&self, path: P) -> Result<(), CliError> {
        crate::write_atomic(path.as_ref(), &serde_json::to_vec_pretty(self)?)
    }

    pub fn load<P: AsRef<Path>>(path: P) -> Result<Self, CliError> {
        let bytes = std::fs::read(path)?;
        Ok(serde_json::from_slice(&bytes)?)
    }
}
