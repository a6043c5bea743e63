//! Config-driven experiment sweeps: every (method, theta, dataset size,
//! seed) cell trains, evaluates on train/validation/test, and writes one
//! JSON record. Cells are content-addressed by a hash of their resolved
//! configuration so interrupted sweeps resume instead of recomputing, and
//! independent cells run in parallel.

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use clap::Args;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::json;
use sha2::{Digest, Sha256};

use wcboost::boost::EtaRule;
use wcboost::dataset::LabeledDataset;
use wcboost::io::load_dataset;
use wcboost::metrics::{worst_class_error, ClassErrorReport};
use wcboost::synth::{gen_balanced_toy, gen_imbalanced_toy};
use wcboost::weak::DEFAULT_EPSILON;

use crate::commands::train_model;
use crate::error::CliError;
use crate::model::Method;
use crate::write_atomic;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DatasetSpec {
    /// The built-in balanced five-class benchmark.
    Balanced,
    /// The built-in imbalanced benchmark, one sweep column per size.
    Imbalanced { min_nk: Vec<usize> },
    /// Fixed files; the seed still drives splitting and training.
    Files { train: PathBuf, test: PathBuf },
}

fn default_theta_grid() -> Vec<f64> {
    (1..=9).map(|i| i as f64 / 10.0).collect()
}

fn default_seeds() -> Vec<u64> {
    (0..5).collect()
}

fn default_epsilon() -> f64 {
    DEFAULT_EPSILON
}

fn default_eta() -> EtaRule {
    EtaRule::Auto
}

fn default_patience() -> usize {
    50
}

fn default_depth() -> usize {
    6
}

fn default_validation_ratio() -> f64 {
    0.3
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BoostSettings {
    /// `None` resolves per dataset via the floor(0.8 K)/K - 1/2 - epsilon
    /// rule.
    #[serde(default)]
    pub gamma: Option<f64>,
    #[serde(default = "default_epsilon")]
    pub epsilon: f64,
    #[serde(default)]
    pub max_rounds: Option<usize>,
    #[serde(default = "default_eta")]
    pub eta: EtaRule,
    #[serde(default = "default_patience")]
    pub patience: usize,
    #[serde(default = "default_depth")]
    pub max_depth: usize,
}

impl Default for BoostSettings {
    fn default() -> Self {
        Self {
            gamma: None,
            epsilon: default_epsilon(),
            max_rounds: None,
            eta: default_eta(),
            patience: default_patience(),
            max_depth: default_depth(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub dataset: DatasetSpec,
    pub methods: Vec<Method>,
    #[serde(default = "default_theta_grid")]
    pub theta_grid: Vec<f64>,
    #[serde(default = "default_seeds")]
    pub seeds: Vec<u64>,
    #[serde(default)]
    pub boost: BoostSettings,
    /// Fraction of the training sample held out for theta selection;
    /// 0 trains on everything.
    #[serde(default = "default_validation_ratio")]
    pub validation_ratio: f64,
    #[serde(default)]
    pub save_models: bool,
    pub out_dir: PathBuf,
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<(), CliError> {
        if self.methods.is_empty() {
            return Err(CliError::Usage("methods must not be empty".into()));
        }
        if self.seeds.is_empty() {
            return Err(CliError::Usage("seeds must not be empty".into()));
        }
        if self.theta_grid.is_empty() {
            return Err(CliError::Usage("theta_grid must not be empty".into()));
        }
        if self.theta_grid.iter().any(|t| !(0.0..1.0).contains(t)) {
            return Err(CliError::Usage("theta grid values must be in [0, 1)".into()));
        }
        if !(0.0..1.0).contains(&self.validation_ratio) {
            return Err(CliError::Usage(
                "validation_ratio must be in [0, 1)".into(),
            ));
        }
        if let DatasetSpec::Imbalanced { min_nk } = &self.dataset {
            if min_nk.is_empty() {
                return Err(CliError::Usage("imbalanced min_nk list is empty".into()));
            }
        }
        Ok(())
    }
}

/// One sweep cell, fully identifying a run.
#[derive(Debug, Clone, Serialize)]
struct CellSpec<'a> {
    dataset: &'a DatasetSpec,
    min_nk: Option<usize>,
    method: Method,
    theta: f64,
    seed: u64,
    boost: &'a BoostSettings,
    validation_ratio: f64,
}

impl CellSpec<'_> {
    fn hash(&self) -> String {
        let canonical = serde_json::to_vec(self).expect("cell spec serializes");
        let digest = Sha256::digest(&canonical);
        hex::encode(&digest[..4])
    }

    fn file_name(&self) -> String {
        let size = self.min_nk.map_or("x".to_string(), |n| n.to_string());
        format!(
            "run-{}-theta{}-n{}-s{}-{}.json",
            self.method,
            self.theta,
            size,
            self.seed,
            self.hash()
        )
    }
}

/// One completed (or failed) cell on disk.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunRecord {
    pub method: Method,
    pub theta: f64,
    pub min_nk: Option<usize>,
    pub seed: u64,
    pub config_hash: String,
    pub gamma: Option<f64>,
    pub rounds: usize,
    pub stop_reason: Option<wcboost::boost::StopReason>,
    pub train_report: Option<ClassErrorReport>,
    pub validation_report: Option<ClassErrorReport>,
    pub test_report: Option<ClassErrorReport>,
    /// Set when the cell failed; the sweep keeps going.
    pub error: Option<String>,
}

impl RunRecord {
    pub fn file_stem(&self) -> String {
        format!(
            "run-{}-theta{}-n{}-s{}-{}",
            self.method,
            self.theta,
            self.min_nk.map_or("x".to_string(), |n| n.to_string()),
            self.seed,
            self.config_hash
        )
    }
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    /// Experiment configuration JSON.
    #[arg(long)]
    pub config: PathBuf,
}

pub fn sweep(args: &SweepArgs) -> Result<(), CliError> {
    let raw = std::fs::read(&args.config)?;
    let config: ExperimentConfig = serde_json::from_slice(&raw)?;
    config.validate()?;
    std::fs::create_dir_all(&config.out_dir)?;

    let sizes: Vec<Option<usize>> = match &config.dataset {
        DatasetSpec::Imbalanced { min_nk } => min_nk.iter().copied().map(Some).collect(),
        _ => vec![None],
    };
    let mut cells = Vec::new();
    for &min_nk in &sizes {
        for &method in &config.methods {
            for &theta in &config.theta_grid {
                for &seed in &config.seeds {
                    cells.push(CellSpec {
                        dataset: &config.dataset,
                        min_nk,
                        method,
                        theta,
                        seed,
                        boost: &config.boost,
                        validation_ratio: config.validation_ratio,
                    });
                }
            }
        }
    }

    let outcomes: Vec<(bool, bool)> = cells
        .par_iter()
        .map(|cell| {
            let path = config.out_dir.join(cell.file_name());
            if let Ok(bytes) = std::fs::read(&path) {
                if serde_json::from_slice::<RunRecord>(&bytes).is_ok() {
                    eprintln!("skip {} (already done)", cell.file_name());
                    return (true, false);
                }
            }
            let record = run_cell(&config, cell);
            let failed = record.error.is_some();
            if let Some(message) = &record.error {
                eprintln!("fail {}: {message}", cell.file_name());
            } else {
                eprintln!("done {}", cell.file_name());
            }
            let bytes = serde_json::to_vec_pretty(&record).expect("record serializes");
            if let Err(err) = write_atomic(&path, &bytes) {
                eprintln!("fail {}: could not write record: {err}", cell.file_name());
                return (false, true);
            }
            (false, failed)
        })
        .collect();

    let (runs_csv, tables) = aggregate_directory(&config.out_dir)?;
    let skipped = outcomes.iter().filter(|(s, _)| *s).count();
    let failed = outcomes.iter().filter(|(_, f)| *f).count();
    println!(
        "{}",
        json!({
            "cells": cells.len(),
            "skipped": skipped,
            "failed": failed,
            "out_dir": config.out_dir,
            "runs_csv": runs_csv,
            "tables": tables,
        })
    );
    Ok(())
}

fn run_cell(config: &ExperimentConfig, cell: &CellSpec) -> RunRecord {
    let mut record = RunRecord {
        method: cell.method,
        theta: cell.theta,
        min_nk: cell.min_nk,
        seed: cell.seed,
        config_hash: cell.hash(),
        gamma: cell.boost.gamma,
        rounds: 0,
        stop_reason: None,
        train_report: None,
        validation_report: None,
        test_report: None,
        error: None,
    };
    match execute_cell(config, cell, &mut record) {
        Ok(()) => record,
        Err(err) => {
            record.error = Some(err.to_string());
            record
        }
    }
}

fn execute_cell(
    config: &ExperimentConfig,
    cell: &CellSpec,
    record: &mut RunRecord,
) -> Result<(), CliError> {
    let (full_train, test) = load_cell_data(&config.dataset, cell.min_nk, cell.seed)?;
    let (train, validation) = if config.validation_ratio > 0.0 {
        let (t, v) = full_train.split_stratified(1.0 - config.validation_ratio, cell.seed)?;
        (t, Some(v))
    } else {
        (full_train, None)
    };

    let model = train_model(
        &train,
        &crate::commands::TrainSpec {
            method: cell.method,
            theta: cell.theta,
            gamma: cell.boost.gamma,
            epsilon: cell.boost.epsilon,
            max_rounds: cell.boost.max_rounds,
            eta: cell.boost.eta,
            patience: cell.boost.patience,
            depth: cell.boost.max_depth,
            seed: cell.seed,
        },
    )?;
    let ensemble = model.ensemble()?;
    record.gamma = Some(model.config.gamma);
    record.rounds = model.log.as_ref().map_or(0, |log| log.rounds.len());
    record.stop_reason = model.stop_reason;
    record.train_report = Some(model.final_train_report.clone());
    record.validation_report = validation.as_ref().map(|v| worst_class_error(&ensemble, v));
    record.test_report = Some(worst_class_error(&ensemble, &test));

    if config.save_models {
        let path = config
            .out_dir
            .join(format!("model-{}.json", record.file_stem()));
        model.save(&path)?;
    }
    Ok(())
}

fn load_cell_data(
    dataset: &DatasetSpec,
    min_nk: Option<usize>,
    seed: u64,
) -> Result<(LabeledDataset, LabeledDataset), CliError> {
    match dataset {
        DatasetSpec::Balanced => Ok(gen_balanced_toy(seed)),
        DatasetSpec::Imbalanced { .. } => {
            let size = min_nk.ok_or_else(|| CliError::Usage("missing min_nk".into()))?;
            Ok(gen_imbalanced_toy(size, seed)?)
        }
        DatasetSpec::Files { train, test } => Ok((load_dataset(train)?, load_dataset(test)?)),
    }
}

#[derive(Debug, Args)]
pub struct ReportArgs {
    /// Directory of per-run JSON files.
    #[arg(long)]
    pub runs: PathBuf,
}

/// Rebuilds the aggregate CSVs from the per-run JSON files alone.
pub fn report(args: &ReportArgs) -> Result<(), CliError> {
    let (runs_csv, tables) = aggregate_directory(&args.runs)?;
    println!("{}", json!({ "runs_csv": runs_csv, "tables": tables }));
    Ok(())
}

pub fn load_run_records(dir: &Path) -> Result<Vec<RunRecord>, CliError> {
    let mut records = Vec::new();
    for entry in std::fs::read_dir(dir)? {
        let path = entry?.path();
        let Some(name) = path.file_name().and_then(|n| n.to_str()) else {
            continue;
        };
        if !(name.starts_with("run-") && name.ends_with(".json")) {
            continue;
        }
        let bytes = std::fs::read(&path)?;
        records.push(serde_json::from_slice::<RunRecord>(&bytes)?);
    }
    if records.is_empty() {
        return Err(CliError::Usage(format!(
            "no run-*.json records under {}",
            dir.display()
        )));
    }
    records.sort_by(|a, b| {
        (a.method, a.min_nk, a.seed)
            .cmp(&(b.method, b.min_nk, b.seed))
            .then(a.theta.total_cmp(&b.theta))
    });
    Ok(records)
}

/// Aggregates a run directory into `runs.csv` (per-cell means over seeds)
/// and, for multi-size imbalanced sweeps, a `table_by_size.csv` pivot of
/// mean worst-class test errors.
fn aggregate_directory(dir: &Path) -> Result<(PathBuf, Vec<PathBuf>), CliError> {
    let records = load_run_records(dir)?;
    let csv = build_runs_csv(&records);
    let runs_csv = dir.join("runs.csv");
    write_atomic(&runs_csv, csv.as_bytes())?;

    let mut tables = Vec::new();
    let sizes: BTreeSet<usize> = records.iter().filter_map(|r| r.min_nk).collect();
    if sizes.len() > 1 {
        let table = build_size_pivot(&records, &sizes);
        let path = dir.join("table_by_size.csv");
        write_atomic(&path, table.as_bytes())?;
        tables.push(path);
    }
    Ok((runs_csv, tables))
}

/// (method, theta bits, min_nk): one aggregate row per distinct key.
type GroupKey = (Method, u64, Option<usize>);

/// Groups of successful records sharing a key, in the deterministic record
/// order.
fn group_records(records: &[RunRecord]) -> Vec<(GroupKey, Vec<&RunRecord>)> {
    let mut groups: Vec<(GroupKey, Vec<&RunRecord>)> = Vec::new();
    for record in records.iter().filter(|r| r.error.is_none()) {
        let key = (record.method, record.theta.to_bits(), record.min_nk);
        match groups.iter_mut().find(|(k, _)| *k == key) {
            Some((_, members)) => members.push(record),
            None => groups.push((key, vec![record])),
        }
    }
    groups
}

fn mean<'a>(values: impl Iterator<Item = &'a f64> + Clone, count: usize) -> f64 {
    values.sum::<f64>() / count as f64
}

pub fn build_runs_csv(records: &[RunRecord]) -> String {
    let num_classes = records
        .iter()
        .filter_map(|r| r.train_report.as_ref())
        .map(|r| r.per_class_error.len())
        .max()
        .unwrap_or(0);
    let mut out = String::from("method,theta,min_nk,seeds");
    for k in 1..=num_classes {
        out.push_str(&format!(",train_err_class_{k}"));
    }
    out.push_str(",train_worst,train_avg,val_worst,val_avg,test_worst,test_avg\n");

    for ((method, theta_bits, min_nk), members) in group_records(records) {
        let n = members.len();
        let theta = f64::from_bits(theta_bits);
        let size = min_nk.map_or(String::new(), |s| s.to_string());
        out.push_str(&format!("{method},{theta},{size},{n}"));
        for k in 0..num_classes {
            let col = mean(
                members
                    .iter()
                    .filter_map(|r| r.train_report.as_ref())
                    .map(|r| &r.per_class_error[k]),
                n,
            );
            out.push_str(&format!(",{col}"));
        }
        let train_worst = mean(
            members
                .iter()
                .filter_map(|r| r.train_report.as_ref())
                .map(|r| &r.worst_class_error),
            n,
        );
        let train_avg = mean(
            members
                .iter()
                .filter_map(|r| r.train_report.as_ref())
                .map(|r| &r.average_error),
            n,
        );
        out.push_str(&format!(",{train_worst},{train_avg}"));
        if members.iter().all(|r| r.validation_report.is_some()) {
            let val_worst = mean(
                members
                    .iter()
                    .filter_map(|r| r.validation_report.as_ref())
                    .map(|r| &r.worst_class_error),
                n,
            );
            let val_avg = mean(
                members
                    .iter()
                    .filter_map(|r| r.validation_report.as_ref())
                    .map(|r| &r.average_error),
                n,
            );
            out.push_str(&format!(",{val_worst},{val_avg}"));
        } else {
            out.push_str(",,");
        }
        let test_worst = mean(
            members
                .iter()
                .filter_map(|r| r.test_report.as_ref())
                .map(|r| &r.worst_class_error),
            n,
        );
        let test_avg = mean(
            members
                .iter()
                .filter_map(|r| r.test_report.as_ref())
                .map(|r| &r.average_error),
            n,
        );
        out.push_str(&format!(",{test_worst},{test_avg}\n"));
    }
    out
}

fn build_size_pivot(records: &[RunRecord], sizes: &BTreeSet<usize>) -> String {
    let mut out = String::from("method,theta");
    for size in sizes {
        out.push_str(&format!(",worst_test_min_nk_{size}"));
    }
    out.push('\n');

    let mut row_keys: Vec<(Method, u64)> = Vec::new();
    for record in records.iter().filter(|r| r.error.is_none()) {
        let key = (record.method, record.theta.to_bits());
        if !row_keys.contains(&key) {
            row_keys.push(key);
        }
    }
    for (method, theta_bits) in row_keys {
        let theta = f64::from_bits(theta_bits);
        out.push_str(&format!("{method},{theta}"));
        for &size in sizes {
            let worsts: Vec<f64> = records
                .iter()
                .filter(|r| {
                    r.error.is_none()
                        && r.method == method
                        && r.theta.to_bits() == theta_bits
                        && r.min_nk == Some(size)
                })
                .filter_map(|r| r.test_report.as_ref())
                .map(|r| r.worst_class_error)
                .collect();
            if worsts.is_empty() {
                out.push(',');
            } else {
                let value = worsts.iter().sum::<f64>() / worsts.len() as f64;
                out.push_str(&format!(",{value}"));
            }
        }
        out.push('\n');
    }
    out
}
