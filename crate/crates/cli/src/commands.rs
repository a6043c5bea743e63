//! The single-run subcommands: data generation, training, evaluation,
//! boundary export, the bound calculator, and theta selection.

use std::io::Write;
use std::path::PathBuf;

use clap::Args;
use serde_json::json;

use wcboost::boost::{
    generalization_bound, run_average_boost, run_worstclass_boost, BoostConfig, EtaRule,
};
use wcboost::dataset::LabeledDataset;
use wcboost::ensemble::Hypothesis;
use wcboost::io::{load_dataset, save_csv, save_jsonl};
use wcboost::metrics::{worst_class_error, ClassErrorReport};
use wcboost::synth::BlobSpec;
use wcboost::tree::{fit_tree, GrowthRule, TreeLearner};
use wcboost::weak::{default_gamma, WeakLearnabilityCheck, DEFAULT_EPSILON};

use crate::error::CliError;
use crate::model::{Method, ModelFile};
use crate::write_atomic;

#[derive(Debug, Args)]
pub struct GenDataArgs {
    /// Which benchmark to generate: "balanced" or "imbalanced".
    #[arg(long)]
    pub dataset: String,
    /// Minority-class training size for the imbalanced benchmark.
    #[arg(long, default_value_t = 100)]
    pub min_nk: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Output directory; receives train/test files and the blob spec.
    #[arg(long)]
    pub out: PathBuf,
    /// File format: "csv" or "jsonl".
    #[arg(long, default_value = "csv")]
    pub format: String,
}

pub fn gen_data(args: &GenDataArgs) -> Result<(), CliError> {
    let spec = match args.dataset.as_str() {
        "balanced" => BlobSpec::balanced_default(),
        "imbalanced" => BlobSpec::imbalanced_default(args.min_nk)?,
        other => {
            return Err(CliError::Usage(format!(
                "unknown dataset '{other}' (expected 'balanced' or 'imbalanced')"
            )))
        }
    };
    let (train, test) = spec.sample(args.seed)?;
    std::fs::create_dir_all(&args.out)?;
    let (train_path, test_path) = match args.format.as_str() {
        "csv" => {
            let train_path = args.out.join("train.csv");
            let test_path = args.out.join("test.csv");
            save_csv(&train, &train_path)?;
            save_csv(&test, &test_path)?;
            (train_path, test_path)
        }
        "jsonl" => {
            let train_path = args.out.join("train.jsonl");
            let test_path = args.out.join("test.jsonl");
            save_jsonl(&train, &train_path)?;
            save_jsonl(&test, &test_path)?;
            (train_path, test_path)
        }
        other => {
            return Err(CliError::Usage(format!(
                "unknown format '{other}' (expected 'csv' or 'jsonl')"
            )))
        }
    };
    // echo the generating spec for auditability
    write_atomic(
        &args.out.join("blobspec.json"),
        &serde_json::to_vec_pretty(&json!({ "seed": args.seed, "spec": spec }))?,
    )?;
    println!(
        "{}",
        json!({
            "train": train_path,
            "test": test_path,
            "train_instances": train.len(),
            "test_instances": test.len(),
            "num_classes": train.num_classes(),
        })
    );
    Ok(())
}

#[derive(Debug, Args)]
pub struct TrainArgs {
    /// Training data (CSV or JSON lines).
    #[arg(long)]
    pub data: PathBuf,
    #[arg(long, value_enum)]
    pub method: Method,
    #[arg(long, default_value_t = 0.5)]
    pub theta: f64,
    /// Weak-learning edge; defaults to the floor(0.8 K)/K - 1/2 - epsilon
    /// rule for the dataset's class count.
    #[arg(long)]
    pub gamma: Option<f64>,
    #[arg(long, default_value_t = DEFAULT_EPSILON)]
    pub epsilon: f64,
    /// Round budget; defaults to the count that makes the Hedge regret
    /// bound match gamma T / 2.
    #[arg(long)]
    pub max_rounds: Option<usize>,
    /// "auto", "auto-sample-size", or a fixed positive number.
    #[arg(long, default_value = "auto", value_parser = parse_eta)]
    pub eta: EtaRule,
    #[arg(long, default_value_t = 50)]
    pub patience: usize,
    /// Tree depth cap.
    #[arg(long, default_value_t = 6)]
    pub depth: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Where to write the model JSON.
    #[arg(long)]
    pub out: PathBuf,
    /// Optional weight-trajectory CSV (`round,k,weight,feedback`).
    #[arg(long)]
    pub trajectory: Option<PathBuf>,
}

pub fn parse_eta(raw: &str) -> Result<EtaRule, String> {
    match raw {
        "auto" => Ok(EtaRule::Auto),
        "auto-sample-size" | "auto-ln-n" => Ok(EtaRule::AutoSampleSize),
        other => other
            .parse::<f64>()
            .map_err(|_| format!("eta must be 'auto', 'auto-sample-size', or a number, got '{other}'"))
            .and_then(|v| {
                if v > 0.0 && v.is_finite() {
                    Ok(EtaRule::Fixed(v))
                } else {
                    Err(format!("fixed eta must be positive and finite, got {v}"))
                }
            }),
    }
}

/// Everything one training run needs besides the data.
#[derive(Debug, Clone)]
pub struct TrainSpec {
    pub method: Method,
    pub theta: f64,
    /// `None` resolves via [`default_gamma`] for the dataset's class count.
    pub gamma: Option<f64>,
    pub epsilon: f64,
    pub max_rounds: Option<usize>,
    pub eta: EtaRule,
    pub patience: usize,
    pub depth: usize,
    pub seed: u64,
}

/// Resolves gamma, builds the configured learner, and runs one method.
pub fn train_model(data: &LabeledDataset, spec: &TrainSpec) -> Result<ModelFile, CliError> {
    let gamma = match (spec.gamma, spec.method) {
        (Some(g), _) => g,
        // the plain tree never consults gamma; keep the config echo valid
        (None, Method::PlainTree) => 0.25,
        (None, _) => default_gamma(data.num_classes(), spec.epsilon)?,
    };
    let config = BoostConfig {
        theta: spec.theta,
        gamma,
        epsilon: spec.epsilon,
        max_rounds: spec.max_rounds,
        eta: spec.eta,
        patience: spec.patience,
        seed: spec.seed,
    };
    config.validate()?;
    let depth = spec.depth;
    let model = match spec.method {
        Method::WorstclassBoost => {
            let check = WeakLearnabilityCheck::new(spec.theta, gamma, spec.epsilon)?;
            let learner = TreeLearner::new(depth)
                .with_growth(GrowthRule::MinimalLearnable(check))
                .with_seed(spec.seed);
            let result = run_worstclass_boost(data, &learner, &config)?;
            ModelFile::from_boost(spec.method, result, config, data.dim(), depth)
        }
        Method::AverageBoost => {
            let learner = TreeLearner::new(depth)
                .with_growth(GrowthRule::MinimalEdge { gamma })
                .with_seed(spec.seed);
            let result = run_average_boost(data, &learner, &config)?;
            ModelFile::from_boost(spec.method, result, config, data.dim(), depth)
        }
        Method::PlainTree => {
            let uniform = vec![1.0 / data.len() as f64; data.len()];
            let tree = fit_tree(data, &uniform, depth);
            let final_train_report = worst_class_error(&tree, data);
            ModelFile {
                method: spec.method,
                num_classes: data.num_classes(),
                feature_dim: data.dim(),
                max_depth: depth,
                config,
                stop_reason: None,
                final_train_report,
                members: vec![tree],
                log: None,
            }
        }
    };
    Ok(model)
}

pub fn train(args: &TrainArgs) -> Result<(), CliError> {
    let data = load_dataset(&args.data)?;
    let model = train_model(
        &data,
        &TrainSpec {
            method: args.method,
            theta: args.theta,
            gamma: args.gamma,
            epsilon: args.epsilon,
            max_rounds: args.max_rounds,
            eta: args.eta,
            patience: args.patience,
            depth: args.depth,
            seed: args.seed,
        },
    )?;
    model.save(&args.out)?;

    let mut summary = json!({
        "model": args.out,
        "method": model.method.to_string(),
        "rounds": model.log.as_ref().map_or(0, |log| log.rounds.len()),
        "stop_reason": model.stop_reason,
        "train_worst_class_error": model.final_train_report.worst_class_error,
        "train_average_error": model.final_train_report.average_error,
    });
    if let Some(path) = &args.trajectory {
        let log = model.log.as_ref().ok_or_else(|| {
            CliError::Usage("the plain tree has no weight trajectory".into())
        })?;
        let mut bytes = Vec::new();
        log.write_trajectory_csv(&mut bytes)?;
        write_atomic(path, &bytes)?;
        let mean = log.mean_weights();
        let largest = argmax(&mean);
        summary["trajectory"] = json!(path);
        summary["largest_mean_weight_class"] = json!(largest + 1);
    }
    println!("{summary}");
    Ok(())
}

#[derive(Debug, Args)]
pub struct EvaluateArgs {
    #[arg(long)]
    pub model: PathBuf,
    /// Evaluation data (CSV or JSON lines).
    #[arg(long)]
    pub data: PathBuf,
    /// Optional output path; defaults to stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

pub fn evaluate(args: &EvaluateArgs) -> Result<(), CliError> {
    let model = ModelFile::load(&args.model)?;
    let data = load_dataset(&args.data)?;
    if data.num_classes() > model.num_classes {
        return Err(CliError::Usage(format!(
            "data has {} classes but the model was trained on {}",
            data.num_classes(),
            model.num_classes
        )));
    }
    let ensemble = model.ensemble()?;
    let report = worst_class_error(&ensemble, &data);
    let payload = report_json(&report);
    match &args.out {
        Some(path) => write_atomic(path, format!("{payload}\n").as_bytes())?,
        None => println!("{payload}"),
    }
    Ok(())
}

pub fn report_json(report: &ClassErrorReport) -> serde_json::Value {
    json!({
        "per_class_error": report.per_class_error,
        "worst_class_error": report.worst_class_error,
        "average_error": report.average_error,
        "worst_class": report.worst_class() + 1,
    })
}

#[derive(Debug, Args)]
pub struct ExportBoundaryArgs {
    #[arg(long)]
    pub model: PathBuf,
    #[arg(long, default_value_t = -5.0, allow_hyphen_values = true)]
    pub min_x: f64,
    #[arg(long, default_value_t = 5.0, allow_hyphen_values = true)]
    pub max_x: f64,
    #[arg(long, default_value_t = -5.0, allow_hyphen_values = true)]
    pub min_y: f64,
    #[arg(long, default_value_t = 5.0, allow_hyphen_values = true)]
    pub max_y: f64,
    /// Lattice points per axis.
    #[arg(long, default_value_t = 200)]
    pub resolution: usize,
    #[arg(long)]
    pub out: PathBuf,
}

pub fn export_boundary(args: &ExportBoundaryArgs) -> Result<(), CliError> {
    let model = ModelFile::load(&args.model)?;
    if model.feature_dim != 2 {
        return Err(wcboost::Error::Dimension {
            expected: 2,
            got: model.feature_dim,
        }
        .into());
    }
    if args.resolution == 0 {
        return Err(CliError::Usage("resolution must be at least 1".into()));
    }
    let ensemble = model.ensemble()?;
    let mut bytes = Vec::new();
    writeln!(bytes, "x,y,predicted_class")?;
    let step = |lo: f64, hi: f64, i: usize| {
        if args.resolution == 1 {
            lo
        } else {
            lo + (hi - lo) * i as f64 / (args.resolution - 1) as f64
        }
    };
    for iy in 0..args.resolution {
        let y = step(args.min_y, args.max_y, iy);
        for ix in 0..args.resolution {
            let x = step(args.min_x, args.max_x, ix);
            let class = ensemble.predict(&[x, y]);
            writeln!(bytes, "{x},{y},{}", class + 1)?;
        }
    }
    write_atomic(&args.out, &bytes)?;
    println!(
        "{}",
        json!({ "grid": args.out, "rows": args.resolution * args.resolution })
    );
    Ok(())
}

#[derive(Debug, Args)]
pub struct BoundArgs {
    #[arg(long)]
    pub theta: f64,
    /// The constant C bounding the hypothesis set's empirical Rademacher
    /// complexity as C / sqrt(n).
    #[arg(long)]
    pub complexity: f64,
    /// Smallest per-class training sample size.
    #[arg(long)]
    pub min_class_size: usize,
    #[arg(long, default_value_t = 0.05)]
    pub delta: f64,
}

pub fn bound(args: &BoundArgs) -> Result<(), CliError> {
    let report = generalization_bound(args.theta, args.complexity, args.min_class_size, args.delta)?;
    println!("{}", serde_json::to_string(&report)?);
    Ok(())
}

#[derive(Debug, Args)]
pub struct SelectThetaArgs {
    /// Directory of per-run JSON files written by `sweep`.
    #[arg(long)]
    pub runs: PathBuf,
    #[arg(long, value_enum, default_value_t = Method::WorstclassBoost)]
    pub method: Method,
}

/// Picks the theta with the smallest worst-class validation error; ties go
/// to the larger theta (the tighter bound). Candidates are
/// `(theta, worst-class validation error)` pairs — test data never enters.
pub fn select_theta(candidates: &[(f64, f64)]) -> Result<f64, CliError> {
    if candidates.is_empty() {
        return Err(CliError::Usage("no theta candidates".into()));
    }
    let mut best = candidates[0];
    for &(theta, error) in &candidates[1..] {
        if error < best.1 || (error == best.1 && theta > best.0) {
            best = (theta, error);
        }
    }
    Ok(best.0)
}

pub fn select_theta_command(args: &SelectThetaArgs) -> Result<(), CliError> {
    let records = crate::sweep::load_run_records(&args.runs)?;
    let mut by_theta: Vec<(f64, Vec<f64>)> = Vec::new();
    for record in &records {
        if record.method != args.method || record.error.is_some() {
            continue;
        }
        let Some(validation) = &record.validation_report else {
            return Err(CliError::Usage(format!(
                "run {} has no validation split; re-run the sweep with validation_ratio > 0",
                record.file_stem()
            )));
        };
        match by_theta.iter_mut().find(|(t, _)| *t == record.theta) {
            Some((_, errs)) => errs.push(validation.worst_class_error),
            None => by_theta.push((record.theta, vec![validation.worst_class_error])),
        }
    }
    if by_theta.is_empty() {
        return Err(CliError::Usage(format!(
            "no completed {} runs under {}",
            args.method,
            args.runs.display()
        )));
    }
    let candidates: Vec<(f64, f64)> = by_theta
        .iter()
        .map(|(theta, errs)| (*theta, errs.iter().sum::<f64>() / errs.len() as f64))
        .collect();
    let theta = select_theta(&candidates)?;
    println!(
        "{}",
        json!({ "theta": theta, "method": args.method.to_string(), "candidates": candidates })
    );
    Ok(())
}

fn argmax(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in values.iter().enumerate().skip(1) {
        if v > values[best] {
            best = i;
        }
    }
    best
}
