//! Single runs and multi-seed sweeps.
//!
//! A run is ablation → balancing → split → train → evaluate on the test
//! partition. Each stage draws from its own stream derived from the run seed
//! with [`mix_seed`]: stream 1 balances, stream 2 splits, stream 3
//! initialises the network.

use std::collections::HashSet;
use std::fmt::Write as _;

use rayon::prelude::*;
use serde::Serialize;

use crate::data::{balance_downsample, stratified_split, Battery, Dataset, SplitSpec};
use crate::error::{Error, Result};
use crate::experiment::{accuracy, confusion_matrix, ConfusionMatrix, ExperimentSpec};
use crate::rng::{mix_seed, SeededRng};
use crate::train::{train, History, TrainedModel};

pub const BALANCE_STREAM: u64 = 1;
pub const SPLIT_STREAM: u64 = 2;
pub const INIT_STREAM: u64 = 3;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunResult {
    pub spec: String,
    pub battery: Battery,
    pub seed: u64,
    pub train_accuracy: f64,
    pub test_accuracy: f64,
    pub confusion: ConfusionMatrix,
    #[serde(skip)]
    pub history: History,
}

impl RunResult {
    pub fn gap(&self) -> f64 {
        self.train_accuracy - self.test_accuracy
    }
}

pub fn run_experiment(spec: &ExperimentSpec, ds: &Dataset, seed: u64) -> Result<RunResult> {
    run_experiment_with_model(spec, ds, seed).map(|(r, _)| r)
}

/// Like [`run_experiment`], also returning the fitted model.
pub fn run_experiment_with_model(
    spec: &ExperimentSpec,
    ds: &Dataset,
    seed: u64,
) -> Result<(RunResult, TrainedModel)> {
    run_inner(spec, ds, seed).map_err(|e| Error::Experiment {
        name: spec.name.clone(),
        source: Box::new(e),
    })
}

fn run_inner(spec: &ExperimentSpec, ds: &Dataset, seed: u64) -> Result<(RunResult, TrainedModel)> {
    if spec.battery != ds.battery {
        return Err(Error::Config(format!(
            "spec targets {} data, dataset is {}",
            spec.battery, ds.battery
        )));
    }
    let ablated = ds.drop_features(&spec.ablate)?;
    let prepared = if spec.balance {
        balance_downsample(&ablated, &mut SeededRng::new(mix_seed(seed, BALANCE_STREAM)))?
    } else {
        ablated
    };
    let split = SplitSpec {
        seed: mix_seed(seed, SPLIT_STREAM),
        ..spec.split
    };
    let (train_set, test_set) = stratified_split(&prepared, &split)?;

    let mut config = spec.config.clone();
    config.seed = mix_seed(seed, INIT_STREAM);
    let (model, history) = train(&config, &train_set, &test_set)?;

    let (_, train_accuracy) = model.evaluate(&train_set.x, &train_set.y)?;
    let predictions = model.predict(&test_set.x)?;
    let confusion = confusion_matrix(&predictions, &test_set.y)?;
    let result = RunResult {
        spec: spec.name.clone(),
        battery: spec.battery,
        seed,
        train_accuracy,
        test_accuracy: accuracy(&confusion)?,
        confusion,
        history,
    };
    Ok((result, model))
}

/// Median of a non-empty slice (mean of the middle pair for even lengths).
pub fn median(values: &[f64]) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let mid = v.len() / 2;
    Some(if v.len().is_multiple_of(2) {
        (v[mid - 1] + v[mid]) / 2.0
    } else {
        v[mid]
    })
}

fn mean(values: &[f64]) -> Option<f64> {
    (!values.is_empty()).then(|| values.iter().sum::<f64>() / values.len() as f64)
}

#[derive(Debug, Clone)]
pub struct RunRecord {
    pub spec: String,
    pub battery: Battery,
    pub seed: u64,
    pub outcome: std::result::Result<RunResult, String>,
}

/// Per-spec aggregate over seeds. Statistics are `None` when every run failed.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpecSummary {
    pub spec: String,
    pub battery: Battery,
    pub runs_ok: usize,
    pub runs_failed: usize,
    pub median_test_accuracy: Option<f64>,
    pub mean_test_accuracy: Option<f64>,
    pub median_train_accuracy: Option<f64>,
    pub mean_train_accuracy: Option<f64>,
    pub median_gap: Option<f64>,
    pub mean_gap: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct FailedRun {
    pub spec: String,
    pub seed: u64,
    pub error: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepSummary {
    pub seeds: Vec<u64>,
    pub specs: Vec<SpecSummary>,
    pub failures: Vec<FailedRun>,
}

#[derive(Debug, Clone)]
pub struct Sweep {
    pub seeds: Vec<u64>,
    /// Spec-major: all seeds of the first spec, then the next spec.
    pub runs: Vec<RunRecord>,
}

/// Runs every spec with every seed, in parallel. Failed runs are recorded
/// rather than aborting the sweep; ordering never depends on scheduling.
pub fn run_sweep(specs: &[ExperimentSpec], ds: &Dataset, seeds: &[u64]) -> Result<Sweep> {
    if seeds.is_empty() {
        return Err(Error::Config("a sweep needs at least one seed".into()));
    }
    let mut names = HashSet::new();
    for s in specs {
        if !names.insert(&s.name) {
            return Err(Error::Config(format!("duplicate spec name `{}` in sweep", s.name)));
        }
    }
    let jobs: Vec<(&ExperimentSpec, u64)> = specs
        .iter()
        .flat_map(|s| seeds.iter().map(move |&seed| (s, seed)))
        .collect();
    let runs = jobs
        .par_iter()
        .map(|&(spec, seed)| {
            let outcome = run_experiment(spec, ds, seed).map_err(|e| e.to_string());
            match &outcome {
                Ok(r) => log::info!("{} seed {seed}: test accuracy {:.4}", spec.name, r.test_accuracy),
                Err(e) => log::warn!("{} seed {seed} failed: {e}", spec.name),
            }
            RunRecord {
                spec: spec.name.clone(),
                battery: spec.battery,
                seed,
                outcome,
            }
        })
        .collect();
    Ok(Sweep {
        seeds: seeds.to_vec(),
        runs,
    })
}

impl Sweep {
    pub fn results(&self) -> Vec<&RunResult> {
        self.runs.iter().filter_map(|r| r.outcome.as_ref().ok()).collect()
    }

    pub fn summary(&self) -> SweepSummary {
        let mut order: Vec<(String, Battery)> = Vec::new();
        for r in &self.runs {
            if !order.iter().any(|(n, _)| n == &r.spec) {
                order.push((r.spec.clone(), r.battery));
            }
        }
        let specs = order
            .into_iter()
            .map(|(name, battery)| {
                let records: Vec<&RunRecord> = self.runs.iter().filter(|r| r.spec == name).collect();
                let ok: Vec<&RunResult> = records.iter().filter_map(|r| r.outcome.as_ref().ok()).collect();
                let test: Vec<f64> = ok.iter().map(|r| r.test_accuracy).collect();
                let train: Vec<f64> = ok.iter().map(|r| r.train_accuracy).collect();
                let gap: Vec<f64> = ok.iter().map(|r| r.gap()).collect();
                SpecSummary {
                    spec: name,
                    battery,
                    runs_ok: ok.len(),
                    runs_failed: records.len() - ok.len(),
                    median_test_accuracy: median(&test),
                    mean_test_accuracy: mean(&test),
                    median_train_accuracy: median(&train),
                    mean_train_accuracy: mean(&train),
                    median_gap: median(&gap),
                    mean_gap: mean(&gap),
                }
            })
            .collect();
        let failures = self
            .runs
            .iter()
            .filter_map(|r| {
                r.outcome.as_ref().err().map(|e| FailedRun {
                    spec: r.spec.clone(),
                    seed: r.seed,
                    error: e.clone(),
                })
            })
            .collect();
        SweepSummary {
            seeds: self.seeds.clone(),
            specs,
            failures,
        }
    }

    /// `spec,battery,seed,train_acc,test_acc,tp,fp,tn,fn`, one row per successful run.
    pub fn runs_csv(&self) -> String {
        let mut out = String::from("spec,battery,seed,train_acc,test_acc,tp,fp,tn,fn\n");
        for r in self.results() {
            let c = &r.confusion;
            writeln!(
                out,
                "{},{},{},{},{},{},{},{},{}",
                r.spec, r.battery, r.seed, r.train_accuracy, r.test_accuracy, c.tp, c.fp, c.tn, c.fn_
            )
            .unwrap();
        }
        out
    }
}

impl SweepSummary {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("summary serialises")
    }

    /// Generalisation-gap table sorted by median test accuracy (best first),
    /// followed by any failed runs.
    pub fn render(&self) -> String {
        let mut rows: Vec<&SpecSummary> = self.specs.iter().collect();
        rows.sort_by(|a, b| {
            let key = |s: &SpecSummary| s.median_test_accuracy.unwrap_or(f64::NEG_INFINITY);
            key(b).total_cmp(&key(a)).then_with(|| a.spec.cmp(&b.spec))
        });
        let pct = |v: Option<f64>| v.map_or_else(|| "-".to_string(), |x| format!("{:.2}%", 100.0 * x));
        let name_w = rows.iter().map(|s| s.spec.len()).max().unwrap_or(4).max(4);
        let mut out = String::new();
        let seeds: Vec<String> = self.seeds.iter().map(u64::to_string).collect();
        writeln!(out, "seeds: {}", seeds.join(",")).unwrap();
        writeln!(
            out,
            "{:name_w$}  {:>4}  {:>10}  {:>10}  {:>11}  {:>10}  {:>10}",
            "spec", "runs", "train med", "test med", "test mean", "gap med", "gap mean"
        )
        .unwrap();
        for s in rows {
            writeln!(
                out,
                "{:name_w$}  {:>4}  {:>10}  {:>10}  {:>11}  {:>10}  {:>10}",
                s.spec,
                format!("{}/{}", s.runs_ok, s.runs_ok + s.runs_failed),
                pct(s.median_train_accuracy),
                pct(s.median_test_accuracy),
                pct(s.mean_test_accuracy),
                pct(s.median_gap),
                pct(s.mean_gap),
            )
            .unwrap();
        }
        if !self.failures.is_empty() {
            writeln!(out, "\nfailed runs:").unwrap();
            for f in &self.failures {
                writeln!(out, "  {} seed {}: {}", f.spec, f.seed, f.error).unwrap();
            }
        }
        out
    }
}
