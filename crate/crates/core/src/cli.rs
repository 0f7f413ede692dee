//! Command-line surface.
//!
//! Every command is deterministic given its flags, the input file bytes and
//! the seed; only `manifest.json` carries a timestamp. Inputs are never
//! written to. Exit codes:
//!
//! | code | meaning                                          |
//! |------|--------------------------------------------------|
//! | 0    | success                                          |
//! | 1    | every run of a sweep failed                      |
//! | 2    | usage error (bad flags)                          |
//! | 3    | data error: missing/unreadable file, parse, schema |
//! | 4    | configuration error                              |
//! | 5    | training diverged                                |
//! | 6    | report error                                     |

use std::fs;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::data::{load_csv, synthesize_dataset, write_csv, Battery, Dataset, SplitSpec};
use crate::error::{Error, Result};
use crate::experiment::{
    builtin_registry, comparison_report, find_builtin, ours_only, run_experiment_with_model, run_sweep,
    spec_set, variant_specs, BaselineTable, ConfusionMatrix, ExperimentSpec, RunResult,
    SECOND_MODEL_TRAIN_FRACTION,
};
use crate::nn::NetworkConfig;
use crate::rng::SeededRng;
use crate::train::History;

/// Environment variable naming the default output directory.
pub const OUT_DIR_ENV: &str = "FASDNET_OUT_DIR";

pub const EXIT_OK: i32 = 0;
pub const EXIT_SWEEP_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_DATA: i32 = 3;
pub const EXIT_CONFIG: i32 = 4;
pub const EXIT_DIVERGENCE: i32 = 5;
pub const EXIT_REPORT: i32 = 6;

pub fn exit_code(err: &Error) -> i32 {
    match err.root() {
        Error::Io { .. } | Error::Parse { .. } | Error::Schema(_) | Error::Data(_) | Error::Lookup(_) => EXIT_DATA,
        Error::Config(_) | Error::Contract(_) | Error::State(_) | Error::Shape { .. } | Error::NonFinite(_) => {
            EXIT_CONFIG
        }
        Error::Divergence { .. } => EXIT_DIVERGENCE,
        Error::Report(_) => EXIT_REPORT,
        Error::SweepFailed(_) => EXIT_SWEEP_FAILED,
        Error::Experiment { .. } => unreachable!("root() unwraps annotations"),
    }
}

#[derive(Debug, Parser)]
#[command(name = "fasdnet", version, about = "Dense-network FASD/control classifiers for tabular test batteries")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write a synthetic mixed-scale dataset as CSV.
    Synth(SynthArgs),
    /// Train and evaluate one experiment.
    Train(TrainArgs),
    /// Run a set of experiments over several seeds.
    Sweep(SweepArgs),
    /// Compare sweep/train results with reference accuracies.
    Report(ReportArgs),
    /// List built-in experiments and spec sets.
    List,
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    #[arg(long, default_value_t = 50)]
    pub n_per_class: usize,
    #[arg(long, default_value_t = 20)]
    pub n_features: usize,
    /// Gap between class means, in per-feature standard deviations.
    #[arg(long, default_value_t = 1.0)]
    pub separation: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct TrainArgs {
    #[arg(long)]
    pub data: PathBuf,
    #[arg(long, default_value = "synthetic")]
    pub battery: Battery,
    /// Built-in experiment name, or a path to an experiment-spec or network-config JSON file.
    #[arg(long)]
    pub config: String,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, env = OUT_DIR_ENV, default_value = "fasdnet-out")]
    pub out_dir: PathBuf,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[arg(long)]
    pub data: PathBuf,
    #[arg(long, default_value = "synthetic")]
    pub battery: Battery,
    /// Spec set (`table2`, `second-model`, `variants`, `all`), a built-in name,
    /// or a directory of JSON spec files.
    #[arg(long, default_value = "table2")]
    pub specs: String,
    #[arg(long, value_delimiter = ',', default_value = "1,2,3")]
    pub seeds: Vec<u64>,
    #[arg(long, env = OUT_DIR_ENV, default_value = "fasdnet-out")]
    pub out_dir: PathBuf,
}

#[derive(Debug, Args)]
pub struct ReportArgs {
    /// Directory holding `runs.csv` and/or `metrics.json`, directly or one level down.
    #[arg(long)]
    pub results_dir: PathBuf,
    /// CSV of `battery,accuracy[,source]` (percent). Without it the published
    /// reference accuracies are used; an empty file gives an ours-only report.
    #[arg(long)]
    pub baselines: Option<PathBuf>,
    /// Defaults to `<results-dir>/report`.
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
}

#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub command_line: Vec<String>,
    pub config_hash: String,
    pub data_hash: String,
    pub seed: Option<u64>,
    pub seeds: Vec<u64>,
    pub tool_version: String,
    pub timestamp_unix: u64,
}

impl RunManifest {
    fn new(command_line: &[String], config_text: &str, data_bytes: &[u8], seeds: &[u64]) -> Self {
        Self {
            command_line: command_line.to_vec(),
            config_hash: sha256_hex(config_text.as_bytes()),
            data_hash: sha256_hex(data_bytes),
            seed: (seeds.len() == 1).then(|| seeds[0]),
            seeds: seeds.to_vec(),
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            timestamp_unix: SystemTime::now()
                .duration_since(UNIX_EPOCH)
                .map_or(0, |d| d.as_secs()),
        }
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

fn write_file(path: &Path, contents: impl AsRef<[u8]>) -> Result<()> {
    fs::write(path, contents).map_err(|e| Error::io(path, e))
}

fn prepare_out_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))
}

fn write_manifest(dir: &Path, manifest: &RunManifest) -> Result<()> {
    let text = serde_json::to_string_pretty(manifest).expect("manifest serialises");
    write_file(&dir.join("manifest.json"), text + "\n")
}

fn read_bytes(path: &Path) -> Result<Vec<u8>> {
    fs::read(path).map_err(|e| Error::io(path, e))
}

/// Dispatches a parsed command line; returns the text to print on stdout.
pub fn run(cli: Cli, command_line: &[String]) -> Result<String> {
    match cli.command {
        Command::Synth(a) => cmd_synth(&a),
        Command::Train(a) => cmd_train(&a, command_line),
        Command::Sweep(a) => cmd_sweep(&a, command_line),
        Command::Report(a) => cmd_report(&a, command_line),
        Command::List => Ok(cmd_list()),
    }
}

pub fn cmd_synth(args: &SynthArgs) -> Result<String> {
    let mut rng = SeededRng::new(args.seed);
    let ds = synthesize_dataset(args.n_per_class, args.n_features, args.separation, &mut rng)?;
    write_csv(&ds, &args.out)?;
    let (controls, fasd) = ds.class_counts();
    Ok(format!(
        "wrote {}: {} rows ({} control, {} FASD), {} feature columns + label, separation {}, seed {}\n",
        args.out.display(),
        ds.len(),
        controls,
        fasd,
        ds.n_features(),
        args.separation,
        args.seed
    ))
}

/// Resolves `--config`: an existing file (experiment spec, else network
/// config) takes precedence over a built-in name.
pub fn resolve_spec(config: &str, ds: &Dataset) -> Result<ExperimentSpec> {
    let path = Path::new(config);
    let spec = if path.is_file() {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        spec_from_text(&text, path, ds.battery)?
    } else {
        find_builtin(config).ok_or_else(|| {
            Error::Config(format!("`{config}` is neither a config file nor a built-in experiment"))
        })?
    };
    Ok(spec.adapt_to(ds))
}

fn spec_from_text(text: &str, path: &Path, battery: Battery) -> Result<ExperimentSpec> {
    if let Ok(spec) = ExperimentSpec::from_json(text) {
        return Ok(spec);
    }
    let config = NetworkConfig::from_json(text)?;
    let name = path
        .file_stem()
        .map_or_else(|| "config".to_string(), |s| s.to_string_lossy().into_owned());
    Ok(ExperimentSpec {
        name,
        battery,
        config,
        split: SplitSpec::stratified(SECOND_MODEL_TRAIN_FRACTION, 0),
        balance: false,
        ablate: Vec::new(),
    })
}

#[derive(Serialize)]
struct Metrics<'a> {
    #[serde(flatten)]
    result: &'a RunResult,
    test_rows: usize,
}

pub fn cmd_train(args: &TrainArgs, command_line: &[String]) -> Result<String> {
    let data_bytes = read_bytes(&args.data)?;
    let ds = load_csv(&args.data, args.battery)?;
    let spec = resolve_spec(&args.config, &ds)?;
    let (result, model) = run_experiment_with_model(&spec, &ds, args.seed)?;

    let dir = &args.out_dir;
    prepare_out_dir(dir)?;
    let spec_text = spec.to_json();
    write_file(&dir.join("spec.json"), format!("{spec_text}\n"))?;
    write_file(&dir.join("model.json"), model.to_json() + "\n")?;
    write_file(&dir.join("history.csv"), result.history.to_csv())?;
    write_file(&dir.join("confusion.txt"), result.confusion.render())?;
    let metrics = Metrics {
        result: &result,
        test_rows: result.confusion.total,
    };
    write_file(
        &dir.join("metrics.json"),
        serde_json::to_string_pretty(&metrics).expect("metrics serialise") + "\n",
    )?;
    write_manifest(dir, &RunManifest::new(command_line, &spec_text, &data_bytes, &[args.seed]))?;

    Ok(format!(
        "{} on {} (seed {}): train {:.2}%, test {:.2}% over {} epochs\n{}",
        spec.name,
        ds.battery,
        args.seed,
        100.0 * result.train_accuracy,
        100.0 * result.test_accuracy,
        result.history.epochs(),
        result.confusion.render()
    ))
}

fn specs_from_dir(dir: &Path, battery: Battery) -> Result<Vec<ExperimentSpec>> {
    let mut paths: Vec<PathBuf> = fs::read_dir(dir)
        .map_err(|e| Error::io(dir, e))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "json"))
        .collect();
    paths.sort();
    paths
        .iter()
        .map(|p| {
            let text = fs::read_to_string(p).map_err(|e| Error::io(p, e))?;
            spec_from_text(&text, p, battery)
        })
        .collect()
}

/// Specs applicable to `ds`: everything for synthetic data, otherwise the
/// specs targeting the same battery.
pub fn resolve_spec_set(name: &str, ds: &Dataset) -> Result<Vec<ExperimentSpec>> {
    let path = Path::new(name);
    let specs = if path.is_dir() {
        specs_from_dir(path, ds.battery)?
    } else {
        spec_set(name).ok_or_else(|| Error::Config(format!("unknown spec set `{name}`")))?
    };
    let selected: Vec<ExperimentSpec> = specs
        .iter()
        .filter(|s| ds.battery == Battery::Synthetic || s.battery == ds.battery)
        .map(|s| s.adapt_to(ds))
        .collect();
    if selected.is_empty() {
        return Err(Error::Config(format!("spec set `{name}` has no experiments for {} data", ds.battery)));
    }
    Ok(selected)
}

pub fn cmd_sweep(args: &SweepArgs, command_line: &[String]) -> Result<String> {
    let data_bytes = read_bytes(&args.data)?;
    let ds = load_csv(&args.data, args.battery)?;
    let specs = resolve_spec_set(&args.specs, &ds)?;
    let sweep = run_sweep(&specs, &ds, &args.seeds)?;
    let summary = sweep.summary();

    let dir = &args.out_dir;
    prepare_out_dir(dir)?;
    write_file(&dir.join("runs.csv"), sweep.runs_csv())?;
    write_file(&dir.join("summary.json"), summary.to_json() + "\n")?;
    let text = summary.render();
    write_file(&dir.join("summary.txt"), &text)?;
    let specs_text = serde_json::to_string_pretty(&specs).expect("specs serialise");
    write_manifest(dir, &RunManifest::new(command_line, &specs_text, &data_bytes, &args.seeds))?;

    if sweep.results().is_empty() {
        return Err(Error::SweepFailed(sweep.runs.len()));
    }
    Ok(text)
}

/// Parses a `runs.csv` written by `sweep`.
pub fn read_runs_csv(path: &Path) -> Result<Vec<RunResult>> {
    let file = fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let mut rdr = csv::Reader::from_reader(file);
    let mut out = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let row = i + 2;
        let rec = rec.map_err(|e| Error::Parse { row, column: 0, message: e.to_string() })?;
        let field = |j: usize| rec.get(j).unwrap_or("");
        let num = |j: usize| -> Result<f64> {
            field(j).parse().map_err(|_| Error::Parse {
                row,
                column: j + 1,
                message: format!("expected a number, found `{}`", field(j)),
            })
        };
        let count = |j: usize| -> Result<usize> { Ok(num(j)? as usize) };
        let confusion = ConfusionMatrix {
            tp: count(5)?,
            fp: count(6)?,
            tn: count(7)?,
            fn_: count(8)?,
            total: count(5)? + count(6)? + count(7)? + count(8)?,
        };
        out.push(RunResult {
            spec: field(0).to_string(),
            battery: field(1).parse()?,
            seed: num(2)? as u64,
            train_accuracy: num(3)?,
            test_accuracy: num(4)?,
            confusion,
            history: History::default(),
        });
    }
    Ok(out)
}

fn read_metrics_json(path: &Path) -> Result<RunResult> {
    #[derive(serde::Deserialize)]
    struct Stored {
        spec: String,
        battery: Battery,
        seed: u64,
        train_accuracy: f64,
        test_accuracy: f64,
        confusion: ConfusionMatrix,
    }
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let s: Stored = serde_json::from_str(&text)
        .map_err(|e| Error::Report(format!("{}: malformed metrics: {e}", path.display())))?;
    Ok(RunResult {
        spec: s.spec,
        battery: s.battery,
        seed: s.seed,
        train_accuracy: s.train_accuracy,
        test_accuracy: s.test_accuracy,
        confusion: s.confusion,
        history: History::default(),
    })
}

/// Collects results from `dir` and its immediate subdirectories, in sorted path order.
/// Returns the results and the bytes of every file read.
pub fn collect_results(dir: &Path) -> Result<(Vec<RunResult>, Vec<u8>)> {
    if !dir.is_dir() {
        return Err(Error::Report(format!("{} is not a directory", dir.display())));
    }
    let mut dirs = vec![dir.to_path_buf()];
    let mut subdirs: Vec<PathBuf> = fs::read_dir(dir)
        .map_err(|e| Error::io(dir, e))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.is_dir())
        .collect();
    subdirs.sort();
    dirs.extend(subdirs);

    let mut results = Vec::new();
    let mut bytes = Vec::new();
    for d in dirs {
        let runs = d.join("runs.csv");
        if runs.is_file() {
            bytes.extend(read_bytes(&runs)?);
            results.extend(read_runs_csv(&runs)?);
        }
        let metrics = d.join("metrics.json");
        if metrics.is_file() {
            bytes.extend(read_bytes(&metrics)?);
            results.push(read_metrics_json(&metrics)?);
        }
    }
    if results.is_empty() {
        return Err(Error::Report(format!("no results found under {}", dir.display())));
    }
    Ok((results, bytes))
}

pub fn cmd_report(args: &ReportArgs, command_line: &[String]) -> Result<String> {
    let (results, bytes) = collect_results(&args.results_dir)?;
    let refs: Vec<&RunResult> = results.iter().collect();
    let baselines = match &args.baselines {
        None => BaselineTable::published(),
        Some(path) => {
            let user = BaselineTable::load(path)?;
            if user.is_empty() {
                user
            } else {
                let mut table = BaselineTable::published();
                for e in user.entries() {
                    table.set(e.clone());
                }
                table
            }
        }
    };
    let report = if baselines.is_empty() {
        ours_only(&refs)
    } else {
        match comparison_report(&refs, &baselines) {
            Ok(r) => r,
            Err(Error::Report(msg)) => {
                log::warn!("{msg}; reporting our accuracies only");
                ours_only(&refs)
            }
            Err(e) => return Err(e),
        }
    };

    let dir = args.out_dir.clone().unwrap_or_else(|| args.results_dir.join("report"));
    prepare_out_dir(&dir)?;
    let text = report.render();
    write_file(&dir.join("comparison.txt"), &text)?;
    write_file(&dir.join("comparison.csv"), report.to_csv())?;
    let baseline_text = serde_json::to_string_pretty(&baselines).expect("baselines serialise");
    write_manifest(&dir, &RunManifest::new(command_line, &baseline_text, &bytes, &[]))?;
    Ok(text)
}

pub fn cmd_list() -> String {
    let mut out = String::from("built-in experiments:\n");
    for s in builtin_registry().iter().chain(&variant_specs()) {
        out.push_str(&format!(
            "  {:28} {:14} hidden {:?}, {} epochs{}\n",
            s.name,
            s.battery.as_str(),
            s.config.hidden_widths(),
            s.config.epochs,
            if s.config.use_feature_layer { ", feature layer" } else { "" }
        ));
    }
    out.push_str("spec sets: table2, second-model, variants, all\n");
    out
}
