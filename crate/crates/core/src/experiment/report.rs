//! Per-battery comparison of our accuracies against reference accuracies.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::io::Read;
use std::path::Path;

use serde::Serialize;

use crate::data::Battery;
use crate::error::{Error, Result};
use crate::experiment::{median, RunResult};

/// Where a reference accuracy came from.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    /// Shipped reference constant from the published study.
    Published,
    /// Supplied by the user, with an optional free-text source.
    User(Option<String>),
}

impl Provenance {
    pub fn label(&self) -> String {
        match self {
            Provenance::Published => "published".into(),
            Provenance::User(None) => "user".into(),
            Provenance::User(Some(s)) => format!("user: {s}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BaselineEntry {
    pub battery: Battery,
    /// Percent, e.g. `88.46`.
    pub accuracy_pct: f64,
    pub provenance: Provenance,
}

/// Reference test accuracy of the first (raw-input) psychometric model, in percent.
pub const FIRST_MODEL_REFERENCE_PCT: f64 = 75.55;

#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct BaselineTable {
    entries: Vec<BaselineEntry>,
}

impl BaselineTable {
    pub fn empty() -> Self {
        Self::default()
    }

    /// Published second-model accuracies. No antisaccade figure was reported.
    pub fn published() -> Self {
        let entries = [
            (Battery::Psychometric, 88.46),
            (Battery::Prosaccade, 72.41),
            (Battery::MemoryGuided, 88.0),
            (Battery::Dti, 75.0),
        ]
        .into_iter()
        .map(|(battery, accuracy_pct)| BaselineEntry {
            battery,
            accuracy_pct,
            provenance: Provenance::Published,
        })
        .collect();
        Self { entries }
    }

    pub fn entries(&self) -> &[BaselineEntry] {
        &self.entries
    }

    pub fn get(&self, battery: Battery) -> Option<&BaselineEntry> {
        self.entries.iter().find(|e| e.battery == battery)
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Inserts or replaces the entry for `entry.battery`.
    pub fn set(&mut self, entry: BaselineEntry) {
        match self.entries.iter_mut().find(|e| e.battery == entry.battery) {
            Some(slot) => *slot = entry,
            None => self.entries.push(entry),
        }
    }

    /// Reads `battery,accuracy[,source]` rows (accuracy in percent). A header
    /// row is required; an empty file yields an empty table.
    pub fn read<R: Read>(reader: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(true)
            .flexible(true)
            .trim(csv::Trim::All)
            .from_reader(reader);
        let mut table = Self::empty();
        for (i, rec) in rdr.records().enumerate() {
            let row = i + 2;
            let rec = rec.map_err(|e| Error::Parse { row, column: 0, message: e.to_string() })?;
            if rec.iter().all(str::is_empty) {
                continue;
            }
            let battery: Battery = rec.get(0).unwrap_or("").parse()?;
            let accuracy_pct: f64 = rec
                .get(1)
                .and_then(|v| v.parse().ok())
                .filter(|v: &f64| v.is_finite())
                .ok_or_else(|| Error::Parse {
                    row,
                    column: 2,
                    message: "accuracy must be a number (percent)".into(),
                })?;
            let source = rec.get(2).filter(|s| !s.is_empty()).map(str::to_string);
            table.set(BaselineEntry {
                battery,
                accuracy_pct,
                provenance: Provenance::User(source),
            });
        }
        Ok(table)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
        Self::read(file)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComparisonRow {
    pub battery: Battery,
    /// Spec whose median test accuracy is reported.
    pub spec: String,
    pub ours_pct: f64,
    pub baseline_pct: Option<f64>,
    pub provenance: Option<Provenance>,
    /// `ours − baseline`, percentage points.
    pub diff_pp: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComparisonReport {
    pub rows: Vec<ComparisonRow>,
    /// Mean and population standard deviation of `diff_pp` over rows with a baseline.
    pub mean_diff_pp: Option<f64>,
    pub std_diff_pp: Option<f64>,
}

/// Our accuracy per battery: the best per-spec median test accuracy, in percent.
pub fn ours_by_battery(results: &[&RunResult]) -> BTreeMap<Battery, (String, f64)> {
    let mut per_spec: BTreeMap<(Battery, String), Vec<f64>> = BTreeMap::new();
    for r in results {
        per_spec
            .entry((r.battery, r.spec.clone()))
            .or_default()
            .push(r.test_accuracy);
    }
    let mut best: BTreeMap<Battery, (String, f64)> = BTreeMap::new();
    for ((battery, spec), accs) in per_spec {
        let m = 100.0 * median(&accs).expect("non-empty");
        match best.get(&battery) {
            Some((_, cur)) if *cur >= m => {}
            _ => {
                best.insert(battery, (spec, m));
            }
        }
    }
    best
}

/// Rows for every battery with results, plus difference statistics over the
/// batteries that also have a baseline. Fails if no battery overlaps.
pub fn comparison_report(results: &[&RunResult], baselines: &BaselineTable) -> Result<ComparisonReport> {
    let report = ours_only(results);
    let rows: Vec<ComparisonRow> = report
        .rows
        .into_iter()
        .map(|mut row| {
            if let Some(b) = baselines.get(row.battery) {
                row.baseline_pct = Some(b.accuracy_pct);
                row.provenance = Some(b.provenance.clone());
                row.diff_pp = Some(row.ours_pct - b.accuracy_pct);
            }
            row
        })
        .collect();
    let diffs: Vec<f64> = rows.iter().filter_map(|r| r.diff_pp).collect();
    if diffs.is_empty() {
        return Err(Error::Report(
            "no battery appears in both the results and the baseline table".into(),
        ));
    }
    let n = diffs.len() as f64;
    let mean = diffs.iter().sum::<f64>() / n;
    let var = diffs.iter().map(|d| (d - mean).powi(2)).sum::<f64>() / n;
    Ok(ComparisonReport {
        rows,
        mean_diff_pp: Some(mean),
        std_diff_pp: Some(var.sqrt()),
    })
}

/// Report without any baseline columns.
pub fn ours_only(results: &[&RunResult]) -> ComparisonReport {
    let rows = ours_by_battery(results)
        .into_iter()
        .map(|(battery, (spec, ours_pct))| ComparisonRow {
            battery,
            spec,
            ours_pct,
            baseline_pct: None,
            provenance: None,
            diff_pp: None,
        })
        .collect();
    ComparisonReport {
        rows,
        mean_diff_pp: None,
        std_diff_pp: None,
    }
}

impl ComparisonReport {
    pub fn render(&self) -> String {
        let mut out = String::new();
        let with_baseline = self.rows.iter().any(|r| r.baseline_pct.is_some());
        let spec_w = self.rows.iter().map(|r| r.spec.len()).max().unwrap_or(4).max(4);
        if with_baseline {
            writeln!(
                out,
                "{:14}  {:spec_w$}  {:>8}  {:>8}  {:>9}  source",
                "battery", "spec", "ours", "baseline", "diff (pp)"
            )
            .unwrap();
        } else {
            writeln!(out, "{:14}  {:spec_w$}  {:>8}", "battery", "spec", "ours").unwrap();
        }
        for r in &self.rows {
            let ours = format!("{:.2}%", r.ours_pct);
            if with_baseline {
                let base = r.baseline_pct.map_or("-".into(), |b| format!("{b:.2}%"));
                let diff = r.diff_pp.map_or("-".into(), |d| format!("{d:+.2}"));
                let src = r.provenance.as_ref().map_or("-".into(), Provenance::label);
                writeln!(
                    out,
                    "{:14}  {:spec_w$}  {ours:>8}  {base:>8}  {diff:>9}  {src}",
                    r.battery.as_str(),
                    r.spec
                )
                .unwrap();
            } else {
                writeln!(out, "{:14}  {:spec_w$}  {ours:>8}", r.battery.as_str(), r.spec).unwrap();
            }
        }
        if let (Some(m), Some(s)) = (self.mean_diff_pp, self.std_diff_pp) {
            writeln!(out, "mean difference: {m:+.2} pp, standard deviation: {s:.2} pp").unwrap();
        }
        writeln!(
            out,
            "reference: first-model psychometric test accuracy {FIRST_MODEL_REFERENCE_PCT:.2}% (published)"
        )
        .unwrap();
        out
    }

    /// Plot data: `battery,ours,baseline` in percent; baseline empty when absent.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("battery,ours,baseline\n");
        for r in &self.rows {
            let base = r.baseline_pct.map_or(String::new(), |b| b.to_string());
            writeln!(out, "{},{},{}", r.battery, r.ours_pct, base).unwrap();
        }
        out
    }
}
