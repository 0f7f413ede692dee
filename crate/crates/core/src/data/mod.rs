//! Datasets for the five test batteries plus synthetic data.

mod csv_io;
mod split;
mod synth;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::Matrix;

pub use csv_io::{load_csv, read_csv, write_csv, write_csv_to};
pub use split::{balance_downsample, stratified_split, SplitSpec};
pub use synth::synthesize_dataset;

/// Label of the positive (FASD) class. Controls are 0.
pub const POSITIVE: u8 = 1;

/// Column names that identify demographic features for ablation.
pub const DEMOGRAPHIC_COLUMNS: [&str; 2] = ["sex", "age"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Battery {
    Psychometric,
    Antisaccade,
    Prosaccade,
    MemoryGuided,
    Dti,
    Synthetic,
}

impl Battery {
    pub const CLINICAL: [Battery; 5] = [
        Battery::Psychometric,
        Battery::Antisaccade,
        Battery::Prosaccade,
        Battery::MemoryGuided,
        Battery::Dti,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Battery::Psychometric => "psychometric",
            Battery::Antisaccade => "antisaccade",
            Battery::Prosaccade => "prosaccade",
            Battery::MemoryGuided => "memory-guided",
            Battery::Dti => "dti",
            Battery::Synthetic => "synthetic",
        }
    }

    /// Published shape of the battery; `None` for synthetic data.
    pub fn schema(self) -> Option<BatterySchema> {
        let (features, rows, fasd, control) = match self {
            Battery::Psychometric => (20, 129, 58, 71),
            Battery::Antisaccade => (15, 174, 68, 106),
            Battery::Prosaccade => (18, 186, 71, 115),
            Battery::MemoryGuided => (26, 154, 61, 93),
            Battery::Dti => (48, 76, 41, 35),
            Battery::Synthetic => return None,
        };
        Some(BatterySchema {
            battery: self,
            expected_feature_count: features,
            expected_rows: rows,
            fasd,
            control,
        })
    }
}

impl fmt::Display for Battery {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Battery {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let all = Battery::CLINICAL.into_iter().chain([Battery::Synthetic]);
        for b in all {
            if b.as_str() == s.to_ascii_lowercase() {
                return Ok(b);
            }
        }
        Err(Error::Config(format!(
            "unknown battery `{s}` (expected psychometric, antisaccade, prosaccade, memory-guided, dti or synthetic)"
        )))
    }
}

/// Feature and row counts of a clinical battery.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct BatterySchema {
    pub battery: Battery,
    pub expected_feature_count: usize,
    pub expected_rows: usize,
    pub fasd: usize,
    pub control: usize,
}

/// Feature matrix plus binary labels (1 = FASD, 0 = control).
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub battery: Battery,
    pub feature_names: Vec<String>,
    pub x: Matrix,
    pub y: Vec<u8>,
}

impl Dataset {
    pub fn new(battery: Battery, feature_names: Vec<String>, x: Matrix, y: Vec<u8>) -> Result<Self> {
        if x.rows() != y.len() {
            return Err(Error::Data(format!(
                "{} feature rows but {} labels",
                x.rows(),
                y.len()
            )));
        }
        if x.cols() != feature_names.len() {
            return Err(Error::Data(format!(
                "{} feature columns but {} names",
                x.cols(),
                feature_names.len()
            )));
        }
        if let Some(bad) = y.iter().find(|&&l| l > 1) {
            return Err(Error::Data(format!("label {bad} is not 0 or 1")));
        }
        Ok(Self {
            battery,
            feature_names,
            x,
            y,
        })
    }

    pub fn len(&self) -> usize {
        self.y.len()
    }

    pub fn is_empty(&self) -> bool {
        self.y.is_empty()
    }

    pub fn n_features(&self) -> usize {
        self.feature_names.len()
    }

    /// `(controls, fasd)`.
    pub fn class_counts(&self) -> (usize, usize) {
        let pos = self.y.iter().filter(|&&l| l == POSITIVE).count();
        (self.y.len() - pos, pos)
    }

    /// Row indices of each class, `[controls, fasd]`.
    pub fn class_indices(&self) -> [Vec<usize>; 2] {
        let mut out = [Vec::new(), Vec::new()];
        for (i, &l) in self.y.iter().enumerate() {
            out[l as usize].push(i);
        }
        out
    }

    /// Which of the demographic columns (`sex`, `age`) are present.
    pub fn demographic_columns(&self) -> Vec<&str> {
        DEMOGRAPHIC_COLUMNS
            .into_iter()
            .filter(|d| self.feature_names.iter().any(|n| n == d))
            .collect()
    }

    pub fn select_rows(&self, indices: &[usize]) -> Dataset {
        Dataset {
            battery: self.battery,
            feature_names: self.feature_names.clone(),
            x: self.x.select_rows(indices),
            y: indices.iter().map(|&i| self.y[i]).collect(),
        }
    }

    /// Copy without the named columns; remaining columns keep their order.
    pub fn drop_features<S: AsRef<str>>(&self, names: &[S]) -> Result<Dataset> {
        for n in names {
            if !self.feature_names.iter().any(|f| f == n.as_ref()) {
                return Err(Error::Lookup(n.as_ref().to_string()));
            }
        }
        let keep: Vec<usize> = (0..self.n_features())
            .filter(|&j| !names.iter().any(|n| n.as_ref() == self.feature_names[j]))
            .collect();
        Ok(Dataset {
            battery: self.battery,
            feature_names: keep.iter().map(|&j| self.feature_names[j].clone()).collect(),
            x: self.x.select_cols(&keep),
            y: self.y.clone(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn named(names: &[&str], rows: usize) -> Dataset {
        let cols = names.len();
        let x = Matrix::new(rows, cols, (0..rows * cols).map(|v| v as f64).collect()).unwrap();
        let y = (0..rows).map(|i| (i % 2) as u8).collect();
        Dataset::new(Battery::Psychometric, names.iter().map(|s| s.to_string()).collect(), x, y).unwrap()
    }

    #[test]
    fn schema_constants() {
        let expected = [(20, 129), (15, 174), (18, 186), (26, 154), (48, 76)];
        for (b, (f, r)) in Battery::CLINICAL.into_iter().zip(expected) {
            let s = b.schema().unwrap();
            assert_eq!((s.expected_feature_count, s.expected_rows), (f, r), "{b}");
            assert_eq!(s.fasd + s.control, s.expected_rows);
        }
        assert!(Battery::Synthetic.schema().is_none());
    }

    #[test]
    fn battery_names_round_trip() {
        for b in Battery::CLINICAL.into_iter().chain([Battery::Synthetic]) {
            assert_eq!(b.as_str().parse::<Battery>().unwrap(), b);
            let json = serde_json::to_string(&b).unwrap();
            assert_eq!(json, format!("\"{}\"", b.as_str()));
        }
        assert!("eeg".parse::<Battery>().is_err());
    }

    #[test]
    fn drop_nothing() {
        let ds = named(&["a", "b"], 3);
        assert_eq!(ds.drop_features::<&str>(&[]).unwrap(), ds);
    }

    #[test]
    fn drop_sex_and_age() {
        let mut names: Vec<String> = (0..18).map(|i| format!("f{i}")).collect();
        names.insert(3, "sex".into());
        names.insert(10, "age".into());
        let refs: Vec<&str> = names.iter().map(String::as_str).collect();
        let ds = named(&refs, 4);
        assert_eq!(ds.demographic_columns(), vec!["sex", "age"]);
        let out = ds.drop_features(&["sex", "age"]).unwrap();
        assert_eq!(out.n_features(), 18);
        // Positional oracle: surviving columns appear in their original order with original values.
        let kept: Vec<usize> = (0..20).filter(|&j| j != 3 && j != 10).collect();
        for (new_j, &old_j) in kept.iter().enumerate() {
            assert_eq!(out.feature_names[new_j], ds.feature_names[old_j]);
            for r in 0..4 {
                assert_eq!(out.x.get(r, new_j), ds.x.get(r, old_j));
            }
        }
    }

    #[test]
    fn drop_unknown_is_lookup_error() {
        let ds = named(&["a"], 2);
        assert!(matches!(ds.drop_features(&["sex"]), Err(Error::Lookup(n)) if n == "sex"));
    }

    #[test]
    fn invariants_enforced() {
        let x = Matrix::zeros(2, 1);
        assert!(Dataset::new(Battery::Synthetic, vec!["a".into()], x.clone(), vec![0]).is_err());
        assert!(Dataset::new(Battery::Synthetic, vec![], x.clone(), vec![0, 1]).is_err());
        assert!(Dataset::new(Battery::Synthetic, vec!["a".into()], x, vec![0, 2]).is_err());
    }
}
