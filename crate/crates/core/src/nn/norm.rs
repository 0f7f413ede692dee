//! Input feature layer.
//!
//! Implemented as per-feature standardisation whose statistics are fitted on
//! the training partition only and then frozen, so the same transform is
//! applied to validation and test rows. Standard deviations use the
//! population convention; constant columns get a standard deviation of 1.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::Matrix;

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct FeatureNormLayer {
    pub means: Vec<f64>,
    pub stds: Vec<f64>,
    pub fitted: bool,
}

impl FeatureNormLayer {
    pub fn new() -> Self {
        Self::default()
    }

    /// Convenience for `new()` followed by `fit()`.
    pub fn fitted_on(train_x: &Matrix) -> Result<Self> {
        let mut layer = Self::new();
        layer.fit(train_x)?;
        Ok(layer)
    }

    pub fn fit(&mut self, train_x: &Matrix) -> Result<()> {
        if train_x.rows() < 2 {
            return Err(Error::Data(format!(
                "feature layer needs at least 2 training rows, got {}",
                train_x.rows()
            )));
        }
        let n = train_x.rows() as f64;
        let means: Vec<f64> = train_x
            .column_sums()
            .as_slice()
            .iter()
            .map(|s| s / n)
            .collect();
        let mut sq = vec![0.0; train_x.cols()];
        for r in 0..train_x.rows() {
            for ((acc, v), m) in sq.iter_mut().zip(train_x.row(r)).zip(&means) {
                *acc += (v - m) * (v - m);
            }
        }
        let stds = sq
            .iter()
            .zip(&means)
            .map(|(s, m)| {
                let sd = (s / n).sqrt();
                if sd <= f64::EPSILON * m.abs().max(1.0) {
                    1.0
                } else {
                    sd
                }
            })
            .collect();
        self.means = means;
        self.stds = stds;
        self.fitted = true;
        Ok(())
    }

    pub fn apply(&self, x: &Matrix) -> Result<Matrix> {
        if !self.fitted {
            return Err(Error::State("feature layer applied before fit".into()));
        }
        if x.cols() != self.means.len() {
            return Err(Error::shape(
                "feature_norm_apply",
                x.shape(),
                (1, self.means.len()),
            ));
        }
        let mut data = Vec::with_capacity(x.rows() * x.cols());
        for r in 0..x.rows() {
            data.extend(
                x.row(r)
                    .iter()
                    .zip(self.means.iter().zip(&self.stds))
                    .map(|(v, (m, s))| (v - m) / s),
            );
        }
        Matrix::new(x.rows(), x.cols(), data)
    }
}
