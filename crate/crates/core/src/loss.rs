//! Cross-entropy losses with their output activations fused in.
//!
//! Both regimes share the gradient `(p − y) / N` with respect to the final
//! pre-activation: softmax + sparse categorical cross-entropy over two
//! columns, and sigmoid + binary cross-entropy over one.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::nn::{Activation, LayerSpec};

/// Lower bound applied to the probability of the true class before `ln`.
pub const PROB_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LossKind {
    /// Two softmax outputs, integer class labels.
    SparseCategoricalCe,
    /// One sigmoid output, labels 0/1.
    BinaryCe,
}

impl LossKind {
    pub fn output_layer(self) -> LayerSpec {
        match self {
            LossKind::SparseCategoricalCe => LayerSpec::new(2, Activation::Softmax),
            LossKind::BinaryCe => LayerSpec::new(1, Activation::Sigmoid),
        }
    }

    pub fn output_width(self) -> usize {
        self.output_layer().width
    }

    fn check(self, preds: &Matrix, labels: &[u8]) -> Result<()> {
        if preds.rows() != labels.len() || preds.cols() != self.output_width() {
            return Err(Error::shape(
                "loss",
                preds.shape(),
                (labels.len(), self.output_width()),
            ));
        }
        if let Some((i, l)) = labels.iter().enumerate().find(|(_, &l)| l > 1) {
            return Err(Error::Data(format!("label {l} at sample {i} is not 0 or 1")));
        }
        Ok(())
    }

    /// Probability assigned to the true class of sample `i`.
    fn true_class_prob(self, preds: &Matrix, i: usize, label: u8) -> f64 {
        match self {
            LossKind::SparseCategoricalCe => preds.get(i, label as usize),
            LossKind::BinaryCe => {
                let p = preds.get(i, 0);
                if label == 1 {
                    p
                } else {
                    1.0 - p
                }
            }
        }
    }

    /// Mean negative log-likelihood of the true class.
    ///
    /// `preds` holds post-activation probabilities. The true-class probability
    /// is floored at [`PROB_FLOOR`], so a confident misprediction costs at most
    /// `-ln(1e-12)` and a perfect prediction costs exactly zero.
    pub fn loss(self, preds: &Matrix, labels: &[u8]) -> Result<f64> {
        self.check(preds, labels)?;
        if labels.is_empty() {
            return Err(Error::Data("loss over an empty batch".into()));
        }
        let total: f64 = labels
            .iter()
            .enumerate()
            .map(|(i, &y)| -self.true_class_prob(preds, i, y).clamp(PROB_FLOOR, 1.0).ln())
            .sum();
        Ok(total / labels.len() as f64)
    }

    /// Gradient of [`LossKind::loss`] with respect to the final pre-activation.
    pub fn grad(self, pre_final: &Matrix, labels: &[u8]) -> Result<Matrix> {
        self.check(pre_final, labels)?;
        let probs = self.output_layer().activation.apply(pre_final)?;
        self.grad_from_probs(&probs, labels)
    }

    /// `(p − y) / N` from already-computed probabilities.
    pub fn grad_from_probs(self, probs: &Matrix, labels: &[u8]) -> Result<Matrix> {
        self.check(probs, labels)?;
        let n = labels.len() as f64;
        let mut g = probs.as_slice().to_vec();
        let w = probs.cols();
        for (i, &y) in labels.iter().enumerate() {
            match self {
                LossKind::SparseCategoricalCe => g[i * w + y as usize] -= 1.0,
                LossKind::BinaryCe => g[i] -= f64::from(y),
            }
        }
        g.iter_mut().for_each(|v| *v /= n);
        Matrix::new(probs.rows(), w, g)
    }

    /// Class decisions: argmax for softmax outputs, `p ≥ 0.5` for sigmoid.
    pub fn predict(self, probs: &Matrix) -> Vec<u8> {
        match self {
            LossKind::SparseCategoricalCe => probs.argmax_rows().into_iter().map(|c| c as u8).collect(),
            LossKind::BinaryCe => probs.as_slice().iter().map(|&p| u8::from(p >= 0.5)).collect(),
        }
    }
}
