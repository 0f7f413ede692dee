use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::Matrix;

pub const DEFAULT_LEAKY_SLOPE: f64 = 0.01;

/// Nonlinearity applied after a dense layer's affine map.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Activation {
    Identity,
    Relu,
    /// `x` for `x > 0`, otherwise `slope · x`.
    LeakyRelu {
        slope: f64,
    },
    Sigmoid,
    /// Row-wise softmax. Only valid on the output layer.
    Softmax,
}

impl Activation {
    pub fn leaky_relu() -> Self {
        Activation::LeakyRelu {
            slope: DEFAULT_LEAKY_SLOPE,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            Activation::LeakyRelu { slope } if !(slope > 0.0 && slope < 1.0) => Err(
                Error::Config(format!("leaky relu slope must lie in (0, 1), got {slope}")),
            ),
            _ => Ok(()),
        }
    }

    pub fn apply(&self, z: &Matrix) -> Result<Matrix> {
        match *self {
            Activation::Identity => Ok(z.clone()),
            Activation::Relu => z.map("relu", |x| if x > 0.0 { x } else { 0.0 }),
            Activation::LeakyRelu { slope } => {
                z.map("leaky_relu", |x| if x > 0.0 { x } else { slope * x })
            }
            Activation::Sigmoid => z.map("sigmoid", sigmoid),
            Activation::Softmax => softmax_rows(z),
        }
    }

    /// Elementwise derivative with respect to the pre-activation.
    ///
    /// The leaky relu derivative at exactly zero is the slope. Softmax has no
    /// elementwise derivative; its gradient is fused with the loss.
    pub fn grad(&self, z: &Matrix) -> Result<Matrix> {
        match *self {
            Activation::Identity => z.map("identity'", |_| 1.0),
            Activation::Relu => z.map("relu'", |x| if x > 0.0 { 1.0 } else { 0.0 }),
            Activation::LeakyRelu { slope } => {
                z.map("leaky_relu'", |x| if x > 0.0 { 1.0 } else { slope })
            }
            Activation::Sigmoid => z.map("sigmoid'", |x| {
                let s = sigmoid(x);
                s * (1.0 - s)
            }),
            Activation::Softmax => Err(Error::Contract(
                "softmax has no elementwise gradient; use the fused loss gradient".into(),
            )),
        }
    }
}

/// Logistic function, evaluated without overflowing `exp`.
pub fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

fn softmax_rows(z: &Matrix) -> Result<Matrix> {
    if z.cols() < 2 {
        return Err(Error::Config(format!(
            "softmax needs at least 2 columns, got {}",
            z.cols()
        )));
    }
    let mut data = Vec::with_capacity(z.rows() * z.cols());
    for r in 0..z.rows() {
        let row = z.row(r);
        let max = row.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let exps: Vec<f64> = row.iter().map(|v| (v - max).exp()).collect();
        let sum: f64 = exps.iter().sum();
        data.extend(exps.into_iter().map(|e| e / sum));
    }
    Matrix::new(z.rows(), z.cols(), data)
}
