use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::nn::Activation;

/// Fully connected layer: `output = activation(x · weights + bias)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DenseLayer {
    /// `in_dim × out_dim`.
    pub weights: Matrix,
    /// `1 × out_dim`.
    pub bias: Matrix,
    pub activation: Activation,
}

/// Parameter gradients of one layer plus the gradient flowing to its input.
#[derive(Debug, Clone, PartialEq)]
pub struct LayerGrads {
    pub weights: Matrix,
    pub bias: Matrix,
    pub input: Matrix,
}

impl DenseLayer {
    pub fn new(weights: Matrix, bias: Matrix, activation: Activation) -> Result<Self> {
        if bias.rows() != 1 || bias.cols() != weights.cols() {
            return Err(Error::shape("DenseLayer::new", weights.shape(), bias.shape()));
        }
        activation.validate()?;
        Ok(Self {
            weights,
            bias,
            activation,
        })
    }

    pub fn in_dim(&self) -> usize {
        self.weights.rows()
    }

    pub fn out_dim(&self) -> usize {
        self.weights.cols()
    }

    /// Returns `(pre_activation, output)`.
    pub fn forward(&self, x: &Matrix) -> Result<(Matrix, Matrix)> {
        if x.cols() != self.in_dim() {
            return Err(Error::shape("dense_forward", x.shape(), self.weights.shape()));
        }
        let pre = x.matmul(&self.weights)?.add_row_broadcast(&self.bias)?;
        let out = self.activation.apply(&pre)?;
        Ok((pre, out))
    }

    /// Backpropagates `upstream = ∂L/∂output` through the activation and the affine map.
    pub fn backward(&self, x: &Matrix, pre: &Matrix, upstream: &Matrix) -> Result<LayerGrads> {
        if upstream.shape() != pre.shape() {
            return Err(Error::shape("dense_backward", upstream.shape(), pre.shape()));
        }
        let delta = upstream.hadamard(&self.activation.grad(pre)?)?;
        self.backward_delta(x, &delta)
    }

    /// Backpropagates `delta = ∂L/∂pre_activation`, used directly when the
    /// activation gradient is fused into the loss.
    pub fn backward_delta(&self, x: &Matrix, delta: &Matrix) -> Result<LayerGrads> {
        if x.cols() != self.in_dim() || x.rows() != delta.rows() {
            return Err(Error::shape("dense_backward", x.shape(), delta.shape()));
        }
        if delta.cols() != self.out_dim() {
            return Err(Error::shape("dense_backward", delta.shape(), self.weights.shape()));
        }
        Ok(LayerGrads {
            weights: x.transpose().matmul(delta)?,
            bias: delta.column_sums(),
            input: delta.matmul(&self.weights.transpose())?,
        })
    }
}
