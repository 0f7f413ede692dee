//! Adam with bias correction.

use crate::error::{Error, Result};
use crate::matrix::Matrix;

pub const BETA1: f64 = 0.9;
pub const BETA2: f64 = 0.999;
pub const EPSILON: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq)]
pub struct AdamState {
    m: Vec<Matrix>,
    v: Vec<Matrix>,
    t: u32,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
    pub learning_rate: f64,
}

impl AdamState {
    /// Zeroed moments mirroring `shapes`, with the canonical hyperparameters.
    pub fn new(shapes: &[(usize, usize)], learning_rate: f64) -> Self {
        let zeros = || shapes.iter().map(|&(r, c)| Matrix::zeros(r, c)).collect();
        Self {
            m: zeros(),
            v: zeros(),
            t: 0,
            beta1: BETA1,
            beta2: BETA2,
            epsilon: EPSILON,
            learning_rate,
        }
    }

    pub fn step_count(&self) -> u32 {
        self.t
    }

    pub fn second_moments(&self) -> &[Matrix] {
        &self.v
    }

    /// One update of every parameter:
    /// `θ ← θ − lr · m̂ / (√v̂ + ε)` with `m̂ = m / (1 − β1ᵗ)`, `v̂ = v / (1 − β2ᵗ)`.
    pub fn step(&mut self, params: &mut [&mut Matrix], grads: &[&Matrix]) -> Result<()> {
        if params.len() != self.m.len() || grads.len() != self.m.len() {
            return Err(Error::Shape {
                op: "adam_step",
                left: format!("{} moment tensors", self.m.len()),
                right: format!("{} params / {} grads", params.len(), grads.len()),
            });
        }
        for ((p, g), m) in params.iter().zip(grads).zip(&self.m) {
            if p.shape() != m.shape() || g.shape() != m.shape() {
                return Err(Error::shape("adam_step", p.shape(), g.shape()));
            }
        }

        self.t += 1;
        let t = self.t as i32;
        let (b1, b2) = (self.beta1, self.beta2);
        let c1 = 1.0 - b1.powi(t);
        let c2 = 1.0 - b2.powi(t);
        for (((p, g), m), v) in params
            .iter_mut()
            .zip(grads)
            .zip(&mut self.m)
            .zip(&mut self.v)
        {
            let ps = p.as_mut_slice();
            let ms = m.as_mut_slice();
            let vs = v.as_mut_slice();
            for (i, &gi) in g.as_slice().iter().enumerate() {
                ms[i] = b1 * ms[i] + (1.0 - b1) * gi;
                vs[i] = b2 * vs[i] + (1.0 - b2) * gi * gi;
                let m_hat = ms[i] / c1;
                let v_hat = vs[i] / c2;
                ps[i] -= self.learning_rate * m_hat / (v_hat.sqrt() + self.epsilon);
            }
            if !ps.iter().all(|x| x.is_finite()) {
                return Err(Error::NonFinite("adam_step"));
            }
        }
        Ok(())
    }
}
