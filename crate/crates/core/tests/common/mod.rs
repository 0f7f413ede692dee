//! Helpers shared by the integration test targets.

#![allow(dead_code)]

use fasdnet::loss::LossKind;
use fasdnet::nn::{network_backward, network_forward, network_init, Activation, DenseLayer, LayerSpec, NetworkConfig};
use fasdnet::{Matrix, SeededRng};

pub const FD_STEP: f64 = 1e-5;

/// Relative-error denominator floor. Central differences of a loss near 0.7
/// carry roughly 1e-11 of rounding noise, so entries smaller than this are in
/// effect held to an absolute tolerance of `1e-5 × REL_FLOOR = 1e-10`.
pub const REL_FLOOR: f64 = 1e-5;

pub fn leaky(w: usize) -> LayerSpec {
    LayerSpec::new(w, Activation::leaky_relu())
}

pub fn relu(w: usize) -> LayerSpec {
    LayerSpec::new(w, Activation::Relu)
}

pub fn sig(w: usize) -> LayerSpec {
    LayerSpec::new(w, Activation::Sigmoid)
}

pub fn relative_error(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(REL_FLOOR)
}

/// Batch loss plus the sign pattern of every pre-activation that feeds a
/// kinked activation (ReLU / Leaky ReLU).
fn probe_loss(layers: &[DenseLayer], loss: LossKind, x: &Matrix, y: &[u8]) -> (f64, Vec<bool>) {
    let (caches, out) = network_forward(layers, None, x).unwrap();
    let mut signs = Vec::new();
    for (layer, cache) in layers.iter().zip(&caches) {
        if matches!(layer.activation, Activation::Relu | Activation::LeakyRelu { .. }) {
            signs.extend(cache.pre_activation.as_slice().iter().map(|&z| z > 0.0));
        }
    }
    (loss.loss(&out, y).unwrap(), signs)
}

fn param_mut<'a>(layer: &'a mut DenseLayer, which: &str) -> &'a mut Matrix {
    if which == "W" {
        &mut layer.weights
    } else {
        &mut layer.bias
    }
}

#[derive(Debug)]
pub struct GradCheck {
    /// Entries compared.
    pub checked: usize,
    /// Entries whose ±h probe moved a kinked pre-activation across zero; the
    /// loss is not differentiable along that segment, so they are not compared.
    pub straddled: usize,
    pub worst: f64,
    pub worst_at: String,
}

/// Compares every weight and bias gradient of a freshly initialised network
/// against central differences of the batch loss on a random batch.
pub fn check_network(config: &NetworkConfig, batch: usize, seed: u64) -> GradCheck {
    let mut rng = SeededRng::new(seed);
    let mut layers = network_init(config, &mut rng).unwrap();
    // Glorot init leaves biases at zero; give them values so bias paths are exercised.
    for layer in &mut layers {
        let n = layer.bias.shape().1;
        for c in 0..n {
            layer.bias.set(0, c, rng.uniform_range(-0.1, 0.1)).unwrap();
        }
    }
    let data: Vec<f64> = (0..batch * config.input_dim).map(|_| rng.normal()).collect();
    let x = Matrix::new(batch, config.input_dim, data).unwrap();
    let y: Vec<u8> = (0..batch).map(|_| rng.below(2) as u8).collect();

    let (caches, _) = network_forward(&layers, None, &x).unwrap();
    let delta = config.loss.grad(&caches.last().unwrap().pre_activation, &y).unwrap();
    let grads = network_backward(&layers, &caches, &delta).unwrap();

    let mut report = GradCheck { checked: 0, straddled: 0, worst: 0.0, worst_at: String::new() };
    for (li, g) in grads.iter().enumerate() {
        // Layers before `li` are untouched by its probes: start from their output.
        let input = &caches[li].input;
        let (_, base_signs) = probe_loss(&layers[li..], config.loss, input, &y);
        for (which, analytic) in [("W", &g.weights), ("b", &g.bias)] {
            let (rows, cols) = analytic.shape();
            for r in 0..rows {
                for c in 0..cols {
                    let base = param_mut(&mut layers[li], which).get(r, c);
                    param_mut(&mut layers[li], which).set(r, c, base + FD_STEP).unwrap();
                    let (up, up_signs) = probe_loss(&layers[li..], config.loss, input, &y);
                    param_mut(&mut layers[li], which).set(r, c, base - FD_STEP).unwrap();
                    let (down, down_signs) = probe_loss(&layers[li..], config.loss, input, &y);
                    param_mut(&mut layers[li], which).set(r, c, base).unwrap();
                    if up_signs != base_signs || down_signs != base_signs {
                        report.straddled += 1;
                        continue;
                    }
                    let numeric = (up - down) / (2.0 * FD_STEP);
                    let err = relative_error(analytic.get(r, c), numeric);
                    report.checked += 1;
                    if err > report.worst {
                        report.worst = err;
                        report.worst_at = format!(
                            "layer {li} {which}[{r},{c}]: analytic {} numeric {numeric}",
                            analytic.get(r, c)
                        );
                    }
                }
            }
        }
    }
    report
}
