use crate::error::Result;
use crate::matrix::Matrix;
use crate::nn::{DenseLayer, FeatureNormLayer, LayerGrads, NetworkConfig};
use crate::rng::SeededRng;

/// Per-layer values kept from the forward pass for backpropagation.
#[derive(Debug, Clone, PartialEq)]
pub struct LayerCache {
    pub input: Matrix,
    pub pre_activation: Matrix,
}

/// Glorot-uniform weights in `±√(6 / (fan_in + fan_out))`, zero biases.
///
/// Weights are drawn layer by layer in row-major order from `rng`.
pub fn network_init(config: &NetworkConfig, rng: &mut SeededRng) -> Result<Vec<DenseLayer>> {
    config.validate()?;
    let mut fan_in = config.input_dim;
    let mut layers = Vec::with_capacity(config.layers.len());
    for spec in &config.layers {
        let fan_out = spec.width;
        let limit = (6.0 / (fan_in + fan_out) as f64).sqrt();
        let weights = (0..fan_in * fan_out)
            .map(|_| rng.uniform_range(-limit, limit))
            .collect();
        layers.push(DenseLayer::new(
            Matrix::new(fan_in, fan_out, weights)?,
            Matrix::zeros(1, fan_out),
            spec.activation,
        )?);
        fan_in = fan_out;
    }
    Ok(layers)
}

/// Runs the optional feature layer and then every dense layer in order.
pub fn network_forward(
    layers: &[DenseLayer],
    norm: Option<&FeatureNormLayer>,
    x: &Matrix,
) -> Result<(Vec<LayerCache>, Matrix)> {
    let mut current = match norm {
        Some(n) => n.apply(x)?,
        None => x.clone(),
    };
    let mut caches = Vec::with_capacity(layers.len());
    for layer in layers {
        let (pre, out) = layer.forward(&current)?;
        caches.push(LayerCache {
            input: current,
            pre_activation: pre,
        });
        current = out;
    }
    Ok((caches, current))
}

/// Backpropagates `output_delta = ∂L/∂(final pre-activation)` through the
/// whole stack. Returns gradients in layer order.
pub fn network_backward(
    layers: &[DenseLayer],
    caches: &[LayerCache],
    output_delta: &Matrix,
) -> Result<Vec<LayerGrads>> {
    let mut grads = Vec::with_capacity(layers.len());
    let mut upstream: Option<Matrix> = None;
    for (i, (layer, cache)) in layers.iter().zip(caches).enumerate().rev() {
        let g = if i + 1 == layers.len() {
            layer.backward_delta(&cache.input, output_delta)?
        } else {
            let up = upstream.as_ref().expect("set by the following layer");
            layer.backward(&cache.input, &cache.pre_activation, up)?
        };
        upstream = Some(g.input.clone());
        grads.push(g);
    }
    grads.reverse();
    Ok(grads)
}
