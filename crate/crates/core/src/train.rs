//! Full-batch Adam training.
//!
//! Every epoch is a single Adam step on the whole training partition. The
//! recorded training loss/accuracy are those of the forward pass that produced
//! the step (the parameters at the start of the epoch); validation metrics are
//! measured after the step.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::loss::LossKind;
use crate::matrix::Matrix;
use crate::nn::{network_backward, network_forward, network_init, DenseLayer, FeatureNormLayer, NetworkConfig};
use crate::optim::AdamState;
use crate::rng::SeededRng;

/// Fitted normalisation statistics plus per-layer parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainedModel {
    pub config: NetworkConfig,
    pub norm: Option<FeatureNormLayer>,
    pub layers: Vec<DenseLayer>,
}

impl TrainedModel {
    pub fn predict_proba(&self, x: &Matrix) -> Result<Matrix> {
        Ok(network_forward(&self.layers, self.norm.as_ref(), x)?.1)
    }

    pub fn predict(&self, x: &Matrix) -> Result<Vec<u8>> {
        Ok(self.config.loss.predict(&self.predict_proba(x)?))
    }

    /// `(loss, accuracy)` on a labelled set.
    pub fn evaluate(&self, x: &Matrix, y: &[u8]) -> Result<(f64, f64)> {
        let probs = self.predict_proba(x)?;
        let loss = self.config.loss.loss(&probs, y)?;
        Ok((loss, accuracy_of(self.config.loss, &probs, y)))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("model serialises")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Config(format!("malformed model file: {e}")))
    }
}

fn accuracy_of(loss: LossKind, probs: &Matrix, y: &[u8]) -> f64 {
    let hits = loss.predict(probs).iter().zip(y).filter(|(p, l)| p == l).count();
    hits as f64 / y.len() as f64
}

/// Per-epoch learning curves.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct History {
    pub train_loss: Vec<f64>,
    pub train_acc: Vec<f64>,
    pub val_loss: Vec<f64>,
    pub val_acc: Vec<f64>,
}

impl History {
    pub fn epochs(&self) -> usize {
        self.train_loss.len()
    }

    /// `epoch,train_loss,train_acc,val_loss,val_acc`, epochs numbered from 1.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("epoch,train_loss,train_acc,val_loss,val_acc\n");
        for i in 0..self.epochs() {
            writeln!(
                out,
                "{},{},{},{},{}",
                i + 1,
                self.train_loss[i],
                self.train_acc[i],
                self.val_loss[i],
                self.val_acc[i]
            )
            .unwrap();
        }
        out
    }
}

fn diverged(epoch: usize, err: Error) -> Error {
    match err {
        Error::NonFinite(op) => Error::Divergence {
            epoch,
            detail: format!("non-finite value in {op}"),
        },
        other => other,
    }
}

/// Trains a fresh network initialised from `config.seed`.
pub fn train(config: &NetworkConfig, train_set: &Dataset, valid_set: &Dataset) -> Result<(TrainedModel, History)> {
    config.validate()?;
    for (name, ds) in [("training", train_set), ("validation", valid_set)] {
        if ds.is_empty() {
            return Err(Error::Data(format!("{name} set is empty")));
        }
        if ds.n_features() != config.input_dim {
            return Err(Error::Config(format!(
                "{name} set has {} features, config expects {}",
                ds.n_features(),
                config.input_dim
            )));
        }
    }

    let mut rng = SeededRng::new(config.seed);
    let mut layers = network_init(config, &mut rng)?;
    let norm = if config.use_feature_layer {
        Some(FeatureNormLayer::fitted_on(&train_set.x)?)
    } else {
        None
    };
    // The feature layer is frozen after fitting, so normalise once.
    let train_x = match &norm {
        Some(n) => n.apply(&train_set.x)?,
        None => train_set.x.clone(),
    };
    let valid_x = match &norm {
        Some(n) => n.apply(&valid_set.x)?,
        None => valid_set.x.clone(),
    };

    let loss = config.loss;
    let shapes: Vec<(usize, usize)> = layers
        .iter()
        .flat_map(|l| [l.weights.shape(), l.bias.shape()])
        .collect();
    let mut adam = AdamState::new(&shapes, config.learning_rate);
    let mut history = History::default();

    for epoch in 1..=config.epochs {
        let step = |layers: &mut Vec<DenseLayer>, adam: &mut AdamState, history: &mut History| -> Result<()> {
            let (caches, probs) = network_forward(layers, None, &train_x)?;
            let train_loss = loss.loss(&probs, &train_set.y)?;
            if !train_loss.is_finite() {
                return Err(Error::NonFinite("loss"));
            }
            history.train_loss.push(train_loss);
            history.train_acc.push(accuracy_of(loss, &probs, &train_set.y));

            let delta = loss.grad_from_probs(&probs, &train_set.y)?;
            let grads = network_backward(layers, &caches, &delta)?;
            let grad_refs: Vec<&Matrix> = grads.iter().flat_map(|g| [&g.weights, &g.bias]).collect();
            let mut params: Vec<&mut Matrix> = layers
                .iter_mut()
                .flat_map(|l| [&mut l.weights, &mut l.bias])
                .collect();
            adam.step(&mut params, &grad_refs)?;

            let (_, val_probs) = network_forward(layers, None, &valid_x)?;
            history.val_loss.push(loss.loss(&val_probs, &valid_set.y)?);
            history.val_acc.push(accuracy_of(loss, &val_probs, &valid_set.y));
            Ok(())
        };
        step(&mut layers, &mut adam, &mut history).map_err(|e| diverged(epoch, e))?;
    }

    Ok((
        TrainedModel {
            config: config.clone(),
            norm,
            layers,
        },
        history,
    ))
}
