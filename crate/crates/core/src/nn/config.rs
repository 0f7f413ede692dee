use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::loss::LossKind;
use crate::nn::Activation;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LayerSpec {
    pub width: usize,
    pub activation: Activation,
}

impl LayerSpec {
    pub fn new(width: usize, activation: Activation) -> Self {
        Self { width, activation }
    }
}

/// Architecture and training regime of one network.
///
/// `layers` lists every dense layer after the input, output layer included.
/// Serialises to pretty-printed JSON with exactly these field names; a
/// serialise → parse → serialise cycle is byte-stable.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NetworkConfig {
    pub input_dim: usize,
    pub layers: Vec<LayerSpec>,
    pub use_feature_layer: bool,
    pub loss: LossKind,
    pub epochs: usize,
    pub learning_rate: f64,
    pub seed: u64,
}

pub const DEFAULT_LEARNING_RATE: f64 = 0.001;

impl NetworkConfig {
    /// Hidden layers followed by the output layer implied by `loss`.
    pub fn classifier(
        input_dim: usize,
        hidden: &[LayerSpec],
        use_feature_layer: bool,
        loss: LossKind,
        epochs: usize,
    ) -> Self {
        let mut layers = hidden.to_vec();
        layers.push(loss.output_layer());
        Self {
            input_dim,
            layers,
            use_feature_layer,
            loss,
            epochs,
            learning_rate: DEFAULT_LEARNING_RATE,
            seed: 0,
        }
    }

    pub fn hidden_widths(&self) -> Vec<usize> {
        self.layers[..self.layers.len().saturating_sub(1)]
            .iter()
            .map(|l| l.width)
            .collect()
    }

    pub fn validate(&self) -> Result<()> {
        if self.input_dim == 0 {
            return Err(Error::Config("input_dim must be at least 1".into()));
        }
        if self.epochs == 0 {
            return Err(Error::Config("epochs must be at least 1".into()));
        }
        if !(self.learning_rate.is_finite() && self.learning_rate > 0.0) {
            return Err(Error::Config(format!(
                "learning_rate must be positive, got {}",
                self.learning_rate
            )));
        }
        let Some((last, hidden)) = self.layers.split_last() else {
            return Err(Error::Config("at least one layer is required".into()));
        };
        for (i, l) in self.layers.iter().enumerate() {
            if l.width == 0 {
                return Err(Error::Config(format!("layer {i} has width 0")));
            }
            l.activation.validate()?;
        }
        if hidden.iter().any(|l| l.activation == Activation::Softmax) {
            return Err(Error::Config("softmax is only allowed on the output layer".into()));
        }
        let expected = self.loss.output_layer();
        if *last != expected {
            return Err(Error::Config(format!(
                "{:?} loss needs an output layer of width {} with {:?}, got width {} with {:?}",
                self.loss, expected.width, expected.activation, last.width, last.activation
            )));
        }
        Ok(())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serialises")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(text)
            .map_err(|e| Error::Config(format!("malformed network config: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn table2_row3() -> NetworkConfig {
        NetworkConfig::classifier(
            20,
            &[
                LayerSpec::new(25, Activation::leaky_relu()),
                LayerSpec::new(20, Activation::leaky_relu()),
            ],
            false,
            LossKind::SparseCategoricalCe,
            1000,
        )
    }

    #[test]
    fn json_round_trip_is_byte_stable() {
        let cfg = table2_row3();
        let text = cfg.to_json();
        let back = NetworkConfig::from_json(&text).unwrap();
        assert_eq!(back, cfg);
        assert_eq!(back.to_json(), text);
    }

    #[test]
    fn json_field_names() {
        let v: serde_json::Value = serde_json::from_str(&table2_row3().to_json()).unwrap();
        let obj = v.as_object().unwrap();
        for key in ["input_dim", "layers", "use_feature_layer", "loss", "epochs", "learning_rate", "seed"] {
            assert!(obj.contains_key(key), "{key}");
        }
        assert_eq!(v["loss"], "sparse_categorical_ce");
        assert_eq!(v["layers"][0]["activation"]["kind"], "leaky_relu");
        assert_eq!(v["layers"][0]["activation"]["slope"], 0.01);
    }

    #[test]
    fn output_width_follows_loss() {
        let mut cfg = table2_row3();
        cfg.validate().unwrap();
        cfg.loss = LossKind::BinaryCe;
        assert!(matches!(cfg.validate(), Err(Error::Config(_))));
        cfg.layers.pop();
        cfg.layers.push(LayerSpec::new(1, Activation::Sigmoid));
        cfg.validate().unwrap();
    }

    #[test]
    fn rejects_bad_configs() {
        let mut cfg = table2_row3();
        cfg.epochs = 0;
        assert!(cfg.validate().is_err());
        let mut cfg = table2_row3();
        cfg.layers[0].width = 0;
        assert!(cfg.validate().is_err());
        let mut cfg = table2_row3();
        cfg.layers[0].activation = Activation::Softmax;
        assert!(cfg.validate().is_err());
        let mut cfg = table2_row3();
        cfg.layers.clear();
        assert!(cfg.validate().is_err());
        assert!(NetworkConfig::from_json("{\"input_dim\": 3}").is_err());
    }
}
