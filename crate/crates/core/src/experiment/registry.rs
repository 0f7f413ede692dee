//! Built-in experiment definitions.
//!
//! First model (psychometric only): the nine Table-2-style architectures,
//! Leaky ReLU hidden layers, two softmax outputs with sparse categorical
//! cross-entropy, 1000 epochs, 75/25 split, raw inputs.
//!
//! Second model (one per battery): feature layer first, sigmoid output with
//! binary cross-entropy, 80/20 split after balancing the classes, 50 epochs
//! (100 for DTI). Saccade batteries use two ReLU layers of 128; the others
//! use four interleaved layers in the fixed order 64-sigmoid, 128-ReLU,
//! 64-sigmoid, 128-ReLU, with Leaky ReLU in place of ReLU for DTI.

use serde::{Deserialize, Serialize};

use crate::data::{Battery, Dataset, SplitSpec};
use crate::error::{Error, Result};
use crate::loss::LossKind;
use crate::nn::{Activation, LayerSpec, NetworkConfig};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSpec {
    pub name: String,
    pub battery: Battery,
    pub config: NetworkConfig,
    pub split: SplitSpec,
    pub balance: bool,
    #[serde(default)]
    pub ablate: Vec<String>,
}

impl ExperimentSpec {
    /// Same experiment re-pointed at `ds`: input width follows the data after
    /// ablation, and synthetic data takes over the battery tag.
    pub fn adapt_to(&self, ds: &Dataset) -> ExperimentSpec {
        let mut spec = self.clone();
        if ds.battery == Battery::Synthetic {
            spec.battery = Battery::Synthetic;
        }
        spec.config.input_dim = ds.n_features().saturating_sub(self.ablate.len());
        spec
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("spec serialises")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let spec: Self = serde_json::from_str(text)
            .map_err(|e| Error::Config(format!("malformed experiment spec: {e}")))?;
        spec.config.validate()?;
        Ok(spec)
    }
}

/// Hidden widths of the nine first-model rows: input layer, then one or two hidden layers.
pub const TABLE2_WIDTHS: [&[usize]; 9] = [
    &[20, 15],
    &[25, 15],
    &[25, 20],
    &[25, 30],
    &[25, 20, 15],
    &[50, 15],
    &[100, 50, 25],
    &[200, 15],
    &[200, 50, 50],
];

pub const FIRST_MODEL_EPOCHS: usize = 1000;
pub const FIRST_MODEL_TRAIN_FRACTION: f64 = 0.75;
pub const SECOND_MODEL_EPOCHS: usize = 50;
pub const DTI_EPOCHS: usize = 100;
pub const SECOND_MODEL_TRAIN_FRACTION: f64 = 0.8;

fn input_dim(b: Battery) -> usize {
    b.schema().map_or(1, |s| s.expected_feature_count)
}

fn first_model(row: usize, widths: &[usize]) -> ExperimentSpec {
    let hidden: Vec<LayerSpec> = widths
        .iter()
        .map(|&w| LayerSpec::new(w, Activation::leaky_relu()))
        .collect();
    ExperimentSpec {
        name: format!("table2-row{row}"),
        battery: Battery::Psychometric,
        config: NetworkConfig::classifier(
            input_dim(Battery::Psychometric),
            &hidden,
            false,
            LossKind::SparseCategoricalCe,
            FIRST_MODEL_EPOCHS,
        ),
        split: SplitSpec::stratified(FIRST_MODEL_TRAIN_FRACTION, 0),
        balance: false,
        ablate: Vec::new(),
    }
}

fn second_model(name: &str, battery: Battery, hidden: &[LayerSpec], epochs: usize) -> ExperimentSpec {
    ExperimentSpec {
        name: name.to_string(),
        battery,
        config: NetworkConfig::classifier(input_dim(battery), hidden, true, LossKind::BinaryCe, epochs),
        split: SplitSpec::stratified(SECOND_MODEL_TRAIN_FRACTION, 0),
        balance: true,
        ablate: Vec::new(),
    }
}

fn two_by_128() -> Vec<LayerSpec> {
    vec![LayerSpec::new(128, Activation::Relu); 2]
}

fn interleaved(rectifier: Activation) -> Vec<LayerSpec> {
    vec![
        LayerSpec::new(64, Activation::Sigmoid),
        LayerSpec::new(128, rectifier),
        LayerSpec::new(64, Activation::Sigmoid),
        LayerSpec::new(128, rectifier),
    ]
}

pub fn first_model_specs() -> Vec<ExperimentSpec> {
    TABLE2_WIDTHS
        .iter()
        .enumerate()
        .map(|(i, w)| first_model(i + 1, w))
        .collect()
}

pub fn second_model_specs() -> Vec<ExperimentSpec> {
    vec![
        second_model("antisaccade-128x2", Battery::Antisaccade, &two_by_128(), SECOND_MODEL_EPOCHS),
        second_model("prosaccade-128x2", Battery::Prosaccade, &two_by_128(), SECOND_MODEL_EPOCHS),
        second_model(
            "memory-guided-interleaved",
            Battery::MemoryGuided,
            &interleaved(Activation::Relu),
            SECOND_MODEL_EPOCHS,
        ),
        second_model(
            "psychometric-feature-layer",
            Battery::Psychometric,
            &interleaved(Activation::Relu),
            SECOND_MODEL_EPOCHS,
        ),
        second_model("dti-leaky-100ep", Battery::Dti, &interleaved(Activation::leaky_relu()), DTI_EPOCHS),
    ]
}

/// The nine first-model specs followed by the five second-model specs.
pub fn builtin_registry() -> Vec<ExperimentSpec> {
    let mut specs = first_model_specs();
    specs.extend(second_model_specs());
    specs
}

/// Comparison variants: the psychometric second model without `sex`/`age`,
/// and DTI with plain ReLU.
pub fn variant_specs() -> Vec<ExperimentSpec> {
    let mut no_demographics = second_model(
        "psychometric-no-sex-age",
        Battery::Psychometric,
        &interleaved(Activation::Relu),
        SECOND_MODEL_EPOCHS,
    );
    no_demographics.ablate = vec!["sex".into(), "age".into()];
    no_demographics.config.input_dim -= 2;
    vec![
        no_demographics,
        second_model("dti-relu-100ep", Battery::Dti, &interleaved(Activation::Relu), DTI_EPOCHS),
    ]
}

pub fn find_builtin(name: &str) -> Option<ExperimentSpec> {
    builtin_registry()
        .into_iter()
        .chain(variant_specs())
        .find(|s| s.name == name)
}

/// Resolves a named set (`table2`, `second-model`, `variants`, `all`) or a single builtin name.
pub fn spec_set(name: &str) -> Option<Vec<ExperimentSpec>> {
    match name {
        "table2" => Some(first_model_specs()),
        "second-model" => Some(second_model_specs()),
        "variants" => Some(variant_specs()),
        "all" => Some(builtin_registry()),
        single => find_builtin(single).map(|s| vec![s]),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    #[test]
    fn registry_shape() {
        let reg = builtin_registry();
        assert_eq!(reg.len(), 14);
        let names: HashSet<_> = reg.iter().chain(&variant_specs()).map(|s| s.name.clone()).collect();
        assert_eq!(names.len(), 16);
        for s in &reg {
            s.config.validate().unwrap();
        }
    }

    #[test]
    fn first_model_rows() {
        let specs = first_model_specs();
        assert_eq!(specs.len(), 9);
        for (s, w) in specs.iter().zip(TABLE2_WIDTHS) {
            assert_eq!(s.config.hidden_widths(), w);
            assert_eq!(s.config.input_dim, 20);
            assert_eq!(s.config.epochs, 1000);
            assert_eq!(s.config.loss, LossKind::SparseCategoricalCe);
            assert!(!s.config.use_feature_layer);
            assert_eq!(s.split.train_fraction, 0.75);
            assert_eq!(*s.config.layers.last().unwrap(), LayerSpec::new(2, Activation::Softmax));
            let hidden = &s.config.layers[..s.config.layers.len() - 1];
            assert!(hidden.iter().all(|l| l.activation == Activation::leaky_relu()));
        }
        let row3 = find_builtin("table2-row3").unwrap();
        assert_eq!(row3.config.layers[0].width, 25);
        assert_eq!(row3.config.hidden_widths()[1..], [20]);
    }

    #[test]
    fn second_model_settings() {
        for s in second_model_specs() {
            assert!(s.config.use_feature_layer, "{}", s.name);
            assert!(s.balance);
            assert_eq!(s.split.train_fraction, 0.8);
            assert_eq!(s.config.loss, LossKind::BinaryCe);
            assert_eq!(s.config.input_dim, s.battery.schema().unwrap().expected_feature_count);
            let expected_epochs = if s.battery == Battery::Dti { 100 } else { 50 };
            assert_eq!(s.config.epochs, expected_epochs);
        }
        let dti = find_builtin("dti-leaky-100ep").unwrap();
        assert_eq!(dti.config.epochs, 100);
        assert_eq!(dti.config.layers[1].activation, Activation::leaky_relu());
        let anti = find_builtin("antisaccade-128x2").unwrap();
        assert_eq!(anti.config.hidden_widths(), vec![128, 128]);
        let mg = find_builtin("memory-guided-interleaved").unwrap();
        assert_eq!(mg.config.hidden_widths(), vec![64, 128, 64, 128]);
    }

    #[test]
    fn specs_round_trip_through_json() {
        for s in builtin_registry().into_iter().chain(variant_specs()) {
            let text = s.to_json();
            let back = ExperimentSpec::from_json(&text).unwrap();
            assert_eq!(back, s);
            assert_eq!(back.to_json(), text);
            let cfg_text = s.config.to_json();
            assert_eq!(NetworkConfig::from_json(&cfg_text).unwrap(), s.config);
        }
    }

    #[test]
    fn spec_sets() {
        assert_eq!(spec_set("table2").unwrap().len(), 9);
        assert_eq!(spec_set("second-model").unwrap().len(), 5);
        assert_eq!(spec_set("all").unwrap().len(), 14);
        assert_eq!(spec_set("dti-relu-100ep").unwrap().len(), 1);
        assert!(spec_set("nope").is_none());
    }

    #[test]
    fn adapt_to_synthetic() {
        let ds = crate::data::synthesize_dataset(3, 7, 1.0, &mut crate::SeededRng::new(0)).unwrap();
        let s = find_builtin("table2-row1").unwrap().adapt_to(&ds);
        assert_eq!(s.battery, Battery::Synthetic);
        assert_eq!(s.config.input_dim, 7);
    }
}
