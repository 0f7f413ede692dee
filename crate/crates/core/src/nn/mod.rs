//! Dense layers, activations, the input feature layer and network topology.

mod activation;
mod config;
mod dense;
mod network;
mod norm;

pub use activation::{sigmoid, Activation, DEFAULT_LEAKY_SLOPE};
pub use config::{LayerSpec, NetworkConfig, DEFAULT_LEARNING_RATE};
pub use dense::{DenseLayer, LayerGrads};
pub use network::{network_backward, network_forward, network_init, LayerCache};
pub use norm::FeatureNormLayer;
