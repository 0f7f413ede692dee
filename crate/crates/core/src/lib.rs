//! Dense neural-network classifiers for small tabular clinical test batteries.
//!
//! The crate covers the full pipeline: matrix maths and a pinned random
//! generator ([`matrix`], [`rng`]), dense layers with an input feature layer
//! ([`nn`]), cross-entropy losses and Adam ([`loss`], [`optim`], [`train`]),
//! dataset ingestion, balancing and splitting ([`data`]), experiment
//! registries, sweeps and reporting ([`experiment`]), and the command-line
//! surface ([`cli`]).

pub mod cli;
pub mod data;
pub mod error;
pub mod experiment;
pub mod loss;
pub mod matrix;
pub mod nn;
pub mod optim;
pub mod rng;
pub mod train;

pub use error::{Error, Result};
pub use matrix::Matrix;
pub use rng::SeededRng;
