use crate::data::{Battery, Dataset};
use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::rng::SeededRng;

/// Location and spread of the two feature families. Even-indexed features
/// live around 5 with unit spread, odd-indexed ones around 70 with spread 10,
/// giving the mixed 1–10 / 70–100 ranges of raw clinical scores.
const SMALL: (f64, f64) = (5.0, 1.0);
const LARGE: (f64, f64) = (70.0, 10.0);

/// Two Gaussian clouds, `n_per_class` rows each, alternating control/FASD.
///
/// Per feature, controls are centred at `base − separation·σ/2` and FASD at
/// `base + separation·σ/2`, so `separation` is the gap between the class
/// means in units of that feature's standard deviation.
pub fn synthesize_dataset(
    n_per_class: usize,
    n_features: usize,
    separation: f64,
    rng: &mut SeededRng,
) -> Result<Dataset> {
    if n_per_class == 0 || n_features == 0 {
        return Err(Error::Config(format!(
            "need at least one row per class and one feature, got {n_per_class} and {n_features}"
        )));
    }
    if !separation.is_finite() {
        return Err(Error::Config("separation must be finite".into()));
    }
    let n = 2 * n_per_class;
    let mut data = Vec::with_capacity(n * n_features);
    let mut y = Vec::with_capacity(n);
    for r in 0..n {
        let label = (r % 2) as u8;
        let sign = if label == 1 { 0.5 } else { -0.5 };
        for j in 0..n_features {
            let (base, sd) = if j % 2 == 0 { SMALL } else { LARGE };
            data.push(base + sd * (sign * separation + rng.normal()));
        }
        y.push(label);
    }
    let width = n_features.to_string().len().max(2);
    let names = (1..=n_features).map(|j| format!("f{j:0width$}")).collect();
    Dataset::new(Battery::Synthetic, names, Matrix::new(n, n_features, data)?, y)
}
