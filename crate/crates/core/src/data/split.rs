use serde::{Deserialize, Serialize};

use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::rng::SeededRng;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SplitSpec {
    pub train_fraction: f64,
    pub stratified: bool,
    pub seed: u64,
}

impl SplitSpec {
    pub fn stratified(train_fraction: f64, seed: u64) -> Self {
        Self {
            train_fraction,
            stratified: true,
            seed,
        }
    }
}

/// Randomly drops majority-class rows until both classes have the minority
/// count. Kept rows stay in their original order and are never modified.
pub fn balance_downsample(ds: &Dataset, rng: &mut SeededRng) -> Result<Dataset> {
    let [controls, fasd] = ds.class_indices();
    if controls.is_empty() || fasd.is_empty() {
        return Err(Error::Data(format!(
            "balancing needs both classes, found {} controls and {} FASD",
            controls.len(),
            fasd.len()
        )));
    }
    let (mut majority, minority) = if controls.len() >= fasd.len() {
        (controls, fasd)
    } else {
        (fasd, controls)
    };
    rng.shuffle(&mut majority);
    majority.truncate(minority.len());
    let mut keep: Vec<usize> = majority.into_iter().chain(minority).collect();
    keep.sort_unstable();
    Ok(ds.select_rows(&keep))
}

/// Number of training rows for a group of `n`, rounding toward train while
/// leaving at least one row on each side.
fn train_count(n: usize, fraction: f64) -> usize {
    let raw = (fraction * n as f64 - 1e-9).ceil() as usize;
    raw.clamp(1, n - 1)
}

/// Splits into `(train, test)`. With `stratified`, each class is divided
/// separately so both partitions keep the overall class proportions.
/// Both partitions list rows in their original order.
pub fn stratified_split(ds: &Dataset, spec: &SplitSpec) -> Result<(Dataset, Dataset)> {
    if !(spec.train_fraction > 0.0 && spec.train_fraction < 1.0) {
        return Err(Error::Config(format!(
            "train fraction must lie in (0, 1), got {}",
            spec.train_fraction
        )));
    }
    let mut rng = SeededRng::new(spec.seed);
    let groups: Vec<Vec<usize>> = if spec.stratified {
        let groups = ds.class_indices();
        for (class, g) in groups.iter().enumerate() {
            if g.len() < 2 {
                return Err(Error::Data(format!(
                    "class {class} has {} samples; stratified split needs at least 2",
                    g.len()
                )));
            }
        }
        groups.into()
    } else {
        if ds.len() < 2 {
            return Err(Error::Data(format!("cannot split {} rows", ds.len())));
        }
        vec![(0..ds.len()).collect()]
    };

    let mut train = Vec::new();
    let mut test = Vec::new();
    for mut group in groups {
        rng.shuffle(&mut group);
        let k = train_count(group.len(), spec.train_fraction);
        train.extend_from_slice(&group[..k]);
        test.extend_from_slice(&group[k..]);
    }
    train.sort_unstable();
    test.sort_unstable();
    Ok((ds.select_rows(&train), ds.select_rows(&test)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::Battery;
    use crate::matrix::Matrix;

    /// Row `i` carries the value `i` so partitions can be traced back.
    fn traced(controls: usize, fasd: usize) -> Dataset {
        let n = controls + fasd;
        let x = Matrix::new(n, 1, (0..n).map(|i| i as f64).collect()).unwrap();
        let mut y = vec![0u8; controls];
        y.extend(std::iter::repeat_n(1u8, fasd));
        Dataset::new(Battery::Synthetic, vec!["id".into()], x, y).unwrap()
    }

    fn ids(ds: &Dataset) -> Vec<usize> {
        ds.x.as_slice().iter().map(|&v| v as usize).collect()
    }

    #[test]
    fn antisaccade_balance() {
        let ds = traced(106, 68);
        let out = balance_downsample(&ds, &mut SeededRng::new(1)).unwrap();
        assert_eq!(out.class_counts(), (68, 68));
        // Every removed row is a control; every FASD row survives.
        let kept: std::collections::HashSet<usize> = ids(&out).into_iter().collect();
        for i in 0..174 {
            if !kept.contains(&i) {
                assert_eq!(ds.y[i], 0);
            }
        }
        assert!((106..174).all(|i| kept.contains(&i)));
        // Feature values travel with their labels.
        for (r, &id) in ids(&out).iter().enumerate() {
            assert_eq!(out.y[r], ds.y[id]);
        }
    }

    #[test]
    fn minority_controls_are_kept() {
        let out = balance_downsample(&traced(5, 9), &mut SeededRng::new(3)).unwrap();
        assert_eq!(out.class_counts(), (5, 5));
        assert!((0..5).all(|i| ids(&out).contains(&i)));
    }

    #[test]
    fn balanced_input_is_unchanged() {
        let ds = traced(10, 10);
        assert_eq!(balance_downsample(&ds, &mut SeededRng::new(2)).unwrap(), ds);
    }

    #[test]
    fn balance_needs_both_classes() {
        assert!(matches!(
            balance_downsample(&traced(4, 0), &mut SeededRng::new(0)),
            Err(Error::Data(_))
        ));
    }

    #[test]
    fn exact_fifty_fifty() {
        let (train, test) = stratified_split(&traced(50, 50), &SplitSpec::stratified(0.8, 9)).unwrap();
        assert_eq!(train.class_counts(), (40, 40));
        assert_eq!(test.class_counts(), (10, 10));
    }

    #[test]
    fn psychometric_proportions() {
        let (train, test) = stratified_split(&traced(71, 58), &SplitSpec::stratified(0.75, 1)).unwrap();
        assert!((96..=98).contains(&train.len()), "{}", train.len());
        assert_eq!(train.len() + test.len(), 129);
    }

    #[test]
    fn partitions_are_disjoint_and_exhaustive() {
        let ds = traced(33, 17);
        let (train, test) = stratified_split(&ds, &SplitSpec::stratified(0.7, 5)).unwrap();
        let mut all: Vec<usize> = ids(&train).into_iter().chain(ids(&test)).collect();
        all.sort_unstable();
        assert_eq!(all, (0..50).collect::<Vec<_>>());
    }

    #[test]
    fn deterministic_and_seed_dependent() {
        let ds = traced(30, 30);
        let a = stratified_split(&ds, &SplitSpec::stratified(0.8, 5)).unwrap();
        let b = stratified_split(&ds, &SplitSpec::stratified(0.8, 5)).unwrap();
        let c = stratified_split(&ds, &SplitSpec::stratified(0.8, 6)).unwrap();
        assert_eq!(a, b);
        assert_ne!(ids(&a.0), ids(&c.0));
    }

    #[test]
    fn split_errors() {
        assert!(matches!(
            stratified_split(&traced(1, 10), &SplitSpec::stratified(0.8, 0)),
            Err(Error::Data(_))
        ));
        assert!(stratified_split(&traced(5, 5), &SplitSpec::stratified(1.0, 0)).is_err());
        let plain = SplitSpec { train_fraction: 0.5, stratified: false, seed: 0 };
        let (train, test) = stratified_split(&traced(1, 3), &plain).unwrap();
        assert_eq!((train.len(), test.len()), (2, 2));
    }

    #[test]
    fn tiny_classes_keep_a_test_row() {
        let (train, test) = stratified_split(&traced(2, 2), &SplitSpec::stratified(0.8, 0)).unwrap();
        assert_eq!(train.class_counts(), (1, 1));
        assert_eq!(test.class_counts(), (1, 1));
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn split_invariants(controls in 2usize..80, fasd in 2usize..80, frac in 0.05f64..0.95, seed in any::<u64>()) {
                let ds = traced(controls, fasd);
                let (train, test) = stratified_split(&ds, &SplitSpec::stratified(frac, seed)).unwrap();
                let mut all: Vec<usize> = ids(&train).into_iter().chain(ids(&test)).collect();
                all.sort_unstable();
                prop_assert_eq!(all, (0..controls + fasd).collect::<Vec<_>>());
                let (c, f) = train.class_counts();
                let share = train.len() as f64 / ds.len() as f64;
                prop_assert!((c as f64 - share * controls as f64).abs() <= 1.0 + 1e-9);
                prop_assert!((f as f64 - share * fasd as f64).abs() <= 1.0 + 1e-9);
            }

            #[test]
            fn balance_invariants(controls in 1usize..60, fasd in 1usize..60, seed in any::<u64>()) {
                let ds = traced(controls, fasd);
                let out = balance_downsample(&ds, &mut SeededRng::new(seed)).unwrap();
                let m = controls.min(fasd);
                prop_assert_eq!(out.class_counts(), (m, m));
                for (r, &id) in ids(&out).iter().enumerate() {
                    prop_assert_eq!(out.y[r], ds.y[id]);
                }
            }
        }
    }
}
