use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::data::POSITIVE;
use crate::error::{Error, Result};

/// Binary confusion counts with FASD as the positive class.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct ConfusionMatrix {
    pub tp: usize,
    pub fp: usize,
    pub tn: usize,
    #[serde(rename = "fn")]
    pub fn_: usize,
    pub total: usize,
}

/// Each cell as a percentage of all samples.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConfusionPercent {
    pub tp: f64,
    pub fp: f64,
    pub tn: f64,
    #[serde(rename = "fn")]
    pub fn_: f64,
}

pub fn confusion_matrix(predictions: &[u8], labels: &[u8]) -> Result<ConfusionMatrix> {
    if predictions.len() != labels.len() {
        return Err(Error::Shape {
            op: "confusion_matrix",
            left: format!("{} predictions", predictions.len()),
            right: format!("{} labels", labels.len()),
        });
    }
    let mut cm = ConfusionMatrix {
        total: labels.len(),
        ..Default::default()
    };
    for (&p, &l) in predictions.iter().zip(labels) {
        if p > 1 || l > 1 {
            return Err(Error::Data(format!("values must be 0 or 1, got prediction {p} label {l}")));
        }
        match (p == POSITIVE, l == POSITIVE) {
            (true, true) => cm.tp += 1,
            (true, false) => cm.fp += 1,
            (false, false) => cm.tn += 1,
            (false, true) => cm.fn_ += 1,
        }
    }
    Ok(cm)
}

pub fn accuracy(cm: &ConfusionMatrix) -> Result<f64> {
    if cm.total == 0 {
        return Err(Error::Contract("accuracy of an empty confusion matrix".into()));
    }
    Ok((cm.tp + cm.tn) as f64 / cm.total as f64)
}

impl ConfusionMatrix {
    pub fn percent(&self) -> ConfusionPercent {
        let t = self.total.max(1) as f64;
        let pct = |c: usize| 100.0 * c as f64 / t;
        ConfusionPercent {
            tp: pct(self.tp),
            fp: pct(self.fp),
            tn: pct(self.tn),
            fn_: pct(self.fn_),
        }
    }

    /// Aligned text table, cells shown as percent of total with counts.
    pub fn render(&self) -> String {
        let p = self.percent();
        let cell = |pct: f64, n: usize| format!("{pct:.2}% ({n})");
        let rows = [
            ("actual FASD", cell(p.tp, self.tp), cell(p.fn_, self.fn_)),
            ("actual control", cell(p.fp, self.fp), cell(p.tn, self.tn)),
        ];
        let w0 = rows.iter().map(|r| r.0.len()).max().unwrap();
        let w1 = rows.iter().map(|r| r.1.len()).max().unwrap().max("predicted FASD".len());
        let w2 = rows.iter().map(|r| r.2.len()).max().unwrap().max("predicted control".len());
        let mut out = String::new();
        writeln!(out, "{:w0$}  {:>w1$}  {:>w2$}", "", "predicted FASD", "predicted control").unwrap();
        for (a, b, c) in rows {
            writeln!(out, "{a:w0$}  {b:>w1$}  {c:>w2$}").unwrap();
        }
        if let Ok(acc) = accuracy(self) {
            writeln!(out, "accuracy: {:.2}% of {} samples", 100.0 * acc, self.total).unwrap();
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::SeededRng;

    #[test]
    fn perfect_and_inverted() {
        let labels = [1, 0, 1, 1, 0];
        let cm = confusion_matrix(&labels, &labels).unwrap();
        assert_eq!((cm.fp, cm.fn_, cm.tp, cm.tn), (0, 0, 3, 2));
        assert_eq!(accuracy(&cm).unwrap(), 1.0);
        let inv: Vec<u8> = labels.iter().map(|l| 1 - l).collect();
        let cm = confusion_matrix(&inv, &labels).unwrap();
        assert_eq!((cm.tp, cm.tn), (0, 0));
    }

    #[test]
    fn one_of_each() {
        let cm = ConfusionMatrix { tp: 1, fp: 1, tn: 1, fn_: 1, total: 4 };
        assert_eq!(accuracy(&cm).unwrap(), 0.5);
    }

    #[test]
    fn matches_counting_oracle() {
        let mut rng = SeededRng::new(13);
        let preds: Vec<u8> = (0..200).map(|_| rng.below(2) as u8).collect();
        let labels: Vec<u8> = (0..200).map(|_| rng.below(2) as u8).collect();
        let cm = confusion_matrix(&preds, &labels).unwrap();
        let mut counts = [[0usize; 2]; 2];
        for i in 0..200 {
            counts[preds[i] as usize][labels[i] as usize] += 1;
        }
        assert_eq!((cm.tp, cm.fp, cm.tn, cm.fn_), (counts[1][1], counts[1][0], counts[0][0], counts[0][1]));
        assert_eq!(cm.tp + cm.fp + cm.tn + cm.fn_, cm.total);
        let direct = (0..200).filter(|&i| preds[i] == labels[i]).count() as f64 / 200.0;
        assert!((accuracy(&cm).unwrap() - direct).abs() < 1e-15);
        let p = cm.percent();
        assert!((p.tp + p.fp + p.tn + p.fn_ - 100.0).abs() < 1e-9);
    }

    #[test]
    fn errors() {
        assert!(matches!(confusion_matrix(&[1], &[1, 0]), Err(Error::Shape { .. })));
        assert!(confusion_matrix(&[2], &[1]).is_err());
        assert!(matches!(accuracy(&ConfusionMatrix::default()), Err(Error::Contract(_))));
    }

    #[test]
    fn render_uses_two_decimals() {
        let cm = ConfusionMatrix { tp: 10, fp: 2, tn: 13, fn_: 1, total: 26 };
        let text = cm.render();
        assert!(text.contains("38.46% (10)"), "{text}");
        assert!(text.contains("7.69% (2)"));
        assert!(text.contains("3.85% (1)"));
        assert!(text.contains("accuracy: 88.46%"));
    }
}
