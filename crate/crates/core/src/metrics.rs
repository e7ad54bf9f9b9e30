//! Confusion matrix and the derived rates used to score a beat classifier.
//!
//! Irregular beats (`+1`) are the positive class: a detection of an irregular
//! complex is a "positive".

use std::fmt;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MetricsError {
    #[error("{predictions} predictions but {truths} ground-truth labels")]
    LengthMismatch { predictions: usize, truths: usize },
    #[error("invalid class label {0} (expected +1 or -1)")]
    InvalidLabel(i32),
    #[error("confusion matrix is empty")]
    Empty,
    #[error("no irregular (positive) samples: true positive rate undefined")]
    NoPositives,
    #[error("no regular (negative) samples: false positive rate undefined")]
    NoNegatives,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ConfusionMatrix {
    /// Irregular classified irregular.
    pub tp: usize,
    /// Regular classified regular.
    pub tn: usize,
    /// Regular classified irregular.
    pub fp: usize,
    /// Irregular classified regular.
    pub fn_: usize,
}

impl ConfusionMatrix {
    pub fn new(tp: usize, tn: usize, fp: usize, fn_: usize) -> Self {
        Self { tp, tn, fp, fn_ }
    }

    pub fn total(&self) -> usize {
        self.tp + self.tn + self.fp + self.fn_
    }

    pub fn positives(&self) -> usize {
        self.tp + self.fn_
    }

    pub fn negatives(&self) -> usize {
        self.tn + self.fp
    }

    /// The same counts with the positive class flipped.
    pub fn swapped(&self) -> Self {
        Self {
            tp: self.tn,
            tn: self.tp,
            fp: self.fn_,
            fn_: self.fp,
        }
    }

    /// Flat key-value pairs: counts followed by the rates that are defined.
    pub fn report(&self) -> Vec<(&'static str, String)> {
        let mut out = vec![
            ("tp", self.tp.to_string()),
            ("tn", self.tn.to_string()),
            ("fp", self.fp.to_string()),
            ("fn", self.fn_.to_string()),
            ("total", self.total().to_string()),
        ];
        let fmt = |r: Result<f64, MetricsError>| r.map(|v| format!("{v:.6}")).unwrap_or_else(|_| "nan".into());
        out.push(("accuracy", fmt(accuracy(self))));
        out.push(("tpr", fmt(true_positive_rate(self))));
        out.push(("fpr", fmt(false_positive_rate(self))));
        out
    }

    /// `key,value` lines with a header.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("key,value\n");
        for (k, v) in self.report() {
            s.push_str(&format!("{k},{v}\n"));
        }
        s
    }
}

impl fmt::Display for ConfusionMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, v) in self.report() {
            writeln!(f, "{k:<9}{v}")?;
        }
        Ok(())
    }
}

fn check_label(label: i32) -> Result<bool, MetricsError> {
    match label {
        1 => Ok(true),
        -1 => Ok(false),
        other => Err(MetricsError::InvalidLabel(other)),
    }
}

/// Counts predictions against truths, `+1` (irregular) being positive.
pub fn confusion(predictions: &[i32], truths: &[i32]) -> Result<ConfusionMatrix, MetricsError> {
    if predictions.len() != truths.len() {
        return Err(MetricsError::LengthMismatch {
            predictions: predictions.len(),
            truths: truths.len(),
        });
    }
    let mut m = ConfusionMatrix::default();
    for (&p, &t) in predictions.iter().zip(truths) {
        match (check_label(p)?, check_label(t)?) {
            (true, true) => m.tp += 1,
            (false, false) => m.tn += 1,
            (true, false) => m.fp += 1,
            (false, true) => m.fn_ += 1,
        }
    }
    Ok(m)
}

/// `(tp + tn) / total`.
pub fn accuracy(m: &ConfusionMatrix) -> Result<f64, MetricsError> {
    match m.total() {
        0 => Err(MetricsError::Empty),
        total => Ok((m.tp + m.tn) as f64 / total as f64),
    }
}

/// `tp / (tp + fn)`, the share of irregular beats that were detected.
pub fn true_positive_rate(m: &ConfusionMatrix) -> Result<f64, MetricsError> {
    match m.positives() {
        0 => Err(MetricsError::NoPositives),
        p => Ok(m.tp as f64 / p as f64),
    }
}

/// `fp / (tn + fp)`, the share of regular beats flagged as irregular.
pub fn false_positive_rate(m: &ConfusionMatrix) -> Result<f64, MetricsError> {
    match m.negatives() {
        0 => Err(MetricsError::NoNegatives),
        n => Ok(m.fp as f64 / n as f64),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn confusion_examples() {
        let truths = [1, 1, 1, -1, -1];
        assert_eq!(confusion(&truths, &truths).unwrap(), ConfusionMatrix::new(3, 2, 0, 0));
        assert_eq!(confusion(&[1; 5], &truths).unwrap(), ConfusionMatrix::new(3, 0, 2, 0));
    }

    #[test]
    fn confusion_errors() {
        assert_eq!(
            confusion(&[1], &[1, -1]),
            Err(MetricsError::LengthMismatch {
                predictions: 1,
                truths: 2
            })
        );
        assert_eq!(confusion(&[0], &[1]), Err(MetricsError::InvalidLabel(0)));
    }

    #[test]
    fn reported_counts() {
        // 161 complexes: 72 regular of which 35 kept, 89 irregular all detected.
        let m = ConfusionMatrix::new(89, 35, 37, 0);
        assert_eq!(m.total(), 161);
        assert_eq!(m.negatives(), 72);
        let acc = accuracy(&m).unwrap();
        assert_eq!(acc, 124.0 / 161.0);
        assert_eq!((acc * 100.0).round(), 77.0);
        assert_eq!(true_positive_rate(&m).unwrap(), 1.0);
        let fpr = false_positive_rate(&m).unwrap();
        assert_eq!(fpr, 37.0 / 72.0);
        assert_eq!(format!("{fpr:.4}"), "0.5139");
    }

    #[test]
    fn rate_examples() {
        assert_eq!(accuracy(&ConfusionMatrix::new(3, 2, 0, 0)).unwrap(), 1.0);
        assert_eq!(accuracy(&ConfusionMatrix::new(1, 1, 1, 1)).unwrap(), 0.5);
        assert_eq!(true_positive_rate(&ConfusionMatrix::new(0, 5, 0, 5)).unwrap(), 0.0);
        assert_eq!(true_positive_rate(&ConfusionMatrix::new(3, 0, 0, 1)).unwrap(), 0.75);
        assert_eq!(false_positive_rate(&ConfusionMatrix::new(5, 5, 0, 0)).unwrap(), 0.0);
        assert_eq!(false_positive_rate(&ConfusionMatrix::new(0, 0, 4, 4)).unwrap(), 1.0);
    }

    #[test]
    fn degenerate_matrices_rejected() {
        assert_eq!(accuracy(&ConfusionMatrix::default()), Err(MetricsError::Empty));
        assert_eq!(
            true_positive_rate(&ConfusionMatrix::new(0, 3, 1, 0)),
            Err(MetricsError::NoPositives)
        );
        assert_eq!(
            false_positive_rate(&ConfusionMatrix::new(2, 0, 0, 1)),
            Err(MetricsError::NoNegatives)
        );
    }

    #[test]
    fn csv_report() {
        let csv = ConfusionMatrix::new(89, 35, 37, 0).to_csv();
        assert!(csv.starts_with("key,value\n"));
        assert!(csv.contains("accuracy,0.770186\n"));
        assert!(csv.contains("fpr,0.513889\n"));
        assert!(ConfusionMatrix::new(1, 0, 0, 0).to_csv().contains("fpr,nan"));
    }

    fn labels() -> impl Strategy<Value = Vec<(i32, i32)>> {
        prop::collection::vec((prop::bool::ANY, prop::bool::ANY), 1..64).prop_map(|v| {
            v.into_iter()
                .map(|(a, b)| (if a { 1 } else { -1 }, if b { 1 } else { -1 }))
                .collect()
        })
    }

    proptest! {
        #[test]
        fn rates_are_bounded_and_counts_sum(pairs in labels()) {
            let (p, t): (Vec<i32>, Vec<i32>) = pairs.iter().copied().unzip();
            let m = confusion(&p, &t).unwrap();
            prop_assert_eq!(m.total(), p.len());
            let acc = accuracy(&m).unwrap();
            prop_assert!((0.0..=1.0).contains(&acc));
            if let Ok(r) = true_positive_rate(&m) { prop_assert!((0.0..=1.0).contains(&r)); }
            if let Ok(r) = false_positive_rate(&m) { prop_assert!((0.0..=1.0).contains(&r)); }
        }

        #[test]
        fn swapping_positive_class(pairs in labels()) {
            let (p, t): (Vec<i32>, Vec<i32>) = pairs.iter().copied().unzip();
            let m = confusion(&p, &t).unwrap();
            let neg = |v: &[i32]| v.iter().map(|x| -x).collect::<Vec<_>>();
            let flipped = confusion(&neg(&p), &neg(&t)).unwrap();
            prop_assert_eq!(flipped, m.swapped());
            prop_assert_eq!(accuracy(&flipped).unwrap(), accuracy(&m).unwrap());
        }
    }
}
