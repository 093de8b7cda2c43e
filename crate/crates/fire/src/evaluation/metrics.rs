//! Per-class precision/recall/F1 over binary verdicts.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::types::{Claim, Verdict};

/// Confusion counts with Factual as the positive class. The negative-class
/// metrics reuse the same counts with the roles swapped.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionCounts {
    pub true_positive: u64,
    pub false_positive: u64,
    pub false_negative: u64,
    pub true_negative: u64,
}

impl ConfusionCounts {
    pub fn total(&self) -> u64 {
        self.true_positive + self.false_positive + self.false_negative + self.true_negative
    }

    /// Counts as seen when NonFactual is treated as the positive class.
    pub fn swapped(&self) -> ConfusionCounts {
        ConfusionCounts {
            true_positive: self.true_negative,
            false_positive: self.false_negative,
            false_negative: self.false_positive,
            true_negative: self.true_positive,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct ClassMetrics {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

impl ClassMetrics {
    /// Precision and recall are zero when their denominators are empty; F1 is
    /// zero when P + R is.
    pub fn from_counts(counts: &ConfusionCounts) -> ClassMetrics {
        let tp = counts.true_positive as f64;
        let fp = counts.false_positive as f64;
        let fn_ = counts.false_negative as f64;
        let precision = if tp + fp > 0.0 { tp / (tp + fp) } else { 0.0 };
        let recall = if tp + fn_ > 0.0 { tp / (tp + fn_) } else { 0.0 };
        let f1 = if precision + recall > 0.0 {
            2.0 * precision * recall / (precision + recall)
        } else {
            0.0
        };
        ClassMetrics { precision, recall, f1 }
    }
}

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum ScoreError {
    #[error("prediction for {0:?} has no gold label")]
    MissingGold(String),
    #[error("duplicate prediction for {0:?}")]
    DuplicatePrediction(String),
}

/// Everything `score` computes in one pass.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScoreReport {
    pub counts: ConfusionCounts,
    pub true_class: ClassMetrics,
    pub false_class: ClassMetrics,
}

/// Score predictions against gold labels, yielding metrics for the Factual
/// class and the NonFactual class.
pub fn score(predictions: &[(String, Verdict)], golds: &[Claim]) -> Result<ScoreReport, ScoreError> {
    let gold_by_id: BTreeMap<&str, Verdict> = golds
        .iter()
        .filter_map(|c| c.gold_label.map(|v| (c.id.as_str(), v)))
        .collect();

    let mut counts = ConfusionCounts::default();
    let mut seen = std::collections::BTreeSet::new();
    for (id, predicted) in predictions {
        if !seen.insert(id.as_str()) {
            return Err(ScoreError::DuplicatePrediction(id.clone()));
        }
        let gold = gold_by_id.get(id.as_str()).ok_or_else(|| ScoreError::MissingGold(id.clone()))?;
        match (gold, predicted) {
            (Verdict::Factual, Verdict::Factual) => counts.true_positive += 1,
            (Verdict::NonFactual, Verdict::Factual) => counts.false_positive += 1,
            (Verdict::Factual, Verdict::NonFactual) => counts.false_negative += 1,
            (Verdict::NonFactual, Verdict::NonFactual) => counts.true_negative += 1,
        }
    }
    Ok(ScoreReport {
        counts,
        true_class: ClassMetrics::from_counts(&counts),
        false_class: ClassMetrics::from_counts(&counts.swapped()),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::types::SourceDataset;

    fn claims(factual: usize, non_factual: usize) -> Vec<Claim> {
        let mut out = Vec::new();
        for i in 0..factual {
            out.push(
                Claim::new(format!("t{i}"), format!("true claim {i}"))
                    .unwrap()
                    .with_gold(Verdict::Factual)
                    .with_source(SourceDataset::Custom),
            );
        }
        for i in 0..non_factual {
            out.push(
                Claim::new(format!("f{i}"), format!("false claim {i}"))
                    .unwrap()
                    .with_gold(Verdict::NonFactual),
            );
        }
        out
    }

    fn constant_predictions(golds: &[Claim], verdict: Verdict) -> Vec<(String, Verdict)> {
        golds.iter().map(|c| (c.id.clone(), verdict)).collect()
    }

    fn round2(x: f64) -> f64 {
        (x * 100.0 + 0.5).floor() / 100.0
    }

    #[test]
    fn always_true_on_factool_qa_counts() {
        // 177 gold-Factual, 56 gold-NonFactual.
        let golds = claims(177, 56);
        let report = score(&constant_predictions(&golds, Verdict::Factual), &golds).unwrap();
        assert_eq!(round2(report.true_class.precision), 0.76);
        assert_eq!(round2(report.true_class.recall), 1.00);
        assert_eq!(round2(report.true_class.f1), 0.86);
        assert_eq!(report.false_class.precision, 0.0);
        assert_eq!(report.false_class.recall, 0.0);
        assert_eq!(report.false_class.f1, 0.0);
    }

    #[test]
    fn always_false_on_bingcheck_counts() {
        // 100 gold-Factual, 42 gold-NonFactual.
        let golds = claims(100, 42);
        let report = score(&constant_predictions(&golds, Verdict::NonFactual), &golds).unwrap();
        assert_eq!(round2(report.false_class.precision), 0.30);
        assert_eq!(round2(report.false_class.recall), 1.00);
        assert_eq!(round2(report.false_class.f1), 0.46);
    }

    #[test]
    fn hand_computed_confusion_matrix() {
        // tp=8 fp=2 fn=1 tn=9, P=0.800 R=0.889 F1=0.842 at three decimals.
        let golds = claims(9, 11);
        let mut predictions = Vec::new();
        for i in 0..8 {
            predictions.push((format!("t{i}"), Verdict::Factual));
        }
        predictions.push(("t8".to_string(), Verdict::NonFactual));
        for i in 0..2 {
            predictions.push((format!("f{i}"), Verdict::Factual));
        }
        for i in 2..11 {
            predictions.push((format!("f{i}"), Verdict::NonFactual));
        }
        let report = score(&predictions, &golds).unwrap();
        assert_eq!(
            report.counts,
            ConfusionCounts {
                true_positive: 8,
                false_positive: 2,
                false_negative: 1,
                true_negative: 9
            }
        );
        assert!((report.true_class.precision - 0.800).abs() < 5e-4);
        assert!((report.true_class.recall - 0.889).abs() < 5e-4);
        assert!((report.true_class.f1 - 0.842).abs() < 5e-4);
        assert_eq!(report.counts.total(), 20);
    }

    #[test]
    fn degenerate_denominators_are_zero_not_nan() {
        let m = ClassMetrics::from_counts(&ConfusionCounts::default());
        assert_eq!((m.precision, m.recall, m.f1), (0.0, 0.0, 0.0));
    }

    #[test]
    fn errors_on_missing_gold_and_duplicates() {
        let golds = claims(1, 0);
        assert_eq!(
            score(&[("ghost".into(), Verdict::Factual)], &golds),
            Err(ScoreError::MissingGold("ghost".into()))
        );
        assert_eq!(
            score(
                &[("t0".into(), Verdict::Factual), ("t0".into(), Verdict::Factual)],
                &golds
            ),
            Err(ScoreError::DuplicatePrediction("t0".into()))
        );
    }

    #[test]
    fn class_swap_is_an_involution() {
        let golds = claims(7, 5);
        let predictions: Vec<(String, Verdict)> = golds
            .iter()
            .enumerate()
            .map(|(i, c)| {
                (c.id.clone(), if i % 3 == 0 { Verdict::NonFactual } else { Verdict::Factual })
            })
            .collect();
        let report = score(&predictions, &golds).unwrap();

        // Flip every gold and prediction: the True-class metrics of the
        // flipped problem equal the False-class metrics of the original.
        let flipped_golds: Vec<Claim> = golds
            .iter()
            .map(|c| {
                let mut c = c.clone();
                c.gold_label = c.gold_label.map(Verdict::flipped);
                c
            })
            .collect();
        let flipped_predictions: Vec<(String, Verdict)> =
            predictions.iter().map(|(id, v)| (id.clone(), v.flipped())).collect();
        let flipped = score(&flipped_predictions, &flipped_golds).unwrap();
        assert_eq!(flipped.true_class, report.false_class);
        assert_eq!(flipped.false_class, report.true_class);
    }
}
