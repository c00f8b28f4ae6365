//! Accuracy and macro-averaged precision, recall and F1.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::{ClassifierId, Error, Label, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum Metric {
    #[default]
    Accuracy,
    Precision,
    Recall,
    F1,
}

impl Metric {
    pub const ALL: [Metric; 4] = [Metric::Accuracy, Metric::Precision, Metric::Recall, Metric::F1];

    pub fn as_str(self) -> &'static str {
        match self {
            Metric::Accuracy => "accuracy",
            Metric::Precision => "precision",
            Metric::Recall => "recall",
            Metric::F1 => "f1",
        }
    }

    pub fn parse(s: &str) -> Option<Metric> {
        match s.to_ascii_lowercase().as_str() {
            "accuracy" | "acc" => Some(Metric::Accuracy),
            "precision" => Some(Metric::Precision),
            "recall" => Some(Metric::Recall),
            "f1" | "f1-score" => Some(Metric::F1),
            _ => None,
        }
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Scores {
    pub accuracy: f64,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

impl Scores {
    pub fn get(&self, metric: Metric) -> f64 {
        match metric {
            Metric::Accuracy => self.accuracy,
            Metric::Precision => self.precision,
            Metric::Recall => self.recall,
            Metric::F1 => self.f1,
        }
    }
}

/// Scores of one classifier or one ensemble.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct EvalEntry {
    pub name: String,
    pub members: Vec<ClassifierId>,
    pub scores: Scores,
}

#[derive(Debug, Clone, PartialEq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct EvalReport {
    pub entries: Vec<EvalEntry>,
}

impl EvalReport {
    pub fn get(&self, id: &ClassifierId) -> Option<&Scores> {
        self.entries
            .iter()
            .find(|e| e.members.len() == 1 && &e.members[0] == id)
            .map(|e| &e.scores)
    }
}

/// Scores `pred` against `truth`.
///
/// Per-class precision, recall and F1 are 0 whenever their denominator is 0;
/// macro values are unweighted means over all `num_classes` classes.
pub fn evaluate(pred: &[Label], truth: &[Label], num_classes: usize) -> Result<Scores> {
    if pred.len() != truth.len() {
        return Err(Error::LengthMismatch {
            expected: truth.len(),
            found: pred.len(),
        });
    }
    if truth.is_empty() {
        return Err(Error::Empty("prediction list"));
    }
    let mut tp = alloc::vec![0usize; num_classes];
    let mut predicted = alloc::vec![0usize; num_classes];
    let mut actual = alloc::vec![0usize; num_classes];
    for (row, (&p, &t)) in pred.iter().zip(truth).enumerate() {
        for label in [p, t] {
            if label >= num_classes {
                return Err(Error::LabelOutOfRange {
                    label,
                    num_classes,
                    row,
                });
            }
        }
        predicted[p] += 1;
        actual[t] += 1;
        if p == t {
            tp[p] += 1;
        }
    }
    let ratio = |num: usize, den: usize| if den == 0 { 0.0 } else { num as f64 / den as f64 };
    let (mut p_sum, mut r_sum, mut f_sum) = (0.0, 0.0, 0.0);
    for c in 0..num_classes {
        let precision = ratio(tp[c], predicted[c]);
        let recall = ratio(tp[c], actual[c]);
        let f1 = if precision + recall == 0.0 {
            0.0
        } else {
            2.0 * precision * recall / (precision + recall)
        };
        p_sum += precision;
        r_sum += recall;
        f_sum += f1;
    }
    let c = num_classes as f64;
    Ok(Scores {
        accuracy: tp.iter().sum::<usize>() as f64 / truth.len() as f64,
        precision: p_sum / c,
        recall: r_sum / c,
        f1: f_sum / c,
    })
}
