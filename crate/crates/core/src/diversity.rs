//! Pairwise double-fault dissimilarity between pool members.

use alloc::string::ToString;
use alloc::vec::Vec;

use crate::corpus::check_unique;
use crate::{ClassifierId, Error, Label, PredictionMatrix, Result};

/// Fraction of instances on which both classifiers are wrong.
pub fn double_fault(pred_a: &[Label], pred_b: &[Label], truth: &[Label]) -> Result<f64> {
    check_lengths(pred_a, pred_b, truth)?;
    let both_wrong = pred_a
        .iter()
        .zip(pred_b)
        .zip(truth)
        .filter(|((a, b), t)| a != t && b != t)
        .count();
    Ok(both_wrong as f64 / truth.len() as f64)
}

/// Fraction of instances on which exactly one of the two classifiers is right.
pub fn disagreement(pred_a: &[Label], pred_b: &[Label], truth: &[Label]) -> Result<f64> {
    check_lengths(pred_a, pred_b, truth)?;
    let split = pred_a
        .iter()
        .zip(pred_b)
        .zip(truth)
        .filter(|((a, b), t)| (a == t) != (b == t))
        .count();
    Ok(split as f64 / truth.len() as f64)
}

fn check_lengths(a: &[Label], b: &[Label], truth: &[Label]) -> Result<()> {
    for p in [a, b] {
        if p.len() != truth.len() {
            return Err(Error::LengthMismatch {
                expected: truth.len(),
                found: p.len(),
            });
        }
    }
    if truth.is_empty() {
        return Err(Error::Empty("prediction list"));
    }
    Ok(())
}

/// How a pairwise diversity measure becomes a clustering distance.
///
/// With `OneMinusDoubleFault`, pairs that fail together are close and end up
/// in the same cluster. Two perfect classifiers are at distance 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "kebab-case"))]
pub enum DistanceConversion {
    #[default]
    OneMinusDoubleFault,
    /// The disagreement measure used directly as a distance.
    Disagreement,
}

impl DistanceConversion {
    pub fn distance(self, a: &[Label], b: &[Label], truth: &[Label]) -> Result<f64> {
        match self {
            DistanceConversion::OneMinusDoubleFault => Ok(1.0 - double_fault(a, b, truth)?),
            DistanceConversion::Disagreement => disagreement(a, b, truth),
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            DistanceConversion::OneMinusDoubleFault => "one-minus-double-fault",
            DistanceConversion::Disagreement => "disagreement",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s.to_ascii_lowercase().as_str() {
            "one-minus-double-fault" | "double-fault" | "df" => {
                Some(DistanceConversion::OneMinusDoubleFault)
            }
            "disagreement" => Some(DistanceConversion::Disagreement),
            _ => None,
        }
    }
}

/// Symmetric matrix of pairwise distances with entries in `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct DissimilarityMatrix {
    ids: Vec<ClassifierId>,
    /// Row-major, `ids.len()` squared.
    entries: Vec<f64>,
}

impl DissimilarityMatrix {
    /// Builds a matrix from row-major entries.
    ///
    /// Shape, range and id uniqueness are checked here; symmetry is checked
    /// by [`crate::linkage`], which is the consumer that depends on it.
    pub fn from_rows(ids: Vec<ClassifierId>, rows: Vec<Vec<f64>>) -> Result<Self> {
        let n = ids.len();
        if rows.len() != n {
            return Err(Error::NotSquare {
                rows: rows.len(),
                cols: n,
            });
        }
        if let Some(bad) = rows.iter().find(|r| r.len() != n) {
            return Err(Error::NotSquare {
                rows: n,
                cols: bad.len(),
            });
        }
        check_unique(&ids)?;
        let entries: Vec<f64> = rows.into_iter().flatten().collect();
        if let Some(pos) = entries.iter().position(|v| !(0.0..=1.0).contains(v)) {
            return Err(Error::OutOfRange {
                i: pos / n,
                j: pos % n,
            });
        }
        Ok(DissimilarityMatrix { ids, entries })
    }

    pub fn ids(&self) -> &[ClassifierId] {
        &self.ids
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.ids.len() + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        let n = self.ids.len();
        &self.entries[i * n..(i + 1) * n]
    }

    pub fn position(&self, id: &ClassifierId) -> Option<usize> {
        self.ids.iter().position(|x| x == id)
    }

    /// First `(i, j)` with `M[i][j] != M[j][i]`, if any.
    pub fn asymmetry(&self) -> Option<(usize, usize)> {
        let n = self.ids.len();
        (0..n)
            .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
            .find(|&(i, j)| self.get(i, j) != self.get(j, i))
    }

    /// Mean distance over unordered pairs of `members`; 0 for fewer than two.
    pub fn mean_pairwise(&self, members: &[usize]) -> f64 {
        let mut sum = 0.0;
        let mut pairs = 0usize;
        for (a, &i) in members.iter().enumerate() {
            for &j in &members[a + 1..] {
                sum += self.get(i, j);
                pairs += 1;
            }
        }
        if pairs == 0 {
            0.0
        } else {
            sum / pairs as f64
        }
    }

    /// Mean pairwise distance of members given by id.
    pub fn mean_pairwise_ids(&self, members: &[ClassifierId]) -> Result<f64> {
        let idx = members
            .iter()
            .map(|id| {
                self.position(id)
                    .ok_or_else(|| Error::MissingMember(id.to_string()))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(self.mean_pairwise(&idx))
    }
}

/// Pairwise distances between all columns of `pm` under `conversion`.
///
/// The diagonal is 0 and ids keep the column order of `pm`.
pub fn dissimilarity_matrix(
    pm: &PredictionMatrix,
    conversion: DistanceConversion,
) -> Result<DissimilarityMatrix> {
    let n = pm.num_classifiers();
    if n < 2 {
        return Err(Error::TooFewClassifiers { needed: 2, found: n });
    }
    let mut entries = alloc::vec![0.0; n * n];
    for i in 0..n {
        for j in i + 1..n {
            let d = conversion.distance(pm.column(i), pm.column(j), pm.truth())?;
            entries[i * n + j] = d;
            entries[j * n + i] = d;
        }
    }
    let rows = entries.chunks(n).map(<[f64]>::to_vec).collect();
    DissimilarityMatrix::from_rows(pm.ids().to_vec(), rows)
}
