use alloc::string::ToString;
use alloc::vec::Vec;

use crate::corpus::check_unique;
use crate::{ClassifierId, Error, Label, Result, Split};

/// Predicted labels of every pool member over one fixed set of instances.
///
/// Stored column-major: one column per classifier, in `ids` order.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PredictionMatrix {
    ids: Vec<ClassifierId>,
    columns: Vec<Vec<Label>>,
    truth: Vec<Label>,
    num_classes: usize,
    split: Split,
}

impl PredictionMatrix {
    pub fn new(
        ids: Vec<ClassifierId>,
        columns: Vec<Vec<Label>>,
        truth: Vec<Label>,
        num_classes: usize,
        split: Split,
    ) -> Result<Self> {
        if num_classes < 2 {
            return Err(Error::TooFewClasses(num_classes));
        }
        if ids.len() != columns.len() {
            return Err(Error::LengthMismatch {
                expected: ids.len(),
                found: columns.len(),
            });
        }
        check_unique(&ids)?;
        for col in &columns {
            if col.len() != truth.len() {
                return Err(Error::LengthMismatch {
                    expected: truth.len(),
                    found: col.len(),
                });
            }
        }
        for (row, &label) in truth.iter().enumerate() {
            if label >= num_classes {
                return Err(Error::LabelOutOfRange { label, num_classes, row });
            }
        }
        for col in &columns {
            if let Some((row, &label)) = col.iter().enumerate().find(|(_, l)| **l >= num_classes) {
                return Err(Error::LabelOutOfRange { label, num_classes, row });
            }
        }
        Ok(PredictionMatrix {
            ids,
            columns,
            truth,
            num_classes,
            split,
        })
    }

    pub fn ids(&self) -> &[ClassifierId] {
        &self.ids
    }

    pub fn truth(&self) -> &[Label] {
        &self.truth
    }

    pub fn num_classes(&self) -> usize {
        self.num_classes
    }

    pub fn split(&self) -> Split {
        self.split
    }

    /// Number of instances (rows).
    pub fn len(&self) -> usize {
        self.truth.len()
    }

    pub fn is_empty(&self) -> bool {
        self.truth.is_empty()
    }

    pub fn num_classifiers(&self) -> usize {
        self.ids.len()
    }

    pub fn column(&self, j: usize) -> &[Label] {
        &self.columns[j]
    }

    pub fn columns(&self) -> &[Vec<Label>] {
        &self.columns
    }

    pub fn position(&self, id: &ClassifierId) -> Option<usize> {
        self.ids.iter().position(|i| i == id)
    }

    pub fn column_of(&self, id: &ClassifierId) -> Result<&[Label]> {
        self.position(id)
            .map(|j| self.column(j))
            .ok_or_else(|| Error::MissingMember(id.to_string()))
    }

    pub fn get(&self, row: usize, col: usize) -> Label {
        self.columns[col][row]
    }

    /// Keeps only `members`, in the given order.
    pub fn restrict(&self, members: &[ClassifierId]) -> Result<PredictionMatrix> {
        let columns = members
            .iter()
            .map(|id| self.column_of(id).map(<[Label]>::to_vec))
            .collect::<Result<Vec<_>>>()?;
        PredictionMatrix::new(
            members.to_vec(),
            columns,
            self.truth.clone(),
            self.num_classes,
            self.split,
        )
    }
}
