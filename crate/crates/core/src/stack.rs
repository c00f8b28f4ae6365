//! Stacking: a meta-classifier trained on one-hot base predictions.

use alloc::string::ToString;
use alloc::vec::Vec;
use core::fmt;

use crate::softmax::{self, argmax, log_sum_exp, SoftmaxConfig, SoftmaxModel};
use crate::{ClassifierId, Error, Label, PredictionMatrix, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "UPPERCASE"))]
pub enum MetaKind {
    /// Softmax regression over the meta-features.
    #[default]
    Lr,
    /// Categorical naive Bayes over each member's predicted label.
    Nb,
    /// Plurality vote, smallest class index on ties.
    Vote,
}

impl MetaKind {
    pub fn as_str(self) -> &'static str {
        match self {
            MetaKind::Lr => "LR",
            MetaKind::Nb => "NB",
            MetaKind::Vote => "VOTE",
        }
    }

    pub fn parse(s: &str) -> Option<MetaKind> {
        match s.to_ascii_uppercase().as_str() {
            "LR" => Some(MetaKind::Lr),
            "NB" => Some(MetaKind::Nb),
            "VOTE" => Some(MetaKind::Vote),
            _ => None,
        }
    }
}

impl fmt::Display for MetaKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Naive Bayes over categorical features with Laplace smoothing.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct CategoricalNb {
    num_classes: usize,
    log_prior: Vec<f64>,
    /// `[member][true class][predicted class]`, flattened.
    log_likelihood: Vec<f64>,
}

impl CategoricalNb {
    fn fit(rows: &[Vec<Label>], truth: &[Label], num_classes: usize) -> Self {
        let members = rows.first().map_or(0, Vec::len);
        let c = num_classes;
        let mut class_count = alloc::vec![0usize; c];
        let mut counts = alloc::vec![0usize; members * c * c];
        for (row, &t) in rows.iter().zip(truth) {
            class_count[t] += 1;
            for (m, &v) in row.iter().enumerate() {
                counts[(m * c + t) * c + v] += 1;
            }
        }
        let n = truth.len() as f64;
        let log_prior = class_count
            .iter()
            .map(|&k| libm::log((k as f64 + 1.0) / (n + c as f64)))
            .collect();
        let log_likelihood = counts
            .iter()
            .enumerate()
            .map(|(i, &k)| {
                let t = (i / c) % c;
                libm::log((k as f64 + 1.0) / (class_count[t] as f64 + c as f64))
            })
            .collect();
        CategoricalNb {
            num_classes,
            log_prior,
            log_likelihood,
        }
    }

    fn joint(&self, row: &[Label]) -> Vec<f64> {
        let c = self.num_classes;
        (0..c)
            .map(|t| {
                self.log_prior[t]
                    + row
                        .iter()
                        .enumerate()
                        .map(|(m, &v)| self.log_likelihood[(m * c + t) * c + v])
                        .sum::<f64>()
            })
            .collect()
    }

    /// Posterior over classes given each member's predicted label.
    pub fn posterior(&self, row: &[Label]) -> Vec<f64> {
        let joint = self.joint(row);
        let lse = log_sum_exp(&joint);
        joint.iter().map(|j| libm::exp(j - lse)).collect()
    }

    fn predict(&self, row: &[Label]) -> Label {
        argmax(&self.joint(row))
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(tag = "kind", content = "params", rename_all = "UPPERCASE"))]
pub enum MetaModel {
    Lr(SoftmaxModel),
    Nb(CategoricalNb),
    Vote,
}

/// A trained stack: member list, meta-classifier and meta-feature layout.
///
/// The meta-feature layout is one block of `num_classes` one-hot columns
/// per member, in member order.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct StackedEnsemble {
    members: Vec<ClassifierId>,
    num_classes: usize,
    seed: u64,
    model: MetaModel,
}

impl StackedEnsemble {
    pub fn members(&self) -> &[ClassifierId] {
        &self.members
    }

    pub fn num_classes(&self) -> usize {
        self.num_classes
    }

    pub fn meta_kind(&self) -> MetaKind {
        match self.model {
            MetaModel::Lr(_) => MetaKind::Lr,
            MetaModel::Nb(_) => MetaKind::Nb,
            MetaModel::Vote => MetaKind::Vote,
        }
    }

    pub fn model(&self) -> &MetaModel {
        &self.model
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn meta_dimension(&self) -> usize {
        self.members.len() * self.num_classes
    }

    /// Prediction from the members' labels for one instance, in member order.
    pub fn predict_row(&self, labels: &[Label]) -> Label {
        match &self.model {
            MetaModel::Lr(m) => m.predict(&one_hot_row(labels, self.num_classes)),
            MetaModel::Nb(nb) => nb.predict(labels),
            MetaModel::Vote => plurality(labels, self.num_classes),
        }
    }
}

fn one_hot_row(labels: &[Label], num_classes: usize) -> Vec<f64> {
    let mut row = alloc::vec![0.0; labels.len() * num_classes];
    for (m, &l) in labels.iter().enumerate() {
        row[m * num_classes + l] = 1.0;
    }
    row
}

fn plurality(labels: &[Label], num_classes: usize) -> Label {
    let mut votes = alloc::vec![0usize; num_classes];
    for &l in labels {
        votes[l] += 1;
    }
    let mut best = 0;
    for (c, &v) in votes.iter().enumerate() {
        if v > votes[best] {
            best = c;
        }
    }
    best
}

/// Member labels per instance, in member order.
fn member_rows(pm: &PredictionMatrix, members: &[ClassifierId]) -> Result<Vec<Vec<Label>>> {
    let cols = members
        .iter()
        .map(|id| pm.column_of(id))
        .collect::<Result<Vec<_>>>()?;
    Ok((0..pm.len())
        .map(|i| cols.iter().map(|c| c[i]).collect())
        .collect())
}

/// One-hot meta-features: row `i` concatenates each member's one-hot
/// predicted label, in member order.
pub fn meta_features(
    pm: &PredictionMatrix,
    members: &[ClassifierId],
    num_classes: usize,
) -> Result<Vec<Vec<f64>>> {
    if num_classes < pm.num_classes() {
        return Err(Error::InvalidParameter(alloc::format!(
            "{num_classes} classes cannot encode a {}-class matrix",
            pm.num_classes()
        )));
    }
    Ok(member_rows(pm, members)?
        .iter()
        .map(|r| one_hot_row(r, num_classes))
        .collect())
}

/// Trains a meta-classifier on validation predictions with default settings.
pub fn fit_stack(
    validation: &PredictionMatrix,
    members: &[ClassifierId],
    kind: MetaKind,
    seed: u64,
) -> Result<StackedEnsemble> {
    fit_stack_with(validation, members, kind, seed, SoftmaxConfig::META).map(|(s, _)| s)
}

/// As [`fit_stack`], with explicit softmax settings; also returns the
/// training log (empty for NB and VOTE).
pub fn fit_stack_with(
    validation: &PredictionMatrix,
    members: &[ClassifierId],
    kind: MetaKind,
    seed: u64,
    config: SoftmaxConfig,
) -> Result<(StackedEnsemble, softmax::TrainLog)> {
    if members.is_empty() {
        return Err(Error::Empty("member list"));
    }
    crate::corpus::check_unique(members)?;
    let c = validation.num_classes();
    if validation.len() < c {
        return Err(Error::InvalidParameter(alloc::format!(
            "{} validation rows for {c} classes",
            validation.len()
        )));
    }
    let rows = member_rows(validation, members)?;
    let truth = validation.truth();
    let mut log = softmax::TrainLog::default();
    let model = match kind {
        MetaKind::Lr => {
            let x: Vec<Vec<f64>> = rows.iter().map(|r| one_hot_row(r, c)).collect();
            let (m, l) = softmax::fit(&x, truth, c, config)?;
            log = l;
            MetaModel::Lr(m)
        }
        MetaKind::Nb => MetaModel::Nb(CategoricalNb::fit(&rows, truth, c)),
        MetaKind::Vote => MetaModel::Vote,
    };
    Ok((
        StackedEnsemble {
            members: members.to_vec(),
            num_classes: c,
            seed,
            model,
        },
        log,
    ))
}

/// Applies a trained stack to another prediction matrix.
pub fn predict_stack(ensemble: &StackedEnsemble, pm: &PredictionMatrix) -> Result<Vec<Label>> {
    if pm.num_classes() != ensemble.num_classes {
        return Err(Error::InvalidParameter(alloc::format!(
            "stack trained for {} classes, matrix has {}",
            ensemble.num_classes,
            pm.num_classes()
        )));
    }
    for id in &ensemble.members {
        if pm.position(id).is_none() {
            return Err(Error::MissingMember(id.to_string()));
        }
    }
    Ok(member_rows(pm, &ensemble.members)?
        .iter()
        .map(|r| ensemble.predict_row(r))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::{evaluate, Split};
    use alloc::vec;

    fn id(s: &str) -> ClassifierId {
        ClassifierId::parse(s).unwrap()
    }

    fn matrix(cols: Vec<(&str, Vec<Label>)>, truth: Vec<Label>, c: usize) -> PredictionMatrix {
        let (ids, cols): (Vec<_>, Vec<_>) = cols.into_iter().map(|(n, c)| (id(n), c)).unzip();
        PredictionMatrix::new(ids, cols, truth, c, Split::Validation).unwrap()
    }

    #[test]
    fn one_hot_layout() {
        let pm = matrix(vec![("A-X", vec![1]), ("B-X", vec![0])], vec![0], 2);
        assert_eq!(meta_features(&pm, &[id("A-X")], 2).unwrap(), vec![vec![0.0, 1.0]]);
        let pm = matrix(vec![("A-X", vec![0]), ("B-X", vec![2])], vec![0], 3);
        let both = meta_features(&pm, &[id("A-X"), id("B-X")], 3).unwrap();
        assert_eq!(both, vec![vec![1.0, 0.0, 0.0, 0.0, 0.0, 1.0]]);
        let swapped = meta_features(&pm, &[id("B-X"), id("A-X")], 3).unwrap();
        assert_eq!(swapped, vec![vec![0.0, 0.0, 1.0, 1.0, 0.0, 0.0]]);
        assert_eq!(
            meta_features(&pm, &[id("C-X")], 3).unwrap_err(),
            Error::MissingMember("C-X".into())
        );
    }

    #[test]
    fn vote_of_one_is_identity() {
        let col = vec![0, 1, 1, 0, 2, 1];
        let pm = matrix(vec![("A-X", col.clone())], vec![0, 1, 2, 0, 1, 2], 3);
        let s = fit_stack(&pm, &[id("A-X")], MetaKind::Vote, 0).unwrap();
        assert_eq!(predict_stack(&s, &pm).unwrap(), col);
    }

    #[test]
    fn lr_learns_to_trust_the_correct_member() {
        let truth: Vec<Label> = (0..40).map(|i| i % 2).collect();
        let wrong: Vec<Label> = truth.iter().map(|t| 1 - t).collect();
        let pm = matrix(vec![("GOOD-X", truth.clone()), ("BAD-X", wrong)], truth.clone(), 2);
        let members = [id("GOOD-X"), id("BAD-X")];
        let (s, log) = fit_stack_with(&pm, &members, MetaKind::Lr, 0, SoftmaxConfig::META).unwrap();
        assert!(!log.diverged);
        assert!(log.loss.windows(2).all(|w| w[1] <= w[0]));
        let pred = predict_stack(&s, &pm).unwrap();
        assert_eq!(evaluate(&pred, &truth, 2).unwrap().accuracy, 1.0);
    }

    #[test]
    fn majority_of_three_is_always_right() {
        let truth: Vec<Label> = (0..30).map(|i| i % 3).collect();
        let mut cols = [truth.clone(), truth.clone(), truth.clone()];
        for i in 0..30 {
            cols[i % 3][i] = (truth[i] + 1) % 3;
        }
        let pm = matrix(
            vec![("A-X", cols[0].clone()), ("B-X", cols[1].clone()), ("C-X", cols[2].clone())],
            truth.clone(),
            3,
        );
        let s = fit_stack(&pm, &[id("A-X"), id("B-X"), id("C-X")], MetaKind::Vote, 0).unwrap();
        assert_eq!(predict_stack(&s, &pm).unwrap(), truth);
    }

    #[test]
    fn nb_posterior_normalizes() {
        let truth: Vec<Label> = (0..20).map(|i| i % 3).collect();
        let a: Vec<Label> = truth.iter().map(|t| (t + (t == &2) as usize) % 3).collect();
        let pm = matrix(vec![("A-X", a), ("B-X", truth.clone())], truth, 3);
        let s = fit_stack(&pm, &[id("A-X"), id("B-X")], MetaKind::Nb, 0).unwrap();
        let MetaModel::Nb(nb) = s.model() else { panic!() };
        for row in [[0, 0], [1, 2], [2, 1], [0, 2]] {
            let p = nb.posterior(&row);
            assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn fit_rejects_bad_inputs() {
        let pm = matrix(vec![("A-X", vec![0, 1])], vec![0, 1], 2);
        assert!(fit_stack(&pm, &[], MetaKind::Lr, 0).is_err());
        assert!(fit_stack(&pm, &[id("Z-X")], MetaKind::Lr, 0).is_err());
        let short = matrix(vec![("A-X", vec![0])], vec![0], 2);
        assert!(fit_stack(&short, &[id("A-X")], MetaKind::Lr, 0).is_err());
    }

    #[test]
    fn predict_requires_members() {
        let pm = matrix(vec![("A-X", vec![0, 1]), ("B-X", vec![0, 1])], vec![0, 1], 2);
        let s = fit_stack(&pm, &[id("B-X")], MetaKind::Vote, 0).unwrap();
        let other = matrix(vec![("A-X", vec![0, 1])], vec![0, 1], 2);
        assert_eq!(predict_stack(&s, &other).unwrap_err(), Error::MissingMember("B-X".into()));
    }
}
