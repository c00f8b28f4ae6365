//! Selection over a validation prediction matrix, end to end.

use alloc::collections::BTreeMap;
use alloc::string::ToString;
use alloc::vec::Vec;

use crate::{
    choose_final, dissimilarity_matrix, evaluate, fit_stack, hierarchy_select, linkage,
    predict_stack, ClassifierId, Dendrogram, DissimilarityMatrix, DistanceConversion,
    EnsembleCandidate, EvalEntry, EvalReport, FinalRule, Linkage, MetaKind, Metric,
    PredictionMatrix, Result, Scores, StackedEnsemble,
};

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SelectionConfig {
    pub linkage: Linkage,
    pub conversion: DistanceConversion,
    /// Metric whose candidates feed the final choice.
    pub metric: Metric,
    pub rule: FinalRule,
    pub meta_kind: MetaKind,
    pub seed: u64,
}

impl Default for SelectionConfig {
    fn default() -> Self {
        SelectionConfig {
            linkage: Linkage::Complete,
            conversion: DistanceConversion::OneMinusDoubleFault,
            metric: Metric::Accuracy,
            rule: FinalRule::MaxValidation,
            meta_kind: MetaKind::Lr,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SelectionOutcome {
    pub pool_scores: EvalReport,
    pub matrix: DissimilarityMatrix,
    pub dendrogram: Dendrogram,
    /// Level-sweep candidates for every metric, with stacked validation
    /// scores filled in.
    pub candidates: Vec<(Metric, Vec<EnsembleCandidate>)>,
    pub chosen: EnsembleCandidate,
    pub stack: StackedEnsemble,
}

impl SelectionOutcome {
    pub fn candidates_for(&self, metric: Metric) -> &[EnsembleCandidate] {
        self.candidates
            .iter()
            .find(|(m, _)| *m == metric)
            .map(|(_, c)| c.as_slice())
            .unwrap_or(&[])
    }
}

/// Per-classifier scores of every column.
pub fn score_pool(pm: &PredictionMatrix) -> Result<EvalReport> {
    let entries = pm
        .ids()
        .iter()
        .zip(pm.columns())
        .map(|(id, col)| {
            Ok(EvalEntry {
                name: id.to_string(),
                members: alloc::vec![id.clone()],
                scores: evaluate(col, pm.truth(), pm.num_classes())?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(EvalReport { entries })
}

/// Seed for the stack fitted at level `k`.
pub fn stack_seed(seed: u64, k: usize) -> u64 {
    seed.wrapping_mul(0x9e37_79b9_7f4a_7c15) ^ k as u64
}

/// Fits a stack on `pm` and scores it on the same rows.
pub fn stack_and_score(
    pm: &PredictionMatrix,
    members: &[ClassifierId],
    kind: MetaKind,
    seed: u64,
) -> Result<(StackedEnsemble, Scores)> {
    let stack = fit_stack(pm, members, kind, seed)?;
    let pred = predict_stack(&stack, pm)?;
    let scores = evaluate(&pred, pm.truth(), pm.num_classes())?;
    Ok((stack, scores))
}

/// Runs the level sweep for all four metrics, stacks every candidate on
/// the validation rows, and picks the final ensemble among the candidates
/// of `config.metric`.
pub fn select_ensemble(validation: &PredictionMatrix, config: &SelectionConfig) -> Result<SelectionOutcome> {
    let pool_scores = score_pool(validation)?;
    let matrix = dissimilarity_matrix(validation, config.conversion)?;
    let dendrogram = linkage(&matrix, config.linkage)?;

    let mut stacked: BTreeMap<Vec<ClassifierId>, Scores> = BTreeMap::new();
    let mut candidates = Vec::with_capacity(Metric::ALL.len());
    for metric in Metric::ALL {
        let mut level = hierarchy_select(&dendrogram, &matrix, &pool_scores, metric)?;
        for c in level.iter_mut() {
            let scores = match stacked.get(&c.members) {
                Some(s) => *s,
                None => {
                    let seed = stack_seed(config.seed, c.level_k);
                    let (_, s) = stack_and_score(validation, &c.members, config.meta_kind, seed)?;
                    stacked.insert(c.members.clone(), s);
                    s
                }
            };
            c.validation_score = Some(scores.get(metric));
        }
        candidates.push((metric, level));
    }

    let primary = &candidates
        .iter()
        .find(|(m, _)| *m == config.metric)
        .expect("all metrics swept")
        .1;
    let chosen = choose_final(primary, config.rule)?.clone();
    let stack = fit_stack(
        validation,
        &chosen.members,
        config.meta_kind,
        stack_seed(config.seed, chosen.level_k),
    )?;
    Ok(SelectionOutcome {
        pool_scores,
        matrix,
        dendrogram,
        candidates,
        chosen,
        stack,
    })
}
