//! Level-sweep ensemble selection and the comparator heuristics.

use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::cmp::Ordering;

use crate::cluster::{f_cluster, groups};
use crate::{ClassifierId, Dendrogram, DissimilarityMatrix, Error, EvalReport, Metric, Result};

/// Scores closer than this are treated as ties by [`choose_final`] and the
/// Elbow knee search.
pub const TIE_TOLERANCE: f64 = 1e-12;

/// One classifier subset produced for hierarchy level `level_k`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct EnsembleCandidate {
    pub level_k: usize,
    pub metric: Metric,
    /// One member per cluster, in cluster order.
    pub members: Vec<ClassifierId>,
    pub mean_pairwise_distance: f64,
    /// Score of the stacked candidate on VALIDATION under `metric`; filled in
    /// once the candidate has been stacked.
    pub validation_score: Option<f64>,
}

/// For every level `k = 1..=P`, cuts the dendrogram into `k` clusters and
/// keeps the best classifier of each cluster under `metric`.
///
/// Ties inside a cluster go to the smallest id in canonical order.
pub fn hierarchy_select(
    z: &Dendrogram,
    m: &DissimilarityMatrix,
    scores: &EvalReport,
    metric: Metric,
) -> Result<Vec<EnsembleCandidate>> {
    if z.leaf_ids() != m.ids() {
        return Err(Error::IdMismatch(
            "dendrogram leaves and matrix ids differ".to_string(),
        ));
    }
    let values = z
        .leaf_ids()
        .iter()
        .map(|id| {
            scores
                .get(id)
                .map(|s| s.get(metric))
                .ok_or_else(|| Error::MissingScore(id.to_string()))
        })
        .collect::<Result<Vec<f64>>>()?;
    let ids = z.leaf_ids();

    (1..=z.len())
        .map(|k| {
            let assignment = f_cluster(z, k)?;
            let picks: Vec<usize> = groups(&assignment)
                .iter()
                .map(|cluster| {
                    *cluster
                        .iter()
                        .max_by(|&&a, &&b| {
                            values[a]
                                .partial_cmp(&values[b])
                                .unwrap_or(Ordering::Equal)
                                .then_with(|| ids[b].cmp(&ids[a]))
                        })
                        .expect("clusters are non-empty")
                })
                .collect();
            Ok(EnsembleCandidate {
                level_k: k,
                metric,
                members: picks.iter().map(|&i| ids[i].clone()).collect(),
                mean_pairwise_distance: m.mean_pairwise(&picks),
                validation_score: None,
            })
        })
        .collect()
}

/// Rule for picking the deployed ensemble among the level-sweep candidates.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(tag = "rule", content = "alpha", rename_all = "SCREAMING-KEBAB-CASE"))]
pub enum FinalRule {
    MaxDiversity,
    #[default]
    MaxValidation,
    /// `alpha * validation + (1 - alpha) * mean distance`.
    Weighted(f64),
}

impl FinalRule {
    pub fn name(&self) -> String {
        match self {
            FinalRule::MaxDiversity => "MAX-DIVERSITY".to_string(),
            FinalRule::MaxValidation => "MAX-VALIDATION".to_string(),
            FinalRule::Weighted(a) => alloc::format!("WEIGHTED({a})"),
        }
    }

    /// Accepts `MAX-DIVERSITY`, `MAX-VALIDATION` and `WEIGHTED(<alpha>)`.
    pub fn parse(s: &str) -> Option<FinalRule> {
        let upper = s.trim().to_ascii_uppercase();
        match upper.as_str() {
            "MAX-DIVERSITY" => Some(FinalRule::MaxDiversity),
            "MAX-VALIDATION" => Some(FinalRule::MaxValidation),
            _ => {
                let alpha = upper.strip_prefix("WEIGHTED(")?.strip_suffix(')')?;
                let alpha: f64 = alpha.trim().parse().ok()?;
                (0.0..=1.0).contains(&alpha).then_some(FinalRule::Weighted(alpha))
            }
        }
    }
}

fn cmp_tol(a: f64, b: f64) -> Ordering {
    if (a - b).abs() <= TIE_TOLERANCE {
        Ordering::Equal
    } else {
        a.partial_cmp(&b).unwrap_or(Ordering::Equal)
    }
}

/// Picks the final candidate under `rule`.
///
/// Ties on the primary key fall back to the higher validation score, then
/// the higher mean pairwise distance, then the smaller `k`.
pub fn choose_final(candidates: &[EnsembleCandidate], rule: FinalRule) -> Result<&EnsembleCandidate> {
    if candidates.is_empty() {
        return Err(Error::Empty("candidate list"));
    }
    let needs_score = !matches!(rule, FinalRule::MaxDiversity);
    let mut keyed = Vec::with_capacity(candidates.len());
    for c in candidates {
        let val = match c.validation_score {
            Some(v) => v,
            None if needs_score => return Err(Error::MissingValidationScore(c.level_k)),
            None => f64::NEG_INFINITY,
        };
        let div = c.mean_pairwise_distance;
        let primary = match rule {
            FinalRule::MaxDiversity => div,
            FinalRule::MaxValidation => val,
            FinalRule::Weighted(alpha) => {
                if !(0.0..=1.0).contains(&alpha) {
                    return Err(Error::InvalidParameter(alloc::format!(
                        "weight {alpha} outside [0, 1]"
                    )));
                }
                alpha * val + (1.0 - alpha) * div
            }
        };
        keyed.push((primary, val, div, c));
    }
    let best = keyed
        .iter()
        .max_by(|a, b| {
            cmp_tol(a.0, b.0)
                .then_with(|| cmp_tol(a.1, b.1))
                .then_with(|| cmp_tol(a.2, b.2))
                .then_with(|| b.3.level_k.cmp(&a.3.level_k))
        })
        .expect("non-empty");
    Ok(best.3)
}

/// Total within-cluster pairwise distance `W(k)` for `k = 1..=P`.
pub fn within_cluster_curve(z: &Dendrogram, m: &DissimilarityMatrix) -> Result<Vec<f64>> {
    if z.leaf_ids() != m.ids() {
        return Err(Error::IdMismatch(
            "dendrogram leaves and matrix ids differ".to_string(),
        ));
    }
    (1..=z.len())
        .map(|k| {
            let assignment = f_cluster(z, k)?;
            let total = groups(&assignment)
                .iter()
                .map(|g| {
                    g.iter()
                        .enumerate()
                        .flat_map(|(a, &i)| g[a + 1..].iter().map(move |&j| (i, j)))
                        .map(|(i, j)| m.get(i, j))
                        .sum::<f64>()
                })
                .sum();
            Ok(total)
        })
        .collect()
}

/// Knee of a curve given as `W(1), ..., W(P)`: the interior `k` farthest
/// from the chord joining the end points, smaller `k` on ties.
pub fn elbow_from_curve(w: &[f64]) -> Result<usize> {
    let p = w.len();
    if p < 3 {
        return Err(Error::TooFewClassifiers { needed: 3, found: p });
    }
    let (x1, y1) = (1.0, w[0]);
    let (x2, y2) = (p as f64, w[p - 1]);
    let (dx, dy) = (x2 - x1, y2 - y1);
    let norm = libm::sqrt(dx * dx + dy * dy);
    let mut best_k = 2;
    let mut best = f64::NEG_INFINITY;
    for (i, &y) in w.iter().enumerate().take(p - 1).skip(1) {
        let x = (i + 1) as f64;
        let d = libm::fabs(dy * x - dx * y + x2 * y1 - y2 * x1) / norm;
        if cmp_tol(d, best) == Ordering::Greater {
            best = d;
            best_k = i + 1;
        }
    }
    Ok(best_k)
}

/// Elbow comparator: the knee of [`within_cluster_curve`].
pub fn elbow_select(z: &Dendrogram, m: &DissimilarityMatrix) -> Result<usize> {
    if z.len() < 3 {
        return Err(Error::TooFewClassifiers { needed: 3, found: z.len() });
    }
    elbow_from_curve(&within_cluster_curve(z, m)?)
}

/// Comparator ensembles built from id tokens alone.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Group {
    /// Every classifier using this algorithm.
    Algorithm(String),
    /// Every classifier using this extractor.
    Extractor(String),
    All,
}

pub fn group_heuristics(ids: &[ClassifierId], group: &Group) -> Result<Vec<ClassifierId>> {
    let pick = |token: &str, f: fn(&ClassifierId) -> &str| {
        let members: Vec<ClassifierId> = ids
            .iter()
            .filter(|id| f(id).eq_ignore_ascii_case(token))
            .cloned()
            .collect();
        if members.is_empty() {
            Err(Error::UnknownToken(token.to_string()))
        } else {
            Ok(members)
        }
    };
    match group {
        Group::Algorithm(token) => pick(token, ClassifierId::algorithm),
        Group::Extractor(token) => pick(token, ClassifierId::extractor),
        Group::All => Ok(ids.to_vec()),
    }
}

/// Accuracy of uniform random guessing over `num_classes` classes.
pub fn random_baseline(num_classes: usize) -> Result<f64> {
    if num_classes < 2 {
        return Err(Error::TooFewClasses(num_classes));
    }
    Ok(1.0 / num_classes as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::{linkage, EvalEntry, Linkage, Scores};
    use alloc::vec;

    fn id(s: &str) -> ClassifierId {
        ClassifierId::parse(s).unwrap()
    }

    fn report(ids: &[ClassifierId], acc: &[f64]) -> EvalReport {
        EvalReport {
            entries: ids
                .iter()
                .zip(acc)
                .map(|(id, &a)| EvalEntry {
                    name: id.to_string(),
                    members: vec![id.clone()],
                    scores: Scores { accuracy: a, precision: a, recall: a, f1: a },
                })
                .collect(),
        }
    }

    fn cand(k: usize, div: f64, val: Option<f64>) -> EnsembleCandidate {
        EnsembleCandidate {
            level_k: k,
            metric: Metric::Accuracy,
            members: vec![],
            mean_pairwise_distance: div,
            validation_score: val,
        }
    }

    fn worked_example() -> (Dendrogram, DissimilarityMatrix) {
        let ids = vec![id("BERT-SVM"), id("TFIDF-SVM"), id("GLOVE-LR"), id("CV-NB")];
        let m = DissimilarityMatrix::from_rows(
            ids,
            vec![
                vec![0.0, 0.6, 0.9, 0.9],
                vec![0.6, 0.0, 0.8, 0.8],
                vec![0.9, 0.8, 0.0, 0.2],
                vec![0.9, 0.8, 0.2, 0.0],
            ],
        )
        .unwrap();
        (linkage(&m, Linkage::Complete).unwrap(), m)
    }

    #[test]
    fn level_extremes() {
        let (z, m) = worked_example();
        let r = report(m.ids(), &[0.6, 0.7, 0.8, 0.75]);
        let c = hierarchy_select(&z, &m, &r, Metric::Accuracy).unwrap();
        assert_eq!(c.len(), 4);
        assert_eq!(c[0].members, vec![id("GLOVE-LR")]);
        assert_eq!(c[0].mean_pairwise_distance, 0.0);
        assert_eq!(c[3].members, m.ids().to_vec());
        assert_eq!(
            c[2].members,
            vec![id("BERT-SVM"), id("TFIDF-SVM"), id("GLOVE-LR")]
        );
    }

    #[test]
    fn tie_goes_to_canonical_order() {
        let (z, m) = worked_example();
        let r = report(m.ids(), &[0.5, 0.5, 0.5, 0.5]);
        let c = hierarchy_select(&z, &m, &r, Metric::Accuracy).unwrap();
        assert_eq!(c[0].members, vec![id("BERT-SVM")]);
        assert_eq!(c[2].members[2], id("CV-NB"));
    }

    #[test]
    fn missing_score_is_rejected() {
        let (z, m) = worked_example();
        let r = report(&m.ids()[..3], &[0.5, 0.5, 0.5]);
        assert_eq!(
            hierarchy_select(&z, &m, &r, Metric::F1).unwrap_err(),
            Error::MissingScore("CV-NB".into())
        );
    }

    #[test]
    fn levels_nest_under_a_fixed_order() {
        // Each level splits one cluster in two and the parent's winner stays
        // the winner of its half, so candidate k is always inside k + 1.
        let (z, m) = worked_example();
        let r = report(m.ids(), &[0.6, 0.7, 0.8, 0.75]);
        let c = hierarchy_select(&z, &m, &r, Metric::Accuracy).unwrap();
        for w in c.windows(2) {
            assert!(w[0].members.iter().all(|id| w[1].members.contains(id)));
        }
    }

    #[test]
    fn choose_final_rules() {
        let single = [cand(3, 0.5, Some(0.7))];
        assert_eq!(choose_final(&single, FinalRule::MaxValidation).unwrap(), &single[0]);

        let tied = [cand(2, 0.8, Some(0.8)), cand(3, 0.8, Some(0.9))];
        assert_eq!(choose_final(&tied, FinalRule::MaxDiversity).unwrap().level_k, 3);

        let c = [cand(1, 0.0, Some(0.9)), cand(2, 0.9, Some(0.9)), cand(3, 0.9, Some(0.9))];
        assert_eq!(choose_final(&c, FinalRule::MaxValidation).unwrap().level_k, 2);
        assert_eq!(choose_final(&c, FinalRule::Weighted(0.5)).unwrap().level_k, 2);

        let c = [cand(1, 0.0, Some(0.95)), cand(2, 0.9, Some(0.85))];
        assert_eq!(choose_final(&c, FinalRule::MaxValidation).unwrap().level_k, 1);
        assert_eq!(choose_final(&c, FinalRule::MaxDiversity).unwrap().level_k, 2);
        assert_eq!(choose_final(&c, FinalRule::Weighted(1.0)).unwrap().level_k, 1);
        assert_eq!(choose_final(&c, FinalRule::Weighted(0.0)).unwrap().level_k, 2);
    }

    #[test]
    fn choose_final_errors() {
        assert!(choose_final(&[], FinalRule::MaxDiversity).is_err());
        let c = [cand(1, 0.0, None), cand(2, 0.5, None)];
        assert_eq!(choose_final(&c, FinalRule::MaxDiversity).unwrap().level_k, 2);
        assert_eq!(
            choose_final(&c, FinalRule::MaxValidation).unwrap_err(),
            Error::MissingValidationScore(1)
        );
    }

    #[test]
    fn rule_names_round_trip() {
        for rule in [FinalRule::MaxDiversity, FinalRule::MaxValidation, FinalRule::Weighted(0.25)] {
            assert_eq!(FinalRule::parse(&rule.name()), Some(rule));
        }
        assert_eq!(FinalRule::parse("weighted(2)"), None);
    }

    #[test]
    fn linear_curve_knee_is_two() {
        assert_eq!(elbow_from_curve(&[5.0, 4.0, 3.0, 2.0, 1.0]).unwrap(), 2);
        assert!(elbow_from_curve(&[1.0, 0.0]).is_err());
    }

    #[test]
    fn groups_by_token() {
        let ids: Vec<ClassifierId> = ["CV", "TFIDF"]
            .iter()
            .flat_map(|e| ["NB", "LR", "KNN"].iter().map(move |a| ClassifierId::new(e, a).unwrap()))
            .collect();
        assert_eq!(group_heuristics(&ids, &Group::All).unwrap().len(), 6);
        assert_eq!(group_heuristics(&ids, &Group::Algorithm("lr".into())).unwrap().len(), 2);
        assert_eq!(group_heuristics(&ids, &Group::Extractor("CV".into())).unwrap().len(), 3);
        assert_eq!(
            group_heuristics(&ids, &Group::Algorithm("SVM".into())).unwrap_err(),
            Error::UnknownToken("SVM".into())
        );
    }

    #[test]
    fn baseline() {
        assert_eq!(random_baseline(2).unwrap(), 0.5);
        assert_eq!(random_baseline(4).unwrap(), 0.25);
        assert!(random_baseline(1).is_err());
    }
}
