//! Synthetic prediction matrices with known structure.

#![allow(dead_code)]

use divsel_core::{ClassifierId, PredictionMatrix, Split};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn id(s: &str) -> ClassifierId {
    ClassifierId::parse(s).unwrap()
}

/// Four classifiers shaped like the worked dendrogram example: GLOVE-LR and
/// CV-NB fail on overlapping instances, the two SVMs fail elsewhere, and
/// GLOVE-LR is the more accurate of the close pair.
pub fn worked_example_validation() -> PredictionMatrix {
    let n = 20;
    let truth: Vec<usize> = (0..n).map(|i| i % 2).collect();
    let faulty = |wrong: &[usize]| -> Vec<usize> {
        truth
            .iter()
            .enumerate()
            .map(|(i, &t)| if wrong.contains(&i) { 1 - t } else { t })
            .collect()
    };
    PredictionMatrix::new(
        vec![id("BERT-SVM"), id("TFIDF-SVM"), id("GLOVE-LR"), id("CV-NB")],
        vec![
            faulty(&[0, 1, 2, 3]),
            faulty(&[4, 5, 6, 7]),
            faulty(&[8, 9, 10]),
            faulty(&[8, 9, 10, 11]),
        ],
        truth.clone(),
        2,
        Split::Validation,
    )
    .unwrap()
}

pub const GROUP_ERROR_RATES: [f64; 3] = [0.15, 0.20, 0.25];

/// Twelve classifiers in three behaviour groups of four identical columns.
/// Group `g` is wrong on its own disjoint block of instances, sized by
/// [`GROUP_ERROR_RATES`]. Ids are `E<j>-G<g>`.
pub fn redundant_pool(n: usize, split: Split, seed: u64) -> PredictionMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let truth: Vec<usize> = (0..n).map(|_| rng.gen_range(0..2)).collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut rng);
    let mut ids = Vec::new();
    let mut columns = Vec::new();
    let mut start = 0;
    for (g, rate) in GROUP_ERROR_RATES.iter().enumerate() {
        let count = (rate * n as f64).round() as usize;
        let wrong = &order[start..start + count];
        start += count;
        let mut col = truth.clone();
        for &i in wrong {
            col[i] = 1 - col[i];
        }
        for j in 1..=4 {
            ids.push(id(&format!("E{j}-G{}", g + 1)));
            columns.push(col.clone());
        }
    }
    PredictionMatrix::new(ids, columns, truth, 2, split).unwrap()
}

pub fn group_of(id: &ClassifierId) -> &str {
    id.algorithm()
}
