use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::cmp::Ordering;

use crate::softmax::{self, argmax, log_sum_exp, SoftmaxConfig, SoftmaxModel};
use crate::{Error, Label, Result};

pub const DEFAULT_K: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Algorithm {
    /// Multinomial naive Bayes, Laplace smoothing.
    NaiveBayes,
    /// Softmax regression.
    LogisticRegression,
    /// Cosine k-nearest-neighbours.
    Knn { k: usize },
    NearestCentroid,
}

impl Algorithm {
    /// `NB`, `LR`, `KNN` (k = 5), `KNN<k>` or `NC`.
    pub fn parse(token: &str) -> Result<Self> {
        let t = token.trim().to_ascii_uppercase();
        Ok(match t.as_str() {
            "NB" => Algorithm::NaiveBayes,
            "LR" => Algorithm::LogisticRegression,
            "KNN" => Algorithm::Knn { k: DEFAULT_K },
            "NC" => Algorithm::NearestCentroid,
            other => match other.strip_prefix("KNN").map(str::parse::<usize>) {
                Some(Ok(k)) if k > 0 => Algorithm::Knn { k },
                _ => return Err(Error::UnknownAlgorithm(token.to_string())),
            },
        })
    }

    pub fn token(&self) -> String {
        match self {
            Algorithm::NaiveBayes => "NB".to_string(),
            Algorithm::LogisticRegression => "LR".to_string(),
            Algorithm::Knn { k } if *k == DEFAULT_K => "KNN".to_string(),
            Algorithm::Knn { k } => alloc::format!("KNN{k}"),
            Algorithm::NearestCentroid => "NC".to_string(),
        }
    }

    pub fn fit(
        &self,
        x: &[Vec<f64>],
        y: &[Label],
        num_classes: usize,
        lr: SoftmaxConfig,
    ) -> Result<Model> {
        if x.is_empty() || x.len() != y.len() {
            return Err(Error::LengthMismatch {
                expected: x.len(),
                found: y.len(),
            });
        }
        Ok(match self {
            Algorithm::NaiveBayes => Model::NaiveBayes(MultinomialNb::fit(x, y, num_classes)),
            Algorithm::LogisticRegression => Model::Softmax(softmax::fit(x, y, num_classes, lr)?.0),
            Algorithm::Knn { k } => Model::Knn(KnnModel::fit(x, y, num_classes, *k)),
            Algorithm::NearestCentroid => Model::Centroid(CentroidModel::fit(x, y, num_classes)),
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Model {
    NaiveBayes(MultinomialNb),
    Softmax(SoftmaxModel),
    Knn(KnnModel),
    Centroid(CentroidModel),
}

impl Model {
    pub fn predict(&self, x: &[f64]) -> Label {
        match self {
            Model::NaiveBayes(m) => m.predict(x),
            Model::Softmax(m) => m.predict(x),
            Model::Knn(m) => m.predict(x),
            Model::Centroid(m) => m.predict(x),
        }
    }
}

/// Multinomial naive Bayes with add-one smoothing.
///
/// Features that take negative values (the dense extractor) are split into
/// positive and negative parts so that every input is a non-negative count.
#[derive(Debug, Clone, PartialEq)]
pub struct MultinomialNb {
    num_classes: usize,
    signed: bool,
    log_prior: Vec<f64>,
    /// `num_classes` rows of per-feature log probabilities.
    log_prob: Vec<f64>,
}

impl MultinomialNb {
    fn expand(&self, x: &[f64]) -> Vec<f64> {
        expand(x, self.signed)
    }

    pub fn fit(x: &[Vec<f64>], y: &[Label], num_classes: usize) -> Self {
        let signed = x.iter().flatten().any(|v| *v < 0.0);
        let width = x[0].len() * if signed { 2 } else { 1 };
        let mut totals = alloc::vec![0.0; num_classes * width];
        let mut class_count = alloc::vec![0usize; num_classes];
        for (row, &label) in x.iter().zip(y) {
            class_count[label] += 1;
            let t = &mut totals[label * width..(label + 1) * width];
            for (acc, v) in t.iter_mut().zip(expand(row, signed)) {
                *acc += v;
            }
        }
        let mut log_prob = Vec::with_capacity(totals.len());
        for c in 0..num_classes {
            let t = &totals[c * width..(c + 1) * width];
            let denom: f64 = t.iter().sum::<f64>() + width as f64;
            log_prob.extend(t.iter().map(|v| libm::log((v + 1.0) / denom)));
        }
        let n = y.len() as f64;
        let log_prior = class_count
            .iter()
            .map(|&k| libm::log(k.max(1) as f64 / n))
            .collect();
        MultinomialNb {
            num_classes,
            signed,
            log_prior,
            log_prob,
        }
    }

    fn joint(&self, x: &[f64]) -> Vec<f64> {
        let x = self.expand(x);
        let width = x.len();
        (0..self.num_classes)
            .map(|c| {
                let lp = &self.log_prob[c * width..(c + 1) * width];
                self.log_prior[c] + lp.iter().zip(&x).map(|(l, v)| l * v).sum::<f64>()
            })
            .collect()
    }

    /// Class posterior for one document.
    pub fn posterior(&self, x: &[f64]) -> Vec<f64> {
        let j = self.joint(x);
        let lse = log_sum_exp(&j);
        j.iter().map(|v| libm::exp(v - lse)).collect()
    }

    pub fn predict(&self, x: &[f64]) -> Label {
        argmax(&self.joint(x))
    }
}

fn expand(x: &[f64], signed: bool) -> Vec<f64> {
    if !signed {
        return x.iter().map(|v| v.max(0.0)).collect();
    }
    x.iter()
        .map(|v| v.max(0.0))
        .chain(x.iter().map(|v| (-v).max(0.0)))
        .collect()
}

fn unit(x: &[f64]) -> Vec<f64> {
    let n = libm::sqrt(x.iter().map(|v| v * v).sum::<f64>());
    if n > 0.0 {
        x.iter().map(|v| v / n).collect()
    } else {
        x.to_vec()
    }
}

/// Cosine k-NN. Neighbour ties go to the earlier training row, vote ties to
/// the smaller class index.
#[derive(Debug, Clone, PartialEq)]
pub struct KnnModel {
    k: usize,
    num_classes: usize,
    rows: Vec<Vec<f64>>,
    labels: Vec<Label>,
}

impl KnnModel {
    pub fn fit(x: &[Vec<f64>], y: &[Label], num_classes: usize, k: usize) -> Self {
        KnnModel {
            k,
            num_classes,
            rows: x.iter().map(|r| unit(r)).collect(),
            labels: y.to_vec(),
        }
    }

    pub fn predict(&self, x: &[f64]) -> Label {
        let q = unit(x);
        let mut sims: Vec<(f64, usize)> = self
            .rows
            .iter()
            .enumerate()
            .map(|(i, r)| (r.iter().zip(&q).map(|(a, b)| a * b).sum(), i))
            .collect();
        sims.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap_or(Ordering::Equal).then(a.1.cmp(&b.1)));
        let mut votes = alloc::vec![0usize; self.num_classes];
        for &(_, i) in sims.iter().take(self.k) {
            votes[self.labels[i]] += 1;
        }
        let mut best = 0;
        for (c, &v) in votes.iter().enumerate() {
            if v > votes[best] {
                best = c;
            }
        }
        best
    }
}

/// Nearest class centroid of unit-normalized rows, Euclidean distance.
#[derive(Debug, Clone, PartialEq)]
pub struct CentroidModel {
    centroids: Vec<Vec<f64>>,
}

impl CentroidModel {
    pub fn fit(x: &[Vec<f64>], y: &[Label], num_classes: usize) -> Self {
        let dim = x[0].len();
        let mut sums = alloc::vec![alloc::vec![0.0; dim]; num_classes];
        let mut counts = alloc::vec![0usize; num_classes];
        for (row, &label) in x.iter().zip(y) {
            counts[label] += 1;
            for (s, v) in sums[label].iter_mut().zip(unit(row)) {
                *s += v;
            }
        }
        for (s, &n) in sums.iter_mut().zip(&counts) {
            if n > 0 {
                s.iter_mut().for_each(|v| *v /= n as f64);
            } else {
                s.iter_mut().for_each(|v| *v = f64::INFINITY);
            }
        }
        CentroidModel { centroids: sums }
    }

    pub fn predict(&self, x: &[f64]) -> Label {
        let q = unit(x);
        let d: Vec<f64> = self
            .centroids
            .iter()
            .map(|c| -c.iter().zip(&q).map(|(a, b)| (a - b) * (a - b)).sum::<f64>())
            .collect();
        argmax(&d)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn data() -> (Vec<Vec<f64>>, Vec<Label>) {
        (
            vec![
                vec![3.0, 0.0, 1.0],
                vec![2.0, 1.0, 0.0],
                vec![0.0, 3.0, 1.0],
                vec![1.0, 2.0, 0.0],
                vec![0.0, 0.0, 4.0],
                vec![0.0, 1.0, 3.0],
            ],
            vec![0, 0, 1, 1, 2, 2],
        )
    }

    #[test]
    fn every_learner_fits_separable_data() {
        let (x, y) = data();
        for token in ["NB", "LR", "KNN1", "NC"] {
            let alg = Algorithm::parse(token).unwrap();
            let m = alg.fit(&x, &y, 3, SoftmaxConfig::BASE).unwrap();
            let pred: Vec<Label> = x.iter().map(|r| m.predict(r)).collect();
            assert_eq!(pred, y, "{token}");
        }
    }

    #[test]
    fn nb_posterior_sums_to_one() {
        let (x, y) = data();
        let nb = MultinomialNb::fit(&x, &y, 3);
        for r in &x {
            assert!((nb.posterior(r).iter().sum::<f64>() - 1.0).abs() < 1e-9);
        }
        let signed = vec![vec![0.5, -0.5], vec![-0.3, 0.2], vec![0.1, 0.9]];
        let nb = MultinomialNb::fit(&signed, &[0, 1, 1], 2);
        assert!(nb.signed);
        for r in &signed {
            assert!((nb.posterior(r).iter().sum::<f64>() - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn knn_vote_tie_goes_to_smaller_class() {
        let x = vec![vec![1.0, 0.0], vec![0.0, 1.0]];
        let m = KnnModel::fit(&x, &[1, 0], 2, 2);
        assert_eq!(m.predict(&[1.0, 1.0]), 0);
    }

    #[test]
    fn algorithm_tokens() {
        assert_eq!(Algorithm::parse("knn").unwrap(), Algorithm::Knn { k: 5 });
        assert_eq!(Algorithm::parse("KNN3").unwrap().token(), "KNN3");
        assert_eq!(Algorithm::parse("KNN5").unwrap().token(), "KNN");
        assert_eq!(Algorithm::parse("SVM").unwrap_err(), Error::UnknownAlgorithm("SVM".into()));
    }
}
