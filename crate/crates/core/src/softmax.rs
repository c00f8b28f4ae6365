//! Multinomial logistic (softmax) regression trained by full-batch gradient
//! descent. Shared by the `LR` base learner and the `LR` meta-classifier.
//!
//! Input rows are scaled to L2 norm [`ROW_NORM`] before use. The Hessian of
//! the objective is then bounded by `(ROW_NORM^2 + 1) / 2 + l2`, so any step
//! below the inverse of half that bound (0.4 for the defaults) decreases the
//! objective monotonically.

use alloc::vec::Vec;

use crate::{Error, Label, Result};

/// Norm every non-zero input row is scaled to.
pub const ROW_NORM: f64 = 3.0;

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SoftmaxConfig {
    pub step: f64,
    pub epochs: usize,
    pub l2: f64,
}

impl SoftmaxConfig {
    /// Base-learner defaults.
    pub const BASE: SoftmaxConfig = SoftmaxConfig {
        step: 0.1,
        epochs: 300,
        l2: 1e-4,
    };
    /// Meta-classifier defaults.
    pub const META: SoftmaxConfig = SoftmaxConfig {
        step: 0.1,
        epochs: 500,
        l2: 1e-4,
    };
}

impl Default for SoftmaxConfig {
    fn default() -> Self {
        SoftmaxConfig::BASE
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SoftmaxModel {
    num_classes: usize,
    dim: usize,
    /// `num_classes` rows of `dim + 1` weights; the last one is the bias.
    weights: Vec<f64>,
}

/// Objective value before the first update and after every accepted epoch.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct TrainLog {
    pub loss: Vec<f64>,
    /// Set when an epoch increased the objective; training stopped there and
    /// kept the parameters from before that epoch.
    pub diverged: bool,
}

impl SoftmaxModel {
    pub fn num_classes(&self) -> usize {
        self.num_classes
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Class logits for one raw (unscaled) row.
    pub fn logits(&self, x: &[f64]) -> Vec<f64> {
        let scale = inv_norm(x);
        self.logits_scaled(x, scale)
    }

    fn logits_scaled(&self, x: &[f64], scale: f64) -> Vec<f64> {
        let stride = self.dim + 1;
        (0..self.num_classes)
            .map(|c| {
                let w = &self.weights[c * stride..(c + 1) * stride];
                let dot: f64 = w[..self.dim].iter().zip(x).map(|(a, b)| a * b).sum();
                dot * scale + w[self.dim]
            })
            .collect()
    }

    pub fn probabilities(&self, x: &[f64]) -> Vec<f64> {
        softmax(&self.logits(x))
    }

    /// Arg-max class, smallest index on ties.
    pub fn predict(&self, x: &[f64]) -> Label {
        argmax(&self.logits(x))
    }

    /// Mean cross-entropy plus `l2 / 2 * ||W||^2` (bias excluded).
    pub fn objective(&self, x: &[Vec<f64>], y: &[Label], l2: f64) -> f64 {
        let scales: Vec<f64> = x.iter().map(|r| inv_norm(r)).collect();
        self.objective_scaled(x, &scales, y, l2)
    }

    fn objective_scaled(&self, x: &[Vec<f64>], scales: &[f64], y: &[Label], l2: f64) -> f64 {
        let ce: f64 = x
            .iter()
            .zip(scales)
            .zip(y)
            .map(|((row, &s), &label)| {
                let z = self.logits_scaled(row, s);
                log_sum_exp(&z) - z[label]
            })
            .sum::<f64>()
            / x.len() as f64;
        ce + 0.5 * l2 * self.penalty()
    }

    fn penalty(&self) -> f64 {
        let stride = self.dim + 1;
        self.weights
            .iter()
            .enumerate()
            .filter(|(i, _)| i % stride != self.dim)
            .map(|(_, w)| w * w)
            .sum()
    }
}

/// Fits from zero initialization.
pub fn fit(
    x: &[Vec<f64>],
    y: &[Label],
    num_classes: usize,
    config: SoftmaxConfig,
) -> Result<(SoftmaxModel, TrainLog)> {
    if x.is_empty() {
        return Err(Error::Empty("training set"));
    }
    if x.len() != y.len() {
        return Err(Error::LengthMismatch {
            expected: x.len(),
            found: y.len(),
        });
    }
    let dim = x[0].len();
    if let Some(bad) = x.iter().find(|r| r.len() != dim) {
        return Err(Error::LengthMismatch {
            expected: dim,
            found: bad.len(),
        });
    }
    if let Some((row, &label)) = y.iter().enumerate().find(|(_, l)| **l >= num_classes) {
        return Err(Error::LabelOutOfRange {
            label,
            num_classes,
            row,
        });
    }
    if !(config.step > 0.0 && config.l2 >= 0.0) {
        return Err(Error::InvalidParameter(alloc::format!("{config:?}")));
    }

    let stride = dim + 1;
    let mut model = SoftmaxModel {
        num_classes,
        dim,
        weights: alloc::vec![0.0; num_classes * stride],
    };
    let scales: Vec<f64> = x.iter().map(|r| inv_norm(r)).collect();
    let n = x.len() as f64;
    let mut log = TrainLog::default();
    let mut loss = model.objective_scaled(x, &scales, y, config.l2);
    log.loss.push(loss);
    let mut grad = alloc::vec![0.0; model.weights.len()];

    for _ in 0..config.epochs {
        grad.iter_mut().for_each(|g| *g = 0.0);
        for ((row, &s), &label) in x.iter().zip(&scales).zip(y) {
            let p = softmax(&model.logits_scaled(row, s));
            for (c, pc) in p.iter().enumerate() {
                let err = (pc - if c == label { 1.0 } else { 0.0 }) / n;
                let g = &mut grad[c * stride..(c + 1) * stride];
                for (gj, xj) in g[..dim].iter_mut().zip(row) {
                    *gj += err * xj * s;
                }
                g[dim] += err;
            }
        }
        let previous = model.weights.clone();
        for (i, (w, g)) in model.weights.iter_mut().zip(&grad).enumerate() {
            let reg = if i % stride == dim { 0.0 } else { config.l2 * *w };
            *w -= config.step * (g + reg);
        }
        let next = model.objective_scaled(x, &scales, y, config.l2);
        if !next.is_finite() || next > loss + 1e-12 * loss.abs().max(1.0) {
            model.weights = previous;
            log.diverged = true;
            break;
        }
        loss = next;
        log.loss.push(loss);
    }
    Ok((model, log))
}

fn inv_norm(x: &[f64]) -> f64 {
    let n = libm::sqrt(x.iter().map(|v| v * v).sum::<f64>());
    if n > 0.0 {
        ROW_NORM / n
    } else {
        0.0
    }
}

pub(crate) fn log_sum_exp(z: &[f64]) -> f64 {
    let max = z.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return max;
    }
    max + libm::log(z.iter().map(|v| libm::exp(v - max)).sum::<f64>())
}

pub(crate) fn softmax(z: &[f64]) -> Vec<f64> {
    let lse = log_sum_exp(z);
    z.iter().map(|v| libm::exp(v - lse)).collect()
}

/// Index of the largest value; the first one on ties.
pub(crate) fn argmax(v: &[f64]) -> usize {
    let mut best = 0;
    for (i, x) in v.iter().enumerate().skip(1) {
        if *x > v[best] {
            best = i;
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn toy() -> (Vec<Vec<f64>>, Vec<Label>) {
        let x = vec![
            vec![3.0, 0.0, 1.0],
            vec![2.0, 0.0, 1.0],
            vec![0.0, 4.0, 1.0],
            vec![0.0, 1.0, 2.0],
            vec![1.0, 1.0, 0.0],
        ];
        (x, vec![0, 0, 1, 1, 0])
    }

    #[test]
    fn objective_decreases_monotonically() {
        let (x, y) = toy();
        let (model, log) = fit(&x, &y, 2, SoftmaxConfig::BASE).unwrap();
        assert!(!log.diverged);
        assert_eq!(log.loss.len(), 301);
        assert!((log.loss[0] - libm::log(2.0)).abs() < 1e-12);
        assert!(log.loss.windows(2).all(|w| w[1] <= w[0]));
        for (row, &label) in x.iter().zip(&y) {
            assert_eq!(model.predict(row), label);
        }
    }

    #[test]
    fn oversized_step_is_diagnosed() {
        // identical rows with conflicting labels: the optimum is finite and
        // a huge step overshoots it
        let x = vec![vec![1.0, 0.0], vec![1.0, 0.0], vec![1.0, 0.0], vec![0.0, 1.0]];
        let y = vec![0, 0, 1, 1];
        let cfg = SoftmaxConfig { step: 50.0, epochs: 50, l2: 0.0 };
        let (model, log) = fit(&x, &y, 2, cfg).unwrap();
        assert!(log.diverged);
        let last = *log.loss.last().unwrap();
        assert!((model.objective(&x, &y, 0.0) - last).abs() < 1e-12);
    }

    #[test]
    fn probabilities_normalize() {
        let (x, y) = toy();
        let (model, _) = fit(&x, &y, 3, SoftmaxConfig::BASE).unwrap();
        for row in &x {
            let p = model.probabilities(row);
            assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn argmax_prefers_first() {
        assert_eq!(argmax(&[0.5, 0.5, 0.1]), 0);
        assert_eq!(argmax(&[0.1, 0.5, 0.5]), 1);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(fit(&[], &[], 2, SoftmaxConfig::BASE).is_err());
        assert!(fit(&[vec![1.0]], &[2], 2, SoftmaxConfig::BASE).is_err());
        assert!(fit(&[vec![1.0], vec![1.0, 2.0]], &[0, 1], 2, SoftmaxConfig::BASE).is_err());
    }
}
