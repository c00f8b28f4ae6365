//! Reference computations that share no code with the library.

#![allow(dead_code, clippy::needless_range_loop, clippy::collapsible_if)]

use std::collections::BTreeSet;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Single,
    Complete,
    Average,
    Centroid,
}

/// `(left node, right node, distance, size)` per merge step.
pub type RefMerge = (usize, usize, f64, usize);

/// Distance between two leaf sets straight from the original matrix.
///
/// Centroid uses the closed form for squared distances:
/// mean cross term minus half of each mean within term.
fn set_distance(d: &[Vec<f64>], a: &BTreeSet<usize>, b: &BTreeSet<usize>, method: Method) -> f64 {
    let cross: Vec<f64> = a.iter().flat_map(|&i| b.iter().map(move |&j| d[i][j])).collect();
    match method {
        Method::Single => cross.iter().cloned().fold(f64::INFINITY, f64::min),
        Method::Complete => cross.iter().cloned().fold(f64::NEG_INFINITY, f64::max),
        Method::Average => cross.iter().sum::<f64>() / cross.len() as f64,
        Method::Centroid => {
            let within = |s: &BTreeSet<usize>| {
                let sum: f64 = s.iter().flat_map(|&i| s.iter().map(move |&j| d[i][j])).sum();
                sum / (s.len() * s.len()) as f64
            };
            cross.iter().sum::<f64>() / cross.len() as f64 - within(a) / 2.0 - within(b) / 2.0
        }
    }
}

/// Naive agglomeration: every step recomputes all cluster distances from
/// the leaf sets and merges the smallest, ties to the smallest node pair.
pub fn brute_linkage(d: &[Vec<f64>], method: Method) -> Vec<RefMerge> {
    let p = d.len();
    let mut clusters: Vec<(usize, BTreeSet<usize>)> =
        (0..p).map(|i| (i, BTreeSet::from([i]))).collect();
    let mut out = Vec::new();
    for step in 0..p - 1 {
        let mut best: Option<(f64, usize, usize, usize, usize)> = None;
        for x in 0..clusters.len() {
            for y in x + 1..clusters.len() {
                let dist = set_distance(d, &clusters[x].1, &clusters[y].1, method);
                let lo = clusters[x].0.min(clusters[y].0);
                let hi = clusters[x].0.max(clusters[y].0);
                let take = match best {
                    None => true,
                    Some((bd, bl, bh, _, _)) => dist < bd || (dist == bd && (lo, hi) < (bl, bh)),
                };
                if take {
                    best = Some((dist, lo, hi, x, y));
                }
            }
        }
        let (dist, lo, hi, x, y) = best.unwrap();
        let merged: BTreeSet<usize> = clusters[x].1.union(&clusters[y].1).cloned().collect();
        out.push((lo, hi, dist, merged.len()));
        clusters.remove(y);
        clusters.remove(x);
        clusters.push((p + step, merged));
    }
    out
}

/// Index-by-index count of shared faults.
pub fn enumerate_double_fault(a: &[usize], b: &[usize], truth: &[usize]) -> f64 {
    let mut both = 0;
    for i in 0..truth.len() {
        if a[i] != truth[i] {
            if b[i] != truth[i] {
                both += 1;
            }
        }
    }
    both as f64 / truth.len() as f64
}

/// Metrics from an explicit confusion matrix `cm[truth][pred]`.
pub fn confusion_metrics(pred: &[usize], truth: &[usize], c: usize) -> [f64; 4] {
    let mut cm = vec![vec![0u32; c]; c];
    for (p, t) in pred.iter().zip(truth) {
        cm[*t][*p] += 1;
    }
    let diag: u32 = (0..c).map(|i| cm[i][i]).sum();
    let mut prec = Vec::new();
    let mut rec = Vec::new();
    let mut f1 = Vec::new();
    for k in 0..c {
        let col: u32 = (0..c).map(|t| cm[t][k]).sum();
        let row: u32 = cm[k].iter().sum();
        let p = if col == 0 { 0.0 } else { cm[k][k] as f64 / col as f64 };
        let r = if row == 0 { 0.0 } else { cm[k][k] as f64 / row as f64 };
        prec.push(p);
        rec.push(r);
        f1.push(if p + r == 0.0 { 0.0 } else { 2.0 * p * r / (p + r) });
    }
    let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
    [diag as f64 / pred.len() as f64, mean(&prec), mean(&rec), mean(&f1)]
}

/// Perpendicular distance of each interior point to the end-point chord,
/// via the triangle-area formula.
pub fn chord_distances(w: &[f64]) -> Vec<f64> {
    let p = w.len();
    let (ax, ay) = (1.0, w[0]);
    let (bx, by) = (p as f64, w[p - 1]);
    let base = ((bx - ax).powi(2) + (by - ay).powi(2)).sqrt();
    (0..p)
        .map(|i| {
            let (cx, cy) = ((i + 1) as f64, w[i]);
            let twice_area = ((bx - ax) * (cy - ay) - (by - ay) * (cx - ax)).abs();
            twice_area / base
        })
        .collect()
}
