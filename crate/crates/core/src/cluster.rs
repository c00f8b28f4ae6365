//! Agglomerative hierarchical clustering and flat cuts.
//!
//! Nodes are numbered scipy-style: leaves `0..P`, then internal node
//! `P + s` for merge step `s`.

use alloc::vec::Vec;
use core::fmt;

use crate::{ClassifierId, DissimilarityMatrix, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "SCREAMING_SNAKE_CASE"))]
pub enum Linkage {
    Single,
    #[default]
    Complete,
    Average,
    /// Lance-Williams centroid update, reading entries as squared distances.
    /// May produce inversions.
    Centroid,
}

impl Linkage {
    pub const ALL: [Linkage; 4] = [
        Linkage::Single,
        Linkage::Complete,
        Linkage::Average,
        Linkage::Centroid,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Linkage::Single => "SINGLE",
            Linkage::Complete => "COMPLETE",
            Linkage::Average => "AVERAGE",
            Linkage::Centroid => "CENTROID",
        }
    }

    pub fn parse(s: &str) -> Option<Linkage> {
        match s.to_ascii_uppercase().as_str() {
            "SINGLE" => Some(Linkage::Single),
            "COMPLETE" => Some(Linkage::Complete),
            "AVERAGE" => Some(Linkage::Average),
            "CENTROID" => Some(Linkage::Centroid),
            _ => None,
        }
    }

    /// Distance from the union of `a` and `b` to another cluster `x`.
    #[inline]
    fn update(self, d_ax: f64, d_bx: f64, d_ab: f64, n_a: usize, n_b: usize) -> f64 {
        match self {
            Linkage::Single => d_ax.min(d_bx),
            Linkage::Complete => d_ax.max(d_bx),
            Linkage::Average => {
                let (na, nb) = (n_a as f64, n_b as f64);
                (na * d_ax + nb * d_bx) / (na + nb)
            }
            Linkage::Centroid => {
                let (na, nb) = (n_a as f64, n_b as f64);
                let n = na + nb;
                (na * d_ax + nb * d_bx) / n - na * nb * d_ab / (n * n)
            }
        }
    }
}

impl fmt::Display for Linkage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Merge {
    /// Smaller node index of the pair.
    pub left: usize,
    pub right: usize,
    pub distance: f64,
    pub size: usize,
}

/// Merge tree over the pool (`P - 1` merge steps).
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct Dendrogram {
    leaf_ids: Vec<ClassifierId>,
    merges: Vec<Merge>,
}

impl Dendrogram {
    /// Validates a merge list: each non-root node is used exactly once,
    /// children precede parents, and sizes add up.
    pub fn from_parts(leaf_ids: Vec<ClassifierId>, merges: Vec<Merge>) -> Result<Self> {
        let p = leaf_ids.len();
        if p < 2 {
            return Err(Error::TooFewClassifiers { needed: 2, found: p });
        }
        if merges.len() != p - 1 {
            return Err(Error::LengthMismatch {
                expected: p - 1,
                found: merges.len(),
            });
        }
        let mut size = alloc::vec![1usize; p];
        let mut used = alloc::vec![false; 2 * p - 1];
        for (s, m) in merges.iter().enumerate() {
            let node = p + s;
            for child in [m.left, m.right] {
                if child >= node || used[child] {
                    return Err(Error::InvalidParameter(alloc::format!(
                        "merge {s} reuses or forward-references node {child}"
                    )));
                }
                used[child] = true;
            }
            if m.left == m.right || m.size != size[m.left] + size[m.right] {
                return Err(Error::InvalidParameter(alloc::format!(
                    "merge {s} has inconsistent children or size"
                )));
            }
            size.push(m.size);
        }
        Ok(Dendrogram { leaf_ids, merges })
    }

    pub fn leaf_ids(&self) -> &[ClassifierId] {
        &self.leaf_ids
    }

    pub fn merges(&self) -> &[Merge] {
        &self.merges
    }

    /// Number of leaves.
    pub fn len(&self) -> usize {
        self.leaf_ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.leaf_ids.is_empty()
    }

    /// Merge steps whose distance is below the previous step's.
    pub fn inversions(&self) -> Vec<usize> {
        self.merges
            .windows(2)
            .enumerate()
            .filter(|(_, w)| w[1].distance < w[0].distance)
            .map(|(s, _)| s + 1)
            .collect()
    }

    pub fn is_monotone(&self) -> bool {
        self.inversions().is_empty()
    }

    /// See [`f_cluster`].
    pub fn cut(&self, k: usize) -> Result<Vec<usize>> {
        f_cluster(self, k)
    }
}

/// Agglomerates the matrix with the given linkage.
///
/// Each step merges the pair of active clusters at the smallest distance;
/// equal distances go to the lexicographically smallest
/// `(min node index, max node index)`.
pub fn linkage(m: &DissimilarityMatrix, method: Linkage) -> Result<Dendrogram> {
    let p = m.len();
    if p < 2 {
        return Err(Error::TooFewClassifiers { needed: 2, found: p });
    }
    if let Some((i, j)) = m.asymmetry() {
        return Err(Error::Asymmetric { i, j });
    }

    // Slot i starts as leaf i; a merge reuses the lower slot.
    let mut dist: Vec<f64> = (0..p).flat_map(|i| m.row(i).iter().copied()).collect();
    let mut node: Vec<usize> = (0..p).collect();
    let mut size = alloc::vec![1usize; p];
    let mut active: Vec<usize> = (0..p).collect();
    let mut merges = Vec::with_capacity(p - 1);

    for step in 0..p - 1 {
        let mut best: Option<(f64, usize, usize, usize, usize)> = None;
        for (ai, &a) in active.iter().enumerate() {
            for &b in &active[ai + 1..] {
                let d = dist[a * p + b];
                let (lo, hi) = ordered(node[a], node[b]);
                let better = match best {
                    None => true,
                    Some((bd, blo, bhi, _, _)) => d < bd || (d == bd && (lo, hi) < (blo, bhi)),
                };
                if better {
                    best = Some((d, lo, hi, a, b));
                }
            }
        }
        let (d_ab, lo, hi, a, b) = best.expect("at least two active clusters");
        let (n_a, n_b) = (size[a], size[b]);
        for &x in &active {
            if x == a || x == b {
                continue;
            }
            let updated = method.update(dist[a * p + x], dist[b * p + x], d_ab, n_a, n_b);
            dist[a * p + x] = updated;
            dist[x * p + a] = updated;
        }
        merges.push(Merge {
            left: lo,
            right: hi,
            distance: d_ab,
            size: n_a + n_b,
        });
        node[a] = p + step;
        size[a] = n_a + n_b;
        active.retain(|&s| s != b);
    }

    Ok(Dendrogram {
        leaf_ids: m.ids().to_vec(),
        merges,
    })
}

fn ordered(a: usize, b: usize) -> (usize, usize) {
    if a < b {
        (a, b)
    } else {
        (b, a)
    }
}

/// Flat partition into exactly `k` clusters.
///
/// Applies the first `P - k` merges in dendrogram order and numbers the
/// resulting groups `1..=k` by their smallest leaf index. Working by merge
/// count rather than a distance threshold keeps the cut well defined under
/// centroid inversions.
pub fn f_cluster(z: &Dendrogram, k: usize) -> Result<Vec<usize>> {
    let p = z.len();
    if k < 1 || k > p {
        return Err(Error::LevelOutOfRange { k, max: p });
    }
    let mut parent: Vec<usize> = (0..2 * p - 1).collect();
    for (s, m) in z.merges.iter().take(p - k).enumerate() {
        parent[m.left] = p + s;
        parent[m.right] = p + s;
    }
    let root = |mut n: usize| {
        while parent[n] != n {
            n = parent[n];
        }
        n
    };
    let mut roots: Vec<usize> = Vec::with_capacity(k);
    let labels = (0..p)
        .map(|leaf| {
            let r = root(leaf);
            match roots.iter().position(|&x| x == r) {
                Some(i) => i + 1,
                None => {
                    roots.push(r);
                    roots.len()
                }
            }
        })
        .collect();
    Ok(labels)
}

/// Leaf indices of each cluster, cluster `c` at position `c - 1`.
pub fn groups(assignment: &[usize]) -> Vec<Vec<usize>> {
    let k = assignment.iter().copied().max().unwrap_or(0);
    let mut out = alloc::vec![Vec::new(); k];
    for (leaf, &c) in assignment.iter().enumerate() {
        out[c - 1].push(leaf);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn matrix(rows: Vec<Vec<f64>>) -> DissimilarityMatrix {
        let ids = (0..rows.len())
            .map(|i| ClassifierId::new(&alloc::format!("C{i}"), "X").unwrap())
            .collect();
        DissimilarityMatrix::from_rows(ids, rows).unwrap()
    }

    fn three() -> DissimilarityMatrix {
        matrix(vec![
            vec![0.0, 0.1, 0.9],
            vec![0.1, 0.0, 0.8],
            vec![0.9, 0.8, 0.0],
        ])
    }

    #[test]
    fn single_linkage_three_points() {
        let z = linkage(&three(), Linkage::Single).unwrap();
        assert_eq!(
            z.merges(),
            &[
                Merge { left: 0, right: 1, distance: 0.1, size: 2 },
                Merge { left: 2, right: 3, distance: 0.8, size: 3 },
            ]
        );
    }

    #[test]
    fn complete_linkage_three_points() {
        let z = linkage(&three(), Linkage::Complete).unwrap();
        assert_eq!(z.merges()[1].distance, 0.9);
    }

    #[test]
    fn average_and_centroid_three_points() {
        let z = linkage(&three(), Linkage::Average).unwrap();
        assert!((z.merges()[1].distance - 0.85).abs() < 1e-15);
        // (0.9 + 0.8) / 2 - 0.1 / 4
        let z = linkage(&three(), Linkage::Centroid).unwrap();
        assert!((z.merges()[1].distance - 0.825).abs() < 1e-15);
    }

    #[test]
    fn pair_merges_once() {
        let m = matrix(vec![vec![0.0, 0.3], vec![0.3, 0.0]]);
        for method in Linkage::ALL {
            let z = linkage(&m, method).unwrap();
            assert_eq!(z.merges(), &[Merge { left: 0, right: 1, distance: 0.3, size: 2 }]);
        }
    }

    #[test]
    fn ties_prefer_smallest_node_pair() {
        let m = matrix(vec![
            vec![0.0, 0.5, 0.5, 0.5],
            vec![0.5, 0.0, 0.5, 0.5],
            vec![0.5, 0.5, 0.0, 0.5],
            vec![0.5, 0.5, 0.5, 0.0],
        ]);
        let z = linkage(&m, Linkage::Single).unwrap();
        let pairs: Vec<(usize, usize)> = z.merges().iter().map(|m| (m.left, m.right)).collect();
        assert_eq!(pairs, vec![(0, 1), (2, 3), (4, 5)]);
    }

    #[test]
    fn rejects_asymmetric() {
        let m = matrix(vec![vec![0.0, 0.3], vec![0.2, 0.0]]);
        assert_eq!(linkage(&m, Linkage::Single).unwrap_err(), Error::Asymmetric { i: 0, j: 1 });
    }

    #[test]
    fn centroid_inversion_is_flagged() {
        // Equilateral triangle: centroid of the first pair is closer to the third point.
        let m = matrix(vec![
            vec![0.0, 1.0, 1.0],
            vec![1.0, 0.0, 1.0],
            vec![1.0, 1.0, 0.0],
        ]);
        let z = linkage(&m, Linkage::Centroid).unwrap();
        assert_eq!(z.inversions(), vec![1]);
        assert!(linkage(&m, Linkage::Complete).unwrap().is_monotone());
        // the cut still yields exactly k clusters
        for k in 1..=3 {
            let a = f_cluster(&z, k).unwrap();
            assert_eq!(groups(&a).len(), k);
        }
    }

    #[test]
    fn cut_extremes_and_errors() {
        let z = linkage(&three(), Linkage::Complete).unwrap();
        assert_eq!(f_cluster(&z, 1).unwrap(), vec![1, 1, 1]);
        assert_eq!(f_cluster(&z, 2).unwrap(), vec![1, 1, 2]);
        assert_eq!(f_cluster(&z, 3).unwrap(), vec![1, 2, 3]);
        assert_eq!(f_cluster(&z, 0).unwrap_err(), Error::LevelOutOfRange { k: 0, max: 3 });
        assert!(f_cluster(&z, 4).is_err());
    }

    #[test]
    fn from_parts_validates() {
        let ids: Vec<ClassifierId> = three().ids().to_vec();
        let good = vec![
            Merge { left: 0, right: 1, distance: 0.1, size: 2 },
            Merge { left: 2, right: 3, distance: 0.8, size: 3 },
        ];
        assert!(Dendrogram::from_parts(ids.clone(), good).is_ok());
        let reused = vec![
            Merge { left: 0, right: 1, distance: 0.1, size: 2 },
            Merge { left: 0, right: 3, distance: 0.8, size: 3 },
        ];
        assert!(Dendrogram::from_parts(ids.clone(), reused).is_err());
        let bad_size = vec![
            Merge { left: 0, right: 1, distance: 0.1, size: 2 },
            Merge { left: 2, right: 3, distance: 0.8, size: 4 },
        ];
        assert!(Dendrogram::from_parts(ids, bad_size).is_err());
    }
}
