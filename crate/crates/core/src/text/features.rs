use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::{Error, Result};

pub const DEFAULT_HASH_DIM: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum FeatureKind {
    /// Raw token counts.
    Count,
    /// Counts times `ln((1 + D) / (1 + df)) + 1`.
    Tfidf,
    /// Count-weighted mean of seeded random ±1/√d token vectors: a
    /// deterministic dense representation.
    HashedDense { dim: usize },
}

/// A named extractor, e.g. `CV`, `TFIDF`, `HASH` or `HASH128`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExtractorSpec {
    pub name: String,
    pub kind: FeatureKind,
}

impl ExtractorSpec {
    /// `CV`, `TFIDF`, `HASH` (64 dimensions) or `HASH<d>`.
    pub fn parse(token: &str) -> Result<Self> {
        let name = token.trim().to_ascii_uppercase();
        let kind = match name.as_str() {
            "CV" => FeatureKind::Count,
            "TFIDF" => FeatureKind::Tfidf,
            "HASH" => FeatureKind::HashedDense {
                dim: DEFAULT_HASH_DIM,
            },
            other => match other.strip_prefix("HASH").map(str::parse::<usize>) {
                Some(Ok(dim)) if dim > 0 => FeatureKind::HashedDense { dim },
                _ => return Err(Error::UnknownExtractor(token.to_string())),
            },
        };
        Ok(ExtractorSpec { name, kind })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FeatureSpace {
    kind: FeatureKind,
    vocabulary: BTreeMap<String, usize>,
    idf: Vec<f64>,
    /// Token vectors for `HashedDense`, `vocabulary.len() * dim` entries.
    projection: Vec<f64>,
}

impl FeatureSpace {
    pub fn kind(&self) -> FeatureKind {
        self.kind
    }

    pub fn vocabulary(&self) -> &BTreeMap<String, usize> {
        &self.vocabulary
    }

    pub fn idf(&self) -> &[f64] {
        &self.idf
    }

    pub fn dimension(&self) -> usize {
        match self.kind {
            FeatureKind::HashedDense { dim } => dim,
            _ => self.vocabulary.len(),
        }
    }

    /// Feature vector of a tokenized document; unknown tokens are ignored.
    pub fn transform(&self, tokens: &[String]) -> Vec<f64> {
        let mut counts = alloc::vec![0.0; self.vocabulary.len()];
        for t in tokens {
            if let Some(&j) = self.vocabulary.get(t) {
                counts[j] += 1.0;
            }
        }
        match self.kind {
            FeatureKind::Count => counts,
            FeatureKind::Tfidf => counts.iter().zip(&self.idf).map(|(c, w)| c * w).collect(),
            FeatureKind::HashedDense { dim } => {
                let mut out = alloc::vec![0.0; dim];
                let total: f64 = counts.iter().sum();
                if total == 0.0 {
                    return out;
                }
                for (j, &c) in counts.iter().enumerate().filter(|(_, c)| **c > 0.0) {
                    let v = &self.projection[j * dim..(j + 1) * dim];
                    for (o, x) in out.iter_mut().zip(v) {
                        *o += c * x;
                    }
                }
                out.iter_mut().for_each(|o| *o /= total);
                out
            }
        }
    }
}

/// FNV-1a, used to give every token its own projection stream.
pub(crate) fn fnv1a(bytes: &[u8]) -> u64 {
    bytes.iter().fold(0xcbf2_9ce4_8422_2325, |h, &b| {
        (h ^ u64::from(b)).wrapping_mul(0x0000_0100_0000_01b3)
    })
}

/// Fits the vocabulary (tokens in at least `min_df` documents) and the
/// kind-specific weights on the given TRAIN documents.
pub fn fit_feature_space(
    docs: &[Vec<String>],
    kind: FeatureKind,
    min_df: usize,
    seed: u64,
) -> Result<FeatureSpace> {
    if docs.iter().all(Vec::is_empty) {
        return Err(Error::Empty("tokenized training corpus"));
    }
    let mut df: BTreeMap<&str, usize> = BTreeMap::new();
    for doc in docs {
        let unique: BTreeSet<&str> = doc.iter().map(String::as_str).collect();
        for t in unique {
            *df.entry(t).or_default() += 1;
        }
    }
    let kept: Vec<(&str, usize)> = df.into_iter().filter(|(_, d)| *d >= min_df.max(1)).collect();
    if kept.is_empty() {
        return Err(Error::EmptyVocabulary);
    }
    let vocabulary: BTreeMap<String, usize> = kept
        .iter()
        .enumerate()
        .map(|(j, (t, _))| (t.to_string(), j))
        .collect();
    let n_docs = docs.len() as f64;
    let idf = match kind {
        FeatureKind::Tfidf => kept
            .iter()
            .map(|(_, d)| libm::log((1.0 + n_docs) / (1.0 + *d as f64)) + 1.0)
            .collect(),
        _ => Vec::new(),
    };
    let projection = match kind {
        FeatureKind::HashedDense { dim } => {
            if dim == 0 {
                return Err(Error::InvalidParameter("hashed dimension 0".to_string()));
            }
            let scale = 1.0 / libm::sqrt(dim as f64);
            kept.iter()
                .flat_map(|(t, _)| {
                    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ fnv1a(t.as_bytes()));
                    (0..dim)
                        .map(move |_| if rng.gen::<bool>() { scale } else { -scale })
                        .collect::<Vec<f64>>()
                })
                .collect()
        }
        _ => Vec::new(),
    };
    Ok(FeatureSpace {
        kind,
        vocabulary,
        idf,
        projection,
    })
}
