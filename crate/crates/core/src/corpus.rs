//! Labelled corpora, split assignment and classifier identifiers.

use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::{Error, Label, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "SCREAMING_SNAKE_CASE"))]
pub enum Split {
    Train,
    Validation,
    Test,
}

impl Split {
    pub const ALL: [Split; 3] = [Split::Train, Split::Validation, Split::Test];

    pub fn as_str(self) -> &'static str {
        match self {
            Split::Train => "TRAIN",
            Split::Validation => "VALIDATION",
            Split::Test => "TEST",
        }
    }

    pub fn parse(s: &str) -> Option<Split> {
        match s.to_ascii_uppercase().as_str() {
            "TRAIN" => Some(Split::Train),
            "VALIDATION" | "VAL" => Some(Split::Validation),
            "TEST" => Some(Split::Test),
            _ => None,
        }
    }
}

impl fmt::Display for Split {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    pub text: String,
    pub label: Label,
}

impl Instance {
    pub fn new(text: impl Into<String>, label: Label) -> Self {
        Instance {
            text: text.into(),
            label,
        }
    }
}

/// Maps string class names to indices in order of first appearance.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(transparent))]
pub struct LabelMap {
    names: Vec<String>,
}

impl LabelMap {
    pub fn new(names: Vec<String>) -> Self {
        LabelMap { names }
    }

    /// Builds the mapping from raw labels and returns the index of each one.
    pub fn from_labels<'a, I>(labels: I) -> (Self, Vec<Label>)
    where
        I: IntoIterator<Item = &'a str>,
    {
        let mut map = LabelMap::default();
        let indices = labels.into_iter().map(|l| map.intern(l)).collect();
        (map, indices)
    }

    pub fn intern(&mut self, name: &str) -> Label {
        match self.index_of(name) {
            Some(i) => i,
            None => {
                self.names.push(name.to_string());
                self.names.len() - 1
            }
        }
    }

    pub fn index_of(&self, name: &str) -> Option<Label> {
        self.names.iter().position(|n| n == name)
    }

    pub fn name(&self, label: Label) -> Option<&str> {
        self.names.get(label).map(String::as_str)
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }
}

/// Train / validation / test fractions.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SplitRatios {
    pub train: f64,
    pub validation: f64,
    pub test: f64,
}

impl SplitRatios {
    pub fn new(train: f64, validation: f64, test: f64) -> Result<Self> {
        let r = SplitRatios {
            train,
            validation,
            test,
        };
        r.validate()?;
        Ok(r)
    }

    pub fn validate(&self) -> Result<()> {
        let parts = self.as_array();
        let ok = parts.iter().all(|p| p.is_finite() && *p > 0.0)
            && libm::fabs(parts.iter().sum::<f64>() - 1.0) <= 1e-9;
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidRatios(parts))
        }
    }

    fn as_array(&self) -> [f64; 3] {
        [self.train, self.validation, self.test]
    }
}

impl Default for SplitRatios {
    fn default() -> Self {
        SplitRatios {
            train: 0.6,
            validation: 0.2,
            test: 0.2,
        }
    }
}

/// Text instances with class labels and a split tag per instance.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledCorpus {
    instances: Vec<Instance>,
    splits: Vec<Split>,
    num_classes: usize,
}

impl LabeledCorpus {
    /// Checks label range, split coverage and that every class occurs in TRAIN.
    pub fn new(instances: Vec<Instance>, splits: Vec<Split>, num_classes: usize) -> Result<Self> {
        if num_classes < 2 {
            return Err(Error::TooFewClasses(num_classes));
        }
        if splits.len() != instances.len() {
            return Err(Error::LengthMismatch {
                expected: instances.len(),
                found: splits.len(),
            });
        }
        let mut in_train = alloc::vec![false; num_classes];
        for (row, inst) in instances.iter().enumerate() {
            if inst.label >= num_classes {
                return Err(Error::LabelOutOfRange {
                    label: inst.label,
                    num_classes,
                    row,
                });
            }
            if splits[row] == Split::Train {
                in_train[inst.label] = true;
            }
        }
        if let Some(c) = in_train.iter().position(|p| !p) {
            return Err(Error::InvalidCorpus(alloc::format!(
                "class {c} has no TRAIN instance"
            )));
        }
        for split in [Split::Validation, Split::Test] {
            if !splits.contains(&split) {
                return Err(Error::InvalidCorpus(alloc::format!("{split} split is empty")));
            }
        }
        Ok(LabeledCorpus {
            instances,
            splits,
            num_classes,
        })
    }

    pub fn num_classes(&self) -> usize {
        self.num_classes
    }

    pub fn len(&self) -> usize {
        self.instances.len()
    }

    pub fn is_empty(&self) -> bool {
        self.instances.is_empty()
    }

    pub fn instances(&self) -> &[Instance] {
        &self.instances
    }

    pub fn splits(&self) -> &[Split] {
        &self.splits
    }

    /// Instances of one split, in corpus order.
    pub fn split(&self, split: Split) -> impl Iterator<Item = &Instance> + '_ {
        self.instances
            .iter()
            .zip(&self.splits)
            .filter(move |(_, s)| **s == split)
            .map(|(i, _)| i)
    }

    pub fn split_len(&self, split: Split) -> usize {
        self.splits.iter().filter(|s| **s == split).count()
    }

    pub fn labels(&self, split: Split) -> Vec<Label> {
        self.split(split).map(|i| i.label).collect()
    }
}

/// Stratified, seeded assignment of instances to TRAIN / VALIDATION / TEST.
///
/// Each class is shuffled independently and cut by largest-remainder
/// apportionment, so per-class split sizes are within one instance of the
/// requested fractions. A split that would receive no instance of a class
/// borrows one from the largest split of that class.
pub fn split_corpus(
    instances: Vec<Instance>,
    num_classes: usize,
    ratios: SplitRatios,
    seed: u64,
) -> Result<LabeledCorpus> {
    ratios.validate()?;
    if num_classes < 2 {
        return Err(Error::TooFewClasses(num_classes));
    }
    let mut by_class: Vec<Vec<usize>> = alloc::vec![Vec::new(); num_classes];
    for (row, inst) in instances.iter().enumerate() {
        if inst.label >= num_classes {
            return Err(Error::LabelOutOfRange {
                label: inst.label,
                num_classes,
                row,
            });
        }
        by_class[inst.label].push(row);
    }
    if let Some((class, rows)) = by_class.iter().enumerate().find(|(_, r)| r.len() < 3) {
        return Err(Error::ClassTooSmall {
            class,
            count: rows.len(),
        });
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut splits = alloc::vec![Split::Train; instances.len()];
    for rows in by_class.iter_mut() {
        rows.shuffle(&mut rng);
        let counts = apportion(rows.len(), &ratios.as_array());
        let mut cursor = 0;
        for (split, count) in Split::ALL.iter().zip(counts) {
            for &row in &rows[cursor..cursor + count] {
                splits[row] = *split;
            }
            cursor += count;
        }
    }
    LabeledCorpus::new(instances, splits, num_classes)
}

/// Largest-remainder apportionment of `n` items over `ratios`, with every
/// part forced to at least one item when `n >= ratios.len()`.
fn apportion(n: usize, ratios: &[f64; 3]) -> [usize; 3] {
    let exact: [f64; 3] = core::array::from_fn(|i| ratios[i] * n as f64);
    let mut counts: [usize; 3] = core::array::from_fn(|i| libm::floor(exact[i]) as usize);
    let assigned: usize = counts.iter().sum();
    let mut order = [0usize, 1, 2];
    order.sort_by(|&a, &b| {
        let fa = exact[a] - counts[a] as f64;
        let fb = exact[b] - counts[b] as f64;
        fb.partial_cmp(&fa).unwrap_or(Ordering::Equal).then(a.cmp(&b))
    });
    for &i in order.iter().take(n.saturating_sub(assigned)) {
        counts[i] += 1;
    }
    if n >= counts.len() {
        while let Some(empty) = counts.iter().position(|c| *c == 0) {
            let largest = (0..3).max_by_key(|&i| (counts[i], core::cmp::Reverse(i))).unwrap();
            counts[largest] -= 1;
            counts[empty] += 1;
        }
    }
    counts
}

/// One pool member: a feature extractor paired with a learning algorithm.
///
/// Tokens are stored upper-case and may not contain `-`, so the rendering
/// `EXTRACTOR-ALGORITHM` is injective. Ordering follows the rendered string.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ClassifierId {
    extractor: String,
    algorithm: String,
}

impl ClassifierId {
    pub fn new(extractor: &str, algorithm: &str) -> Result<Self> {
        let extractor = normalize_token(extractor)?;
        let algorithm = normalize_token(algorithm)?;
        Ok(ClassifierId {
            extractor,
            algorithm,
        })
    }

    /// Parses `EXTRACTOR-ALGORITHM`, splitting at the first `-`.
    pub fn parse(s: &str) -> Result<Self> {
        let (e, a) = s
            .trim()
            .split_once('-')
            .ok_or_else(|| Error::InvalidId(s.to_string()))?;
        ClassifierId::new(e, a).map_err(|_| Error::InvalidId(s.to_string()))
    }

    pub fn extractor(&self) -> &str {
        &self.extractor
    }

    pub fn algorithm(&self) -> &str {
        &self.algorithm
    }

    fn rendered_bytes(&self) -> impl Iterator<Item = u8> + '_ {
        self.extractor
            .bytes()
            .chain(core::iter::once(b'-'))
            .chain(self.algorithm.bytes())
    }
}

fn normalize_token(token: &str) -> Result<String> {
    let t = token.trim();
    let valid = !t.is_empty()
        && t.chars()
            .all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '.');
    if valid {
        Ok(t.to_ascii_uppercase())
    } else {
        Err(Error::InvalidId(token.to_string()))
    }
}

impl fmt::Display for ClassifierId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}-{}", self.extractor, self.algorithm)
    }
}

impl Ord for ClassifierId {
    fn cmp(&self, other: &Self) -> Ordering {
        self.rendered_bytes().cmp(other.rendered_bytes())
    }
}

impl PartialOrd for ClassifierId {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

#[cfg(feature = "serde")]
impl serde::Serialize for ClassifierId {
    fn serialize<S: serde::Serializer>(&self, s: S) -> core::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

#[cfg(feature = "serde")]
impl<'de> serde::Deserialize<'de> for ClassifierId {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> core::result::Result<Self, D::Error> {
        let s = <String as serde::Deserialize>::deserialize(d)?;
        ClassifierId::parse(&s).map_err(serde::de::Error::custom)
    }
}

/// Rejects duplicate ids.
pub(crate) fn check_unique(ids: &[ClassifierId]) -> Result<()> {
    let mut sorted: Vec<&ClassifierId> = ids.iter().collect();
    sorted.sort();
    match sorted.windows(2).find(|w| w[0] == w[1]) {
        Some(w) => Err(Error::DuplicateId(w[0].to_string())),
        None => Ok(()),
    }
}
