use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("split ratios must be positive and sum to 1 (got {0:?})")]
    InvalidRatios([f64; 3]),
    #[error("class {class} has {count} instance(s); at least 3 are needed to populate every split")]
    ClassTooSmall { class: usize, count: usize },
    #[error("num_classes must be at least 2 (got {0})")]
    TooFewClasses(usize),
    #[error("label {label} is out of range for {num_classes} classes (row {row})")]
    LabelOutOfRange {
        label: usize,
        num_classes: usize,
        row: usize,
    },
    #[error("length mismatch: expected {expected}, found {found}")]
    LengthMismatch { expected: usize, found: usize },
    #[error("{0} is empty")]
    Empty(&'static str),
    #[error("invalid corpus: {0}")]
    InvalidCorpus(String),
    #[error("duplicate classifier id {0}")]
    DuplicateId(String),
    #[error("malformed classifier id {0:?}; expected <EXTRACTOR>-<ALGORITHM>")]
    InvalidId(String),
    #[error("unknown algorithm token {0:?}")]
    UnknownAlgorithm(String),
    #[error("unknown extractor token {0:?}")]
    UnknownExtractor(String),
    #[error("unknown token {0:?} for this pool")]
    UnknownToken(String),
    #[error("vocabulary is empty after filtering")]
    EmptyVocabulary,
    #[error("matrix is not square: {rows} rows, {cols} columns")]
    NotSquare { rows: usize, cols: usize },
    #[error("matrix is asymmetric at ({i}, {j})")]
    Asymmetric { i: usize, j: usize },
    #[error("matrix entry ({i}, {j}) is outside [0, 1]")]
    OutOfRange { i: usize, j: usize },
    #[error("need at least {needed} classifiers, found {found}")]
    TooFewClassifiers { needed: usize, found: usize },
    #[error("level {k} outside 1..={max}")]
    LevelOutOfRange { k: usize, max: usize },
    #[error("no score for classifier {0}")]
    MissingScore(String),
    #[error("classifier {0} is not present in the prediction matrix")]
    MissingMember(String),
    #[error("inputs disagree on classifier ids: {0}")]
    IdMismatch(String),
    #[error("candidate k={0} carries no validation score")]
    MissingValidationScore(usize),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}
