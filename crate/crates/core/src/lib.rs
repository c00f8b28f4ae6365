//! Diversity-driven construction of multiple classifier systems.
//!
//! The crate covers the whole selection pipeline without touching IO:
//!
//! * [`corpus`] and [`metrics`]: labelled corpora, stratified splits, and the
//!   accuracy / macro precision / macro recall / macro F1 metric set.
//! * [`text`]: preprocessing, feature extractors and the base learners that
//!   make up a classifier pool.
//! * [`diversity`]: pairwise double-fault dissimilarity.
//! * [`cluster`]: agglomerative clustering and flat cuts of the dendrogram.
//! * [`selection`]: the level sweep that picks one classifier per cluster for
//!   every hierarchy level, plus the Elbow and group comparators.
//! * [`stack`]: stacking meta-classifiers over one-hot base predictions.
//! * [`pipeline`]: the selection steps chained over a validation matrix.
//!
//! The crate is `no_std` and only needs an allocator.
#![no_std]

extern crate alloc;

pub mod cluster;
pub mod corpus;
pub mod diversity;
mod error;
pub mod metrics;
pub mod pipeline;
mod prediction;
pub mod selection;
pub mod softmax;
pub mod stack;
pub mod text;

pub use error::{Error, Result};
pub use prediction::PredictionMatrix;

pub use cluster::{f_cluster, linkage, Dendrogram, Linkage, Merge};
pub use corpus::{split_corpus, ClassifierId, LabelMap, LabeledCorpus, Split, SplitRatios};
pub use diversity::{dissimilarity_matrix, double_fault, DissimilarityMatrix, DistanceConversion};
pub use metrics::{evaluate, EvalEntry, EvalReport, Metric, Scores};
pub use pipeline::{select_ensemble, SelectionConfig, SelectionOutcome};
pub use selection::{
    choose_final, elbow_select, group_heuristics, hierarchy_select, random_baseline,
    EnsembleCandidate, FinalRule, Group,
};
pub use stack::{fit_stack, meta_features, predict_stack, MetaKind, StackedEnsemble};

/// Class index in `0..num_classes`.
pub type Label = usize;
