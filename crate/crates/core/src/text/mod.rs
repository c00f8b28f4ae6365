//! The classifier pool: preprocessing, feature extractors, base learners.

mod features;
mod learners;
mod pool;
mod preprocess;

pub use features::{fit_feature_space, ExtractorSpec, FeatureKind, FeatureSpace};
pub use learners::{Algorithm, CentroidModel, KnnModel, Model, MultinomialNb};
pub use pool::{
    extractor_seed, fit_extractors, predict_matrix, train_member, train_pool, tokenize_corpus,
    Pool, PoolConfig, TrainedClassifier,
};
pub use preprocess::{preprocess, stem, PreprocessConfig, DEFAULT_STOPWORDS};
