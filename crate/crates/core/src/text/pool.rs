use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec::Vec;

use super::features::{fit_feature_space, fnv1a, ExtractorSpec, FeatureSpace};
use super::learners::{Algorithm, Model};
use super::preprocess::{preprocess, PreprocessConfig};
use crate::corpus::check_unique;
use crate::softmax::SoftmaxConfig;
use crate::{ClassifierId, Error, Label, LabeledCorpus, PredictionMatrix, Result, Split};

#[derive(Debug, Clone, PartialEq)]
pub struct PoolConfig {
    pub preprocess: PreprocessConfig,
    pub seed: u64,
    pub lr: SoftmaxConfig,
}

impl Default for PoolConfig {
    fn default() -> Self {
        PoolConfig {
            preprocess: PreprocessConfig::default(),
            seed: 0,
            lr: SoftmaxConfig::BASE,
        }
    }
}

/// One pool member. Members built from the same extractor share its space.
#[derive(Debug, Clone)]
pub struct TrainedClassifier {
    pub id: ClassifierId,
    pub space: Arc<FeatureSpace>,
    pub model: Model,
}

impl TrainedClassifier {
    pub fn predict_tokens(&self, tokens: &[String]) -> Label {
        self.model.predict(&self.space.transform(tokens))
    }
}

#[derive(Debug, Clone)]
pub struct Pool {
    pub members: Vec<TrainedClassifier>,
    pub preprocess: PreprocessConfig,
    pub num_classes: usize,
}

impl Pool {
    pub fn ids(&self) -> Vec<ClassifierId> {
        self.members.iter().map(|m| m.id.clone()).collect()
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// Members in the given order.
    pub fn reordered(&self, order: &[ClassifierId]) -> Result<Pool> {
        let members = order
            .iter()
            .map(|id| {
                self.members
                    .iter()
                    .find(|m| &m.id == id)
                    .cloned()
                    .ok_or_else(|| Error::MissingMember(alloc::string::ToString::to_string(id)))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Pool {
            members,
            preprocess: self.preprocess.clone(),
            num_classes: self.num_classes,
        })
    }
}

/// Seed for an extractor's random state, derived from the global seed and
/// the extractor name only.
pub fn extractor_seed(seed: u64, extractor: &str) -> u64 {
    seed.rotate_left(17) ^ fnv1a(extractor.as_bytes())
}

/// Tokens of one split, in corpus order.
pub fn tokenize_corpus(corpus: &LabeledCorpus, split: Split, config: &PreprocessConfig) -> Vec<Vec<String>> {
    corpus.split(split).map(|i| preprocess(&i.text, config)).collect()
}

/// Fits one feature space per extractor on TRAIN documents.
pub fn fit_extractors(
    train_docs: &[Vec<String>],
    extractors: &[ExtractorSpec],
    config: &PoolConfig,
) -> Result<Vec<Arc<FeatureSpace>>> {
    extractors
        .iter()
        .map(|e| {
            fit_feature_space(
                train_docs,
                e.kind,
                config.preprocess.min_df,
                extractor_seed(config.seed, &e.name),
            )
            .map(Arc::new)
        })
        .collect()
}

/// Trains one `(extractor, algorithm)` member on pre-transformed TRAIN rows.
pub fn train_member(
    extractor: &ExtractorSpec,
    space: &Arc<FeatureSpace>,
    x_train: &[Vec<f64>],
    y_train: &[Label],
    num_classes: usize,
    algorithm: Algorithm,
    config: &PoolConfig,
) -> Result<TrainedClassifier> {
    let id = ClassifierId::new(&extractor.name, &algorithm.token())?;
    let model = algorithm.fit(x_train, y_train, num_classes, config.lr)?;
    Ok(TrainedClassifier {
        id,
        space: Arc::clone(space),
        model,
    })
}

/// Trains the full `extractors x algorithms` cross product on TRAIN.
///
/// Members are ordered extractor-major.
pub fn train_pool(
    corpus: &LabeledCorpus,
    extractors: &[ExtractorSpec],
    algorithms: &[Algorithm],
    config: &PoolConfig,
) -> Result<Pool> {
    if extractors.is_empty() {
        return Err(Error::Empty("extractor list"));
    }
    if algorithms.is_empty() {
        return Err(Error::Empty("algorithm list"));
    }
    let docs = tokenize_corpus(corpus, Split::Train, &config.preprocess);
    let labels = corpus.labels(Split::Train);
    let spaces = fit_extractors(&docs, extractors, config)?;
    let mut members = Vec::with_capacity(extractors.len() * algorithms.len());
    for (extractor, space) in extractors.iter().zip(&spaces) {
        let x: Vec<Vec<f64>> = docs.iter().map(|d| space.transform(d)).collect();
        for &alg in algorithms {
            members.push(train_member(
                extractor,
                space,
                &x,
                &labels,
                corpus.num_classes(),
                alg,
                config,
            )?);
        }
    }
    let pool = Pool {
        members,
        preprocess: config.preprocess.clone(),
        num_classes: corpus.num_classes(),
    };
    check_unique(&pool.ids())?;
    Ok(pool)
}

/// Predictions of every member on one split; columns follow pool order.
pub fn predict_matrix(pool: &Pool, corpus: &LabeledCorpus, split: Split) -> Result<PredictionMatrix> {
    if pool.is_empty() {
        return Err(Error::Empty("pool"));
    }
    let docs = tokenize_corpus(corpus, split, &pool.preprocess);
    if docs.is_empty() {
        return Err(Error::Empty("split"));
    }
    let mut cache: Vec<(*const FeatureSpace, Vec<Vec<f64>>)> = Vec::new();
    let mut columns = Vec::with_capacity(pool.len());
    for m in &pool.members {
        let key = Arc::as_ptr(&m.space);
        let idx = match cache.iter().position(|(k, _)| *k == key) {
            Some(i) => i,
            None => {
                cache.push((key, docs.iter().map(|d| m.space.transform(d)).collect()));
                cache.len() - 1
            }
        };
        columns.push(cache[idx].1.iter().map(|x| m.model.predict(x)).collect());
    }
    PredictionMatrix::new(
        pool.ids(),
        columns,
        corpus.labels(split),
        corpus.num_classes(),
        split,
    )
}
