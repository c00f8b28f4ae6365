use std::path::PathBuf;

use divsel_core::text::{Algorithm, ExtractorSpec, PoolConfig, PreprocessConfig};
use divsel_core::{
    DistanceConversion, FinalRule, Linkage, MetaKind, Metric, SelectionConfig, SplitRatios,
};
use serde::{Deserialize, Serialize};

pub const DEFAULT_EXTRACTORS: &[&str] = &["CV", "TFIDF", "HASH"];
pub const DEFAULT_ALGORITHMS: &[&str] = &["NB", "LR", "KNN", "NC"];
pub const DEFAULT_OUTPUT_DIR: &str = "divsel-out";
/// Overrides the output directory of every subcommand.
pub const OUTPUT_DIR_ENV: &str = "DIVSEL_OUT";

/// Everything a run depends on. A run report embeds the resolved value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub corpus: PathBuf,
    #[serde(default)]
    pub ratios: SplitRatios,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_extractors")]
    pub extractors: Vec<String>,
    #[serde(default = "default_algorithms")]
    pub algorithms: Vec<String>,
    #[serde(default)]
    pub linkage: Linkage,
    #[serde(default)]
    pub conversion: DistanceConversion,
    /// Metric whose level sweep feeds the final choice; all four are swept
    /// and reported.
    #[serde(default)]
    pub metric: Metric,
    #[serde(default)]
    pub rule: FinalRule,
    #[serde(default)]
    pub meta_kind: MetaKind,
    #[serde(default)]
    pub preprocess: PreprocessConfig,
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
}

fn default_extractors() -> Vec<String> {
    DEFAULT_EXTRACTORS.iter().map(|s| s.to_string()).collect()
}

fn default_algorithms() -> Vec<String> {
    DEFAULT_ALGORITHMS.iter().map(|s| s.to_string()).collect()
}

fn default_output_dir() -> PathBuf {
    PathBuf::from(DEFAULT_OUTPUT_DIR)
}

impl RunConfig {
    pub fn new(corpus: impl Into<PathBuf>) -> Self {
        RunConfig {
            corpus: corpus.into(),
            ratios: SplitRatios::default(),
            seed: 0,
            extractors: default_extractors(),
            algorithms: default_algorithms(),
            linkage: Linkage::default(),
            conversion: DistanceConversion::default(),
            metric: Metric::default(),
            rule: FinalRule::default(),
            meta_kind: MetaKind::default(),
            preprocess: PreprocessConfig::default(),
            output_dir: default_output_dir(),
        }
    }

    pub fn extractor_specs(&self) -> divsel_core::Result<Vec<ExtractorSpec>> {
        self.extractors.iter().map(|e| ExtractorSpec::parse(e)).collect()
    }

    pub fn algorithm_list(&self) -> divsel_core::Result<Vec<Algorithm>> {
        self.algorithms.iter().map(|a| Algorithm::parse(a)).collect()
    }

    pub fn pool_config(&self) -> PoolConfig {
        PoolConfig {
            preprocess: self.preprocess.clone(),
            seed: self.seed,
            ..PoolConfig::default()
        }
    }

    pub fn selection_config(&self) -> SelectionConfig {
        selection_config(self.linkage, self.conversion, self.metric, self.rule, self.meta_kind, self.seed)
    }
}

pub fn selection_config(
    linkage: Linkage,
    conversion: DistanceConversion,
    metric: Metric,
    rule: FinalRule,
    meta_kind: MetaKind,
    seed: u64,
) -> SelectionConfig {
    SelectionConfig {
        linkage,
        conversion,
        metric,
        rule,
        meta_kind,
        seed,
    }
}
