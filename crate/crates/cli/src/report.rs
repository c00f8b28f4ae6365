//! Report documents. Every document starts with `schema_version` and
//! `generated_at`; the timestamp is the only field that varies between two
//! runs of the same configuration.

use divsel_core::{
    ClassifierId, DistanceConversion, EnsembleCandidate, Linkage, MetaKind, Metric, Scores,
    SelectionOutcome,
};
use serde::{Deserialize, Serialize};

use crate::config::RunConfig;

pub const REPORT_SCHEMA_VERSION: u32 = 1;

/// Name of the timestamp field in every report.
pub const TIMESTAMP_FIELD: &str = "generated_at";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Document<T> {
    pub schema_version: u32,
    pub generated_at: String,
    #[serde(flatten)]
    pub body: T,
}

impl<T> Document<T> {
    pub fn new(body: T) -> Self {
        Document {
            schema_version: REPORT_SCHEMA_VERSION,
            generated_at: chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true),
            body,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitSizes {
    pub train: usize,
    pub validation: usize,
    pub test: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PoolRow {
    pub id: ClassifierId,
    pub validation: Scores,
}

/// One classifier pick of the level sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Pick {
    pub metric: Metric,
    pub members: Vec<ClassifierId>,
    pub mean_pairwise_distance: f64,
    /// Stacked validation score under `metric`.
    pub validation_score: Option<f64>,
}

impl Pick {
    fn new(metric: Metric, c: &EnsembleCandidate) -> Self {
        Pick {
            metric,
            members: c.members.clone(),
            mean_pairwise_distance: c.mean_pairwise_distance,
            validation_score: c.validation_score,
        }
    }
}

/// All picks at one hierarchy level.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevelRow {
    pub k: usize,
    pub picks: Vec<Pick>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Chosen {
    pub rule: String,
    pub level_k: usize,
    #[serde(flatten)]
    pub pick: Pick,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelectionReport {
    pub linkage: Linkage,
    pub conversion: DistanceConversion,
    pub meta_kind: MetaKind,
    /// Metric whose candidates the final rule ranks.
    pub metric: Metric,
    pub levels: Vec<LevelRow>,
    pub chosen: Chosen,
}

impl SelectionReport {
    pub fn new(outcome: &SelectionOutcome, config: &divsel_core::SelectionConfig) -> Self {
        let p = outcome.dendrogram.leaf_ids().len();
        let levels = (1..=p)
            .map(|k| LevelRow {
                k,
                picks: outcome
                    .candidates
                    .iter()
                    .map(|(m, cands)| Pick::new(*m, &cands[k - 1]))
                    .collect(),
            })
            .collect();
        SelectionReport {
            linkage: config.linkage,
            conversion: config.conversion,
            meta_kind: config.meta_kind,
            metric: config.metric,
            levels,
            chosen: Chosen {
                rule: config.rule.name(),
                level_k: outcome.chosen.level_k,
                pick: Pick::new(config.metric, &outcome.chosen),
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FinalRow {
    pub rule: String,
    pub level_k: usize,
    pub members: Vec<ClassifierId>,
    pub mean_pairwise_distance: f64,
    /// Stacked scores on VALIDATION.
    pub validation: Scores,
    pub test: Scores,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub config: RunConfig,
    /// Class names by index.
    pub labels: Vec<String>,
    pub split_sizes: SplitSizes,
    pub pool: Vec<PoolRow>,
    pub selection: SelectionReport,
    #[serde(rename = "final")]
    pub final_ensemble: FinalRow,
    /// Files written next to the report.
    pub artifacts: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum RowKind {
    Monolithic,
    /// All members sharing one algorithm.
    GroupA,
    /// All members sharing one extractor.
    GroupB,
    /// The whole pool.
    GroupC,
    /// The selected ensemble.
    GroupD,
    Elbow,
    Baseline,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompareRow {
    pub kind: RowKind,
    /// Display name with the member count, e.g. `A-LR (4)`.
    pub name: String,
    pub member_count: usize,
    pub members: Vec<ClassifierId>,
    pub test: Scores,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompareReport {
    pub num_classes: usize,
    pub test_rows: usize,
    pub rule: String,
    pub meta_kind: MetaKind,
    pub elbow_k: Option<usize>,
    pub rows: Vec<CompareRow>,
}

impl CompareReport {
    pub fn rows_of(&self, kind: RowKind) -> impl Iterator<Item = &CompareRow> {
        self.rows.iter().filter(move |r| r.kind == kind)
    }

    pub fn row(&self, kind: RowKind) -> Option<&CompareRow> {
        self.rows_of(kind).next()
    }
}

/// Blanks the timestamp line of a pretty-printed report, leaving every
/// other byte untouched.
pub fn without_timestamp(json: &str) -> String {
    let key = format!("\"{TIMESTAMP_FIELD}\":");
    json.split_inclusive('\n')
        .map(|line| {
            if line.trim_start().starts_with(&key) {
                let indent = &line[..line.len() - line.trim_start().len()];
                format!("{indent}{key} null,\n")
            } else {
                line.to_string()
            }
        })
        .collect()
}
