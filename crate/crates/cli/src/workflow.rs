//! The end-to-end pipeline behind `run` and `compare`.

use std::path::Path;

use anyhow::{Context, Result};
use divsel_core::pipeline::{score_pool, stack_seed};
use divsel_core::text::{
    fit_extractors, predict_matrix, tokenize_corpus, train_member, Algorithm, ExtractorSpec,
    Pool, PoolConfig,
};
use divsel_core::{
    elbow_select, evaluate, fit_stack, group_heuristics, predict_stack, random_baseline,
    select_ensemble, split_corpus, ClassifierId, Group, LabelMap, LabeledCorpus,
    PredictionMatrix, Scores, SelectionConfig, SelectionOutcome, Split,
};
use rayon::prelude::*;

use crate::config::RunConfig;
use crate::formats::{self, DendrogramDoc, StackDoc};
use crate::report::{
    CompareReport, CompareRow, Document, FinalRow, PoolRow, RowKind, RunReport, SelectionReport,
    SplitSizes,
};

pub const REPORT_FILE: &str = "report.json";
pub const SELECTION_FILE: &str = "selection.json";
pub const COMPARE_FILE: &str = "compare.json";
pub const VALIDATION_MATRIX_FILE: &str = "validation_predictions.csv";
pub const TEST_MATRIX_FILE: &str = "test_predictions.csv";
pub const DISSIMILARITY_FILE: &str = "dissimilarity.csv";
pub const DENDROGRAM_FILE: &str = "dendrogram.json";
pub const STACK_FILE: &str = "stack.json";

fn stage<T, E>(name: &str, r: std::result::Result<T, E>) -> Result<T>
where
    E: std::error::Error + Send + Sync + 'static,
{
    r.with_context(|| format!("stage {name}"))
}

/// Same members, in the same order, as the sequential trainer; each member
/// is fitted on its own thread.
pub fn train_pool_parallel(
    corpus: &LabeledCorpus,
    extractors: &[ExtractorSpec],
    algorithms: &[Algorithm],
    config: &PoolConfig,
) -> divsel_core::Result<Pool> {
    if extractors.is_empty() {
        return Err(divsel_core::Error::Empty("extractor list"));
    }
    if algorithms.is_empty() {
        return Err(divsel_core::Error::Empty("algorithm list"));
    }
    let docs = tokenize_corpus(corpus, Split::Train, &config.preprocess);
    let labels = corpus.labels(Split::Train);
    let spaces = fit_extractors(&docs, extractors, config)?;
    let rows: Vec<Vec<Vec<f64>>> = spaces
        .par_iter()
        .map(|s| docs.iter().map(|d| s.transform(d)).collect())
        .collect();
    let jobs: Vec<(usize, Algorithm)> = (0..extractors.len())
        .flat_map(|e| algorithms.iter().map(move |a| (e, *a)))
        .collect();
    let members = jobs
        .par_iter()
        .map(|&(e, alg)| {
            train_member(
                &extractors[e],
                &spaces[e],
                &rows[e],
                &labels,
                corpus.num_classes(),
                alg,
                config,
            )
        })
        .collect::<divsel_core::Result<Vec<_>>>()?;
    let mut seen = std::collections::BTreeSet::new();
    if let Some(dup) = members.iter().find(|m| !seen.insert(m.id.clone())) {
        return Err(divsel_core::Error::DuplicateId(dup.id.to_string()));
    }
    Ok(Pool {
        members,
        preprocess: config.preprocess.clone(),
        num_classes: corpus.num_classes(),
    })
}

/// Corpus split and trained pool.
#[derive(Debug)]
pub struct Prepared {
    pub corpus: LabeledCorpus,
    pub labels: LabelMap,
    pub pool: Pool,
}

pub fn prepare(config: &RunConfig) -> Result<Prepared> {
    let file = stage("read_corpus", formats::read_corpus_file(&config.corpus))?;
    let num_classes = file.labels.len();
    let corpus = stage(
        "split",
        split_corpus(file.instances, num_classes, config.ratios, config.seed),
    )?;
    let extractors = stage("configure", config.extractor_specs())?;
    let algorithms = stage("configure", config.algorithm_list())?;
    let pool = stage(
        "train_pool",
        train_pool_parallel(&corpus, &extractors, &algorithms, &config.pool_config()),
    )?;
    Ok(Prepared {
        corpus,
        labels: file.labels,
        pool,
    })
}

/// Everything `cmd_run` computes, before anything is written.
#[derive(Debug)]
pub struct RunOutput {
    pub report: Document<RunReport>,
    pub selection: Document<SelectionReport>,
    pub outcome: SelectionOutcome,
    pub validation: PredictionMatrix,
    /// TEST predictions of the final members only.
    pub test: PredictionMatrix,
    pub labels: LabelMap,
}

pub fn execute_run(config: &RunConfig) -> Result<RunOutput> {
    let prepared = prepare(config)?;
    let validation = stage(
        "predict_validation",
        predict_matrix(&prepared.pool, &prepared.corpus, Split::Validation),
    )?;
    let sel_cfg = config.selection_config();
    let outcome = stage("select", select_ensemble(&validation, &sel_cfg))?;

    let finals = stage("predict_test", prepared.pool.reordered(&outcome.chosen.members))?;
    let test = stage(
        "predict_test",
        predict_matrix(&finals, &prepared.corpus, Split::Test),
    )?;
    let test_scores = stage("evaluate_test", stacked_scores(&outcome.stack, &test))?;
    let validation_scores = stage("evaluate_validation", stacked_scores(&outcome.stack, &validation))?;

    let selection = SelectionReport::new(&outcome, &sel_cfg);
    let report = RunReport {
        config: config.clone(),
        labels: prepared.labels.names().to_vec(),
        split_sizes: SplitSizes {
            train: prepared.corpus.split_len(Split::Train),
            validation: prepared.corpus.split_len(Split::Validation),
            test: prepared.corpus.split_len(Split::Test),
        },
        pool: pool_rows(&outcome),
        selection: selection.clone(),
        final_ensemble: FinalRow {
            rule: sel_cfg.rule.name(),
            level_k: outcome.chosen.level_k,
            members: outcome.chosen.members.clone(),
            mean_pairwise_distance: outcome.chosen.mean_pairwise_distance,
            validation: validation_scores,
            test: test_scores,
        },
        artifacts: [
            VALIDATION_MATRIX_FILE,
            TEST_MATRIX_FILE,
            DISSIMILARITY_FILE,
            DENDROGRAM_FILE,
            SELECTION_FILE,
            STACK_FILE,
        ]
        .iter()
        .map(|s| s.to_string())
        .collect(),
    };
    Ok(RunOutput {
        report: Document::new(report),
        selection: Document::new(selection),
        outcome,
        validation,
        test,
        labels: prepared.labels,
    })
}

fn pool_rows(outcome: &SelectionOutcome) -> Vec<PoolRow> {
    outcome
        .pool_scores
        .entries
        .iter()
        .map(|e| PoolRow {
            id: e.members[0].clone(),
            validation: e.scores,
        })
        .collect()
}

fn stacked_scores(stack: &divsel_core::StackedEnsemble, pm: &PredictionMatrix) -> divsel_core::Result<Scores> {
    let pred = predict_stack(stack, pm)?;
    evaluate(&pred, pm.truth(), pm.num_classes())
}

/// Writes the selection artifacts shared by `run` and `select`.
pub fn write_selection_artifacts(
    dir: &Path,
    outcome: &SelectionOutcome,
    selection: &Document<SelectionReport>,
    linkage: divsel_core::Linkage,
) -> Result<()> {
    stage(
        "write_dissimilarity",
        formats::save_with(&dir.join(DISSIMILARITY_FILE), |w| {
            formats::write_dissimilarity(w, &outcome.matrix)
        }),
    )?;
    stage(
        "write_dendrogram",
        formats::save_json(
            &dir.join(DENDROGRAM_FILE),
            &DendrogramDoc::new(&outcome.dendrogram, linkage),
        ),
    )?;
    stage("write_selection", formats::save_json(&dir.join(SELECTION_FILE), selection))?;
    stage(
        "write_stack",
        formats::save_json(&dir.join(STACK_FILE), &StackDoc::new(&outcome.stack)),
    )?;
    Ok(())
}

/// Runs the pipeline and writes every artifact into `config.output_dir`.
pub fn cmd_run(config: &RunConfig) -> Result<RunOutput> {
    let out = execute_run(config)?;
    let dir = &config.output_dir;
    stage(
        "write_validation_matrix",
        formats::save_prediction_matrix(&dir.join(VALIDATION_MATRIX_FILE), &out.validation, &out.labels),
    )?;
    stage(
        "write_test_matrix",
        formats::save_prediction_matrix(&dir.join(TEST_MATRIX_FILE), &out.test, &out.labels),
    )?;
    write_selection_artifacts(dir, &out.outcome, &out.selection, config.linkage)?;
    stage("write_report", formats::save_json(&dir.join(REPORT_FILE), &out.report))?;
    Ok(out)
}

fn distinct<'a>(tokens: impl Iterator<Item = &'a str>) -> Vec<String> {
    let mut out: Vec<String> = Vec::new();
    for t in tokens {
        if !out.iter().any(|o| o == t) {
            out.push(t.to_string());
        }
    }
    out
}

fn stacked_row(
    kind: RowKind,
    name: &str,
    members: Vec<ClassifierId>,
    validation: &PredictionMatrix,
    test: &PredictionMatrix,
    config: &SelectionConfig,
) -> divsel_core::Result<CompareRow> {
    let stack = fit_stack(validation, &members, config.meta_kind, stack_seed(config.seed, members.len()))?;
    Ok(CompareRow {
        kind,
        name: format!("{name} ({})", members.len()),
        member_count: members.len(),
        members,
        test: stacked_scores(&stack, test)?,
    })
}

/// Scores every comparison row on TEST. Stacks are fitted on VALIDATION.
pub fn compare_matrices(
    validation: &PredictionMatrix,
    test: &PredictionMatrix,
    config: &SelectionConfig,
) -> Result<CompareReport> {
    let test = stage("align", test.restrict(validation.ids()))?;
    if test.num_classes() != validation.num_classes() {
        anyhow::bail!(
            "stage align: validation has {} classes, test has {}",
            validation.num_classes(),
            test.num_classes()
        );
    }
    let ids = validation.ids();
    let mut rows = Vec::new();
    let singles = stage("evaluate_pool", score_pool(&test))?;
    for e in &singles.entries {
        rows.push(CompareRow {
            kind: RowKind::Monolithic,
            name: e.name.clone(),
            member_count: 1,
            members: e.members.clone(),
            test: e.scores,
        });
    }
    let groups = distinct(ids.iter().map(ClassifierId::algorithm))
        .into_iter()
        .map(|a| (RowKind::GroupA, format!("A-{a}"), Group::Algorithm(a)))
        .chain(
            distinct(ids.iter().map(ClassifierId::extractor))
                .into_iter()
                .map(|e| (RowKind::GroupB, format!("B-{e}"), Group::Extractor(e))),
        )
        .chain(std::iter::once((RowKind::GroupC, "C".to_string(), Group::All)))
        .collect::<Vec<_>>();
    let grouped = groups
        .par_iter()
        .map(|(kind, name, group)| {
            let members = group_heuristics(ids, group)?;
            stacked_row(*kind, name, members, validation, &test, config)
        })
        .collect::<divsel_core::Result<Vec<_>>>();
    rows.extend(stage("stack_groups", grouped)?);

    let outcome = stage("select", select_ensemble(validation, config))?;
    let finals = stage("predict_test", test.restrict(&outcome.chosen.members))?;
    rows.push(CompareRow {
        kind: RowKind::GroupD,
        name: format!("D ({})", outcome.chosen.members.len()),
        member_count: outcome.chosen.members.len(),
        members: outcome.chosen.members.clone(),
        test: stage("evaluate_test", stacked_scores(&outcome.stack, &finals))?,
    });

    let elbow_k = if ids.len() >= 3 {
        let k = stage("elbow", elbow_select(&outcome.dendrogram, &outcome.matrix))?;
        let members = outcome.candidates_for(config.metric)[k - 1].members.clone();
        rows.push(stage(
            "elbow",
            stacked_row(RowKind::Elbow, "ELBOW", members, validation, &test, config),
        )?);
        Some(k)
    } else {
        None
    };

    let b = stage("baseline", random_baseline(validation.num_classes()))?;
    rows.push(CompareRow {
        kind: RowKind::Baseline,
        name: "BASELINE".to_string(),
        member_count: 0,
        members: Vec::new(),
        test: Scores {
            accuracy: b,
            precision: b,
            recall: b,
            f1: b,
        },
    });

    Ok(CompareReport {
        num_classes: validation.num_classes(),
        test_rows: test.len(),
        rule: config.rule.name(),
        meta_kind: config.meta_kind,
        elbow_k,
        rows,
    })
}

/// Trains the pool on a corpus and compares on its TEST split.
pub fn compare_corpus(config: &RunConfig) -> Result<CompareReport> {
    let prepared = prepare(config)?;
    let validation = stage(
        "predict_validation",
        predict_matrix(&prepared.pool, &prepared.corpus, Split::Validation),
    )?;
    let test = stage(
        "predict_test",
        predict_matrix(&prepared.pool, &prepared.corpus, Split::Test),
    )?;
    compare_matrices(&validation, &test, &config.selection_config())
}

pub fn write_compare(dir: &Path, report: &Document<CompareReport>) -> Result<()> {
    stage("write_report", formats::save_json(&dir.join(COMPARE_FILE), report))
}
