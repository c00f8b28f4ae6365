#[path = "../../core/tests/support/mod.rs"]
mod support;

use std::path::Path;
use std::process::Command;

use divsel::formats::{self, load_json, StackDoc};
use divsel::report::{without_timestamp, RowKind};
use divsel::synth::bundled_toy_path;
use divsel::workflow::{self, compare_matrices, train_pool_parallel};
use divsel::RunConfig;
use divsel_core::text::{predict_matrix, train_pool};
use divsel_core::{split_corpus, FinalRule, LabelMap, SelectionConfig, Split};
use serde_json::Value;
use support::fixtures::{group_of, redundant_pool};

fn toy_config(out: &Path) -> RunConfig {
    RunConfig {
        output_dir: out.to_owned(),
        ..RunConfig::new(bundled_toy_path())
    }
}

fn schema(name: &str) -> Value {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join(format!("schemas/{name}.v1.schema.json"));
    serde_json::from_slice(&std::fs::read(path).unwrap()).unwrap()
}

fn assert_valid(schema_name: &str, file: &Path) {
    let validator = jsonschema::validator_for(&schema(schema_name)).unwrap();
    let doc: Value = serde_json::from_slice(&std::fs::read(file).unwrap()).unwrap();
    let errors: Vec<String> = validator.iter_errors(&doc).map(|e| e.to_string()).collect();
    assert!(errors.is_empty(), "{}: {errors:?}", file.display());
}

#[test]
fn parallel_pool_matches_sequential() {
    let cfg = toy_config(Path::new("unused"));
    let file = formats::read_corpus_file(&cfg.corpus).unwrap();
    let corpus = split_corpus(file.instances, 2, cfg.ratios, 5).unwrap();
    let e = cfg.extractor_specs().unwrap();
    let a = cfg.algorithm_list().unwrap();
    let seq = train_pool(&corpus, &e, &a, &cfg.pool_config()).unwrap();
    let par = train_pool_parallel(&corpus, &e, &a, &cfg.pool_config()).unwrap();
    assert_eq!(seq.ids(), par.ids());
    for split in [Split::Validation, Split::Test] {
        assert_eq!(
            predict_matrix(&seq, &corpus, split).unwrap(),
            predict_matrix(&par, &corpus, split).unwrap()
        );
    }
}

#[test]
fn run_writes_schema_valid_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let out = workflow::cmd_run(&toy_config(dir.path())).unwrap();
    let report = &out.report.body;
    assert_eq!(report.pool.len(), 12);
    assert_eq!(report.selection.levels.len(), 12);
    assert_eq!(report.labels, ["fake", "real"]);

    assert_valid("run_report", &dir.path().join(workflow::REPORT_FILE));
    assert_valid("selection_report", &dir.path().join(workflow::SELECTION_FILE));
    assert_valid("dendrogram", &dir.path().join(workflow::DENDROGRAM_FILE));
    assert_valid("stack", &dir.path().join(workflow::STACK_FILE));
    assert_valid(
        "matrix_meta",
        &formats::sidecar_path(&dir.path().join(workflow::VALIDATION_MATRIX_FILE)),
    );

    // written artifacts reload to the in-memory values
    let (val, _) =
        formats::load_prediction_matrix(&dir.path().join(workflow::VALIDATION_MATRIX_FILE), None).unwrap();
    assert_eq!(val, out.validation);
    let stack: StackDoc = load_json(&dir.path().join(workflow::STACK_FILE)).unwrap();
    assert_eq!(stack.stack, out.outcome.stack);
    let dendro: formats::DendrogramDoc = load_json(&dir.path().join(workflow::DENDROGRAM_FILE)).unwrap();
    assert_eq!(dendro.dendrogram().unwrap(), out.outcome.dendrogram);
    let diss = formats::read_dissimilarity(
        formats::open_file(&dir.path().join(workflow::DISSIMILARITY_FILE)).unwrap(),
    )
    .unwrap();
    assert_eq!(diss, out.outcome.matrix);
}

#[test]
fn reports_differ_only_in_timestamp() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = toy_config(dir.path());
    cfg.seed = 9;
    let snapshot = || {
        workflow::cmd_run(&cfg).unwrap();
        [workflow::REPORT_FILE, workflow::SELECTION_FILE, workflow::STACK_FILE, workflow::DENDROGRAM_FILE, workflow::DISSIMILARITY_FILE]
            .map(|f| without_timestamp(&std::fs::read_to_string(dir.path().join(f)).unwrap()))
    };
    let first = snapshot();
    let second = snapshot();
    assert_eq!(first, second);
}

#[test]
fn stage_name_is_reported() {
    let mut cfg = toy_config(Path::new("unused"));
    cfg.algorithms = vec!["SVM".into()];
    let err = workflow::execute_run(&cfg).unwrap_err();
    assert!(format!("{err:#}").starts_with("stage configure"), "{err:#}");
    cfg.corpus = "does/not/exist.csv".into();
    let err = workflow::execute_run(&cfg).unwrap_err();
    assert!(format!("{err:#}").starts_with("stage read_corpus"), "{err:#}");
}

#[test]
fn rules_agree_on_the_redundant_pool() {
    let val = redundant_pool(600, Split::Validation, 31);
    let pick = |rule| {
        let cfg = SelectionConfig {
            rule,
            ..SelectionConfig::default()
        };
        let o = divsel_core::select_ensemble(&val, &cfg).unwrap();
        divsel::report::SelectionReport::new(&o, &cfg).chosen
    };
    let a = pick(FinalRule::MaxDiversity);
    let b = pick(FinalRule::MaxValidation);
    assert_ne!(a.rule, b.rule);
    assert_eq!(a.pick.members, b.pick.members);
}

#[test]
fn compare_on_the_redundant_pool() {
    let val = redundant_pool(600, Split::Validation, 41);
    let test = redundant_pool(600, Split::Test, 42);
    let report = compare_matrices(&val, &test, &SelectionConfig::default()).unwrap();
    assert_eq!(report.rows_of(RowKind::Monolithic).count(), 12);
    assert_eq!(report.rows_of(RowKind::GroupA).count(), 3);
    assert_eq!(report.rows_of(RowKind::GroupB).count(), 4);
    let c = report.row(RowKind::GroupC).unwrap();
    let d = report.row(RowKind::GroupD).unwrap();
    assert_eq!(c.member_count, 12);
    assert_eq!(c.name, "C (12)");
    assert!(d.member_count < c.member_count);
    assert!((d.test.accuracy - c.test.accuracy).abs() <= 0.02);
    let groups: std::collections::BTreeSet<&str> = d.members.iter().map(group_of).collect();
    assert_eq!(groups.len(), d.member_count);
    assert_eq!(report.row(RowKind::Baseline).unwrap().test.accuracy, 0.5);
}

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_divsel"))
}

#[test]
fn cli_matrix_subcommands() {
    let dir = tempfile::tempdir().unwrap();
    let val = dir.path().join("val.csv");
    let test = dir.path().join("test.csv");
    let labels = LabelMap::new(vec!["fake".into(), "real".into()]);
    formats::save_prediction_matrix(&val, &redundant_pool(600, Split::Validation, 51), &labels).unwrap();
    formats::save_prediction_matrix(&test, &redundant_pool(600, Split::Test, 52), &labels).unwrap();
    let out = dir.path().join("out");

    let ingest = bin().args(["ingest", "--matrix"]).arg(&val).output().unwrap();
    assert!(ingest.status.success());
    let summary: Value = serde_json::from_slice(&ingest.stdout).unwrap();
    assert_eq!(summary["classifiers"].as_array().unwrap().len(), 12);

    for args in [
        vec!["diversity", "--matrix"],
        vec!["cluster", "--k", "3", "--matrix"],
        vec!["select", "--rule", "MAX-DIVERSITY", "--matrix"],
        vec!["stack", "--meta-kind", "VOTE", "--validation"],
    ] {
        let status = bin().args(&args).arg(&val).env("DIVSEL_OUT", &out).output().unwrap();
        assert!(status.status.success(), "{args:?}: {}", String::from_utf8_lossy(&status.stderr));
    }
    for f in [workflow::DISSIMILARITY_FILE, workflow::DENDROGRAM_FILE, workflow::SELECTION_FILE, workflow::STACK_FILE] {
        assert!(out.join(f).exists(), "{f}");
    }
    let cluster = bin()
        .args(["cluster", "--k", "2", "--dissimilarity"])
        .arg(out.join(workflow::DISSIMILARITY_FILE))
        .env("DIVSEL_OUT", &out)
        .output()
        .unwrap();
    assert!(cluster.status.success());

    let applied = bin()
        .args(["stack", "--load"])
        .arg(out.join(workflow::STACK_FILE))
        .arg("--test")
        .arg(&test)
        .output()
        .unwrap();
    assert!(applied.status.success(), "{}", String::from_utf8_lossy(&applied.stderr));
    let scores: Value = serde_json::from_slice(&applied.stdout).unwrap();
    assert!(scores["accuracy"].as_f64().unwrap() > 0.9);

    let compare = bin()
        .args(["compare", "--validation"])
        .arg(&val)
        .arg("--test")
        .arg(&test)
        .arg("--out")
        .arg(&out)
        .output()
        .unwrap();
    assert!(compare.status.success(), "{}", String::from_utf8_lossy(&compare.stderr));
    assert_valid("compare_report", &out.join(workflow::COMPARE_FILE));
}

#[test]
fn cli_rejects_bad_matrix_with_line_number() {
    let dir = tempfile::tempdir().unwrap();
    let val = dir.path().join("bad.csv");
    std::fs::write(&val, "truth,CV-NB,TFIDF-LR\n0,0,1\n1,5,1\n").unwrap();
    std::fs::write(
        formats::sidecar_path(&val),
        r#"{"schema_version":1,"num_classes":2,"split":"VALIDATION","labels":["a","b"]}"#,
    )
    .unwrap();
    let out = bin().args(["ingest", "--matrix"]).arg(&val).output().unwrap();
    assert!(!out.status.success());
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("line 3"), "{err}");
}

#[test]
fn cli_run_honours_output_env_and_documents_defaults() {
    let dir = tempfile::tempdir().unwrap();
    let out = bin()
        .args(["run", "--corpus"])
        .arg(bundled_toy_path())
        .env("DIVSEL_OUT", dir.path())
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(dir.path().join(workflow::REPORT_FILE).exists());

    let help = bin().args(["run", "--help"]).output().unwrap();
    let help = String::from_utf8_lossy(&help.stdout);
    for needle in ["[default: complete]", "[default: MAX-VALIDATION]", "[default: 0.6,0.2,0.2]", "[default: divsel-out]", "DIVSEL_OUT"] {
        assert!(help.contains(needle), "missing {needle} in\n{help}");
    }

    let bad = bin().args(["run", "--corpus", "missing.csv"]).env("DIVSEL_OUT", dir.path()).output().unwrap();
    assert!(!bad.status.success());
    assert!(String::from_utf8_lossy(&bad.stderr).contains("stage read_corpus"));
}

#[test]
fn config_file_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = toy_config(dir.path());
    cfg.rule = FinalRule::Weighted(0.25);
    let path = dir.path().join("config.json");
    formats::save_json(&path, &cfg).unwrap();
    let back: RunConfig = load_json(&path).unwrap();
    assert_eq!(back, cfg);
    let minimal: RunConfig = serde_json::from_str(r#"{"corpus":"x.csv"}"#).unwrap();
    assert_eq!(minimal, RunConfig::new("x.csv"));
}
