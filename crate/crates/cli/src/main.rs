use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use divsel::config::{self, RunConfig, DEFAULT_OUTPUT_DIR, OUTPUT_DIR_ENV};
use divsel::formats::{self, DendrogramDoc, StackDoc};
use divsel::report::{Document, SelectionReport};
use divsel::workflow;
use divsel_core::pipeline::stack_seed;
use divsel_core::{
    dissimilarity_matrix, evaluate, f_cluster, fit_stack, linkage, predict_stack, select_ensemble,
    ClassifierId, DistanceConversion, FinalRule, Linkage, MetaKind, Metric, SplitRatios,
};

#[derive(Parser)]
#[command(name = "divsel", version, about = "Diversity-driven classifier selection and stacking")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Split a corpus, train the pool, select and stack an ensemble, score it on TEST.
    Run(RunArgs),
    /// Score single classifiers, group ensembles, the selected ensemble, the Elbow ensemble and the random baseline on TEST.
    Compare(CompareArgs),
    /// Validate a prediction-matrix file and print a summary.
    Ingest(IngestArgs),
    /// Write the pairwise dissimilarity matrix of a prediction matrix.
    Diversity(DiversityArgs),
    /// Cluster classifiers and write the dendrogram.
    Cluster(ClusterArgs),
    /// Run the level sweep and final choice on a validation matrix.
    Select(SelectArgs),
    /// Fit a stack on a validation matrix, or apply a saved one.
    Stack(StackArgs),
    /// Write a synthetic two-class corpus.
    Synth(SynthArgs),
}

#[derive(Args)]
struct OutArg {
    /// Output directory [default: divsel-out]
    #[arg(long = "out", env = OUTPUT_DIR_ENV)]
    out: Option<PathBuf>,
}

impl OutArg {
    fn dir(&self) -> PathBuf {
        self.out.clone().unwrap_or_else(|| PathBuf::from(DEFAULT_OUTPUT_DIR))
    }
}

#[derive(Args)]
struct MatrixArg {
    /// Prediction-matrix CSV (`truth,<id>,...`)
    #[arg(long)]
    matrix: PathBuf,
    /// Metadata JSON [default: <matrix>.meta.json]
    #[arg(long)]
    meta: Option<PathBuf>,
}

#[derive(Args, Clone)]
struct SelectionFlags {
    /// Linkage: single, complete, average or centroid
    #[arg(long, default_value = "complete", value_parser = parse_linkage)]
    linkage: Linkage,
    /// Distance conversion: one-minus-double-fault or disagreement
    #[arg(long, default_value = "one-minus-double-fault", value_parser = parse_conversion)]
    conversion: DistanceConversion,
    /// Metric ranking the final candidates: accuracy, precision, recall or f1
    #[arg(long, default_value = "accuracy", value_parser = parse_metric)]
    metric: Metric,
    /// Final rule: MAX-VALIDATION, MAX-DIVERSITY or WEIGHTED(<alpha>)
    #[arg(long, default_value = "MAX-VALIDATION", value_parser = parse_rule)]
    rule: FinalRule,
    /// Meta-classifier: LR, NB or VOTE
    #[arg(long, default_value = "LR", value_parser = parse_meta)]
    meta_kind: MetaKind,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

impl SelectionFlags {
    fn config(&self) -> divsel_core::SelectionConfig {
        config::selection_config(self.linkage, self.conversion, self.metric, self.rule, self.meta_kind, self.seed)
    }
}

#[derive(Args)]
struct PoolFlags {
    /// Corpus CSV with a `text,label` header
    #[arg(long)]
    corpus: Option<PathBuf>,
    /// TRAIN,VALIDATION,TEST fractions
    #[arg(long, default_value = "0.6,0.2,0.2", value_parser = parse_ratios)]
    ratios: SplitRatios,
    /// Feature extractors: CV, TFIDF, HASH, HASH<dim>
    #[arg(long, value_delimiter = ',', default_value = "CV,TFIDF,HASH")]
    extractors: Vec<String>,
    /// Algorithms: NB, LR, KNN, KNN<k>, NC
    #[arg(long, value_delimiter = ',', default_value = "NB,LR,KNN,NC")]
    algorithms: Vec<String>,
    /// JSON run configuration; replaces every pool and selection flag
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    pool: PoolFlags,
    #[command(flatten)]
    selection: SelectionFlags,
    #[command(flatten)]
    out: OutArg,
}

#[derive(Args)]
struct CompareArgs {
    #[command(flatten)]
    pool: PoolFlags,
    /// Validation prediction matrix, used with --test instead of --corpus
    #[arg(long, requires = "test", conflicts_with = "corpus")]
    validation: Option<PathBuf>,
    /// Test prediction matrix
    #[arg(long, requires = "validation")]
    test: Option<PathBuf>,
    #[command(flatten)]
    selection: SelectionFlags,
    #[command(flatten)]
    out: OutArg,
}

#[derive(Args)]
struct IngestArgs {
    #[command(flatten)]
    matrix: MatrixArg,
}

#[derive(Args)]
struct DiversityArgs {
    #[command(flatten)]
    matrix: MatrixArg,
    #[arg(long, default_value = "one-minus-double-fault", value_parser = parse_conversion)]
    conversion: DistanceConversion,
    #[command(flatten)]
    out: OutArg,
}

#[derive(Args)]
struct ClusterArgs {
    /// Prediction matrix to cluster
    #[arg(long, conflicts_with = "dissimilarity", required_unless_present = "dissimilarity")]
    matrix: Option<PathBuf>,
    #[arg(long)]
    meta: Option<PathBuf>,
    /// Dissimilarity CSV written by `diversity`
    #[arg(long)]
    dissimilarity: Option<PathBuf>,
    #[arg(long, default_value = "one-minus-double-fault", value_parser = parse_conversion)]
    conversion: DistanceConversion,
    #[arg(long, default_value = "complete", value_parser = parse_linkage)]
    linkage: Linkage,
    /// Also print the flat cut into this many clusters
    #[arg(long)]
    k: Option<usize>,
    #[command(flatten)]
    out: OutArg,
}

#[derive(Args)]
struct SelectArgs {
    #[command(flatten)]
    matrix: MatrixArg,
    #[command(flatten)]
    selection: SelectionFlags,
    #[command(flatten)]
    out: OutArg,
}

#[derive(Args)]
struct StackArgs {
    /// Validation matrix to fit on
    #[arg(long, required_unless_present = "load")]
    validation: Option<PathBuf>,
    /// Members, comma separated [default: every column]
    #[arg(long, value_delimiter = ',')]
    members: Vec<String>,
    #[arg(long, default_value = "LR", value_parser = parse_meta)]
    meta_kind: MetaKind,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Saved stack to apply instead of fitting
    #[arg(long, conflicts_with = "validation", requires = "test")]
    load: Option<PathBuf>,
    /// Matrix to score the stack on
    #[arg(long)]
    test: Option<PathBuf>,
    #[command(flatten)]
    out: OutArg,
}

#[derive(Args)]
struct SynthArgs {
    #[arg(long, default_value_t = divsel::synth::TOY_SIZE)]
    size: usize,
    #[arg(long, default_value_t = divsel::synth::TOY_SEED)]
    seed: u64,
    /// Destination CSV
    #[arg(long)]
    output: PathBuf,
}

fn parse_linkage(s: &str) -> Result<Linkage, String> {
    Linkage::parse(s).ok_or_else(|| format!("unknown linkage {s:?}"))
}

fn parse_conversion(s: &str) -> Result<DistanceConversion, String> {
    DistanceConversion::parse(s).ok_or_else(|| format!("unknown conversion {s:?}"))
}

fn parse_metric(s: &str) -> Result<Metric, String> {
    Metric::parse(s).ok_or_else(|| format!("unknown metric {s:?}"))
}

fn parse_rule(s: &str) -> Result<FinalRule, String> {
    FinalRule::parse(s).ok_or_else(|| format!("unknown rule {s:?}"))
}

fn parse_meta(s: &str) -> Result<MetaKind, String> {
    MetaKind::parse(s).ok_or_else(|| format!("unknown meta-classifier {s:?}"))
}

fn parse_ratios(s: &str) -> Result<SplitRatios, String> {
    let parts = s
        .split(',')
        .map(|p| p.trim().parse::<f64>().map_err(|e| format!("{p:?}: {e}")))
        .collect::<Result<Vec<_>, _>>()?;
    let [train, validation, test] = parts[..] else {
        return Err("expected three comma-separated fractions".into());
    };
    SplitRatios::new(train, validation, test).map_err(|e| e.to_string())
}

fn run_config(pool: &PoolFlags, selection: &SelectionFlags, out: &OutArg) -> Result<RunConfig> {
    let mut cfg = match &pool.config {
        Some(path) => formats::load_json::<RunConfig>(path)
            .with_context(|| format!("reading config {}", path.display()))?,
        None => {
            let Some(corpus) = &pool.corpus else {
                bail!("either --corpus or --config is required");
            };
            let s = selection;
            RunConfig {
                ratios: pool.ratios,
                seed: s.seed,
                extractors: pool.extractors.clone(),
                algorithms: pool.algorithms.clone(),
                linkage: s.linkage,
                conversion: s.conversion,
                metric: s.metric,
                rule: s.rule,
                meta_kind: s.meta_kind,
                ..RunConfig::new(corpus)
            }
        }
    };
    if let Some(dir) = &out.out {
        cfg.output_dir = dir.clone();
    }
    Ok(cfg)
}

fn load_matrix(m: &MatrixArg) -> Result<divsel_core::PredictionMatrix> {
    load_matrix_at(&m.matrix, m.meta.as_deref())
}

fn load_matrix_at(path: &Path, meta: Option<&Path>) -> Result<divsel_core::PredictionMatrix> {
    let (pm, _) = formats::load_prediction_matrix(path, meta)
        .with_context(|| format!("ingest {}", path.display()))?;
    Ok(pm)
}

fn print_json<T: serde::Serialize>(value: &T) -> Result<()> {
    println!("{}", serde_json::to_string_pretty(value)?);
    Ok(())
}

fn execute(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Run(a) => {
            let cfg = run_config(&a.pool, &a.selection, &a.out)?;
            let out = workflow::cmd_run(&cfg)?;
            let f = &out.report.body.final_ensemble;
            println!(
                "final ensemble ({}, k={}): {} member(s), TEST accuracy {:.4}",
                f.rule,
                f.level_k,
                f.members.len(),
                f.test.accuracy
            );
            println!("wrote {}", cfg.output_dir.join(workflow::REPORT_FILE).display());
        }
        Command::Compare(a) => {
            let report = match (&a.validation, &a.test) {
                (Some(v), Some(t)) => {
                    let v = load_matrix_at(v, None)?;
                    let t = load_matrix_at(t, None)?;
                    workflow::compare_matrices(&v, &t, &a.selection.config())?
                }
                _ => workflow::compare_corpus(&run_config(&a.pool, &a.selection, &a.out)?)?,
            };
            for r in &report.rows {
                println!(
                    "{:<24} acc {:.4}  P {:.4}  R {:.4}  F1 {:.4}",
                    r.name, r.test.accuracy, r.test.precision, r.test.recall, r.test.f1
                );
            }
            let dir = a.out.dir();
            workflow::write_compare(&dir, &Document::new(report))?;
            println!("wrote {}", dir.join(workflow::COMPARE_FILE).display());
        }
        Command::Ingest(a) => {
            let pm = load_matrix(&a.matrix)?;
            print_json(&serde_json::json!({
                "classifiers": pm.ids(),
                "rows": pm.len(),
                "num_classes": pm.num_classes(),
                "split": pm.split(),
            }))?;
        }
        Command::Diversity(a) => {
            let pm = load_matrix(&a.matrix)?;
            let m = dissimilarity_matrix(&pm, a.conversion).context("stage diversity")?;
            let path = a.out.dir().join(workflow::DISSIMILARITY_FILE);
            formats::save_with(&path, |w| formats::write_dissimilarity(w, &m))?;
            println!("wrote {}", path.display());
        }
        Command::Cluster(a) => {
            let m = match (&a.matrix, &a.dissimilarity) {
                (Some(p), _) => {
                    let pm = load_matrix_at(p, a.meta.as_deref())?;
                    dissimilarity_matrix(&pm, a.conversion).context("stage diversity")?
                }
                (None, Some(d)) => formats::read_dissimilarity(formats::open_file(d)?)
                    .with_context(|| format!("reading {}", d.display()))?,
                (None, None) => bail!("either --matrix or --dissimilarity is required"),
            };
            let z = linkage(&m, a.linkage).context("stage linkage")?;
            let path = a.out.dir().join(workflow::DENDROGRAM_FILE);
            formats::save_json(&path, &DendrogramDoc::new(&z, a.linkage))?;
            if let Some(k) = a.k {
                let cut = f_cluster(&z, k).context("stage f_cluster")?;
                for (id, c) in m.ids().iter().zip(cut) {
                    println!("{id}\t{c}");
                }
            }
            println!("wrote {}", path.display());
        }
        Command::Select(a) => {
            let pm = load_matrix(&a.matrix)?;
            let cfg = a.selection.config();
            let outcome = select_ensemble(&pm, &cfg).context("stage select")?;
            let report = Document::new(SelectionReport::new(&outcome, &cfg));
            let dir = a.out.dir();
            workflow::write_selection_artifacts(&dir, &outcome, &report, cfg.linkage)?;
            let members: Vec<String> = outcome.chosen.members.iter().map(ToString::to_string).collect();
            println!("chosen k={}: {}", outcome.chosen.level_k, members.join(", "));
            println!("wrote {}", dir.join(workflow::SELECTION_FILE).display());
        }
        Command::Stack(a) => {
            let stack = match (&a.load, &a.validation) {
                (Some(path), _) => formats::load_json::<StackDoc>(path)?.stack,
                (None, Some(v)) => {
                    let val = load_matrix_at(v, None)?;
                    let members = if a.members.is_empty() {
                        val.ids().to_vec()
                    } else {
                        a.members
                            .iter()
                            .map(|m| ClassifierId::parse(m))
                            .collect::<divsel_core::Result<Vec<_>>>()?
                    };
                    let stack = fit_stack(&val, &members, a.meta_kind, stack_seed(a.seed, members.len()))
                        .context("stage fit_stack")?;
                    let path = a.out.dir().join(workflow::STACK_FILE);
                    formats::save_json(&path, &StackDoc::new(&stack))?;
                    println!("wrote {}", path.display());
                    stack
                }
                (None, None) => bail!("either --validation or --load is required"),
            };
            if let Some(t) = &a.test {
                let test = load_matrix_at(t, None)?;
                let pred = predict_stack(&stack, &test).context("stage predict_stack")?;
                print_json(&evaluate(&pred, test.truth(), test.num_classes())?)?;
            }
        }
        Command::Synth(a) => {
            let (instances, labels) = divsel::synth::toy_corpus(a.size, a.seed);
            formats::save_with(&a.output, |w| formats::write_corpus(w, &instances, &labels))?;
            println!("wrote {}", a.output.display());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
