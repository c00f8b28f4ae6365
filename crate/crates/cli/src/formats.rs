//! Delimited-text and JSON file formats.
//!
//! * corpus: `text,label` CSV, labels interned in first-appearance order;
//! * prediction matrix: `truth,<id>,...` CSV with a JSON sidecar;
//! * dissimilarity matrix: square CSV with an id header row and column;
//! * dendrogram, stack: JSON documents.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use divsel_core::corpus::Instance;
use divsel_core::{
    ClassifierId, Dendrogram, DissimilarityMatrix, LabelMap, PredictionMatrix, Split,
    StackedEnsemble,
};
use serde::{Deserialize, Serialize};

pub const MATRIX_SCHEMA_VERSION: u32 = 1;

#[derive(Debug, thiserror::Error)]
pub enum FormatError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("line {line}: {message}")]
    Line { line: u64, message: String },
    #[error("{0}")]
    Invalid(String),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Core(#[from] divsel_core::Error),
}

pub type Result<T, E = FormatError> = std::result::Result<T, E>;

fn line_err(line: u64, message: impl Into<String>) -> FormatError {
    FormatError::Line {
        line,
        message: message.into(),
    }
}

fn open(path: &Path) -> Result<BufReader<File>> {
    File::open(path).map(BufReader::new).map_err(|source| FormatError::Io {
        path: path.to_owned(),
        source,
    })
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|source| FormatError::Io {
            path: dir.to_owned(),
            source,
        })?;
    }
    File::create(path).map(BufWriter::new).map_err(|source| FormatError::Io {
        path: path.to_owned(),
        source,
    })
}

/// Parsed corpus file: instances plus the label mapping.
#[derive(Debug, Clone, PartialEq)]
pub struct CorpusFile {
    pub instances: Vec<Instance>,
    pub labels: LabelMap,
}

pub fn read_corpus<R: Read>(reader: R) -> Result<CorpusFile> {
    let mut rdr = csv::ReaderBuilder::new().flexible(true).from_reader(reader);
    let header = rdr.headers()?.clone();
    let col = |name: &str| header.iter().position(|h| h.trim() == name);
    let (Some(text_col), Some(label_col)) = (col("text"), col("label")) else {
        return Err(line_err(1, "header must contain `text` and `label` columns"));
    };
    let mut labels = LabelMap::default();
    let mut instances = Vec::new();
    for record in rdr.records() {
        let record = record?;
        let line = record.position().map_or(0, |p| p.line());
        let (Some(text), Some(label)) = (record.get(text_col), record.get(label_col)) else {
            return Err(line_err(line, format!("expected {} fields, found {}", header.len(), record.len())));
        };
        let label = label.trim();
        if label.is_empty() {
            return Err(line_err(line, "empty label"));
        }
        instances.push(Instance::new(text, labels.intern(label)));
    }
    if instances.is_empty() {
        return Err(FormatError::Invalid("corpus has no rows".into()));
    }
    Ok(CorpusFile { instances, labels })
}

pub fn read_corpus_file(path: &Path) -> Result<CorpusFile> {
    read_corpus(open(path)?)
}

pub fn write_corpus<W: Write>(writer: W, instances: &[Instance], labels: &LabelMap) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["text", "label"])?;
    for inst in instances {
        let name = labels
            .name(inst.label)
            .ok_or_else(|| FormatError::Invalid(format!("label {} has no name", inst.label)))?;
        w.write_record([inst.text.as_str(), name])?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

/// Sidecar of a prediction-matrix file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixMeta {
    pub schema_version: u32,
    pub num_classes: usize,
    pub split: Split,
    /// Class names by index.
    pub labels: Vec<String>,
}

impl MatrixMeta {
    pub fn new(num_classes: usize, split: Split, labels: &LabelMap) -> Self {
        let mut names = labels.names().to_vec();
        names.extend((names.len()..num_classes).map(|i| i.to_string()));
        MatrixMeta {
            schema_version: MATRIX_SCHEMA_VERSION,
            num_classes,
            split,
            labels: names,
        }
    }
}

/// `m.csv` -> `m.meta.json`.
pub fn sidecar_path(matrix: &Path) -> PathBuf {
    matrix.with_extension("meta.json")
}

pub fn write_prediction_matrix<W: Write>(writer: W, pm: &PredictionMatrix) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    let mut header = vec!["truth".to_string()];
    header.extend(pm.ids().iter().map(ToString::to_string));
    w.write_record(&header)?;
    let mut row = Vec::with_capacity(header.len());
    for i in 0..pm.len() {
        row.clear();
        row.push(pm.truth()[i].to_string());
        row.extend((0..pm.num_classifiers()).map(|j| pm.get(i, j).to_string()));
        w.write_record(&row)?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

/// Parses a prediction-matrix CSV. Every rejection names the offending line
/// (the header is line 1).
pub fn read_prediction_matrix<R: Read>(reader: R, meta: &MatrixMeta) -> Result<PredictionMatrix> {
    if meta.labels.len() != meta.num_classes {
        return Err(FormatError::Invalid(format!(
            "metadata lists {} labels for {} classes",
            meta.labels.len(),
            meta.num_classes
        )));
    }
    let mut rdr = csv::ReaderBuilder::new().flexible(true).from_reader(reader);
    let header = rdr.headers()?.clone();
    if header.get(0).map(str::trim) != Some("truth") {
        return Err(line_err(1, "first column must be `truth`"));
    }
    let mut ids: Vec<ClassifierId> = Vec::with_capacity(header.len() - 1);
    for field in header.iter().skip(1) {
        let id = ClassifierId::parse(field.trim()).map_err(|e| line_err(1, e.to_string()))?;
        if ids.contains(&id) {
            return Err(line_err(1, format!("duplicate classifier id {id}")));
        }
        ids.push(id);
    }
    if ids.is_empty() {
        return Err(line_err(1, "no classifier columns"));
    }
    let mut truth = Vec::new();
    let mut columns = vec![Vec::new(); ids.len()];
    for record in rdr.records() {
        let record = record?;
        let line = record.position().map_or(0, |p| p.line());
        if record.len() != header.len() {
            return Err(line_err(
                line,
                format!("expected {} fields, found {}", header.len(), record.len()),
            ));
        }
        for (j, field) in record.iter().enumerate() {
            let label: usize = field.trim().parse().map_err(|_| {
                line_err(line, format!("column {}: {field:?} is not a class index", j + 1))
            })?;
            if label >= meta.num_classes {
                return Err(line_err(
                    line,
                    format!(
                        "column {}: label {label} out of range for {} classes",
                        j + 1,
                        meta.num_classes
                    ),
                ));
            }
            if j == 0 {
                truth.push(label);
            } else {
                columns[j - 1].push(label);
            }
        }
    }
    if truth.is_empty() {
        return Err(FormatError::Invalid("prediction matrix has no rows".into()));
    }
    Ok(PredictionMatrix::new(ids, columns, truth, meta.num_classes, meta.split)?)
}

/// Writes `path` and its sidecar.
pub fn save_prediction_matrix(path: &Path, pm: &PredictionMatrix, labels: &LabelMap) -> Result<()> {
    let mut w = create(path)?;
    write_prediction_matrix(&mut w, pm)?;
    w.flush().map_err(|source| FormatError::Io {
        path: path.to_owned(),
        source,
    })?;
    save_json(&sidecar_path(path), &MatrixMeta::new(pm.num_classes(), pm.split(), labels))
}

/// Reads a matrix and its metadata; `meta` defaults to the sidecar path.
pub fn load_prediction_matrix(path: &Path, meta: Option<&Path>) -> Result<(PredictionMatrix, MatrixMeta)> {
    let meta_path = meta.map_or_else(|| sidecar_path(path), Path::to_owned);
    let meta: MatrixMeta = load_json(&meta_path)?;
    let pm = read_prediction_matrix(open(path)?, &meta)?;
    Ok((pm, meta))
}

pub fn write_dissimilarity<W: Write>(writer: W, m: &DissimilarityMatrix) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    let mut header = vec![String::new()];
    header.extend(m.ids().iter().map(ToString::to_string));
    w.write_record(&header)?;
    for (i, id) in m.ids().iter().enumerate() {
        let mut row = vec![id.to_string()];
        // `{:?}` prints the shortest string that parses back to the same f64.
        row.extend(m.row(i).iter().map(|v| format!("{v:?}")));
        w.write_record(&row)?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

pub fn read_dissimilarity<R: Read>(reader: R) -> Result<DissimilarityMatrix> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .from_reader(reader);
    let mut records = rdr.records();
    let header = records
        .next()
        .ok_or_else(|| FormatError::Invalid("empty matrix file".into()))??;
    let ids = header
        .iter()
        .skip(1)
        .map(|f| ClassifierId::parse(f.trim()).map_err(|e| line_err(1, e.to_string())))
        .collect::<Result<Vec<_>>>()?;
    let mut rows = Vec::with_capacity(ids.len());
    for record in records {
        let record = record?;
        let line = record.position().map_or(0, |p| p.line());
        if record.len() != ids.len() + 1 {
            return Err(line_err(
                line,
                format!("expected {} fields, found {}", ids.len() + 1, record.len()),
            ));
        }
        let row_id = rows.len();
        if ids.get(row_id).map(ToString::to_string).as_deref() != Some(record[0].trim()) {
            return Err(line_err(line, format!("row id {:?} does not match header", &record[0])));
        }
        let values = record
            .iter()
            .skip(1)
            .map(|f| {
                f.trim()
                    .parse::<f64>()
                    .map_err(|_| line_err(line, format!("{f:?} is not a number")))
            })
            .collect::<Result<Vec<_>>>()?;
        rows.push(values);
    }
    Ok(DissimilarityMatrix::from_rows(ids, rows)?)
}

/// Dendrogram document: leaf ids then merge steps in order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DendrogramDoc {
    pub schema_version: u32,
    pub linkage: divsel_core::Linkage,
    pub leaf_ids: Vec<ClassifierId>,
    pub merges: Vec<divsel_core::Merge>,
}

impl DendrogramDoc {
    pub fn new(z: &Dendrogram, linkage: divsel_core::Linkage) -> Self {
        DendrogramDoc {
            schema_version: MATRIX_SCHEMA_VERSION,
            linkage,
            leaf_ids: z.leaf_ids().to_vec(),
            merges: z.merges().to_vec(),
        }
    }

    pub fn dendrogram(&self) -> Result<Dendrogram> {
        Ok(Dendrogram::from_parts(self.leaf_ids.clone(), self.merges.clone())?)
    }
}

/// Trained stack document.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StackDoc {
    pub schema_version: u32,
    /// Width of the one-hot meta-feature layout: members x classes.
    pub meta_dimension: usize,
    pub stack: StackedEnsemble,
}

impl StackDoc {
    pub fn new(stack: &StackedEnsemble) -> Self {
        StackDoc {
            schema_version: MATRIX_SCHEMA_VERSION,
            meta_dimension: stack.meta_dimension(),
            stack: stack.clone(),
        }
    }
}

pub fn save_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut w = create(path)?;
    serde_json::to_writer_pretty(&mut w, value)?;
    w.write_all(b"\n")
        .and_then(|_| w.flush())
        .map_err(|source| FormatError::Io {
            path: path.to_owned(),
            source,
        })
}

pub fn load_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    Ok(serde_json::from_reader(open(path)?)?)
}

pub fn save_with<F>(path: &Path, write: F) -> Result<()>
where
    F: FnOnce(&mut BufWriter<File>) -> Result<()>,
{
    let mut w = create(path)?;
    write(&mut w)?;
    w.flush().map_err(|source| FormatError::Io {
        path: path.to_owned(),
        source,
    })
}

pub fn open_file(path: &Path) -> Result<BufReader<File>> {
    open(path)
}
