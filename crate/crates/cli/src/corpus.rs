//! Corpus manifests and external score files.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::path::{Path, PathBuf};

use readgauge::labeling::as_classes;
use readgauge::{Document, RawLabel};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("cannot read {path}: {reason}")]
    Read { path: PathBuf, reason: String },
    #[error("{path}: row {row}: {reason}")]
    BadRow { path: PathBuf, row: usize, reason: String },
    #[error("duplicate doc_id {0}")]
    DuplicateId(String),
    #[error("document {doc_id} missing: {path}")]
    MissingDoc { doc_id: String, path: PathBuf },
    #[error("duplicate score {score} for doc_id {doc_id}")]
    DuplicateScore { doc_id: String, score: String },
    #[error("no {score} score for doc_id {doc_id}")]
    MissingScore { doc_id: String, score: String },
}

pub const MANIFEST_HEADER: [&str; 5] = ["doc_id", "path", "class_name", "age_low", "age_high"];

#[derive(Debug, Clone, PartialEq)]
pub struct ManifestRow {
    pub doc_id: String,
    pub path: PathBuf,
    pub class_name: String,
    pub age_low: Option<f64>,
    pub age_high: Option<f64>,
}

/// Labeled documents with class ids assigned.
#[derive(Debug, Clone)]
pub struct Dataset {
    pub docs: Vec<Document>,
    pub labels: Vec<usize>,
    pub class_names: Vec<String>,
}

impl Dataset {
    pub fn doc_ids(&self) -> Vec<&str> {
        self.docs.iter().map(Document::doc_id).collect()
    }

    pub fn n_classes(&self) -> usize {
        self.class_names.len()
    }

    pub fn len(&self) -> usize {
        self.docs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.docs.is_empty()
    }
}

fn read_err(path: &Path, e: impl ToString) -> CorpusError {
    CorpusError::Read { path: path.to_path_buf(), reason: e.to_string() }
}

fn reader(path: &Path) -> Result<csv::Reader<std::fs::File>, CorpusError> {
    csv::ReaderBuilder::new().trim(csv::Trim::All).from_path(path).map_err(|e| read_err(path, e))
}

fn optional_age(field: Option<&str>, path: &Path, row: usize) -> Result<Option<f64>, CorpusError> {
    match field.map(str::trim).filter(|s| !s.is_empty()) {
        None => Ok(None),
        Some(s) => s.parse::<f64>().ok().filter(|v| v.is_finite()).map(Some).ok_or_else(|| CorpusError::BadRow {
            path: path.to_path_buf(),
            row,
            reason: format!("bad age {s:?}"),
        }),
    }
}

/// Rows of `doc_id,path,class_name[,age_low,age_high]`; relative paths are
/// resolved against the manifest's directory.
pub fn read_manifest(path: &Path) -> Result<Vec<ManifestRow>, CorpusError> {
    let base = path.parent().unwrap_or(Path::new("."));
    let mut rows = Vec::new();
    let mut seen = HashSet::new();
    for (i, rec) in reader(path)?.records().enumerate() {
        let row = i + 2;
        let rec = rec.map_err(|e| read_err(path, e))?;
        let bad = |reason: &str| CorpusError::BadRow { path: path.to_path_buf(), row, reason: reason.to_string() };
        let (Some(doc_id), Some(doc_path), Some(class_name)) = (rec.get(0), rec.get(1), rec.get(2)) else {
            return Err(bad("expected doc_id,path,class_name"));
        };
        if doc_id.is_empty() {
            return Err(bad("empty doc_id"));
        }
        if !seen.insert(doc_id.to_string()) {
            return Err(CorpusError::DuplicateId(doc_id.to_string()));
        }
        let age_low = optional_age(rec.get(3), path, row)?;
        let age_high = optional_age(rec.get(4), path, row)?;
        if let (Some(lo), Some(hi)) = (age_low, age_high) {
            if lo > hi {
                return Err(bad("age_low exceeds age_high"));
            }
        }
        rows.push(ManifestRow {
            doc_id: doc_id.to_string(),
            path: base.join(doc_path),
            class_name: class_name.to_string(),
            age_low,
            age_high,
        });
    }
    Ok(rows)
}

pub fn ingest_corpus(manifest: &Path, class_order: Option<&[String]>) -> Result<Dataset, CorpusError> {
    let rows = read_manifest(manifest)?;
    let mut docs = Vec::with_capacity(rows.len());
    for r in &rows {
        let text = std::fs::read_to_string(&r.path)
            .map_err(|_| CorpusError::MissingDoc { doc_id: r.doc_id.clone(), path: r.path.clone() })?;
        let label = match (r.age_low, r.age_high) {
            (Some(lo), Some(hi)) => RawLabel::with_ages(&r.class_name, lo, hi),
            _ => RawLabel::class(&r.class_name),
        };
        docs.push(Document::new(&r.doc_id, &text, label));
    }
    let raw: Vec<RawLabel> = docs.iter().map(|d| d.label().clone()).collect();
    let (labels, class_names) = as_classes(&raw, class_order);
    Ok(Dataset { docs, labels, class_names })
}

/// `doc_id -> score name -> value`, score names in first-seen order.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ScoreFile {
    pub names: Vec<String>,
    pub values: BTreeMap<String, BTreeMap<String, f64>>,
}

impl ScoreFile {
    pub fn read(path: &Path) -> Result<Self, CorpusError> {
        let mut out = ScoreFile::default();
        let mut names = BTreeSet::new();
        for (i, rec) in reader(path)?.records().enumerate() {
            let row = i + 2;
            let rec = rec.map_err(|e| read_err(path, e))?;
            let bad = |reason: String| CorpusError::BadRow { path: path.to_path_buf(), row, reason };
            let (Some(doc_id), Some(name), Some(value)) = (rec.get(0), rec.get(1), rec.get(2)) else {
                return Err(bad("expected doc_id,score_name,value".into()));
            };
            let v: f64 = value
                .parse()
                .ok()
                .filter(|v: &f64| v.is_finite())
                .ok_or_else(|| bad(format!("bad score {value:?}")))?;
            if names.insert(name.to_string()) {
                out.names.push(name.to_string());
            }
            let per_doc = out.values.entry(doc_id.to_string()).or_default();
            if per_doc.insert(name.to_string(), v).is_some() {
                return Err(CorpusError::DuplicateScore { doc_id: doc_id.into(), score: name.into() });
            }
        }
        Ok(out)
    }

    /// Every score for `doc_id`, in file order; any gap is an error.
    pub fn scores_for(&self, doc_id: &str) -> Result<Vec<(String, f64)>, CorpusError> {
        self.names
            .iter()
            .map(|n| {
                self.values
                    .get(doc_id)
                    .and_then(|m| m.get(n))
                    .map(|&v| (n.clone(), v))
                    .ok_or_else(|| CorpusError::MissingScore { doc_id: doc_id.into(), score: n.clone() })
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
        let p = dir.join(name);
        std::fs::write(&p, text).unwrap();
        p
    }

    #[test]
    fn manifest_examples() {
        let dir = tempfile::tempdir().unwrap();
        for i in 0..3 {
            write(dir.path(), &format!("d{i}.txt"), "The cat sat.");
        }
        let m = write(
            dir.path(),
            "m.csv",
            "doc_id,path,class_name,age_low,age_high\na,d0.txt,easy,7,8\nb,d1.txt,hard,,\nc,d2.txt,easy,7,8\n",
        );
        let ds = ingest_corpus(&m, None).unwrap();
        assert_eq!(ds.len(), 3);
        assert_eq!(ds.labels, vec![0, 1, 0]);
        let m = write(dir.path(), "dup.csv", "doc_id,path,class_name\na,d0.txt,x\na,d1.txt,y\n");
        assert!(matches!(ingest_corpus(&m, None), Err(CorpusError::DuplicateId(id)) if id == "a"));
        let m = write(dir.path(), "miss.csv", "doc_id,path,class_name\nz,nope.txt,x\n");
        let err = ingest_corpus(&m, None).unwrap_err();
        assert!(err.to_string().contains("nope.txt"), "{err}");
    }

    #[test]
    fn score_coverage() {
        let dir = tempfile::tempdir().unwrap();
        let p = write(dir.path(), "s.csv", "doc_id,score_name,value\na,cnn,0.5\nb,cnn,1.5\n");
        let s = ScoreFile::read(&p).unwrap();
        assert_eq!(s.scores_for("a").unwrap(), vec![("cnn".to_string(), 0.5)]);
        let err = s.scores_for("c").unwrap_err();
        assert!(err.to_string().contains("doc_id c"));
        let p = write(dir.path(), "d.csv", "doc_id,score_name,value\na,cnn,0.5\na,cnn,1.5\n");
        assert!(matches!(ScoreFile::read(&p), Err(CorpusError::DuplicateScore { .. })));
        let p = write(dir.path(), "n.csv", "doc_id,score_name,value\na,cnn,NaN\n");
        assert!(matches!(ScoreFile::read(&p), Err(CorpusError::BadRow { row: 2, .. })));
    }
}
