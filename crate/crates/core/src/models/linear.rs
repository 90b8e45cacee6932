use std::fmt::Write as _;
use std::path::Path;

use sha2::{Digest, Sha256};

use super::{FeatureMatrix, ModelError, Scaler};
use crate::scalar::Real;

pub const MODEL_FORMAT_VERSION: u32 = 1;
const MAGIC: &str = "readgauge-linear-model";

/// Multi-class linear decision function over standardized inputs.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearModel<T = f64> {
    pub feature_names: Vec<String>,
    pub class_names: Vec<String>,
    pub scaler: Scaler<T>,
    /// `n_classes x n_features`.
    pub weights: Vec<Vec<T>>,
    pub bias: Vec<T>,
}

/// Index of the largest value; the first one wins ties.
pub fn argmax<T: Real>(values: &[T]) -> usize {
    let mut best = 0;
    for (i, &v) in values.iter().enumerate().skip(1) {
        if v > values[best] {
            best = i;
        }
    }
    best
}

impl<T: Real> LinearModel<T> {
    pub fn n_classes(&self) -> usize {
        self.bias.len()
    }

    pub fn check_columns(&self, x: &FeatureMatrix<T>) -> Result<(), ModelError> {
        if x.names() == self.feature_names.as_slice() {
            return Ok(());
        }
        let detail = if x.n_cols() != self.feature_names.len() {
            format!("expected {} features, found {}", self.feature_names.len(), x.n_cols())
        } else {
            let j = (0..x.n_cols()).find(|&j| x.names()[j] != self.feature_names[j]).unwrap_or(0);
            format!("column {j}: expected {}, found {}", self.feature_names[j], x.names()[j])
        };
        Err(ModelError::FeatureMismatch(detail))
    }

    /// Class scores for an already standardized row.
    pub fn scores_scaled(&self, row: &[T]) -> Vec<T> {
        self.weights
            .iter()
            .zip(&self.bias)
            .map(|(w, &b)| w.iter().zip(row).fold(b, |acc, (&wi, &xi)| acc + wi * xi))
            .collect()
    }

    pub fn decision_function(&self, x: &FeatureMatrix<T>) -> Result<Vec<Vec<T>>, ModelError> {
        self.check_columns(x)?;
        let mut buf = Vec::with_capacity(x.n_cols());
        Ok(x.rows()
            .map(|row| {
                self.scaler.transform_row(row, &mut buf);
                self.scores_scaled(&buf)
            })
            .collect())
    }

    pub fn predict(&self, x: &FeatureMatrix<T>) -> Result<Vec<usize>, ModelError> {
        Ok(self.decision_function(x)?.iter().map(|s| argmax(s)).collect())
    }

    /// Hex SHA-256 over the scaler and weights.
    pub fn fingerprint(&self) -> String {
        let mut h = Sha256::new();
        h.update(self.to_text().as_bytes());
        hex(&h.finalize())
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("{MAGIC} {MODEL_FORMAT_VERSION}\n");
        let _ = writeln!(out, "classes {}", self.class_names.len());
        for c in &self.class_names {
            let _ = writeln!(out, "{c}");
        }
        let _ = writeln!(out, "features {}", self.feature_names.len());
        for (j, name) in self.feature_names.iter().enumerate() {
            let _ = writeln!(out, "{name}\t{}\t{}", self.scaler.means[j], self.scaler.stds[j]);
        }
        let _ = writeln!(out, "weights");
        for (w, b) in self.weights.iter().zip(&self.bias) {
            let line: Vec<String> = w.iter().chain(std::iter::once(b)).map(|v| v.to_string()).collect();
            let _ = writeln!(out, "{}", line.join("\t"));
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self, ModelError> {
        let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));
        let mut next = |what: &str| {
            lines
                .next()
                .ok_or_else(|| ModelError::Format { line: 0, reason: format!("missing {what}") })
        };
        let (ln, header) = next("header")?;
        let version = header
            .strip_prefix(MAGIC)
            .and_then(|v| v.trim().parse::<u32>().ok())
            .ok_or_else(|| ModelError::Format { line: ln, reason: "not a model file".into() })?;
        if version != MODEL_FORMAT_VERSION {
            return Err(ModelError::UnsupportedVersion(version));
        }
        let count = |(ln, l): (usize, &str), key: &str| {
            l.strip_prefix(key)
                .and_then(|v| v.trim().parse::<usize>().ok())
                .ok_or_else(|| ModelError::Format { line: ln, reason: format!("expected `{key} <n>`") })
        };
        let n_classes = count(next("classes")?, "classes")?;
        let mut class_names = Vec::with_capacity(n_classes);
        for _ in 0..n_classes {
            class_names.push(next("class name")?.1.to_string());
        }
        let n_features = count(next("features")?, "features")?;
        let mut feature_names = Vec::with_capacity(n_features);
        let mut scaler = Scaler { means: Vec::new(), stds: Vec::new() };
        for _ in 0..n_features {
            let (ln, l) = next("feature")?;
            let parts: Vec<&str> = l.split('\t').collect();
            if parts.len() != 3 {
                return Err(ModelError::Format { line: ln, reason: "expected name, mean, std".into() });
            }
            feature_names.push(parts[0].to_string());
            scaler.means.push(parse_num(parts[1], ln)?);
            scaler.stds.push(parse_num(parts[2], ln)?);
        }
        let (ln, l) = next("weights")?;
        if l != "weights" {
            return Err(ModelError::Format { line: ln, reason: "expected `weights`".into() });
        }
        let mut weights = Vec::with_capacity(n_classes);
        let mut bias = Vec::with_capacity(n_classes);
        for _ in 0..n_classes {
            let (ln, l) = next("weight row")?;
            let mut row = l.split('\t').map(|v| parse_num(v, ln)).collect::<Result<Vec<T>, _>>()?;
            if row.len() != n_features + 1 {
                return Err(ModelError::Format {
                    line: ln,
                    reason: format!("expected {} values, found {}", n_features + 1, row.len()),
                });
            }
            bias.push(row.pop().unwrap_or_else(T::zero));
            weights.push(row);
        }
        Ok(LinearModel { feature_names, class_names, scaler, weights, bias })
    }

    pub fn save(&self, path: &Path) -> Result<(), ModelError> {
        if let Some(bad) = self
            .feature_names
            .iter()
            .chain(&self.class_names)
            .find(|n| n.contains(['\t', '\n', '\r']))
        {
            return Err(ModelError::Format { line: 0, reason: format!("name {bad:?} contains a tab or newline") });
        }
        std::fs::write(path, self.to_text()).map_err(|e| ModelError::Io(format!("{}: {e}", path.display())))
    }

    pub fn load(path: &Path) -> Result<Self, ModelError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ModelError::Io(format!("{}: {e}", path.display())))?;
        Self::from_text(&text)
    }
}

fn parse_num<T: Real>(s: &str, line: usize) -> Result<T, ModelError> {
    T::from_str_radix(s.trim(), 10)
        .ok()
        .filter(|v: &T| v.is_finite())
        .ok_or_else(|| ModelError::Format { line, reason: format!("bad number {s:?}") })
}

pub(crate) fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}
