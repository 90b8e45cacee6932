use std::collections::HashSet;

use super::ModelError;
use crate::features::FeatureVector;
use crate::scalar::Real;

/// Dense row-major matrix with named columns.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureMatrix<T = f64> {
    names: Vec<String>,
    n_rows: usize,
    data: Vec<T>,
}

impl<T: Real> FeatureMatrix<T> {
    pub fn new(names: Vec<String>, rows: Vec<Vec<T>>) -> Result<Self, ModelError> {
        let mut seen = HashSet::with_capacity(names.len());
        for n in &names {
            if !seen.insert(n.as_str()) {
                return Err(ModelError::DuplicateFeature(n.clone()));
            }
        }
        let d = names.len();
        let mut data = Vec::with_capacity(rows.len() * d);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != d {
                return Err(ModelError::RaggedRow { row: i, expected: d, found: row.len() });
            }
            if let Some(j) = row.iter().position(|v| !v.is_finite()) {
                return Err(ModelError::NonFinite { row: i, column: names[j].clone() });
            }
            data.extend_from_slice(row);
        }
        Ok(FeatureMatrix { names, n_rows: rows.len(), data })
    }

    /// Stacks vectors that share the same names in the same order.
    pub fn from_vectors(vectors: &[FeatureVector<T>]) -> Result<Self, ModelError> {
        let names: Vec<String> = match vectors.first() {
            Some(v) => v.names().map(str::to_string).collect(),
            None => Vec::new(),
        };
        let mut rows = Vec::with_capacity(vectors.len());
        for v in vectors {
            if !v.names().eq(names.iter().map(String::as_str)) {
                return Err(ModelError::FeatureMismatch(format!(
                    "vector with {} features does not match {} leading columns",
                    v.len(),
                    names.len()
                )));
            }
            rows.push(v.to_vec());
        }
        Self::new(names, rows)
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.names.len()
    }

    pub fn row(&self, i: usize) -> &[T] {
        let d = self.n_cols();
        &self.data[i * d..(i + 1) * d]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[T]> {
        (0..self.n_rows).map(move |i| self.row(i))
    }

    pub fn get(&self, i: usize, j: usize) -> T {
        self.data[i * self.n_cols() + j]
    }

    pub fn column(&self, j: usize) -> Vec<T> {
        self.rows().map(|r| r[j]).collect()
    }

    pub fn select_rows(&self, idx: &[usize]) -> Self {
        let mut data = Vec::with_capacity(idx.len() * self.n_cols());
        for &i in idx {
            data.extend_from_slice(self.row(i));
        }
        FeatureMatrix { names: self.names.clone(), n_rows: idx.len(), data }
    }

    /// Columns of `self` followed by the columns of `other`.
    pub fn hstack(&self, other: &Self) -> Result<Self, ModelError> {
        if self.n_rows != other.n_rows {
            return Err(ModelError::FeatureMismatch(format!(
                "cannot join {} rows with {} rows",
                self.n_rows, other.n_rows
            )));
        }
        let names = self.names.iter().chain(&other.names).cloned().collect();
        let rows = (0..self.n_rows).map(|i| [self.row(i), other.row(i)].concat()).collect();
        Self::new(names, rows)
    }

    /// Keeps the named columns in the given order.
    pub fn select_columns<S: AsRef<str>>(&self, names: &[S]) -> Result<Self, ModelError> {
        let idx = names
            .iter()
            .map(|n| {
                self.names
                    .iter()
                    .position(|m| m == n.as_ref())
                    .ok_or_else(|| ModelError::FeatureMismatch(format!("no column {}", n.as_ref())))
            })
            .collect::<Result<Vec<_>, _>>()?;
        let rows = self.rows().map(|r| idx.iter().map(|&j| r[j]).collect()).collect();
        Self::new(names.iter().map(|n| n.as_ref().to_string()).collect(), rows)
    }

    pub(crate) fn with_data(&self, data: Vec<T>) -> Self {
        FeatureMatrix { names: self.names.clone(), n_rows: self.n_rows, data }
    }
}

/// Per-column mean and population standard deviation.
#[derive(Debug, Clone, PartialEq)]
pub struct Scaler<T = f64> {
    pub means: Vec<T>,
    pub stds: Vec<T>,
}

impl<T: Real> Scaler<T> {
    pub fn fit(x: &FeatureMatrix<T>) -> Self {
        let d = x.n_cols();
        let n = T::of_usize(x.n_rows());
        let mut means = vec![T::zero(); d];
        let mut stds = vec![T::zero(); d];
        if x.n_rows() > 0 {
            for row in x.rows() {
                for (m, &v) in means.iter_mut().zip(row) {
                    *m += v;
                }
            }
            means.iter_mut().for_each(|m| *m /= n);
            for row in x.rows() {
                for ((s, &m), &v) in stds.iter_mut().zip(&means).zip(row) {
                    *s += (v - m) * (v - m);
                }
            }
            stds.iter_mut().for_each(|s| *s = (*s / n).sqrt());
        }
        Scaler { means, stds }
    }

    pub fn transform_row(&self, row: &[T], out: &mut Vec<T>) {
        out.clear();
        out.extend(row.iter().zip(&self.means).zip(&self.stds).map(|((&v, &m), &s)| {
            if s > T::zero() {
                (v - m) / s
            } else {
                T::zero()
            }
        }));
    }

    pub fn transform(&self, x: &FeatureMatrix<T>) -> FeatureMatrix<T> {
        let mut data = Vec::with_capacity(x.n_rows() * x.n_cols());
        let mut buf = Vec::with_capacity(x.n_cols());
        for row in x.rows() {
            self.transform_row(row, &mut buf);
            data.extend_from_slice(&buf);
        }
        x.with_data(data)
    }
}

pub fn standardize<T: Real>(x: &FeatureMatrix<T>) -> (FeatureMatrix<T>, Scaler<T>) {
    let scaler = Scaler::fit(x);
    (scaler.transform(x), scaler)
}
