//! Linear multi-class classifiers, C grid search and score fusion.

mod linear;
mod logistic;
mod matrix;
mod svm;

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::evaluation::{f1_scores, kfold_indices, split_indices, EvalError};
use crate::features::FeatureVector;
use crate::scalar::Real;

pub use linear::{argmax, LinearModel, MODEL_FORMAT_VERSION};
pub(crate) use linear::hex;
pub use logistic::{logistic_gradient, logistic_objective, train_logistic, train_logistic_traced, LogisticConfig};
pub use matrix::{standardize, FeatureMatrix, Scaler};
pub use svm::{
    hinge_objective, hinge_subgradient, svm_lambda, train_linear_svm, train_linear_svm_traced, SvmConfig,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    #[error("degenerate labels: training needs at least two classes, found {0}")]
    DegenerateLabels(usize),
    #[error("label/row mismatch: {rows} rows, {labels} labels")]
    LabelCount { rows: usize, labels: usize },
    #[error("class id {id} out of range for {n_classes} classes")]
    ClassOutOfRange { id: usize, n_classes: usize },
    #[error("feature mismatch: {0}")]
    FeatureMismatch(String),
    #[error("duplicate feature name {0}")]
    DuplicateFeature(String),
    #[error("row {row} has {found} values, expected {expected}")]
    RaggedRow { row: usize, expected: usize, found: usize },
    #[error("non-finite value in row {row}, column {column}")]
    NonFinite { row: usize, column: String },
    #[error("score name {0} collides with an existing feature")]
    NameCollision(String),
    #[error("empty hyper-parameter grid")]
    EmptyGrid,
    #[error("model file line {line}: {reason}")]
    Format { line: usize, reason: String },
    #[error("unsupported model format version {0}")]
    UnsupportedVersion(u32),
    #[error("i/o error: {0}")]
    Io(String),
    #[error(transparent)]
    Eval(#[from] EvalError),
}

pub(crate) fn check_labels<T: Real>(x: &FeatureMatrix<T>, y: &[usize], n_classes: usize) -> Result<(), ModelError> {
    if y.len() != x.n_rows() {
        return Err(ModelError::LabelCount { rows: x.n_rows(), labels: y.len() });
    }
    let mut seen = vec![false; n_classes];
    for &id in y {
        *seen.get_mut(id).ok_or(ModelError::ClassOutOfRange { id, n_classes })? = true;
    }
    let distinct = seen.iter().filter(|&&s| s).count();
    if distinct < 2 {
        return Err(ModelError::DegenerateLabels(distinct));
    }
    Ok(())
}

/// Appends external scores after the linguistic features, values untouched.
pub fn fuse<T: Real, S: AsRef<str>>(
    linguistic: &FeatureVector<T>,
    scores: &[(S, T)],
) -> Result<FeatureVector<T>, ModelError> {
    let mut out = linguistic.clone();
    for (name, v) in scores {
        if !out.push(name.as_ref(), *v) {
            return Err(ModelError::NameCollision(name.as_ref().to_string()));
        }
    }
    Ok(out)
}

/// `C` in {2^-5, 2^-3, ..., 2^15}.
pub fn default_c_grid<T: Real>() -> Vec<T> {
    (-5..=15).step_by(2).map(|e| T::lit(2f64.powi(e))).collect()
}

/// Returns the grid value with the highest score, preferring the smallest
/// value among ties.
pub fn select_c<T: Real, F>(grid: &[T], mut score: F) -> Result<T, ModelError>
where
    F: FnMut(T) -> Result<T, ModelError>,
{
    let mut best: Option<(T, T)> = None;
    for &c in grid {
        let s = score(c)?;
        best = match best {
            Some((bc, bs)) if bs > s || (bs == s && bc <= c) => Some((bc, bs)),
            _ => Some((c, s)),
        };
    }
    best.map(|(c, _)| c).ok_or(ModelError::EmptyGrid)
}

/// Picks `C` by mean weighted F1 over a stratified inner k-fold split.
#[allow(clippy::too_many_arguments)]
pub fn grid_search_c<T, F>(
    x: &FeatureMatrix<T>,
    y: &[usize],
    n_classes: usize,
    grid: &[T],
    folds: usize,
    seed: u64,
    trainer: F,
) -> Result<T, ModelError>
where
    T: Real,
    F: Fn(&FeatureMatrix<T>, &[usize], T) -> Result<LinearModel<T>, ModelError>,
{
    if grid.len() == 1 {
        return Ok(grid[0]);
    }
    let assignments = kfold_indices(y, folds, seed, true)?;
    let splits: Vec<_> = (0..folds).map(|f| split_indices(&assignments, f)).collect();
    select_c(grid, |c| {
        let mut total = T::zero();
        for (train, test) in &splits {
            let ytr: Vec<usize> = train.iter().map(|&i| y[i]).collect();
            let yte: Vec<usize> = test.iter().map(|&i| y[i]).collect();
            let pred = match trainer(&x.select_rows(train), &ytr, c) {
                Ok(model) => model.predict(&x.select_rows(test))?,
                Err(ModelError::DegenerateLabels(_)) => vec![ytr[0]; test.len()],
                Err(e) => return Err(e),
            };
            total += f1_scores::<T>(&yte, &pred, n_classes)?.weighted;
        }
        Ok(total / T::of_usize(folds))
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModelKind {
    /// Linear SVM with `C` chosen by grid search.
    Svm,
    Logistic,
    /// Linear SVM with `C = 1`.
    Linear,
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ModelKind::Svm => "svm",
            ModelKind::Logistic => "logistic",
            ModelKind::Linear => "linear",
        })
    }
}

impl FromStr for ModelKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "svm" => Ok(ModelKind::Svm),
            "logistic" => Ok(ModelKind::Logistic),
            "linear" => Ok(ModelKind::Linear),
            other => Err(format!("unknown model {other:?} (expected svm, logistic or linear)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainConfig<T = f64> {
    pub kind: ModelKind,
    pub seed: u64,
    pub grid: Vec<T>,
    pub inner_folds: usize,
    pub svm_epochs: usize,
    pub logistic: LogisticConfig<T>,
}

impl<T: Real> TrainConfig<T> {
    pub fn new(kind: ModelKind, seed: u64) -> Self {
        TrainConfig {
            kind,
            seed,
            grid: default_c_grid(),
            inner_folds: 5,
            svm_epochs: SvmConfig::<T>::default().epochs,
            logistic: LogisticConfig { seed, ..Default::default() },
        }
    }
}

/// Trains the configured model. For `Svm` the chosen `C` is returned too.
pub fn train<T: Real>(
    x: &FeatureMatrix<T>,
    y: &[usize],
    n_classes: usize,
    cfg: &TrainConfig<T>,
) -> Result<(LinearModel<T>, Option<T>), ModelError> {
    let svm = |x: &FeatureMatrix<T>, y: &[usize], c: T| {
        train_linear_svm(x, y, n_classes, &SvmConfig { c, epochs: cfg.svm_epochs, seed: cfg.seed })
    };
    match cfg.kind {
        ModelKind::Logistic => Ok((train_logistic(x, y, n_classes, &cfg.logistic)?, None)),
        ModelKind::Linear => Ok((svm(x, y, T::one())?, None)),
        ModelKind::Svm => {
            check_labels(x, y, n_classes)?;
            let c = grid_search_c(x, y, n_classes, &cfg.grid, cfg.inner_folds, cfg.seed, svm)?;
            log::debug!("grid search chose C = {c}");
            Ok((svm(x, y, c)?, Some(c)))
        }
    }
}
