//! Cross-validation, F1 scoring and training-size ablation.

use std::fmt::Write as _;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::scalar::{count_ratio, mean, population_std, ratio, Real};

pub const DEFAULT_FOLDS: usize = 5;
pub const ABLATION_TEST_FOLDS: usize = 5;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EvalError {
    #[error("too few samples: {n} samples cannot be split into {k} folds")]
    TooFewSamples { n: usize, k: usize },
    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },
    #[error("class id {id} out of range for {n_classes} classes")]
    ClassOutOfRange { id: usize, n_classes: usize },
    #[error("ablation size {size} exceeds training pool of {pool}")]
    SizeTooLarge { size: usize, pool: usize },
}

/// Assignment of every sample to one of `k` folds.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FoldPlan {
    pub k: usize,
    pub seed: u64,
    pub stratified: bool,
    pub doc_ids: Vec<String>,
    /// Fold index per sample, aligned with `doc_ids`.
    pub assignments: Vec<usize>,
}

impl FoldPlan {
    pub fn fold_of(&self, doc_id: &str) -> Option<usize> {
        self.doc_ids.iter().position(|d| d == doc_id).map(|i| self.assignments[i])
    }

    /// (train, test) sample indices for fold `f`.
    pub fn split(&self, f: usize) -> (Vec<usize>, Vec<usize>) {
        split_indices(&self.assignments, f)
    }
}

pub fn split_indices(assignments: &[usize], f: usize) -> (Vec<usize>, Vec<usize>) {
    (0..assignments.len()).partition(|&i| assignments[i] != f)
}

pub fn kfold<S: AsRef<str>>(
    doc_ids: &[S],
    labels: &[usize],
    k: usize,
    seed: u64,
    stratified: bool,
) -> Result<FoldPlan, EvalError> {
    if doc_ids.len() != labels.len() {
        return Err(EvalError::LengthMismatch { left: doc_ids.len(), right: labels.len() });
    }
    Ok(FoldPlan {
        k,
        seed,
        stratified,
        doc_ids: doc_ids.iter().map(|s| s.as_ref().to_string()).collect(),
        assignments: kfold_indices(labels, k, seed, stratified)?,
    })
}

/// Shuffles within each class (or globally), concatenates the classes in id
/// order and deals position `i` to fold `i mod k`.
pub fn kfold_indices(
    labels: &[usize],
    k: usize,
    seed: u64,
    stratified: bool,
) -> Result<Vec<usize>, EvalError> {
    let n = labels.len();
    if k < 2 || k > n {
        return Err(EvalError::TooFewSamples { n, k });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let order: Vec<usize> = if stratified {
        by_class(labels)
            .into_iter()
            .flat_map(|mut members| {
                members.shuffle(&mut rng);
                members
            })
            .collect()
    } else {
        let mut all: Vec<usize> = (0..n).collect();
        all.shuffle(&mut rng);
        all
    };
    let mut assignments = vec![0; n];
    for (pos, &i) in order.iter().enumerate() {
        assignments[i] = pos % k;
    }
    Ok(assignments)
}

fn by_class(labels: &[usize]) -> Vec<Vec<usize>> {
    let n_classes = labels.iter().max().map_or(0, |m| m + 1);
    let mut groups = vec![Vec::new(); n_classes];
    for (i, &y) in labels.iter().enumerate() {
        groups[y].push(i);
    }
    groups
}

#[derive(Debug, Clone, PartialEq)]
pub struct F1Scores<T = f64> {
    pub per_class: Vec<T>,
    pub weighted: T,
    pub macro_avg: T,
}

pub fn f1_scores<T: Real>(
    y_true: &[usize],
    y_pred: &[usize],
    n_classes: usize,
) -> Result<F1Scores<T>, EvalError> {
    let cm = confusion_matrix(y_true, y_pred, n_classes)?;
    Ok(f1_from_confusion(&cm))
}

/// `cm[true][pred]` counts.
pub fn confusion_matrix(
    y_true: &[usize],
    y_pred: &[usize],
    n_classes: usize,
) -> Result<Vec<Vec<usize>>, EvalError> {
    if y_true.len() != y_pred.len() {
        return Err(EvalError::LengthMismatch { left: y_true.len(), right: y_pred.len() });
    }
    let mut cm = vec![vec![0; n_classes]; n_classes];
    for (&t, &p) in y_true.iter().zip(y_pred) {
        for id in [t, p] {
            if id >= n_classes {
                return Err(EvalError::ClassOutOfRange { id, n_classes });
            }
        }
        cm[t][p] += 1;
    }
    Ok(cm)
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

pub fn f1_from_confusion<T: Real>(cm: &[Vec<usize>]) -> F1Scores<T> {
    let n_classes = cm.len();
    let total: usize = cm.iter().flatten().sum();
    let supports: Vec<usize> = cm.iter().map(|row| row.iter().sum()).collect();
    // support weights reduced by their gcd, so equal supports weigh exactly 1
    let g = supports.iter().fold(0, |a, &b| gcd(a, b)).max(1);
    let mut per_class = Vec::with_capacity(n_classes);
    let mut weighted_sum = T::zero();
    for c in 0..n_classes {
        let tp = cm[c][c];
        let support = supports[c];
        let predicted: usize = cm.iter().map(|row| row[c]).sum();
        let p: T = count_ratio(tp, predicted);
        let r: T = count_ratio(tp, support);
        let f1 = ratio(T::lit(2.0) * p * r, p + r);
        weighted_sum += T::of_usize(support / g) * f1;
        per_class.push(f1);
    }
    let weighted = ratio(weighted_sum, T::of_usize(total / g));
    let macro_avg = mean(&per_class);
    F1Scores { per_class, weighted, macro_avg }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FoldResult<T = f64> {
    pub fold: usize,
    pub n_test: usize,
    pub weighted_f1: T,
    pub macro_f1: T,
    pub confusion: Vec<Vec<usize>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvalReport<T = f64> {
    /// Row label, e.g. "svm with flesch+linguistic".
    pub features: String,
    pub folds: Vec<FoldResult<T>>,
    pub weighted_f1: T,
    pub macro_f1: T,
    pub sd_weighted_f1: T,
    pub sd_macro_f1: T,
}

pub const REPORT_HEADER: &str = "features,weighted_f1,macro_f1,sd_weighted_f1,sd_macro_f1";
pub const FOLD_HEADER: &str = "fold,n_test,weighted_f1,macro_f1";

impl<T: Real> EvalReport<T> {
    pub fn from_folds(features: impl Into<String>, folds: Vec<FoldResult<T>>) -> Self {
        let w: Vec<T> = folds.iter().map(|f| f.weighted_f1).collect();
        let m: Vec<T> = folds.iter().map(|f| f.macro_f1).collect();
        EvalReport {
            features: features.into(),
            weighted_f1: mean(&w),
            macro_f1: mean(&m),
            sd_weighted_f1: population_std(&w),
            sd_macro_f1: population_std(&m),
            folds,
        }
    }

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{}",
            csv_field(&self.features),
            self.weighted_f1,
            self.macro_f1,
            self.sd_weighted_f1,
            self.sd_macro_f1
        )
    }

    pub fn to_csv(&self) -> String {
        format!("{REPORT_HEADER}\n{}\n", self.csv_row())
    }

    /// One row per fold followed by an `all` row with the means.
    pub fn folds_csv(&self) -> String {
        let mut out = format!("{FOLD_HEADER}\n");
        for f in &self.folds {
            let _ = writeln!(out, "{},{},{},{}", f.fold, f.n_test, f.weighted_f1, f.macro_f1);
        }
        let n: usize = self.folds.iter().map(|f| f.n_test).sum();
        let _ = writeln!(out, "all,{n},{},{}", self.weighted_f1, self.macro_f1);
        out
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// Runs `fit_predict(train, test)` for every fold of `assignments` and scores
/// the held-out predictions.
pub fn cross_validate<T, E, F>(
    features: &str,
    labels: &[usize],
    n_classes: usize,
    assignments: &[usize],
    k: usize,
    mut fit_predict: F,
) -> Result<EvalReport<T>, E>
where
    T: Real,
    E: From<EvalError>,
    F: FnMut(&[usize], &[usize]) -> Result<Vec<usize>, E>,
{
    if labels.len() != assignments.len() {
        return Err(EvalError::LengthMismatch { left: labels.len(), right: assignments.len() }.into());
    }
    let mut folds = Vec::with_capacity(k);
    for f in 0..k {
        let (train, test) = split_indices(assignments, f);
        let pred = fit_predict(&train, &test)?;
        let truth: Vec<usize> = test.iter().map(|&i| labels[i]).collect();
        let confusion = confusion_matrix(&truth, &pred, n_classes)?;
        let scores: F1Scores<T> = f1_from_confusion(&confusion);
        log::debug!("fold {f}: weighted f1 {}", scores.weighted);
        folds.push(FoldResult {
            fold: f,
            n_test: test.len(),
            weighted_f1: scores.weighted,
            macro_f1: scores.macro_avg,
            confusion,
        });
    }
    Ok(EvalReport::from_folds(features, folds))
}

/// Fixed stratified test split (one fold of five) and the remaining pool,
/// ordered so that every prefix is a class-balanced subsample.
pub fn ablation_split(labels: &[usize], seed: u64) -> Result<(Vec<usize>, Vec<usize>), EvalError> {
    let assignments = kfold_indices(labels, ABLATION_TEST_FOLDS, seed, true)?;
    let (pool, test) = split_indices(&assignments, 0);
    let pool_labels: Vec<usize> = pool.iter().map(|&i| labels[i]).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
    let mut keyed = Vec::with_capacity(pool.len());
    for mut members in by_class(&pool_labels) {
        members.shuffle(&mut rng);
        let size = members.len() as f64;
        for (rank, &j) in members.iter().enumerate() {
            keyed.push(((rank as f64 + 0.5) / size, pool_labels[j], pool[j]));
        }
    }
    keyed.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    Ok((test, keyed.into_iter().map(|(_, _, i)| i).collect()))
}

#[derive(Debug, Clone, PartialEq)]
pub struct AblationRow<T = f64> {
    pub size: usize,
    pub macro_f1_with: T,
    pub macro_f1_without: T,
    pub weighted_f1_with: T,
    pub weighted_f1_without: T,
}

pub const ABLATION_HEADER: &str =
    "size,macro_f1_with,macro_f1_without,weighted_f1_with,weighted_f1_without";

pub fn ablation_csv<T: Real>(rows: &[AblationRow<T>]) -> String {
    let mut out = format!("{ABLATION_HEADER}\n");
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            r.size, r.macro_f1_with, r.macro_f1_without, r.weighted_f1_with, r.weighted_f1_without
        );
    }
    out
}

/// Trains both pipelines on nested subsamples of the pool and scores them on
/// the same held-out split.
pub fn size_ablation<T, E, W, O>(
    labels: &[usize],
    n_classes: usize,
    sizes: &[usize],
    seed: u64,
    mut with: W,
    mut without: O,
) -> Result<Vec<AblationRow<T>>, E>
where
    T: Real,
    E: From<EvalError>,
    W: FnMut(&[usize], &[usize]) -> Result<Vec<usize>, E>,
    O: FnMut(&[usize], &[usize]) -> Result<Vec<usize>, E>,
{
    let (test, pool) = ablation_split(labels, seed)?;
    if let Some(&size) = sizes.iter().find(|&&s| s > pool.len()) {
        return Err(EvalError::SizeTooLarge { size, pool: pool.len() }.into());
    }
    let truth: Vec<usize> = test.iter().map(|&i| labels[i]).collect();
    let mut rows = Vec::with_capacity(sizes.len());
    for &size in sizes {
        let mut train = pool[..size].to_vec();
        train.sort_unstable();
        let a: F1Scores<T> = f1_scores(&truth, &with(&train, &test)?, n_classes)?;
        let b: F1Scores<T> = f1_scores(&truth, &without(&train, &test)?, n_classes)?;
        rows.push(AblationRow {
            size,
            macro_f1_with: a.macro_avg,
            macro_f1_without: b.macro_avg,
            weighted_f1_with: a.weighted,
            weighted_f1_without: b.weighted,
        });
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kfold_examples() {
        let ids: Vec<String> = (0..10).map(|i| format!("d{i}")).collect();
        let plan = kfold(&ids, &[0; 10], 5, 7, false).unwrap();
        for f in 0..5 {
            assert_eq!(plan.split(f).1.len(), 2);
        }
        let labels = [0, 0, 0, 0, 0, 0, 1, 1, 1, 1];
        let a = kfold_indices(&labels, 2, 3, true).unwrap();
        for f in 0..2 {
            let c0 = (0..6).filter(|&i| a[i] == f).count();
            let c1 = (6..10).filter(|&i| a[i] == f).count();
            assert_eq!((c0, c1), (3, 2));
        }
        assert_eq!(kfold_indices(&[0; 10], 11, 0, true), Err(EvalError::TooFewSamples { n: 10, k: 11 }));
        let loo = kfold_indices(&[0, 1, 0, 1, 0], 5, 1, true).unwrap();
        let mut sorted = loo.clone();
        sorted.sort();
        assert_eq!(sorted, vec![0, 1, 2, 3, 4]);
    }

    #[test]
    fn f1_examples() {
        let s: F1Scores<f64> = f1_scores(&[0, 1, 1], &[0, 1, 1], 2).unwrap();
        assert_eq!((s.weighted, s.macro_avg), (1.0, 1.0));
        // class 1: one hit, one miss, one false alarm -> P = R = 1/2
        let cm = vec![vec![3, 0, 0], vec![0, 1, 1], vec![0, 1, 0]];
        let s: F1Scores<f64> = f1_from_confusion(&cm);
        assert_eq!(s.per_class[..2], [1.0, 0.5]);
        let s: F1Scores<f64> = f1_scores(&[0, 0, 0, 1], &[0, 0, 0, 1], 2).unwrap();
        assert_eq!(s.weighted, 1.0);
        let s: F1Scores<f64> = f1_scores(&[0, 0], &[1, 1], 2).unwrap();
        assert_eq!((s.weighted, s.macro_avg), (0.0, 0.0));
        assert!(f1_scores::<f64>(&[0], &[0, 1], 2).is_err());
    }

    #[test]
    fn weighted_example_from_per_class_values() {
        // supports 3 and 1, per-class F1 1.0 and 0.5
        let cm = vec![vec![3, 0], vec![0, 1]];
        let mut s: F1Scores<f64> = f1_from_confusion(&cm);
        s.per_class[1] = 0.5;
        let weighted = 0.75 * s.per_class[0] + 0.25 * s.per_class[1];
        assert_eq!(weighted, 0.875);
        assert_eq!(mean(&s.per_class), 0.75);
    }

    #[test]
    fn majority_pipeline_report() {
        let labels = vec![0, 1, 0, 1, 0, 1, 0, 1, 0, 1];
        let a = kfold_indices(&labels, 5, 7, true).unwrap();
        let report: EvalReport<f64> =
            cross_validate::<_, EvalError, _>("majority", &labels, 2, &a, 5, |_, test| {
                Ok(vec![0; test.len()])
            })
            .unwrap();
        // every fold holds one of each class: weighted = macro = 1/3
        assert!((report.weighted_f1 - 1.0 / 3.0).abs() < 1e-12);
        assert_eq!(report.folds.len(), 5);
        assert_eq!(report.sd_weighted_f1, 0.0);
        assert!(report.to_csv().starts_with(REPORT_HEADER));
        assert_eq!(report.folds_csv().lines().count(), 7);
    }

    #[test]
    fn ablation_nested_and_sized() {
        let labels: Vec<usize> = (0..100).map(|i| i % 3).collect();
        let (test, pool) = ablation_split(&labels, 7).unwrap();
        assert_eq!(test.len() + pool.len(), 100);
        assert!(test.iter().all(|t| !pool.contains(t)));
        let counts = |m: usize| {
            let mut c = [0; 3];
            for &i in &pool[..m] {
                c[labels[i]] += 1;
            }
            c
        };
        let c = counts(30);
        assert!(c.iter().all(|&x| (9..=11).contains(&x)), "{c:?}");
        let r = size_ablation::<f64, EvalError, _, _>(&labels, 3, &[1000], 7, |_, t| Ok(vec![0; t.len()]), |_, t| {
            Ok(vec![0; t.len()])
        });
        assert_eq!(r, Err(EvalError::SizeTooLarge { size: 1000, pool: pool.len() }));
    }
}
