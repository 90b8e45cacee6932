//! Target encodings derived from raw corpus labels.

use std::collections::HashMap;
use std::fs;
use std::path::Path;

use thiserror::Error;

use crate::scalar::Real;

#[derive(Debug, Error, PartialEq)]
pub enum LabelError {
    #[error("label `{0}` has no age range")]
    MissingAges(String),
    #[error("class `{0}` is not in the difficulty order")]
    UnknownClass(String),
    #[error("cannot read class order file {path}: {reason}")]
    OrderFile { path: String, reason: String },
}

/// A class label as given by the corpus, with an optional audience age range in years.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct RawLabel {
    pub class_name: String,
    pub age_low: Option<f64>,
    pub age_high: Option<f64>,
}

impl RawLabel {
    pub fn class(name: impl Into<String>) -> Self {
        RawLabel {
            class_name: name.into(),
            ..Default::default()
        }
    }

    pub fn with_ages(name: impl Into<String>, low: f64, high: f64) -> Self {
        RawLabel {
            class_name: name.into(),
            age_low: Some(low.min(high)),
            age_high: Some(low.max(high)),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Target<T = f64> {
    Classification(usize),
    AgeRegression(T),
    OrderedRegression(usize),
}

/// Maps class names to ids. Names listed in `ordering` take their position there;
/// any remaining names follow in first-seen order.
pub fn as_classes(labels: &[RawLabel], ordering: Option<&[String]>) -> (Vec<usize>, Vec<String>) {
    let mut order: Vec<String> = ordering.map(<[String]>::to_vec).unwrap_or_default();
    let mut index: HashMap<String, usize> = order
        .iter()
        .enumerate()
        .map(|(i, c)| (c.clone(), i))
        .collect();
    let ids = labels
        .iter()
        .map(|l| {
            *index.entry(l.class_name.clone()).or_insert_with(|| {
                order.push(l.class_name.clone());
                order.len() - 1
            })
        })
        .collect();
    (ids, order)
}

/// Midpoint of the label's age range.
pub fn as_age_regression<T: Real>(label: &RawLabel) -> Result<T, LabelError> {
    match (label.age_low, label.age_high) {
        (Some(lo), Some(hi)) => Ok((T::lit(lo) + T::lit(hi)) / T::lit(2.0)),
        _ => Err(LabelError::MissingAges(label.class_name.clone())),
    }
}

/// Index of each label's class in the easiest-first `difficulty_order`.
pub fn as_ordered_regression(
    labels: &[RawLabel],
    difficulty_order: &[String],
) -> Result<Vec<usize>, LabelError> {
    labels
        .iter()
        .map(|l| {
            difficulty_order
                .iter()
                .position(|c| *c == l.class_name)
                .ok_or_else(|| LabelError::UnknownClass(l.class_name.clone()))
        })
        .collect()
}

/// Parses a difficulty-order file: one class name per line, easiest first.
/// Blank lines are ignored.
pub fn parse_class_order(text: &str) -> Vec<String> {
    text.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty())
        .map(str::to_owned)
        .collect()
}

pub fn load_class_order(path: impl AsRef<Path>) -> Result<Vec<String>, LabelError> {
    let path = path.as_ref();
    fs::read_to_string(path)
        .map(|t| parse_class_order(&t))
        .map_err(|e| LabelError::OrderFile {
            path: path.display().to_string(),
            reason: e.to_string(),
        })
}
