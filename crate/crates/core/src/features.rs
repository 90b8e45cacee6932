//! Named, ordered feature vectors.

use indexmap::IndexMap;

use crate::scalar::Real;

/// An ordered map of feature name to value. Insertion order is the column order.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct FeatureVector<T = f64> {
    entries: IndexMap<String, T>,
}

impl<T: Real> FeatureVector<T> {
    pub fn new() -> Self {
        Self {
            entries: IndexMap::new(),
        }
    }

    pub fn with_capacity(n: usize) -> Self {
        Self {
            entries: IndexMap::with_capacity(n),
        }
    }

    /// Appends a feature. Returns `false` (and leaves the vector unchanged)
    /// if the name is already present.
    pub fn push(&mut self, name: impl Into<String>, value: T) -> bool {
        let name = name.into();
        if self.entries.contains_key(&name) {
            return false;
        }
        self.entries.insert(name, value);
        true
    }

    pub fn get(&self, name: &str) -> Option<T> {
        self.entries.get(name).copied()
    }

    pub fn contains(&self, name: &str) -> bool {
        self.entries.contains_key(name)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.entries.keys().map(String::as_str)
    }

    pub fn values(&self) -> impl Iterator<Item = T> + '_ {
        self.entries.values().copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, T)> {
        self.entries.iter().map(|(k, v)| (k.as_str(), *v))
    }

    pub fn to_vec(&self) -> Vec<T> {
        self.values().collect()
    }
}

impl<T: Real, S: Into<String>> FromIterator<(S, T)> for FeatureVector<T> {
    fn from_iter<I: IntoIterator<Item = (S, T)>>(iter: I) -> Self {
        let mut fv = FeatureVector::new();
        for (k, v) in iter {
            fv.push(k, v);
        }
        fv
    }
}
