//! Word-norm tables (age of acquisition, familiarity, ...) and sense counts.
//!
//! Norm files are CSV with a header `word,<rating1>[,<rating2>...]`; each rating
//! column becomes its own [`NormTable`]. An empty cell means the word has no
//! rating in that column. Sense files are `word,senses,hypernyms,hyponyms`.
//! Lookups are lowercase-exact; words missing from a table are skipped and
//! reported through the coverage figure rather than imputed.

use std::collections::HashMap;
use std::fs;
use std::path::Path;

use log::warn;
use thiserror::Error;

use crate::features::FeatureVector;
use crate::scalar::{count_ratio, ratio, Real};
use crate::text::Document;

#[derive(Debug, Error, PartialEq)]
pub enum LexiconError {
    #[error("missing file {0}")]
    MissingFile(String),
    #[error("malformed row {row} in {source_name}: {reason}")]
    MalformedRow {
        source_name: String,
        row: usize,
        reason: String,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct NormTable<T = f64> {
    pub name: String,
    entries: HashMap<String, T>,
}

impl<T: Real> NormTable<T> {
    pub fn new(name: impl Into<String>) -> Self {
        NormTable {
            name: name.into(),
            entries: HashMap::new(),
        }
    }

    /// Inserts a rating; returns the previous one if the word was already present.
    pub fn insert(&mut self, word: &str, rating: T) -> Option<T> {
        self.entries.insert(word.to_lowercase(), rating)
    }

    pub fn get(&self, word: &str) -> Option<T> {
        self.entries.get(word).copied()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

fn read(path: &Path) -> Result<String, LexiconError> {
    fs::read_to_string(path).map_err(|_| LexiconError::MissingFile(path.display().to_string()))
}

fn malformed(source_name: &str, row: usize, reason: impl Into<String>) -> LexiconError {
    LexiconError::MalformedRow {
        source_name: source_name.to_owned(),
        row,
        reason: reason.into(),
    }
}

/// Non-empty, non-comment lines with their 1-based row numbers.
fn rows(text: &str) -> impl Iterator<Item = (usize, Vec<&str>)> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| (i + 1, l.split(',').map(str::trim).collect()))
}

pub fn load_norms<T: Real>(path: impl AsRef<Path>) -> Result<Vec<NormTable<T>>, LexiconError> {
    let path = path.as_ref();
    parse_norms(&read(path)?, &path.display().to_string())
}

pub fn parse_norms<T: Real>(text: &str, source_name: &str) -> Result<Vec<NormTable<T>>, LexiconError> {
    let mut lines = rows(text);
    let Some((_, header)) = lines.next() else {
        return Ok(Vec::new());
    };
    if header.len() < 2 {
        return Err(malformed(source_name, 1, "header needs `word` and at least one rating column"));
    }
    let mut tables: Vec<NormTable<T>> = header[1..].iter().map(|n| NormTable::new(*n)).collect();
    for (row, fields) in lines {
        if fields.len() != header.len() {
            return Err(malformed(
                source_name,
                row,
                format!("expected {} fields, found {}", header.len(), fields.len()),
            ));
        }
        let word = fields[0];
        for (table, cell) in tables.iter_mut().zip(&fields[1..]) {
            if cell.is_empty() {
                continue;
            }
            let value: f64 = cell
                .parse()
                .map_err(|_| malformed(source_name, row, format!("non-numeric rating `{cell}`")))?;
            if !value.is_finite() {
                return Err(malformed(source_name, row, format!("non-finite rating `{cell}`")));
            }
            if table.insert(word, T::lit(value)).is_some() {
                warn!("{source_name}: duplicate word `{word}` in column `{}`, keeping row {row}", table.name);
            }
        }
    }
    Ok(tables)
}

/// Optional word → lemma mapping used by the lemma-keyed norm features.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct LemmaTable {
    entries: HashMap<String, String>,
}

impl LemmaTable {
    pub fn lemma<'a>(&'a self, word: &'a str) -> &'a str {
        self.entries.get(word).map_or(word, String::as_str)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

pub fn load_lemmas(path: impl AsRef<Path>) -> Result<LemmaTable, LexiconError> {
    let path = path.as_ref();
    parse_lemmas(&read(path)?, &path.display().to_string())
}

/// Parses `word,lemma` rows; the first row is a header.
pub fn parse_lemmas(text: &str, source_name: &str) -> Result<LemmaTable, LexiconError> {
    let mut entries = HashMap::new();
    for (row, fields) in rows(text).skip(1) {
        if fields.len() != 2 || fields[0].is_empty() || fields[1].is_empty() {
            return Err(malformed(source_name, row, "expected `word,lemma`"));
        }
        entries.insert(fields[0].to_lowercase(), fields[1].to_lowercase());
    }
    Ok(LemmaTable { entries })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct SenseCounts {
    pub senses: u32,
    pub hypernyms: u32,
    pub hyponyms: u32,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct SenseTable {
    entries: HashMap<String, SenseCounts>,
}

impl SenseTable {
    pub fn insert(&mut self, word: &str, counts: SenseCounts) -> Option<SenseCounts> {
        self.entries.insert(word.to_lowercase(), counts)
    }

    pub fn get(&self, word: &str) -> Option<SenseCounts> {
        self.entries.get(word).copied()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

pub fn load_senses(path: impl AsRef<Path>) -> Result<SenseTable, LexiconError> {
    let path = path.as_ref();
    parse_senses(&read(path)?, &path.display().to_string())
}

pub fn parse_senses(text: &str, source_name: &str) -> Result<SenseTable, LexiconError> {
    let mut table = SenseTable::default();
    for (row, fields) in rows(text).skip(1) {
        if fields.len() != 4 {
            return Err(malformed(source_name, row, "expected `word,senses,hypernyms,hyponyms`"));
        }
        let mut counts = [0u32; 3];
        for (slot, cell) in counts.iter_mut().zip(&fields[1..]) {
            *slot = cell
                .parse()
                .map_err(|_| malformed(source_name, row, format!("not a non-negative integer: `{cell}`")))?;
        }
        let [senses, hypernyms, hyponyms] = counts;
        if table
            .insert(fields[0], SenseCounts { senses, hypernyms, hyponyms })
            .is_some()
        {
            warn!("{source_name}: duplicate word `{}`, keeping row {row}", fields[0]);
        }
    }
    Ok(table)
}

/// Mean rating over the document's word tokens found in `table`, and the
/// fraction of word tokens that were found. `(0, 0)` when nothing is covered.
pub fn mean_rating<T: Real>(doc: &Document, table: &NormTable<T>) -> (T, T) {
    mean_rating_with(doc, table, None)
}

/// Like [`mean_rating`], looking words up by lemma when a lemma table is given.
pub fn mean_rating_with<T: Real>(
    doc: &Document,
    table: &NormTable<T>,
    lemmas: Option<&LemmaTable>,
) -> (T, T) {
    let mut sum = T::zero();
    let mut covered = 0usize;
    let mut total = 0usize;
    for tok in doc.words() {
        total += 1;
        let key = lemmas.map_or(tok.lowercased.as_str(), |l| l.lemma(&tok.lowercased));
        if let Some(r) = table.get(key) {
            sum += r;
            covered += 1;
        }
    }
    (ratio(sum, T::of_usize(covered)), count_ratio(covered, total))
}

pub const SENSE_FEATURES: [&str; 3] = ["number_of_senses", "hypernyms_per_word", "hyponyms_per_word"];

/// Senses, hypernyms and hyponyms per word token. Uncovered tokens add to the
/// denominator only.
pub fn sense_features<T: Real>(doc: &Document, senses: &SenseTable) -> FeatureVector<T> {
    let mut totals = [0usize; 3];
    let mut words = 0usize;
    for tok in doc.words() {
        words += 1;
        if let Some(c) = senses.get(&tok.lowercased) {
            totals[0] += c.senses as usize;
            totals[1] += c.hypernyms as usize;
            totals[2] += c.hyponyms as usize;
        }
    }
    SENSE_FEATURES
        .iter()
        .zip(totals)
        .map(|(name, n)| (*name, count_ratio::<T>(n, words)))
        .collect()
}
