//! Lexicon-based POS tagging, POS ratio features, and the POS distribution
//! measures (deviation of the document distribution, mean sentence-to-document
//! KL divergence).

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fs;
use std::path::Path;

use thiserror::Error;

use crate::features::FeatureVector;
use crate::scalar::{count_ratio, mean, population_std, Real};
use crate::text::Document;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PosError {
    #[error("no tag lexicon loaded")]
    MissingLexicon,
    #[error("missing tag lexicon file {0}")]
    MissingFile(String),
    #[error("malformed tag lexicon row {row}: {reason}")]
    MalformedRow { row: usize, reason: String },
    #[error("tag `{0}` has probability mass in P but not in Q")]
    SupportViolation(String),
}

/// Most-frequent-tag lexicon: lowercased word → Penn tag.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct TagLexicon {
    entries: HashMap<String, String>,
}

impl TagLexicon {
    pub fn from_pairs<W: AsRef<str>, G: Into<String>>(pairs: impl IntoIterator<Item = (W, G)>) -> Self {
        TagLexicon {
            entries: pairs
                .into_iter()
                .map(|(w, t)| (w.as_ref().to_lowercase(), t.into()))
                .collect(),
        }
    }

    /// Parses a `word,tag` CSV whose first row is a header.
    pub fn parse(text: &str) -> Result<Self, PosError> {
        let mut entries = HashMap::new();
        for (i, line) in text.lines().enumerate().skip(1) {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let (word, tag) = line.split_once(',').ok_or_else(|| PosError::MalformedRow {
                row: i + 1,
                reason: "expected `word,tag`".into(),
            })?;
            let (word, tag) = (word.trim(), tag.trim());
            if word.is_empty() || tag.is_empty() || tag.contains(',') {
                return Err(PosError::MalformedRow {
                    row: i + 1,
                    reason: "expected `word,tag`".into(),
                });
            }
            entries.insert(word.to_lowercase(), tag.to_owned());
        }
        Ok(TagLexicon { entries })
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, PosError> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|_| PosError::MissingFile(path.display().to_string()))?;
        Self::parse(&text)
    }

    pub fn get(&self, word: &str) -> Option<&str> {
        self.entries.get(word).map(String::as_str)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TaggedWord {
    pub word: String,
    pub tag: String,
}

/// Tags for the word tokens of a document, grouped by sentence. Punctuation
/// tokens are not tagged.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TaggedDocument {
    pub sentences: Vec<Vec<TaggedWord>>,
}

impl TaggedDocument {
    pub fn words(&self) -> impl Iterator<Item = &TaggedWord> {
        self.sentences.iter().flatten()
    }

    pub fn word_count(&self) -> usize {
        self.sentences.iter().map(Vec::len).sum()
    }
}

fn guess_tag(surface: &str, lower: &str, sentence_initial: bool) -> &'static str {
    if !sentence_initial && surface.chars().next().is_some_and(char::is_uppercase) {
        "NNP"
    } else if lower.ends_with("ly") {
        "RB"
    } else if lower.ends_with("ing") {
        "VBG"
    } else if lower.ends_with("ed") {
        "VBD"
    } else if lower.ends_with('s') {
        "NNS"
    } else {
        "NN"
    }
}

/// Lexicon lookup with suffix and capitalization fallbacks for unknown words.
pub fn tag(doc: &Document, lexicon: Option<&TagLexicon>) -> Result<TaggedDocument, PosError> {
    let lexicon = lexicon.ok_or(PosError::MissingLexicon)?;
    let sentences = doc
        .sentences()
        .iter()
        .map(|s| {
            s.words()
                .enumerate()
                .map(|(i, tok)| {
                    let tag = lexicon
                        .get(&tok.lowercased)
                        .unwrap_or_else(|| guess_tag(&tok.surface, &tok.lowercased, i == 0));
                    TaggedWord {
                        word: tok.lowercased.clone(),
                        tag: tag.to_owned(),
                    }
                })
                .collect()
        })
        .collect();
    Ok(TaggedDocument { sentences })
}

const NOUNS: &[&str] = &["NN", "NNS", "NNP", "NNPS"];
const PROPER_NOUNS: &[&str] = &["NNP", "NNPS"];
const PRONOUNS: &[&str] = &["PRP", "PRP$", "WP", "WP$"];
const CONJUNCTIONS: &[&str] = &["CC"];
const ADJECTIVES: &[&str] = &["JJ", "JJR", "JJS"];
const VERBS: &[&str] = &["VB", "VBD", "VBG", "VBN", "VBP", "VBZ"];
const ADVERBS: &[&str] = &["RB", "RBR", "RBS"];
const MODALS: &[&str] = &["MD"];
const PREPOSITIONS: &[&str] = &["IN"];
const INTERJECTIONS: &[&str] = &["UH"];
const PERSONAL_PRONOUNS: &[&str] = &["PRP"];
const WH_PRONOUNS: &[&str] = &["WP", "WP$"];
const DETERMINERS: &[&str] = &["DT"];

/// Nouns, verbs, adjectives and adverbs.
pub fn is_lexical_tag(tag: &str) -> bool {
    [NOUNS, VERBS, ADJECTIVES, ADVERBS].iter().any(|set| set.contains(&tag))
}

pub const POS_FEATURES: [&str; 29] = [
    "nouns_per_word",
    "proper_nouns_per_word",
    "pronouns_per_word",
    "conjunctions_per_word",
    "adjectives_per_word",
    "verbs_per_word",
    "adverbs_per_word",
    "modal_verbs_per_word",
    "prepositions_per_word",
    "interjections_per_word",
    "personal_pronouns_per_word",
    "wh_pronouns_per_word",
    "lexical_words_per_word",
    "function_words_per_word",
    "determiners_per_word",
    "vbs_per_word",
    "vbds_per_word",
    "vbgs_per_word",
    "vbns_per_word",
    "vbps_per_word",
    "vbzs_per_word",
    "adverb_variation",
    "adjective_variation",
    "modal_verb_variation",
    "noun_variation",
    "verb_variation_1",
    "verb_variation_2",
    "squared_verb_variation_1",
    "corrected_verb_variation_1",
];

pub fn pos_ratios<T: Real>(tagged: &TaggedDocument) -> FeatureVector<T> {
    let mut counts: HashMap<&str, usize> = HashMap::new();
    let mut unique_verbs: HashSet<&str> = HashSet::new();
    let mut words = 0usize;
    for w in tagged.words() {
        words += 1;
        *counts.entry(w.tag.as_str()).or_default() += 1;
        if VERBS.contains(&w.tag.as_str()) {
            unique_verbs.insert(&w.word);
        }
    }
    let n = |set: &[&str]| set.iter().map(|t| counts.get(t).copied().unwrap_or(0)).sum::<usize>();
    let nouns = n(NOUNS);
    let verbs = n(VERBS);
    let adjectives = n(ADJECTIVES);
    let adverbs = n(ADVERBS);
    let modals = n(MODALS);
    let lexical = nouns + verbs + adjectives + adverbs;
    let uv = unique_verbs.len();
    let per_word = |c: usize| count_ratio::<T>(c, words);
    let per_lexical = |c: usize| count_ratio::<T>(c, lexical);
    let verbs_t = T::of_usize(verbs);
    let values: [T; 29] = [
        per_word(nouns),
        per_word(n(PROPER_NOUNS)),
        per_word(n(PRONOUNS)),
        per_word(n(CONJUNCTIONS)),
        per_word(adjectives),
        per_word(verbs),
        per_word(adverbs),
        per_word(modals),
        per_word(n(PREPOSITIONS)),
        per_word(n(INTERJECTIONS)),
        per_word(n(PERSONAL_PRONOUNS)),
        per_word(n(WH_PRONOUNS)),
        per_word(lexical),
        per_word(words - lexical),
        per_word(n(DETERMINERS)),
        per_word(n(&["VB"])),
        per_word(n(&["VBD"])),
        per_word(n(&["VBG"])),
        per_word(n(&["VBN"])),
        per_word(n(&["VBP"])),
        per_word(n(&["VBZ"])),
        per_lexical(adverbs),
        per_lexical(adjectives),
        per_lexical(modals),
        per_lexical(nouns),
        count_ratio(verbs, uv),
        per_lexical(verbs),
        crate::scalar::ratio(verbs_t * verbs_t, T::of_usize(uv)),
        crate::scalar::ratio(verbs_t, (T::lit(2.0) * T::of_usize(uv)).sqrt()),
    ];
    POS_FEATURES.iter().copied().zip(values).collect()
}

/// A discrete distribution over POS tags.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct PosDistribution<T = f64> {
    probs: BTreeMap<String, T>,
}

impl<T: Real> PosDistribution<T> {
    /// Normalizes counts; an empty word list gives an empty distribution.
    pub fn from_words<'a>(words: impl IntoIterator<Item = &'a TaggedWord>) -> Self {
        let mut counts: BTreeMap<String, usize> = BTreeMap::new();
        let mut total = 0usize;
        for w in words {
            *counts.entry(w.tag.clone()).or_default() += 1;
            total += 1;
        }
        PosDistribution {
            probs: counts
                .into_iter()
                .map(|(t, c)| (t, count_ratio(c, total)))
                .collect(),
        }
    }

    /// Builds a distribution from explicit probabilities (assumed normalized).
    pub fn from_probs<S: Into<String>>(probs: impl IntoIterator<Item = (S, T)>) -> Self {
        PosDistribution {
            probs: probs.into_iter().map(|(t, p)| (t.into(), p)).collect(),
        }
    }

    pub fn prob(&self, tag: &str) -> T {
        self.probs.get(tag).copied().unwrap_or_else(T::zero)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, T)> {
        self.probs.iter().map(|(k, v)| (k.as_str(), *v))
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }
}

/// KL divergence D(P || Q) in nats.
pub fn kl_divergence<T: Real>(p: &PosDistribution<T>, q: &PosDistribution<T>) -> Result<T, PosError> {
    let mut d = T::zero();
    for (tag, pv) in p.iter() {
        if pv <= T::zero() {
            continue;
        }
        let qv = q.prob(tag);
        if qv <= T::zero() {
            return Err(PosError::SupportViolation(tag.to_owned()));
        }
        d += pv * (pv / qv).ln();
    }
    Ok(d.max(T::zero()))
}

/// Population standard deviation of the document's tag proportions over the
/// tags that occur in it.
pub fn pos_deviation<T: Real>(tagged: &TaggedDocument) -> T {
    let q = PosDistribution::<T>::from_words(tagged.words());
    let props: Vec<T> = q.iter().map(|(_, p)| p).collect();
    population_std(&props)
}

/// Mean over sentences of D(P(sentence) || Q(document)).
pub fn pos_divergence<T: Real>(tagged: &TaggedDocument) -> T {
    if tagged.sentences.is_empty() {
        return T::zero();
    }
    let q = PosDistribution::<T>::from_words(tagged.words());
    let divs: Vec<T> = tagged
        .sentences
        .iter()
        .map(|s| {
            kl_divergence(&PosDistribution::from_words(s), &q)
                .expect("sentence tags are a subset of document tags")
        })
        .collect();
    mean(&divs)
}

pub const POS_DISTRIBUTION_FEATURES: [&str; 2] = ["posd_dev", "pos_div"];
