//! Sentence segmentation, tokenization and syllable counting.

use std::collections::HashMap;

use unicode_normalization::UnicodeNormalization;

use crate::features::FeatureVector;
use crate::labeling::RawLabel;
use crate::scalar::{count_ratio, Real};

/// Abbreviations that never end a sentence when followed by a period.
const ABBREVIATIONS: &[&str] = &[
    "Dr", "Mr", "Mrs", "Ms", "St", "Jr", "Sr", "Prof", "Mt", "Gen", "Col", "Capt", "Lt", "Rev",
    "Hon", "Sgt", "Inc", "Ltd", "Co", "Corp", "vs", "etc", "e.g", "i.e", "cf", "approx", "No",
    "Fig", "Jan", "Feb", "Mar", "Apr", "Aug", "Sept", "Oct", "Nov", "Dec",
];

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub surface: String,
    pub lowercased: String,
    /// False for punctuation.
    pub is_word: bool,
    pub syllables: usize,
    pub char_count: usize,
}

impl Token {
    pub fn new(surface: &str) -> Self {
        let is_word = surface.chars().any(char::is_alphanumeric);
        let lowercased = surface.to_lowercase();
        let syllables = if is_word {
            count_syllables(&lowercased)
        } else {
            0
        };
        Token {
            surface: surface.to_owned(),
            lowercased,
            is_word,
            syllables,
            char_count: surface.chars().count(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Sentence {
    pub tokens: Vec<Token>,
    pub index_in_doc: usize,
}

impl Sentence {
    pub fn words(&self) -> impl Iterator<Item = &Token> {
        self.tokens.iter().filter(|t| t.is_word)
    }
}

/// A segmented, tokenized document. Immutable after construction.
#[derive(Debug, Clone, PartialEq)]
pub struct Document {
    doc_id: String,
    raw_text: String,
    sentences: Vec<Sentence>,
    label: RawLabel,
}

impl Document {
    /// NFC-normalizes `raw_text`, then segments and tokenizes it.
    pub fn new(doc_id: impl Into<String>, raw_text: &str, label: RawLabel) -> Self {
        let raw_text: String = raw_text.nfc().collect();
        let sentences = split_sentences(&raw_text)
            .iter()
            .map(|s| tokenize(s))
            .filter(|toks| !toks.is_empty())
            .enumerate()
            .map(|(index_in_doc, tokens)| Sentence {
                tokens,
                index_in_doc,
            })
            .collect();
        Document {
            doc_id: doc_id.into(),
            raw_text,
            sentences,
            label,
        }
    }

    /// Builds a document from already-tokenized sentences. Empty sentences are dropped.
    pub fn from_tokens<S: AsRef<str>>(
        doc_id: impl Into<String>,
        sentences: &[Vec<S>],
        label: RawLabel,
    ) -> Self {
        let sentences: Vec<Sentence> = sentences
            .iter()
            .filter(|s| !s.is_empty())
            .enumerate()
            .map(|(index_in_doc, s)| Sentence {
                tokens: s.iter().map(|t| Token::new(t.as_ref())).collect(),
                index_in_doc,
            })
            .collect();
        let raw_text = sentences
            .iter()
            .map(|s| {
                s.tokens
                    .iter()
                    .map(|t| t.surface.as_str())
                    .collect::<Vec<_>>()
                    .join(" ")
            })
            .collect::<Vec<_>>()
            .join(" ");
        Document {
            doc_id: doc_id.into(),
            raw_text,
            sentences,
            label,
        }
    }

    pub fn doc_id(&self) -> &str {
        &self.doc_id
    }

    pub fn raw_text(&self) -> &str {
        &self.raw_text
    }

    pub fn sentences(&self) -> &[Sentence] {
        &self.sentences
    }

    pub fn label(&self) -> &RawLabel {
        &self.label
    }

    pub fn tokens(&self) -> impl Iterator<Item = &Token> {
        self.sentences.iter().flat_map(|s| s.tokens.iter())
    }

    pub fn words(&self) -> impl Iterator<Item = &Token> {
        self.tokens().filter(|t| t.is_word)
    }

    pub fn word_count(&self) -> usize {
        self.words().count()
    }
}

fn is_terminator(c: char) -> bool {
    matches!(c, '.' | '?' | '!')
}

fn is_abbreviation(word: &str) -> bool {
    let word = word.trim_start_matches(|c: char| !c.is_alphanumeric());
    if ABBREVIATIONS.contains(&word) {
        return true;
    }
    // single-letter initials such as "J."
    let mut chars = word.chars();
    matches!((chars.next(), chars.next()), (Some(c), None) if c.is_uppercase())
}

/// Splits raw text at sentence-final `.`, `?` or `!` followed by whitespace and
/// an uppercase letter, except after a known abbreviation.
pub fn split_sentences(raw_text: &str) -> Vec<String> {
    let chars: Vec<(usize, char)> = raw_text.char_indices().collect();
    let mut out = Vec::new();
    let mut start = 0usize;
    let mut i = 0usize;
    while i < chars.len() {
        let (_, c) = chars[i];
        if !is_terminator(c) {
            i += 1;
            continue;
        }
        let mut end = i;
        while end + 1 < chars.len() && is_terminator(chars[end + 1].1) {
            end += 1;
        }
        let mut next = end + 1;
        let mut saw_space = false;
        while next < chars.len() && chars[next].1.is_whitespace() {
            saw_space = true;
            next += 1;
        }
        let boundary = saw_space && next < chars.len() && chars[next].1.is_uppercase();
        let guarded = c == '.' && end == i && {
            let word_start = chars[..i]
                .iter()
                .rposition(|&(_, ch)| ch.is_whitespace())
                .map_or(0, |p| p + 1);
            let word: String = chars[word_start..i].iter().map(|&(_, ch)| ch).collect();
            is_abbreviation(&word)
        };
        if boundary && !guarded {
            let byte_end = chars[end].0 + chars[end].1.len_utf8();
            let piece = raw_text[start..byte_end].trim();
            if !piece.is_empty() {
                out.push(piece.to_owned());
            }
            start = chars[next].0;
            i = next;
        } else {
            i = end + 1;
        }
    }
    let tail = raw_text[start..].trim();
    if !tail.is_empty() {
        out.push(tail.to_owned());
    }
    out
}

/// Whitespace tokenization with punctuation split off. Apostrophes and hyphens
/// between alphanumeric characters stay inside the word.
pub fn tokenize(sentence: &str) -> Vec<Token> {
    let mut tokens = Vec::new();
    for chunk in sentence.split_whitespace() {
        let chars: Vec<char> = chunk.chars().collect();
        let mut word = String::new();
        for (i, &c) in chars.iter().enumerate() {
            let internal_joiner = matches!(c, '\'' | '’' | '-')
                && i > 0
                && chars[i - 1].is_alphanumeric()
                && chars.get(i + 1).is_some_and(|n| n.is_alphanumeric());
            if c.is_alphanumeric() || internal_joiner {
                word.push(c);
            } else {
                if !word.is_empty() {
                    tokens.push(Token::new(&word));
                    word.clear();
                }
                tokens.push(Token::new(&c.to_string()));
            }
        }
        if !word.is_empty() {
            tokens.push(Token::new(&word));
        }
    }
    tokens
}

fn is_vowel(c: char) -> bool {
    matches!(c, 'a' | 'e' | 'i' | 'o' | 'u' | 'y')
}

/// Vowel-group syllable heuristic: maximal runs of `[aeiouy]`, minus one for a
/// word-final `e` unless that would leave zero, floored at one.
pub fn count_syllables(word: &str) -> usize {
    let lower = word.to_lowercase();
    let mut groups = 0usize;
    let mut in_group = false;
    for c in lower.chars() {
        if is_vowel(c) {
            if !in_group {
                groups += 1;
            }
            in_group = true;
        } else {
            in_group = false;
        }
    }
    if lower.ends_with('e') && groups > 1 {
        groups -= 1;
    }
    groups.max(1)
}

/// Word-type vocabulary, fit on training documents only.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Vocabulary {
    words: Vec<String>,
}

impl Vocabulary {
    pub fn new(words: Vec<String>) -> Self {
        Vocabulary { words }
    }

    /// Keeps the `max_size` most frequent lowercased word types; ties broken
    /// alphabetically. The result is sorted by that rank.
    pub fn fit<'a, I>(docs: I, max_size: usize) -> Self
    where
        I: IntoIterator<Item = &'a Document>,
    {
        let mut counts: HashMap<&str, usize> = HashMap::new();
        for doc in docs {
            for tok in doc.words() {
                *counts.entry(tok.lowercased.as_str()).or_default() += 1;
            }
        }
        let mut ranked: Vec<(&str, usize)> = counts.into_iter().collect();
        ranked.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(b.0)));
        ranked.truncate(max_size);
        Vocabulary {
            words: ranked.into_iter().map(|(w, _)| w.to_owned()).collect(),
        }
    }

    pub fn words(&self) -> &[String] {
        &self.words
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    /// Feature column name for a vocabulary word.
    pub fn feature_name(word: &str) -> String {
        format!("wt_{word}")
    }
}

/// Per-word occurrence proportions for every vocabulary entry. Out-of-vocabulary
/// words count toward the denominator only.
pub fn word_type_proportions<T: Real>(doc: &Document, vocab: &Vocabulary) -> FeatureVector<T> {
    let mut counts: HashMap<&str, usize> = HashMap::new();
    let mut total = 0usize;
    for tok in doc.words() {
        total += 1;
        *counts.entry(tok.lowercased.as_str()).or_default() += 1;
    }
    vocab
        .words
        .iter()
        .map(|w| {
            let c = counts.get(w.as_str()).copied().unwrap_or(0);
            (Vocabulary::feature_name(w), count_ratio::<T>(c, total))
        })
        .collect()
}
