//! Traditional readability formulas and lexical-diversity measures.

use std::collections::HashSet;

use crate::features::FeatureVector;
use crate::scalar::{count_ratio, ratio, Real};
use crate::text::Document;

/// Words with more than this many syllables are polysyllabic.
pub const POLYSYLLABIC_MIN_EXCLUSIVE: usize = 2;
/// Words with at least this many characters are long.
pub const LONG_WORD_MIN_CHARS: usize = 7;
pub const MTLD_DEFAULT_THRESHOLD: f64 = 0.72;
pub const MTLD_MIN_TOKENS: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SurfaceStats<T = f64> {
    pub n_sentences: usize,
    pub n_words: usize,
    pub n_characters: usize,
    pub n_syllables: usize,
    pub words_per_sentence: T,
    pub syllables_per_word: T,
    pub characters_per_word: T,
    pub sentences_per_word: T,
    pub prop_polysyllabic: T,
    pub prop_monosyllabic: T,
    pub prop_long_words: T,
    pub polysyllabic_per_sentence: T,
}

/// Counts over word tokens only; punctuation is excluded.
pub fn surface_stats<T: Real>(doc: &Document) -> SurfaceStats<T> {
    let n_sentences = doc.sentences().len();
    let (mut n_words, mut n_characters, mut n_syllables) = (0, 0, 0);
    let (mut poly, mut mono, mut long) = (0, 0, 0);
    for w in doc.words() {
        n_words += 1;
        n_characters += w.char_count;
        n_syllables += w.syllables;
        poly += usize::from(w.syllables > POLYSYLLABIC_MIN_EXCLUSIVE);
        mono += usize::from(w.syllables == 1);
        long += usize::from(w.char_count >= LONG_WORD_MIN_CHARS);
    }
    SurfaceStats {
        n_sentences,
        n_words,
        n_characters,
        n_syllables,
        words_per_sentence: count_ratio(n_words, n_sentences),
        syllables_per_word: count_ratio(n_syllables, n_words),
        characters_per_word: count_ratio(n_characters, n_words),
        sentences_per_word: count_ratio(n_sentences, n_words),
        prop_polysyllabic: count_ratio(poly, n_words),
        prop_monosyllabic: count_ratio(mono, n_words),
        prop_long_words: count_ratio(long, n_words),
        polysyllabic_per_sentence: count_ratio(poly, n_sentences),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct TraditionalScores<T = f64> {
    pub flesch_kincaid: T,
    pub flesch: T,
    pub ari: T,
    pub coleman_liau: T,
    pub smog: T,
    pub fog: T,
    pub forcast: T,
    pub lix: T,
}

pub fn traditional_scores<T: Real>(s: &SurfaceStats<T>) -> TraditionalScores<T> {
    let c = T::lit;
    let wps = s.words_per_sentence;
    TraditionalScores {
        flesch_kincaid: c(11.8) * s.syllables_per_word + c(0.39) * wps - c(15.59),
        flesch: c(206.835) - c(1.015) * wps - c(84.6) * s.syllables_per_word,
        ari: c(4.71) * s.characters_per_word + c(0.5) * wps - c(21.43),
        coleman_liau: c(-29.5873) * s.sentences_per_word + c(5.8799) * s.characters_per_word - c(15.8007),
        smog: c(1.0430) * (c(30.0) * s.polysyllabic_per_sentence).sqrt() + c(3.1291),
        // proportion, not percentage, as in the feature table
        fog: (wps + s.prop_polysyllabic) * c(0.4),
        forcast: c(20.0) - c(15.0) * s.prop_monosyllabic,
        lix: wps + s.prop_long_words * c(100.0),
    }
}

pub const FLESCH_FEATURES: [&str; 12] = [
    "number_of_sentences",
    "mean_sentence_length",
    "number_of_characters",
    "number_of_syllables",
    "flesch_kincaid",
    "flesch",
    "automated_readability_index",
    "coleman_liau",
    "smog",
    "fog",
    "forcast",
    "lix",
];

/// Surface counts followed by the eight formulas. A document without words
/// scores zero on every formula, since all of their ratios are undefined.
pub fn flesch_features<T: Real>(doc: &Document) -> FeatureVector<T> {
    let s = surface_stats::<T>(doc);
    let t = if s.n_words == 0 { TraditionalScores::default() } else { traditional_scores(&s) };
    let values = [
        T::of_usize(s.n_sentences),
        s.words_per_sentence,
        T::of_usize(s.n_characters),
        T::of_usize(s.n_syllables),
        t.flesch_kincaid,
        t.flesch,
        t.ari,
        t.coleman_liau,
        t.smog,
        t.fog,
        t.forcast,
        t.lix,
    ];
    FLESCH_FEATURES.iter().copied().zip(values).collect()
}

pub const TTR_FEATURES: [&str; 5] = ["ttr", "corrected_ttr", "root_ttr", "bilog_ttr", "uber_index"];

/// Type-token measures over lowercased word types.
pub fn ttr_measures<T: Real>(doc: &Document) -> FeatureVector<T> {
    let words: Vec<&str> = doc.words().map(|w| w.lowercased.as_str()).collect();
    ttr_from_counts(words.iter().collect::<HashSet<_>>().len(), words.len())
}

pub fn ttr_from_counts<T: Real>(types: usize, tokens: usize) -> FeatureVector<T> {
    let ty = T::of_usize(types);
    let tok = T::of_usize(tokens);
    let bilog = if tokens <= 1 { T::zero() } else { ratio(ty.ln(), tok.ln()) };
    let uber = if types == 0 || types == tokens {
        T::zero()
    } else {
        ratio(ty.ln() * ty.ln(), (tok / ty).ln())
    };
    let values = [
        ratio(ty, tok),
        ratio(ty, (T::lit(2.0) * tok).sqrt()),
        ratio(ty, tok.sqrt()),
        bilog,
        uber,
    ];
    TTR_FEATURES.iter().copied().zip(values).collect()
}

/// Number of TTR factors in one directional pass, including the partial
/// factor for the unfinished remainder.
fn mtld_factors<'a, T: Real>(tokens: impl Iterator<Item = &'a str>, threshold: T) -> T {
    let mut factors = T::zero();
    let mut types: HashSet<&str> = HashSet::new();
    let mut count = 0usize;
    let mut ttr = T::one();
    for tok in tokens {
        count += 1;
        types.insert(tok);
        ttr = count_ratio(types.len(), count);
        if ttr <= threshold {
            factors += T::one();
            types.clear();
            count = 0;
            ttr = T::one();
        }
    }
    factors + ratio(T::one() - ttr, T::one() - threshold)
}

/// Bidirectional MTLD: token count over the mean factor count of the forward
/// and backward passes. Zero below [`MTLD_MIN_TOKENS`] tokens or when no
/// factor accrues.
pub fn mtld<T: Real, S: AsRef<str>>(tokens: &[S], threshold: T) -> T {
    if tokens.len() < MTLD_MIN_TOKENS {
        return T::zero();
    }
    let forward = mtld_factors(tokens.iter().map(AsRef::as_ref), threshold);
    let backward = mtld_factors(tokens.iter().rev().map(AsRef::as_ref), threshold);
    ratio(T::of_usize(tokens.len()), (forward + backward) / T::lit(2.0))
}

pub const LEXICAL_DIVERSITY_FEATURES: [&str; 6] =
    ["ttr", "corrected_ttr", "root_ttr", "bilog_ttr", "uber_index", "mtld"];

pub fn lexical_diversity<T: Real>(doc: &Document) -> FeatureVector<T> {
    let mut fv = ttr_measures(doc);
    let words: Vec<&str> = doc.words().map(|w| w.lowercased.as_str()).collect();
    fv.push("mtld", mtld(&words, T::lit(MTLD_DEFAULT_THRESHOLD)));
    fv
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::labeling::RawLabel;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn surface_examples() {
        let empty = Document::new("e", "", RawLabel::default());
        assert_eq!(surface_stats::<f64>(&empty), SurfaceStats::default());
        let d = Document::new("d", "cat sat.", RawLabel::default());
        let s = surface_stats::<f64>(&d);
        assert_eq!((s.n_words, s.n_sentences), (2, 1));
        assert_eq!(s.words_per_sentence, 2.0);
        assert_eq!(s.characters_per_word, 3.0);
        let d = Document::new("d", "beautiful", RawLabel::default());
        assert_eq!(surface_stats::<f64>(&d).prop_polysyllabic, 1.0);
    }

    #[test]
    fn formula_examples() {
        let s = SurfaceStats {
            words_per_sentence: 10.0,
            syllables_per_word: 1.5,
            characters_per_word: 4.0,
            sentences_per_word: 0.1,
            polysyllabic_per_sentence: 3.0,
            prop_monosyllabic: 0.6,
            prop_long_words: 0.2,
            prop_polysyllabic: 0.1,
            ..Default::default()
        };
        let t = traditional_scores(&s);
        assert!(close(t.flesch, 69.785, 1e-9));
        assert!(close(t.flesch_kincaid, 6.01, 1e-9));
        assert!(close(t.ari, 2.41, 1e-9));
        assert!(close(t.coleman_liau, 4.76017, 1e-9));
        assert!(close(t.smog, 13.0239, 1e-4));
        assert!(close(t.forcast, 11.0, 1e-9));
        assert!(close(t.lix, 30.0, 1e-9));
        assert!(close(t.fog, 4.04, 1e-9));
    }

    #[test]
    fn ttr_examples() {
        let fv: FeatureVector<f64> = ttr_from_counts(5, 10);
        let v = fv.to_vec();
        assert_eq!(v[0], 0.5);
        assert!(close(v[1], 5.0 / 20f64.sqrt(), 1e-12) && close(v[1], 1.1180, 1e-4));
        assert!(close(v[2], 1.5811, 1e-4));
        assert!(close(v[3], 0.69897, 1e-5));
        assert!(close(v[4], 5f64.ln().powi(2) / 2f64.ln(), 1e-12) && close(v[4], 3.7370, 1e-4));
        let fv: FeatureVector<f64> = ttr_from_counts(1, 8);
        assert_eq!(fv.get("ttr"), Some(0.125));
        let fv: FeatureVector<f64> = ttr_from_counts(6, 6);
        assert_eq!(fv.get("uber_index"), Some(0.0));
        let fv: FeatureVector<f64> = ttr_from_counts(1, 1);
        assert_eq!(fv.get("bilog_ttr"), Some(0.0));
        let fv: FeatureVector<f64> = ttr_from_counts(0, 0);
        assert!(fv.values().all(|x| x == 0.0));
    }

    #[test]
    fn mtld_degenerate_cases() {
        let same = vec!["a"; 10];
        // a factor closes every two tokens: 5 per direction
        assert_eq!(mtld(&same, 0.72), 2.0);
        let distinct: Vec<String> = (0..12).map(|i| format!("w{i}")).collect();
        assert_eq!(mtld(&distinct, 0.72), 0.0);
        assert_eq!(mtld(&["a"; 9], 0.72), 0.0);
    }

    #[test]
    fn mtld_partial_factor() {
        // forward: a b a -> 2/3 <= .72 closes a factor after 3 tokens, etc.
        let toks = ["a", "b", "a", "c", "d", "c", "e", "f", "g", "h"];
        let m: f64 = mtld(&toks, 0.72);
        // forward: factor at "a b a", factor at "c d c", remainder e f g h (ttr 1) -> 2
        // backward: h g f e c d c -> ttr 6/7 ... a b a: see by hand below
        // backward tokens: h g f e c d c b a a
        //   after 7 tokens: 6/7=.857; 8: 7/8; 9: 8/9; 10 (a repeated): 8/10 = .8 -> no factor
        //   partial = (1 - .8)/(.28)
        let back = 0.2 / 0.28;
        assert!(close(m, 10.0 / ((2.0 + back) / 2.0), 1e-12));
    }
}
