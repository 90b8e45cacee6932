//! Named feature sets, resource checks and whole-document extraction.

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use crate::features::FeatureVector;
use crate::lexical::{flesch_features, lexical_diversity, FLESCH_FEATURES, LEXICAL_DIVERSITY_FEATURES};
use crate::lexicon::{mean_rating_with, sense_features, LemmaTable, NormTable, SenseTable, SENSE_FEATURES};
use crate::parse_features::{syntactic_ratios, PARSE_DEVIATION_FEATURES, PARSE_DEVIATION_K, SYNTACTIC_FEATURES};
use crate::pcfg::{KBestList, KBestParser, ParseError};
use crate::pos::{pos_deviation, pos_divergence, pos_ratios, tag, TagLexicon, TaggedDocument, POS_DISTRIBUTION_FEATURES, POS_FEATURES};
use crate::scalar::Real;
use crate::text::{word_type_proportions, Document, Vocabulary};

/// Sentences longer than this many words are not parsed.
pub const MAX_PARSE_TOKENS: usize = 40;

#[derive(Debug, Error)]
pub enum RegistryError {
    #[error("unknown feature set {0:?}")]
    UnknownSet(String),
    #[error("extractor {extractor} needs resource {resource}")]
    MissingResource { extractor: Extractor, resource: String },
    #[error(transparent)]
    Parse(#[from] ParseError),
}

/// (feature, norms column, looked up by lemma)
pub const PSYCHOLINGUISTIC_FEATURES: [(&str, &str, bool); 11] = [
    ("aoa_kuperman", "aoa_kuperman", false),
    ("aoa_kuperman_lemmas", "aoa_kuperman", true),
    ("aoa_bird_lemmas", "aoa_bird", true),
    ("aoa_bristol_lemmas", "aoa_bristol", true),
    ("aoa_cortese_khanna_lemmas", "aoa_cortese_khanna", true),
    ("mrc_familiarity", "mrc_familiarity", false),
    ("mrc_concreteness", "mrc_concreteness", false),
    ("mrc_imageability", "mrc_imageability", false),
    ("mrc_colorado_meaningfulness", "mrc_colorado_meaningfulness", false),
    ("mrc_pavio_meaningfulness", "mrc_pavio_meaningfulness", false),
    ("mrc_aoa", "mrc_aoa", false),
];

/// Feature extractors in registry order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Extractor {
    Flesch,
    LexicalDiversity,
    Senses,
    Psycholinguistic,
    Pos,
    Syntactic,
    ParseDeviation,
    PosDistribution,
    WordTypes,
}

impl Extractor {
    pub const ALL: [Extractor; 9] = [
        Extractor::Flesch,
        Extractor::LexicalDiversity,
        Extractor::Senses,
        Extractor::Psycholinguistic,
        Extractor::Pos,
        Extractor::Syntactic,
        Extractor::ParseDeviation,
        Extractor::PosDistribution,
        Extractor::WordTypes,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Extractor::Flesch => "flesch",
            Extractor::LexicalDiversity => "lexical_diversity",
            Extractor::Senses => "senses",
            Extractor::Psycholinguistic => "psycholinguistic",
            Extractor::Pos => "pos",
            Extractor::Syntactic => "syntactic",
            Extractor::ParseDeviation => "parse_deviation",
            Extractor::PosDistribution => "pos_distribution",
            Extractor::WordTypes => "word_types",
        }
    }

    /// Fixed member names; empty for word types, whose columns come from the
    /// fitted vocabulary.
    pub fn members(self) -> Vec<&'static str> {
        match self {
            Extractor::Flesch => FLESCH_FEATURES.to_vec(),
            Extractor::LexicalDiversity => LEXICAL_DIVERSITY_FEATURES.to_vec(),
            Extractor::Senses => SENSE_FEATURES.to_vec(),
            Extractor::Psycholinguistic => PSYCHOLINGUISTIC_FEATURES.iter().map(|p| p.0).collect(),
            Extractor::Pos => POS_FEATURES.to_vec(),
            Extractor::Syntactic => SYNTACTIC_FEATURES.to_vec(),
            Extractor::ParseDeviation => PARSE_DEVIATION_FEATURES.to_vec(),
            Extractor::PosDistribution => POS_DISTRIBUTION_FEATURES.to_vec(),
            Extractor::WordTypes => Vec::new(),
        }
    }
}

impl fmt::Display for Extractor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

pub const SET_NAMES: [&str; 10] = [
    "flesch",
    "lexical_diversity",
    "senses",
    "traditional",
    "psycholinguistic",
    "pos",
    "syntactic",
    "novel_syntactic",
    "linguistic",
    "word_types",
];

fn named_extractors(name: &str) -> Option<Vec<Extractor>> {
    use Extractor::*;
    Some(match name {
        "flesch" => vec![Flesch],
        "lexical_diversity" => vec![LexicalDiversity],
        "senses" => vec![Senses],
        "traditional" => vec![Flesch, LexicalDiversity, Senses],
        "psycholinguistic" => vec![Psycholinguistic],
        "pos" => vec![Pos],
        "syntactic" => vec![Syntactic],
        "novel_syntactic" => vec![ParseDeviation, PosDistribution],
        "linguistic" => Extractor::ALL[..8].to_vec(),
        "word_types" => vec![WordTypes],
        _ => return None,
    })
}

/// A union of extractors; members always come out in registry order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FeatureSet {
    pub name: String,
    pub extractors: BTreeSet<Extractor>,
}

impl FeatureSet {
    pub fn named(name: &str) -> Result<Self, RegistryError> {
        let extractors = named_extractors(name).ok_or_else(|| RegistryError::UnknownSet(name.to_string()))?;
        Ok(FeatureSet { name: name.to_string(), extractors: extractors.into_iter().collect() })
    }

    /// Parses `a+b+c`; a leading `+` and empty parts are ignored. The name
    /// lists the parts once each, in [`SET_NAMES`] order.
    pub fn parse(expr: &str) -> Result<Self, RegistryError> {
        let mut parts: Vec<&str> = expr.split('+').map(str::trim).filter(|p| !p.is_empty()).collect();
        if parts.is_empty() {
            return Err(RegistryError::UnknownSet(expr.to_string()));
        }
        if let Some(bad) = parts.iter().find(|p| !SET_NAMES.contains(p)) {
            return Err(RegistryError::UnknownSet(bad.to_string()));
        }
        parts.sort_by_key(|p| SET_NAMES.iter().position(|n| n == p));
        parts.dedup();
        let mut set = FeatureSet { name: String::new(), extractors: BTreeSet::new() };
        for p in parts {
            set = set.union(&Self::named(p)?);
        }
        Ok(set)
    }

    pub fn union(&self, other: &FeatureSet) -> FeatureSet {
        let name = match (self.name.is_empty(), other.name.is_empty()) {
            (true, _) => other.name.clone(),
            (_, true) => self.name.clone(),
            _ => format!("{}+{}", self.name, other.name),
        };
        FeatureSet { name, extractors: self.extractors.union(&other.extractors).copied().collect() }
    }

    pub fn has_word_types(&self) -> bool {
        self.extractors.contains(&Extractor::WordTypes)
    }

    /// The same set without word types.
    pub fn without_word_types(&self) -> FeatureSet {
        let mut s = self.clone();
        s.extractors.remove(&Extractor::WordTypes);
        s
    }

    pub fn members(&self, vocabulary: Option<&Vocabulary>) -> Vec<String> {
        let mut out = Vec::new();
        for &e in &self.extractors {
            if e == Extractor::WordTypes {
                if let Some(v) = vocabulary {
                    out.extend(v.words().iter().map(|w| Vocabulary::feature_name(w)));
                }
            } else {
                out.extend(e.members().into_iter().map(str::to_string));
            }
        }
        out
    }
}

/// Everything extraction may need. Only what the selected set uses must be present.
pub struct Resources<T: Real = f64> {
    pub parser: Option<KBestParser<T>>,
    pub tag_lexicon: Option<TagLexicon>,
    pub norms: Option<Vec<NormTable<T>>>,
    pub lemmas: Option<LemmaTable>,
    pub senses: Option<SenseTable>,
    pub vocabulary: Option<Vocabulary>,
    pub max_parse_tokens: usize,
}

impl<T: Real> Default for Resources<T> {
    fn default() -> Self {
        Resources {
            parser: None,
            tag_lexicon: None,
            norms: None,
            lemmas: None,
            senses: None,
            vocabulary: None,
            max_parse_tokens: MAX_PARSE_TOKENS,
        }
    }
}

impl<T: Real> Resources<T> {
    fn norm_column(&self, column: &str) -> Option<&NormTable<T>> {
        self.norms.as_ref()?.iter().find(|t| t.name == column)
    }

    /// Fails on the first extractor whose resource is absent.
    pub fn check(&self, set: &FeatureSet) -> Result<(), RegistryError> {
        for &e in &set.extractors {
            let missing = |resource: &str| {
                Err(RegistryError::MissingResource { extractor: e, resource: resource.to_string() })
            };
            match e {
                Extractor::Flesch | Extractor::LexicalDiversity => {}
                Extractor::Senses if self.senses.is_none() => return missing("senses"),
                Extractor::Pos | Extractor::PosDistribution if self.tag_lexicon.is_none() => {
                    return missing("tag lexicon")
                }
                Extractor::Syntactic | Extractor::ParseDeviation if self.parser.is_none() => {
                    return missing("grammar")
                }
                Extractor::WordTypes if self.vocabulary.is_none() => return missing("vocabulary"),
                Extractor::Psycholinguistic => {
                    if self.norms.is_none() {
                        return missing("norms");
                    }
                    for (_, column, _) in PSYCHOLINGUISTIC_FEATURES {
                        if self.norm_column(column).is_none() {
                            return missing(&format!("norms column {column}"));
                        }
                    }
                }
                _ => {}
            }
        }
        Ok(())
    }
}

/// k-best lists for every parseable sentence, and the number of sentences
/// skipped (too long, empty, or outside the grammar's coverage).
pub fn parse_document<T: Real>(
    doc: &Document,
    parser: &KBestParser<T>,
    max_tokens: usize,
    k: usize,
) -> Result<(Vec<KBestList<T>>, usize), ParseError> {
    let mut parsed = Vec::new();
    let mut skipped = 0;
    for s in doc.sentences() {
        let toks: Vec<&str> = s.words().map(|t| t.lowercased.as_str()).collect();
        if toks.is_empty() || toks.len() > max_tokens {
            skipped += 1;
            continue;
        }
        match parser.kbest(&toks, k) {
            Ok(kb) => parsed.push(kb),
            Err(ParseError::NoParse { .. }) => skipped += 1,
            Err(e) => return Err(e),
        }
    }
    Ok((parsed, skipped))
}

/// Extracts every member of `set` in registry order. Non-finite values are
/// replaced by zero.
pub fn extract<T: Real>(doc: &Document, set: &FeatureSet, res: &Resources<T>) -> Result<FeatureVector<T>, RegistryError> {
    res.check(set)?;
    let mut fv = FeatureVector::new();
    let append = |fv: &mut FeatureVector<T>, part: FeatureVector<T>| {
        for (name, v) in part.iter() {
            fv.push(name, if v.is_finite() { v } else { T::zero() });
        }
    };
    let mut tagged: Option<TaggedDocument> = None;
    let mut syntax: Option<FeatureVector<T>> = None;
    for &e in &set.extractors {
        match e {
            Extractor::Flesch => append(&mut fv, flesch_features(doc)),
            Extractor::LexicalDiversity => append(&mut fv, lexical_diversity(doc)),
            Extractor::Senses => append(&mut fv, sense_features(doc, res.senses.as_ref().expect("checked"))),
            Extractor::Psycholinguistic => {
                let part = PSYCHOLINGUISTIC_FEATURES
                    .iter()
                    .map(|&(name, column, by_lemma)| {
                        let table = res.norm_column(column).expect("checked");
                        let lemmas = if by_lemma { res.lemmas.as_ref() } else { None };
                        (name, mean_rating_with(doc, table, lemmas).0)
                    })
                    .collect();
                append(&mut fv, part);
            }
            Extractor::Pos | Extractor::PosDistribution => {
                if tagged.is_none() {
                    tagged = Some(tag(doc, res.tag_lexicon.as_ref()).expect("checked"));
                }
                let t = tagged.as_ref().expect("just set");
                if e == Extractor::Pos {
                    append(&mut fv, pos_ratios(t));
                } else {
                    let part = POS_DISTRIBUTION_FEATURES.iter().copied().zip([pos_deviation(t), pos_divergence(t)]);
                    append(&mut fv, part.collect());
                }
            }
            Extractor::Syntactic | Extractor::ParseDeviation => {
                if syntax.is_none() {
                    let parser = res.parser.as_ref().expect("checked");
                    let (parsed, skipped) = parse_document(doc, parser, res.max_parse_tokens, PARSE_DEVIATION_K)?;
                    if skipped > 0 {
                        log::debug!("{}: {skipped} sentence(s) not parsed", doc.doc_id());
                    }
                    syntax = Some(syntactic_ratios(&parsed, doc));
                }
                let all = syntax.as_ref().expect("just set");
                let part = e.members().into_iter().map(|n| (n, all.get(n).unwrap_or_else(T::zero))).collect();
                append(&mut fv, part);
            }
            Extractor::WordTypes => {
                append(&mut fv, word_type_proportions(doc, res.vocabulary.as_ref().expect("checked")))
            }
        }
    }
    Ok(fv)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::demo;
    use crate::labeling::RawLabel;
    use crate::lexicon::{parse_lemmas, parse_norms, parse_senses};
    use crate::pcfg::Grammar;

    pub(crate) fn demo_resources() -> Resources<f64> {
        let g: Grammar<f64> = Grammar::parse(&demo::grammar_text()).unwrap();
        Resources {
            parser: Some(KBestParser::new(&g).unwrap()),
            tag_lexicon: Some(TagLexicon::parse(&demo::tag_lexicon_csv()).unwrap()),
            norms: Some(parse_norms(&demo::norms_csv(), "norms").unwrap()),
            lemmas: Some(parse_lemmas(&demo::lemmas_csv(), "lemmas").unwrap()),
            senses: Some(parse_senses(&demo::senses_csv(), "senses").unwrap()),
            vocabulary: Some(Vocabulary::new(vec!["the".into(), "cat".into()])),
            max_parse_tokens: MAX_PARSE_TOKENS,
        }
    }

    /// Every row of the feature definition tables, snake-cased.
    const DEFINITION_ROWS: &[&str] = &[
        "pd_2", "pd_10", "pdm_10", "posd_dev", "pos_div",
        "mean_t_unit_length", "mean_parse_tree_height_per_sentence", "subtrees_per_sentence",
        "sbars_per_sentence", "nps_per_sentence", "vps_per_sentence", "pps_per_sentence",
        "mean_np_size", "mean_vp_size", "mean_pp_size", "whps_per_sentence", "rrcs_per_sentence",
        "conjps_per_sentence", "clauses_per_sentence", "t_units_per_sentence", "clauses_per_t_unit",
        "complex_t_unit_ratio", "dependent_clauses_per_clause", "dependent_clauses_per_t_unit",
        "coordinate_clauses_per_clause", "coordinate_clauses_per_t_unit",
        "complex_nominals_per_clause", "complex_nominals_per_t_unit", "vps_per_t_unit",
        "nouns_per_word", "proper_nouns_per_word", "pronouns_per_word", "conjunctions_per_word",
        "adjectives_per_word", "verbs_per_word", "adverbs_per_word", "modal_verbs_per_word",
        "prepositions_per_word", "interjections_per_word", "personal_pronouns_per_word",
        "wh_pronouns_per_word", "lexical_words_per_word", "function_words_per_word",
        "determiners_per_word", "vbs_per_word", "vbds_per_word", "vbgs_per_word", "vbns_per_word",
        "vbps_per_word", "vbzs_per_word", "adverb_variation", "adjective_variation",
        "modal_verb_variation", "noun_variation", "verb_variation_1", "verb_variation_2",
        "squared_verb_variation_1", "corrected_verb_variation_1",
        "aoa_kuperman", "aoa_kuperman_lemmas", "aoa_bird_lemmas", "aoa_bristol_lemmas",
        "aoa_cortese_khanna_lemmas", "mrc_familiarity", "mrc_concreteness", "mrc_imageability",
        "mrc_colorado_meaningfulness", "mrc_pavio_meaningfulness", "mrc_aoa",
        "number_of_sentences", "mean_sentence_length", "number_of_characters", "number_of_syllables",
        "flesch_kincaid", "flesch", "automated_readability_index", "coleman_liau", "smog", "fog",
        "forcast", "lix",
        "ttr", "corrected_ttr", "root_ttr", "bilog_ttr", "uber_index", "mtld",
        "number_of_senses", "hypernyms_per_word", "hyponyms_per_word",
    ];

    #[test]
    fn registry_is_complete() {
        assert_eq!(DEFINITION_ROWS.len(), 90);
        for row in DEFINITION_ROWS {
            let owners: Vec<_> = Extractor::ALL.iter().filter(|e| e.members().contains(row)).collect();
            assert_eq!(owners.len(), 1, "{row}: {owners:?}");
        }
        let all = FeatureSet::named("linguistic").unwrap().members(None);
        assert_eq!(all.len(), DEFINITION_ROWS.len());
        assert_eq!(all.iter().collect::<BTreeSet<_>>().len(), all.len());
    }

    #[test]
    fn set_examples() {
        let res = demo_resources();
        let doc = Document::new("d", "The cat saw a dog. He reads books.", RawLabel::default());
        let fv = extract(&doc, &FeatureSet::named("flesch").unwrap(), &res).unwrap();
        assert_eq!(fv.names().collect::<Vec<_>>(), FLESCH_FEATURES.to_vec());
        let fv = extract(&doc, &FeatureSet::named("novel_syntactic").unwrap(), &res).unwrap();
        assert_eq!(fv.names().collect::<Vec<_>>(), vec!["pd_2", "pd_10", "pdm_10", "posd_dev", "pos_div"]);
        let empty = Document::new("e", "", RawLabel::default());
        for name in SET_NAMES {
            let set = FeatureSet::named(name).unwrap();
            let fv = extract(&empty, &set, &res).unwrap();
            assert_eq!(fv.len(), set.members(res.vocabulary.as_ref()).len(), "{name}");
            assert!(fv.values().all(|v| v == 0.0), "{name}");
            let fv = extract(&doc, &set, &res).unwrap();
            assert_eq!(fv.names().collect::<Vec<_>>(), set.members(res.vocabulary.as_ref()));
            assert!(fv.values().all(f64::is_finite));
        }
    }

    #[test]
    fn union_follows_registry_order() {
        let a = FeatureSet::parse("flesch+linguistic").unwrap();
        let b = FeatureSet::parse("linguistic").unwrap().union(&FeatureSet::parse("flesch").unwrap());
        assert_eq!(a.members(None), b.members(None));
        assert_eq!(FeatureSet::parse("linguistic+flesch+flesch").unwrap(), a);
        assert_eq!(FeatureSet::parse("+pos").unwrap().name, "pos");
        assert!(matches!(FeatureSet::parse("bogus"), Err(RegistryError::UnknownSet(_))));
    }

    #[test]
    fn missing_resources_are_named() {
        let mut res = demo_resources();
        res.parser = None;
        let doc = Document::new("d", "The cat sat.", RawLabel::default());
        let err = extract(&doc, &FeatureSet::named("syntactic").unwrap(), &res).unwrap_err();
        assert!(matches!(err, RegistryError::MissingResource { extractor: Extractor::Syntactic, .. }));
        res.norms = Some(parse_norms("word,aoa_kuperman\ncat,3\n", "n").unwrap());
        let err = extract(&doc, &FeatureSet::named("psycholinguistic").unwrap(), &res).unwrap_err();
        assert!(err.to_string().contains("aoa_bird"), "{err}");
        assert!(extract(&doc, &FeatureSet::named("flesch").unwrap(), &Resources::<f64>::default()).is_ok());
    }

    #[test]
    fn long_and_unknown_sentences_are_skipped() {
        let res = demo_resources();
        let parser = res.parser.as_ref().unwrap();
        let long = ["the cat saw the dog"; 9].join(" and ");
        let doc = Document::new("d", &format!("{long}. The zyx sat. The cat saw a dog."), RawLabel::default());
        let (parsed, skipped) = parse_document(&doc, parser, MAX_PARSE_TOKENS, 2).unwrap();
        assert_eq!((parsed.len(), skipped), (1, 2));
    }

    #[test]
    fn lemma_lookup_differs_from_surface() {
        let res = demo_resources();
        let doc = Document::new("d", "The cats investigated.", RawLabel::default());
        let fv = extract(&doc, &FeatureSet::named("psycholinguistic").unwrap(), &res).unwrap();
        assert_ne!(fv.get("aoa_kuperman"), fv.get("aoa_kuperman_lemmas"));
    }
}
