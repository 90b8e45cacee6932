//! Parse-ambiguity measures over k-best lists and constituent-based syntactic
//! ratios over best parses.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::features::FeatureVector;
use crate::pcfg::{KBestList, Tree};
use crate::scalar::{count_ratio, mean, population_std, ratio, Real};
use crate::text::Document;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParseFeatureError {
    #[error("k-best list is empty")]
    EmptyKBest,
}

fn top<T: Real>(log_probs: &[T], x: usize) -> Result<&[T], ParseFeatureError> {
    if log_probs.is_empty() {
        return Err(ParseFeatureError::EmptyKBest);
    }
    Ok(&log_probs[..x.min(log_probs.len())])
}

/// Population standard deviation of the first `x` log-probabilities (or all
/// of them when fewer exist). `log_probs` is assumed best-first.
pub fn deviation_of<T: Real>(log_probs: &[T], x: usize) -> Result<T, ParseFeatureError> {
    Ok(population_std(top(log_probs, x)?))
}

/// Largest of the first `x` log-probabilities minus their mean.
pub fn deviation_from_max_of<T: Real>(log_probs: &[T], x: usize) -> Result<T, ParseFeatureError> {
    let vals = top(log_probs, x)?;
    let max = vals.iter().copied().fold(T::neg_infinity(), T::max);
    Ok((max - mean(vals)).max(T::zero()))
}

pub fn parse_deviation<T: Real>(kbest: &KBestList<T>, x: usize) -> Result<T, ParseFeatureError> {
    deviation_of(&kbest.log_probs(), x)
}

pub fn parse_deviation_from_max<T: Real>(kbest: &KBestList<T>, x: usize) -> Result<T, ParseFeatureError> {
    deviation_from_max_of(&kbest.log_probs(), x)
}

const CLAUSE: &[&str] = &["S", "SBAR", "SINV", "SQ"];
const S_FAMILY: &[&str] = &["S", "SINV", "SQ"];
const WH_PHRASE: &[&str] = &["WHNP", "WHPP", "WHADVP", "WHADJP"];

/// Strips Penn function tags and indices: `NP-SBJ-1` → `NP`. Labels such as
/// `-NONE-` are left alone.
pub fn base_label(label: &str) -> &str {
    if label.starts_with('-') {
        return label;
    }
    label.split(['-', '=']).next().unwrap_or(label)
}

fn has_label(t: &Tree, set: &[&str]) -> bool {
    !t.is_leaf() && set.contains(&base_label(&t.label))
}

/// Counters gathered from a single de-binarized tree.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ConstituentCounts {
    /// Internal-node label counts, function tags stripped.
    pub labels: BTreeMap<String, usize>,
    pub clauses: usize,
    pub t_units: usize,
    pub complex_t_units: usize,
    pub dependent_clauses: usize,
    pub coordinate_clauses: usize,
    pub complex_nominals: usize,
    /// Proper subtrees rooted at internal nodes (all internal nodes but the root).
    pub subtrees: usize,
    pub height: usize,
    pub np_children: usize,
    pub vp_children: usize,
    pub pp_children: usize,
    pub words: usize,
}

impl ConstituentCounts {
    pub fn label(&self, label: &str) -> usize {
        self.labels.get(label).copied().unwrap_or(0)
    }

    fn labels_in(&self, set: &[&str]) -> usize {
        set.iter().map(|l| self.label(l)).sum()
    }
}

fn is_coordination(t: &Tree) -> bool {
    t.children.iter().any(|c| !c.is_leaf() && base_label(&c.label) == "CC")
        && t.children.iter().filter(|c| has_label(c, S_FAMILY)).count() >= 2
}

fn contains_dependent_clause(t: &Tree) -> bool {
    let mut found = false;
    t.walk(&mut |node, _| {
        if has_label(node, &["SBAR"]) && node.children.iter().any(|c| subtree_has(c, S_FAMILY)) {
            found = true;
        }
    });
    found
}

fn subtree_has(t: &Tree, set: &[&str]) -> bool {
    let mut found = false;
    t.walk(&mut |node, _| found |= has_label(node, set));
    found
}

/// Top-level t-units: clause children of `ROOT` (or the root itself), with a
/// top-level clause coordination contributing each conjunct.
fn t_units(tree: &Tree) -> Vec<&Tree> {
    let tops: Vec<&Tree> = if base_label(&tree.label) == "ROOT" {
        tree.children.iter().filter(|c| has_label(c, S_FAMILY)).collect()
    } else if has_label(tree, S_FAMILY) {
        vec![tree]
    } else {
        Vec::new()
    };
    let mut units = Vec::new();
    for t in tops {
        if is_coordination(t) {
            units.extend(t.children.iter().filter(|c| has_label(c, S_FAMILY)));
        } else {
            units.push(t);
        }
    }
    units
}

pub fn constituent_counts(tree: &Tree) -> ConstituentCounts {
    let mut c = ConstituentCounts {
        height: tree.height(),
        words: tree.leaves().len(),
        ..Default::default()
    };
    let mut internal = 0usize;
    tree.walk(&mut |node, ancestors| {
        internal += 1;
        let label = base_label(&node.label);
        *c.labels.entry(label.to_owned()).or_default() += 1;
        let kids = node.children.len();
        match label {
            "NP" => c.np_children += kids,
            "VP" => c.vp_children += kids,
            "PP" => c.pp_children += kids,
            _ => {}
        }
        if CLAUSE.contains(&label) {
            c.clauses += 1;
        }
        if S_FAMILY.contains(&label) {
            if ancestors.iter().any(|a| base_label(&a.label) == "SBAR") {
                c.dependent_clauses += 1;
            }
            if let Some(parent) = ancestors.last() {
                if parent.children.iter().any(|s| !s.is_leaf() && base_label(&s.label) == "CC") {
                    c.coordinate_clauses += 1;
                }
            }
        }
        if label == "NP"
            && (kids > 1 || node.children.iter().any(|k| has_label(k, &["SBAR", "PP", "VP"])))
        {
            c.complex_nominals += 1;
        }
    });
    c.subtrees = internal.saturating_sub(1);
    let units = t_units(tree);
    c.t_units = units.len();
    c.complex_t_units = units.iter().filter(|u| contains_dependent_clause(u)).count();
    c
}

/// Feature names produced by [`syntactic_ratios`], in output order.
pub const SYNTACTIC_FEATURES: [&str; 24] = [
    "mean_t_unit_length",
    "mean_parse_tree_height_per_sentence",
    "subtrees_per_sentence",
    "sbars_per_sentence",
    "nps_per_sentence",
    "vps_per_sentence",
    "pps_per_sentence",
    "mean_np_size",
    "mean_vp_size",
    "mean_pp_size",
    "whps_per_sentence",
    "rrcs_per_sentence",
    "conjps_per_sentence",
    "clauses_per_sentence",
    "t_units_per_sentence",
    "clauses_per_t_unit",
    "complex_t_unit_ratio",
    "dependent_clauses_per_clause",
    "dependent_clauses_per_t_unit",
    "coordinate_clauses_per_clause",
    "coordinate_clauses_per_t_unit",
    "complex_nominals_per_clause",
    "complex_nominals_per_t_unit",
    "vps_per_t_unit",
];

/// Parse-ambiguity features, averaged over parsed sentences.
pub const PARSE_DEVIATION_FEATURES: [&str; 3] = ["pd_2", "pd_10", "pdm_10"];

/// Number of parses requested per sentence for the parse-ambiguity features.
pub const PARSE_DEVIATION_K: usize = 10;

/// Document-level syntactic ratios. `parsed` holds the k-best list of every
/// sentence that was parsed; sentences that were skipped still count in the
/// per-sentence denominators via `doc`.
pub fn syntactic_ratios<T: Real>(parsed: &[KBestList<T>], doc: &Document) -> FeatureVector<T> {
    let n_sent = doc.sentences().len();
    let mut total = ConstituentCounts::default();
    let mut heights = Vec::new();
    let mut pd2 = Vec::new();
    let mut pd10 = Vec::new();
    let mut pdm10 = Vec::new();
    for kb in parsed {
        let Some(best) = kb.best() else { continue };
        let c = constituent_counts(&best.tree);
        heights.push(T::of_usize(c.height));
        for (label, n) in c.labels {
            *total.labels.entry(label).or_default() += n;
        }
        total.clauses += c.clauses;
        total.t_units += c.t_units;
        total.complex_t_units += c.complex_t_units;
        total.dependent_clauses += c.dependent_clauses;
        total.coordinate_clauses += c.coordinate_clauses;
        total.complex_nominals += c.complex_nominals;
        total.subtrees += c.subtrees;
        total.np_children += c.np_children;
        total.vp_children += c.vp_children;
        total.pp_children += c.pp_children;
        total.words += c.words;
        let lps = kb.log_probs();
        pd2.push(deviation_of(&lps, 2).unwrap_or_default());
        pd10.push(deviation_of(&lps, 10).unwrap_or_default());
        pdm10.push(deviation_from_max_of(&lps, 10).unwrap_or_default());
    }
    let t = &total;
    let per_sent = |n: usize| count_ratio::<T>(n, n_sent);
    let per_tu = |n: usize| count_ratio::<T>(n, t.t_units);
    let per_clause = |n: usize| count_ratio::<T>(n, t.clauses);
    let values: [T; 24] = [
        count_ratio(t.words, t.t_units),
        ratio(mean(&heights), T::of_usize(n_sent)),
        per_sent(t.subtrees),
        per_sent(t.label("SBAR")),
        per_sent(t.label("NP")),
        per_sent(t.label("VP")),
        per_sent(t.label("PP")),
        count_ratio(t.np_children, t.label("NP")),
        count_ratio(t.vp_children, t.label("VP")),
        count_ratio(t.pp_children, t.label("PP")),
        per_sent(t.labels_in(WH_PHRASE)),
        per_sent(t.label("RRC")),
        per_sent(t.label("CONJP")),
        per_sent(t.clauses),
        per_sent(t.t_units),
        per_tu(t.clauses),
        per_tu(t.complex_t_units),
        per_clause(t.dependent_clauses),
        per_tu(t.dependent_clauses),
        per_clause(t.coordinate_clauses),
        per_tu(t.coordinate_clauses),
        per_clause(t.complex_nominals),
        per_tu(t.complex_nominals),
        per_tu(t.label("VP")),
    ];
    let mut fv: FeatureVector<T> = SYNTACTIC_FEATURES.iter().copied().zip(values).collect();
    for (name, vals) in PARSE_DEVIATION_FEATURES.iter().zip([&pd2, &pd10, &pdm10]) {
        fv.push(*name, mean(vals));
    }
    fv
}
