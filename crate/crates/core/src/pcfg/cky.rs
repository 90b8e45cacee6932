//! CKY chart parsing with exact k-best extraction.
//!
//! Each chart cell keeps, per symbol, its k best derivations. A cell is
//! filled by lazy successor enumeration: every (rule, split) pair contributes
//! its (0, 0) combination to a frontier, and popping candidate (a, b) pushes
//! (a + 1, b) and (a, b + 1). Derivations are ordered by log-probability,
//! then by their bracketed rendering so that ties resolve deterministically.

use std::cmp::Ordering;
use std::collections::{HashMap, HashSet};

use thiserror::Error;

use crate::scalar::Real;

use super::binarize::binarize;
use super::grammar::{is_intermediate, tree_log_prob_with, Grammar, GrammarError, Symbol};
use super::tree::Tree;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ParseError {
    #[error("cannot parse an empty sentence")]
    EmptySentence,
    #[error("k must be at least 1")]
    ZeroK,
    #[error("no parse{}", if oov.is_empty() { String::new() } else { format!(" (unknown tokens: {})", oov.join(", ")) })]
    NoParse { oov: Vec<String> },
    #[error(transparent)]
    Grammar(#[from] GrammarError),
}

/// A complete derivation with its log-probability under the original grammar.
#[derive(Debug, Clone, PartialEq)]
pub struct Parse<T = f64> {
    pub tree: Tree,
    pub log_prob: T,
}

/// Parses ordered by non-increasing log-probability.
#[derive(Debug, Clone, PartialEq)]
pub struct KBestList<T = f64> {
    pub parses: Vec<Parse<T>>,
    pub requested_k: usize,
}

impl<T: Real> KBestList<T> {
    pub fn log_probs(&self) -> Vec<T> {
        self.parses.iter().map(|p| p.log_prob).collect()
    }

    pub fn best(&self) -> Option<&Parse<T>> {
        self.parses.first()
    }

    pub fn len(&self) -> usize {
        self.parses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parses.is_empty()
    }
}

/// Scores closer than this (relative) are treated as tied, which absorbs
/// rounding differences between summation orders.
fn tie_tolerance<T: Real>(a: T, b: T) -> T {
    T::epsilon() * T::lit(1024.0) * T::one().max(a.abs()).max(b.abs())
}

/// Better-first comparison of two log-probabilities; `None` on a tie.
fn score_order<T: Real>(a: T, b: T) -> Option<Ordering> {
    if (a - b).abs() <= tie_tolerance(a, b) {
        None
    } else {
        b.partial_cmp(&a)
    }
}

/// Orders `(log_prob, rendering)` pairs best-first.
pub fn derivation_order<T: Real>(a: (T, &str), b: (T, &str)) -> Ordering {
    score_order(a.0, b.0).unwrap_or_else(|| a.1.cmp(b.1))
}

#[derive(Debug, Clone, Copy)]
enum Back {
    Lex { rule: usize },
    Bin { rule: usize, split: usize, left: usize, right: usize },
}

#[derive(Debug, Clone, Copy)]
struct Item<T> {
    score: T,
    back: Back,
}

/// A grammar prepared for repeated k-best parsing.
#[derive(Debug, Clone)]
pub struct KBestParser<T = f64> {
    cnf: Grammar<T>,
    names: Vec<String>,
    intermediate: Vec<bool>,
    start: usize,
    lexical: HashMap<String, Vec<usize>>,
    binary_by_lhs: Vec<Vec<(usize, usize, usize)>>,
    original_index: HashMap<(String, Vec<Symbol>), T>,
}

struct Chart<T> {
    n: usize,
    cells: Vec<Vec<Vec<Item<T>>>>,
}

impl<T> Chart<T> {
    fn at(&self, i: usize, j: usize, sym: usize) -> &[Item<T>] {
        &self.cells[i * (self.n + 1) + j][sym]
    }
}

impl<T: Real> KBestParser<T> {
    pub fn new(grammar: &Grammar<T>) -> Result<Self, GrammarError> {
        let cnf = binarize(grammar)?;
        let names: Vec<String> = cnf.nonterminals().iter().cloned().collect();
        let ids: HashMap<&str, usize> = names.iter().enumerate().map(|(i, n)| (n.as_str(), i)).collect();
        let mut lexical: HashMap<String, Vec<usize>> = HashMap::new();
        let mut binary_by_lhs = vec![Vec::new(); names.len()];
        for (idx, r) in cnf.rules().iter().enumerate() {
            match r.rhs.as_slice() {
                [Symbol::Terminal(t)] => lexical.entry(t.clone()).or_default().push(idx),
                [Symbol::NonTerminal(b), Symbol::NonTerminal(c)] => {
                    binary_by_lhs[ids[r.lhs.as_str()]].push((idx, ids[b.as_str()], ids[c.as_str()]))
                }
                _ => {
                    return Err(GrammarError::UnsupportedRule(format!(
                        "{r}: not in normal form after binarization"
                    )))
                }
            }
        }
        let original_index = grammar
            .rules()
            .iter()
            .map(|r| ((r.lhs.clone(), r.rhs.clone()), r.log_prob))
            .collect();
        Ok(KBestParser {
            intermediate: names.iter().map(|n| is_intermediate(n)).collect(),
            start: ids[cnf.start()],
            names,
            lexical,
            binary_by_lhs,
            original_index,
            cnf,
        })
    }

    /// The normal-form grammar used for charting.
    pub fn cnf(&self) -> &Grammar<T> {
        &self.cnf
    }

    /// The `k` most probable complete parses of `tokens`, de-binarized.
    pub fn kbest<S: AsRef<str>>(&self, tokens: &[S], k: usize) -> Result<KBestList<T>, ParseError> {
        if k == 0 {
            return Err(ParseError::ZeroK);
        }
        if tokens.is_empty() {
            return Err(ParseError::EmptySentence);
        }
        let oov: Vec<String> = tokens
            .iter()
            .map(AsRef::as_ref)
            .filter(|t| !self.lexical.contains_key(*t))
            .map(str::to_owned)
            .collect();
        if !oov.is_empty() {
            return Err(ParseError::NoParse { oov });
        }
        let chart = self.fill(tokens, k);
        let n = tokens.len();
        let top = chart.at(0, n, self.start);
        if top.is_empty() {
            return Err(ParseError::NoParse { oov: Vec::new() });
        }
        let index: HashMap<(&str, Vec<Symbol>), T> = self
            .original_index
            .iter()
            .map(|((l, r), v)| ((l.as_str(), r.clone()), *v))
            .collect();
        let mut scored: Vec<(Parse<T>, String)> = (0..top.len())
            .map(|rank| {
                let tree = self
                    .build(&chart, tokens, 0, n, self.start, rank)
                    .pop()
                    .expect("start symbol yields one tree");
                let log_prob = tree_log_prob_with(&index, &tree).unwrap_or(top[rank].score);
                let rendered = tree.to_string();
                (Parse { tree, log_prob }, rendered)
            })
            .collect();
        scored.sort_by(|a, b| derivation_order((a.0.log_prob, &a.1), (b.0.log_prob, &b.1)));
        Ok(KBestList {
            parses: scored.into_iter().map(|(p, _)| p).collect(),
            requested_k: k,
        })
    }

    fn fill<S: AsRef<str>>(&self, tokens: &[S], k: usize) -> Chart<T> {
        let n = tokens.len();
        let nsym = self.names.len();
        let mut chart = Chart {
            n,
            cells: vec![vec![Vec::new(); nsym]; (n + 1) * (n + 1)],
        };
        for (i, tok) in tokens.iter().enumerate() {
            let mut per_sym: Vec<Vec<Item<T>>> = vec![Vec::new(); nsym];
            for &rule in &self.lexical[tok.as_ref()] {
                let r = &self.cnf.rules()[rule];
                let lhs = self.names.binary_search(&r.lhs).expect("known lhs");
                per_sym[lhs].push(Item {
                    score: r.log_prob,
                    back: Back::Lex { rule },
                });
            }
            for (sym, mut items) in per_sym.into_iter().enumerate() {
                if items.len() > 1 {
                    items.sort_by(|a, b| self.compare(&chart, tokens, (i, i + 1, sym), a, b));
                    items.truncate(k);
                }
                chart.cells[i * (n + 1) + i + 1][sym] = items;
            }
        }
        for span in 2..=n {
            for i in 0..=n - span {
                let j = i + span;
                for sym in 0..nsym {
                    if self.binary_by_lhs[sym].is_empty() {
                        continue;
                    }
                    let items = self.cell_kbest(&chart, tokens, i, j, sym, k);
                    chart.cells[i * (n + 1) + j][sym] = items;
                }
            }
        }
        chart
    }

    fn cell_kbest<S: AsRef<str>>(
        &self,
        chart: &Chart<T>,
        tokens: &[S],
        i: usize,
        j: usize,
        sym: usize,
        k: usize,
    ) -> Vec<Item<T>> {
        let combine = |rule: usize, split: usize, left: usize, right: usize| -> Option<Item<T>> {
            let (_, b, c) = *self.binary_by_lhs[sym].iter().find(|e| e.0 == rule)?;
            let l = chart.at(i, split, b).get(left)?;
            let r = chart.at(split, j, c).get(right)?;
            Some(Item {
                score: self.cnf.rules()[rule].log_prob + l.score + r.score,
                back: Back::Bin { rule, split, left, right },
            })
        };
        let mut frontier: Vec<Item<T>> = Vec::new();
        let mut seen: HashSet<(usize, usize, usize, usize)> = HashSet::new();
        for &(rule, b, c) in &self.binary_by_lhs[sym] {
            for split in i + 1..j {
                if chart.at(i, split, b).is_empty() || chart.at(split, j, c).is_empty() {
                    continue;
                }
                if let Some(item) = combine(rule, split, 0, 0) {
                    seen.insert((rule, split, 0, 0));
                    frontier.push(item);
                }
            }
        }
        let mut out = Vec::with_capacity(k.min(frontier.len()));
        while out.len() < k && !frontier.is_empty() {
            let mut best = 0;
            for idx in 1..frontier.len() {
                if self.compare(chart, tokens, (i, j, sym), &frontier[idx], &frontier[best]) == Ordering::Less {
                    best = idx;
                }
            }
            let item = frontier.swap_remove(best);
            if let Back::Bin { rule, split, left, right } = item.back {
                for (l, r) in [(left + 1, right), (left, right + 1)] {
                    if seen.insert((rule, split, l, r)) {
                        if let Some(next) = combine(rule, split, l, r) {
                            frontier.push(next);
                        }
                    }
                }
            }
            out.push(item);
        }
        out
    }

    fn compare<S: AsRef<str>>(
        &self,
        chart: &Chart<T>,
        tokens: &[S],
        (i, j, sym): (usize, usize, usize),
        a: &Item<T>,
        b: &Item<T>,
    ) -> Ordering {
        score_order(a.score, b.score).unwrap_or_else(|| {
            let ra = self.render_back(chart, tokens, i, j, sym, a.back);
            let rb = self.render_back(chart, tokens, i, j, sym, b.back);
            ra.cmp(&rb)
        })
    }

    /// Bracketed rendering of a chart derivation after de-binarization;
    /// intermediates render as their spliced children.
    fn render_back<S: AsRef<str>>(
        &self,
        chart: &Chart<T>,
        tokens: &[S],
        i: usize,
        j: usize,
        sym: usize,
        back: Back,
    ) -> String {
        self.build_back(chart, tokens, i, j, sym, back)
            .iter()
            .map(Tree::to_string)
            .collect::<Vec<_>>()
            .join(" ")
    }

    fn build<S: AsRef<str>>(
        &self,
        chart: &Chart<T>,
        tokens: &[S],
        i: usize,
        j: usize,
        sym: usize,
        rank: usize,
    ) -> Vec<Tree> {
        self.build_back(chart, tokens, i, j, sym, chart.at(i, j, sym)[rank].back)
    }

    fn build_back<S: AsRef<str>>(
        &self,
        chart: &Chart<T>,
        tokens: &[S],
        i: usize,
        j: usize,
        sym: usize,
        back: Back,
    ) -> Vec<Tree> {
        let (rule, children) = match back {
            Back::Lex { rule } => (rule, vec![Tree::leaf(tokens[i].as_ref())]),
            Back::Bin { rule, split, left, right } => {
                let (_, b, c) = *self.binary_by_lhs[sym]
                    .iter()
                    .find(|e| e.0 == rule)
                    .expect("rule belongs to lhs");
                let mut kids = self.build(chart, tokens, i, split, b, left);
                kids.extend(self.build(chart, tokens, split, j, c, right));
                (rule, kids)
            }
        };
        if self.intermediate[sym] {
            return children;
        }
        let r = &self.cnf.rules()[rule];
        let inner = r.chain.iter().rev().fold(children, |kids, label| vec![Tree::node(label.clone(), kids)]);
        vec![Tree::node(self.names[sym].clone(), inner)]
    }
}

/// Convenience wrapper: binarizes `grammar` and returns the `k` best parses.
pub fn cky_kbest<T: Real, S: AsRef<str>>(
    grammar: &Grammar<T>,
    tokens: &[S],
    k: usize,
) -> Result<KBestList<T>, ParseError> {
    KBestParser::new(grammar)?.kbest(tokens, k)
}
