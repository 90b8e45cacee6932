use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::fs;
use std::path::Path;

use thiserror::Error;

use crate::scalar::Real;

use super::tree::Tree;

/// Allowed deviation of a left-hand side's probability mass from 1.
pub const PROB_SUM_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GrammarError {
    #[error("missing grammar file {0}")]
    MissingFile(String),
    #[error("probabilities for `{0}` do not sum to 1")]
    BadProbabilitySum(String),
    #[error("malformed rule at line {line}: {reason}")]
    MalformedRule { line: usize, reason: String },
    #[error("unsupported rule: {0}")]
    UnsupportedRule(String),
}

/// A right-hand-side element.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Symbol {
    NonTerminal(String),
    Terminal(String),
}

impl Symbol {
    pub fn nt(s: impl Into<String>) -> Self {
        Symbol::NonTerminal(s.into())
    }

    pub fn t(s: impl Into<String>) -> Self {
        Symbol::Terminal(s.into())
    }

    pub fn name(&self) -> &str {
        match self {
            Symbol::NonTerminal(s) | Symbol::Terminal(s) => s,
        }
    }

    pub fn is_terminal(&self) -> bool {
        matches!(self, Symbol::Terminal(_))
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Symbol::NonTerminal(s) => f.write_str(s),
            Symbol::Terminal(s) => write!(f, "'{s}'"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Rule<T = f64> {
    pub lhs: String,
    pub rhs: Vec<Symbol>,
    pub prob: T,
    pub log_prob: T,
    /// Nonterminals of a collapsed unary chain, outermost first. Empty for
    /// rules read from a grammar file.
    pub chain: Vec<String>,
}

impl<T: Real> Rule<T> {
    pub fn new(lhs: impl Into<String>, rhs: Vec<Symbol>, prob: T) -> Self {
        Rule {
            lhs: lhs.into(),
            rhs,
            prob,
            log_prob: prob.ln(),
            chain: Vec::new(),
        }
    }

    pub fn is_unary_nonterminal(&self) -> bool {
        self.rhs.len() == 1 && !self.rhs[0].is_terminal()
    }
}

impl<T: Real> fmt::Display for Rule<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} ->", self.lhs)?;
        for s in &self.rhs {
            write!(f, " {s}")?;
        }
        write!(f, " # {}", self.prob)
    }
}

/// A probabilistic context-free grammar.
#[derive(Debug, Clone, PartialEq)]
pub struct Grammar<T = f64> {
    start: String,
    nonterminals: BTreeSet<String>,
    terminals: BTreeSet<String>,
    rules: Vec<Rule<T>>,
}

/// Names beginning with this marker are reserved for binarization intermediates.
pub const INTERMEDIATE_MARK: char = '@';

pub fn is_intermediate(label: &str) -> bool {
    label.starts_with(INTERMEDIATE_MARK)
}

impl<T: Real> Grammar<T> {
    /// Validates rule probabilities and builds the symbol sets.
    pub fn new(start: impl Into<String>, rules: Vec<Rule<T>>) -> Result<Self, GrammarError> {
        let g = Self::new_unchecked(start.into(), rules);
        let mut sums: BTreeMap<&str, f64> = BTreeMap::new();
        for r in &g.rules {
            let p = r.prob.to_f64().unwrap_or(f64::NAN);
            if !(p > 0.0 && p <= 1.0) {
                return Err(GrammarError::MalformedRule {
                    line: 0,
                    reason: format!("probability {p} of `{r}` outside (0, 1]"),
                });
            }
            *sums.entry(r.lhs.as_str()).or_default() += p;
        }
        if let Some((lhs, _)) = sums
            .iter()
            .find(|(_, s)| (**s - 1.0).abs() > PROB_SUM_TOLERANCE)
        {
            return Err(GrammarError::BadProbabilitySum((*lhs).to_owned()));
        }
        Ok(g)
    }

    pub(crate) fn new_unchecked(start: String, rules: Vec<Rule<T>>) -> Self {
        let mut nonterminals = BTreeSet::new();
        let mut terminals = BTreeSet::new();
        nonterminals.insert(start.clone());
        for r in &rules {
            nonterminals.insert(r.lhs.clone());
            for s in &r.rhs {
                match s {
                    Symbol::NonTerminal(n) => nonterminals.insert(n.clone()),
                    Symbol::Terminal(t) => terminals.insert(t.clone()),
                };
            }
        }
        Grammar {
            start,
            nonterminals,
            terminals,
            rules,
        }
    }

    pub fn start(&self) -> &str {
        &self.start
    }

    pub fn rules(&self) -> &[Rule<T>] {
        &self.rules
    }

    pub fn nonterminals(&self) -> &BTreeSet<String> {
        &self.nonterminals
    }

    pub fn terminals(&self) -> &BTreeSet<String> {
        &self.terminals
    }

    pub fn rules_for<'a>(&'a self, lhs: &'a str) -> impl Iterator<Item = &'a Rule<T>> + 'a {
        self.rules.iter().filter(move |r| r.lhs == lhs)
    }

    /// Parses the textual grammar format:
    ///
    /// ```text
    /// %start S
    /// S -> NP VP # 1.0
    /// NP -> 'dogs' # 1.0   // terminals are single-quoted
    /// ```
    pub fn parse(text: &str) -> Result<Self, GrammarError> {
        let mut start: Option<String> = None;
        let mut rules = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = strip_comment(raw).trim();
            if line.is_empty() {
                continue;
            }
            let bad = |reason: &str| GrammarError::MalformedRule {
                line: line_no,
                reason: reason.to_owned(),
            };
            if let Some(rest) = line.strip_prefix("%start") {
                let sym = rest.trim();
                if sym.is_empty() || sym.contains(char::is_whitespace) {
                    return Err(bad("`%start` needs exactly one symbol"));
                }
                start = Some(sym.to_owned());
                continue;
            }
            let (lhs, rest) = line.split_once("->").ok_or_else(|| bad("expected `->`"))?;
            let lhs = lhs.trim();
            if lhs.is_empty() || lhs.contains(char::is_whitespace) || lhs.contains('\'') {
                return Err(bad("left-hand side must be one nonterminal"));
            }
            if is_intermediate(lhs) {
                return Err(bad("symbols starting with `@` are reserved"));
            }
            let (rhs_text, prob_text) = rest.rsplit_once('#').ok_or_else(|| bad("expected `# prob`"))?;
            let prob: f64 = prob_text
                .trim()
                .parse()
                .map_err(|_| bad("probability is not a number"))?;
            if !(prob > 0.0 && prob <= 1.0) {
                return Err(bad("probability outside (0, 1]"));
            }
            let mut rhs = Vec::new();
            for item in rhs_text.split_whitespace() {
                if item.len() >= 2 && item.starts_with('\'') && item.ends_with('\'') {
                    rhs.push(Symbol::t(&item[1..item.len() - 1]));
                } else if item.contains('\'') {
                    return Err(bad("unbalanced terminal quote"));
                } else if is_intermediate(item) {
                    return Err(bad("symbols starting with `@` are reserved"));
                } else {
                    rhs.push(Symbol::nt(item));
                }
            }
            if start.is_none() {
                start = Some(lhs.to_owned());
            }
            rules.push(Rule::new(lhs, rhs, T::lit(prob)));
        }
        let start = start.ok_or(GrammarError::MalformedRule {
            line: 0,
            reason: "no start symbol".to_owned(),
        })?;
        if rules.is_empty() {
            return Err(GrammarError::MalformedRule {
                line: 0,
                reason: "no rules".to_owned(),
            });
        }
        Self::new(start, rules)
    }

    /// Renders the grammar in the textual format accepted by [`Grammar::parse`].
    pub fn to_text(&self) -> String {
        let mut out = format!("%start {}\n", self.start);
        for r in &self.rules {
            out.push_str(&r.to_string());
            out.push('\n');
        }
        out
    }

    /// Log-probability of a (de-binarized) tree under this grammar, summing each
    /// node's rule log-probability followed by its children left to right.
    /// `None` if some node uses a rule the grammar lacks.
    pub fn tree_log_prob(&self, tree: &Tree) -> Option<T> {
        let index = self.rule_index();
        tree_log_prob_with(&index, tree)
    }

    pub(crate) fn rule_index(&self) -> HashMap<(&str, Vec<Symbol>), T> {
        self.rules
            .iter()
            .map(|r| ((r.lhs.as_str(), r.rhs.clone()), r.log_prob))
            .collect()
    }
}

pub(crate) fn tree_log_prob_with<T: Real>(
    index: &HashMap<(&str, Vec<Symbol>), T>,
    tree: &Tree,
) -> Option<T> {
    if tree.is_leaf() {
        return Some(T::zero());
    }
    let rhs: Vec<Symbol> = tree
        .children
        .iter()
        .map(|c| {
            if c.is_leaf() {
                Symbol::t(&c.label)
            } else {
                Symbol::nt(&c.label)
            }
        })
        .collect();
    let mut acc = *index.get(&(tree.label.as_str(), rhs))?;
    for c in &tree.children {
        acc += tree_log_prob_with(index, c)?;
    }
    Some(acc)
}

fn strip_comment(line: &str) -> &str {
    // `//` inside a quoted terminal is not a comment
    let mut in_quote = false;
    let bytes = line.as_bytes();
    for i in 0..bytes.len() {
        match bytes[i] {
            b'\'' => in_quote = !in_quote,
            b'/' if !in_quote && bytes.get(i + 1) == Some(&b'/') => return &line[..i],
            _ => {}
        }
    }
    line
}

pub fn load_grammar<T: Real>(path: impl AsRef<Path>) -> Result<Grammar<T>, GrammarError> {
    let path = path.as_ref();
    let text =
        fs::read_to_string(path).map_err(|_| GrammarError::MissingFile(path.display().to_string()))?;
    Grammar::parse(&text)
}
