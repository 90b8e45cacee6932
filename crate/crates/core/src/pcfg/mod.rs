//! Probabilistic context-free grammars, normal-form conversion and k-best
//! CKY parsing in the log domain.

mod binarize;
mod cky;
mod grammar;
mod tree;

pub use binarize::{binarize, preterminal_for};
pub use cky::{cky_kbest, derivation_order, KBestList, KBestParser, Parse, ParseError};
pub use grammar::{
    is_intermediate, load_grammar, Grammar, GrammarError, Rule, Symbol, INTERMEDIATE_MARK,
    PROB_SUM_TOLERANCE,
};
pub use tree::{Tree, TreeSyntaxError};
