use std::fmt;

use thiserror::Error;

/// A constituency tree. Leaves are terminals (no children); every internal
/// node has at least one child.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Tree {
    pub label: String,
    pub children: Vec<Tree>,
}

#[derive(Debug, Error, PartialEq)]
#[error("bad bracketed tree at byte {pos}: {reason}")]
pub struct TreeSyntaxError {
    pub pos: usize,
    pub reason: &'static str,
}

impl Tree {
    pub fn leaf(label: impl Into<String>) -> Self {
        Tree {
            label: label.into(),
            children: Vec::new(),
        }
    }

    pub fn node(label: impl Into<String>, children: Vec<Tree>) -> Self {
        Tree {
            label: label.into(),
            children,
        }
    }

    pub fn is_leaf(&self) -> bool {
        self.children.is_empty()
    }

    /// Terminal yield, left to right.
    pub fn leaves(&self) -> Vec<&str> {
        let mut out = Vec::new();
        self.collect_leaves(&mut out);
        out
    }

    fn collect_leaves<'a>(&'a self, out: &mut Vec<&'a str>) {
        if self.is_leaf() {
            out.push(&self.label);
        }
        for c in &self.children {
            c.collect_leaves(out);
        }
    }

    /// Longest root-to-leaf path, counted in edges.
    pub fn height(&self) -> usize {
        self.children.iter().map(|c| c.height() + 1).max().unwrap_or(0)
    }

    /// Pre-order traversal of internal nodes together with their ancestors
    /// (nearest last).
    pub fn walk<'a>(&'a self, f: &mut impl FnMut(&'a Tree, &[&'a Tree])) {
        let mut ancestors = Vec::new();
        self.walk_inner(&mut ancestors, f);
    }

    fn walk_inner<'a>(&'a self, ancestors: &mut Vec<&'a Tree>, f: &mut impl FnMut(&'a Tree, &[&'a Tree])) {
        if self.is_leaf() {
            return;
        }
        f(self, ancestors);
        ancestors.push(self);
        for c in &self.children {
            c.walk_inner(ancestors, f);
        }
        ancestors.pop();
    }

    /// Parses Penn-style brackets, e.g. `(S (NP (DT the) (NN dog)) (VP (VBZ runs)))`.
    pub fn from_bracketed(text: &str) -> Result<Tree, TreeSyntaxError> {
        let mut p = BracketParser { s: text.as_bytes(), text, pos: 0 };
        p.skip_ws();
        let t = p.tree()?;
        p.skip_ws();
        if p.pos != p.s.len() {
            return Err(p.err("trailing input"));
        }
        Ok(t)
    }
}

impl fmt::Display for Tree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_leaf() {
            return f.write_str(&self.label);
        }
        write!(f, "({}", self.label)?;
        for c in &self.children {
            write!(f, " {c}")?;
        }
        f.write_str(")")
    }
}

struct BracketParser<'a> {
    s: &'a [u8],
    text: &'a str,
    pos: usize,
}

impl BracketParser<'_> {
    fn err(&self, reason: &'static str) -> TreeSyntaxError {
        TreeSyntaxError { pos: self.pos, reason }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn atom(&mut self) -> Result<String, TreeSyntaxError> {
        let start = self.pos;
        while self.pos < self.s.len() && !matches!(self.s[self.pos], b'(' | b')') && !self.s[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.err("expected a label"));
        }
        Ok(self.text[start..self.pos].to_owned())
    }

    fn tree(&mut self) -> Result<Tree, TreeSyntaxError> {
        if self.s.get(self.pos) != Some(&b'(') {
            return Ok(Tree::leaf(self.atom()?));
        }
        self.pos += 1;
        self.skip_ws();
        let label = self.atom()?;
        let mut children = Vec::new();
        loop {
            self.skip_ws();
            match self.s.get(self.pos) {
                Some(b')') => {
                    self.pos += 1;
                    break;
                }
                Some(_) => children.push(self.tree()?),
                None => return Err(self.err("unclosed bracket")),
            }
        }
        if children.is_empty() {
            return Err(self.err("node without children"));
        }
        Ok(Tree::node(label, children))
    }
}
