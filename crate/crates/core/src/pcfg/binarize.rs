//! Conversion to Chomsky normal form.
//!
//! Long rules are right-factored through fresh `@LHS_n` symbols whose single
//! rule has probability 1, terminals inside long rules get an `@'t'`
//! preterminal, and unary nonterminal chains are collapsed into the rules they
//! end in (the collapsed labels are kept in [`Rule::chain`] so trees can be
//! restored). Every derivation keeps its log-probability.

use std::collections::{BTreeMap, HashMap};

use crate::scalar::Real;

use super::grammar::{Grammar, GrammarError, Rule, Symbol, INTERMEDIATE_MARK};

pub fn preterminal_for(terminal: &str) -> String {
    format!("{INTERMEDIATE_MARK}'{terminal}'")
}

pub fn binarize<T: Real>(grammar: &Grammar<T>) -> Result<Grammar<T>, GrammarError> {
    let factored = factor_long_rules(grammar)?;
    let collapsed = collapse_unaries(&factored)?;
    Ok(Grammar::new_unchecked(grammar.start().to_owned(), collapsed))
}

fn factor_long_rules<T: Real>(grammar: &Grammar<T>) -> Result<Vec<Rule<T>>, GrammarError> {
    let mut out = Vec::with_capacity(grammar.rules().len());
    let mut preterminals: BTreeMap<String, ()> = BTreeMap::new();
    let mut counters: HashMap<String, usize> = HashMap::new();
    let mut pending_preterminals = Vec::new();

    for rule in grammar.rules() {
        match rule.rhs.len() {
            0 => {
                return Err(GrammarError::UnsupportedRule(format!(
                    "{rule}: empty right-hand side"
                )))
            }
            1 => out.push(rule.clone()),
            _ => {
                let rhs: Vec<Symbol> = rule
                    .rhs
                    .iter()
                    .map(|s| match s {
                        Symbol::Terminal(t) => {
                            let pt = preterminal_for(t);
                            if preterminals.insert(pt.clone(), ()).is_none() {
                                pending_preterminals.push(Rule::new(pt.clone(), vec![s.clone()], T::one()));
                            }
                            Symbol::NonTerminal(pt)
                        }
                        nt => nt.clone(),
                    })
                    .collect();
                let mut lhs = rule.lhs.clone();
                let mut prob = rule.prob;
                let mut log_prob = rule.log_prob;
                let mut top = true;
                let mut rest = &rhs[..];
                while rest.len() > 2 {
                    let n = counters.entry(rule.lhs.clone()).or_default();
                    *n += 1;
                    let fresh = format!("{INTERMEDIATE_MARK}{}_{}", rule.lhs, n);
                    out.push(Rule {
                        lhs,
                        rhs: vec![rest[0].clone(), Symbol::NonTerminal(fresh.clone())],
                        prob,
                        log_prob,
                        chain: if top { rule.chain.clone() } else { Vec::new() },
                    });
                    top = false;
                    lhs = fresh;
                    prob = T::one();
                    log_prob = T::zero();
                    rest = &rest[1..];
                }
                out.push(Rule {
                    lhs,
                    rhs: rest.to_vec(),
                    prob,
                    log_prob,
                    chain: if top { rule.chain.clone() } else { Vec::new() },
                });
            }
        }
    }
    out.extend(pending_preterminals);
    Ok(out)
}

fn collapse_unaries<T: Real>(rules: &[Rule<T>]) -> Result<Vec<Rule<T>>, GrammarError> {
    let mut by_lhs: HashMap<&str, Vec<&Rule<T>>> = HashMap::new();
    for r in rules {
        by_lhs.entry(r.lhs.as_str()).or_default().push(r);
    }
    let mut memo: HashMap<String, Vec<Rule<T>>> = HashMap::new();
    let mut out = Vec::with_capacity(rules.len());
    for r in rules {
        if r.is_unary_nonterminal() {
            let mut stack = vec![r.lhs.clone()];
            out.extend(expand_unary(r, &by_lhs, &mut memo, &mut stack)?);
        } else {
            out.push(r.clone());
        }
    }
    Ok(out)
}

/// All non-unary rules reachable from `unary` through a chain of unary rules,
/// re-rooted at `unary.lhs`.
fn expand_unary<T: Real>(
    unary: &Rule<T>,
    by_lhs: &HashMap<&str, Vec<&Rule<T>>>,
    memo: &mut HashMap<String, Vec<Rule<T>>>,
    stack: &mut Vec<String>,
) -> Result<Vec<Rule<T>>, GrammarError> {
    let target = unary.rhs[0].name().to_owned();
    if stack.contains(&target) {
        return Err(GrammarError::UnsupportedRule(format!(
            "unary cycle through `{target}`"
        )));
    }
    if !memo.contains_key(&target) {
        stack.push(target.clone());
        let mut expanded = Vec::new();
        for r in by_lhs.get(target.as_str()).into_iter().flatten() {
            if r.is_unary_nonterminal() {
                expanded.extend(expand_unary(r, by_lhs, memo, stack)?);
            } else {
                expanded.push((*r).clone());
            }
        }
        stack.pop();
        memo.insert(target.clone(), expanded);
    }
    Ok(memo[&target]
        .iter()
        .map(|inner| {
            let log_prob = unary.log_prob + inner.log_prob;
            let mut chain = Vec::with_capacity(inner.chain.len() + 1);
            chain.push(target.clone());
            chain.extend(inner.chain.iter().cloned());
            Rule {
                lhs: unary.lhs.clone(),
                rhs: inner.rhs.clone(),
                prob: log_prob.exp(),
                log_prob,
                chain,
            }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rule_strings(g: &Grammar<f64>) -> Vec<String> {
        g.rules().iter().map(|r| r.to_string()).collect()
    }

    #[test]
    fn right_factors_ternary() {
        let g: Grammar<f64> = Grammar::parse("S -> A B C # 0.5\nS -> 'x' # 0.5\nA -> 'a' # 1\nB -> 'b' # 1\nC -> 'c' # 1").unwrap();
        let b = binarize(&g).unwrap();
        let rs = rule_strings(&b);
        assert_eq!(rs[0], "S -> A @S_1 # 0.5");
        assert_eq!(rs[1], "@S_1 -> B C # 1");
    }

    #[test]
    fn cnf_is_unchanged() {
        let g: Grammar<f64> = Grammar::parse("S -> A A # 1.0\nA -> 'a' # 0.6\nA -> 'b' # 0.4").unwrap();
        assert_eq!(binarize(&g).unwrap(), g);
    }

    #[test]
    fn collapses_unary_chain() {
        let g: Grammar<f64> = Grammar::parse("S -> X # 0.5\nS -> 'b' # 0.5\nX -> 'a' # 1.0").unwrap();
        let b = binarize(&g).unwrap();
        let s_a = b.rules().iter().find(|r| r.lhs == "S" && r.rhs == vec![Symbol::t("a")]).unwrap();
        assert_eq!(s_a.prob, 0.5);
        assert_eq!(s_a.chain, vec!["X".to_owned()]);
        assert!(b.rules().iter().all(|r| !r.is_unary_nonterminal()));
    }

    #[test]
    fn terminals_in_long_rules_get_preterminals() {
        let g: Grammar<f64> = Grammar::parse("S -> 'a' S 'b' # 0.4\nS -> 'c' # 0.6").unwrap();
        let b = binarize(&g).unwrap();
        let rs = rule_strings(&b);
        assert!(rs.contains(&"S -> @'a' @S_1 # 0.4".to_owned()), "{rs:?}");
        assert!(rs.contains(&"@S_1 -> S @'b' # 1".to_owned()), "{rs:?}");
        assert!(rs.contains(&"@'a' -> 'a' # 1".to_owned()), "{rs:?}");
    }

    #[test]
    fn rejects_empty_rhs_and_cycles() {
        let g: Grammar<f64> = Grammar::parse("S -> # 0.5\nS -> 'a' # 0.5").unwrap();
        assert!(matches!(binarize(&g), Err(GrammarError::UnsupportedRule(_))));
        let g: Grammar<f64> = Grammar::parse("S -> A # 0.5\nS -> 'a' # 0.5\nA -> S # 0.5\nA -> 'b' # 0.5").unwrap();
        assert!(matches!(binarize(&g), Err(GrammarError::UnsupportedRule(_))));
    }
}
