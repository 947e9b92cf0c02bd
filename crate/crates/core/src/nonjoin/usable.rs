//! Usable rules for reachability.
//!
//! A rule is usable for `t` if its left-hand side unifies with
//! `f(tcap(t₁), …, tcap(tₙ))` for some subterm `f(t₁, …, tₙ)` of `t`, or is a
//! variable (and `t` has a variable subterm); usable rules propagate through
//! their right-hand sides. Every rule applied in a derivation from `t` is
//! usable for `t`.

use std::collections::BTreeSet;

use crate::tcap::{tcap_with, FreshVars};
use crate::term::{Term, Trs};
use crate::unify::unifiable;

fn directly_usable(trs: &Trs, t: &Term, out: &mut BTreeSet<usize>) {
    let mut fresh = FreshVars::new();
    t.visit(&mut |s| match s {
        Term::Var(_) => {
            out.extend(trs.rules.iter().enumerate().filter(|(_, r)| r.lhs.is_var()).map(|(i, _)| i));
        }
        Term::App(f, args) => {
            let capped = Term::App(f.clone(), args.iter().map(|a| tcap_with(trs, a, &mut fresh)).collect());
            out.extend(
                trs.rules
                    .iter()
                    .enumerate()
                    .filter(|(_, r)| unifiable(&r.lhs, &capped))
                    .map(|(i, _)| i),
            );
        }
    });
}

/// Indices of the usable rules, ascending.
pub fn usable_rule_indices(trs: &Trs, t: &Term) -> BTreeSet<usize> {
    let mut usable = BTreeSet::new();
    directly_usable(trs, t, &mut usable);
    let mut todo: Vec<usize> = usable.iter().copied().collect();
    while let Some(i) = todo.pop() {
        let mut found = BTreeSet::new();
        directly_usable(trs, &trs.rules[i].rhs, &mut found);
        for j in found {
            if usable.insert(j) {
                todo.push(j);
            }
        }
    }
    usable
}

/// The usable rules of `trs` for `t`, in their original order.
pub fn usable_rules_reach(trs: &Trs, t: &Term) -> Trs {
    usable_rule_indices(trs, t)
        .into_iter()
        .map(|i| trs.rules[i].clone())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::term::Rule;

    fn c(n: &str) -> Term {
        Term::constant(n)
    }
    fn v(n: &str) -> Term {
        Term::var(n)
    }

    #[test]
    fn reachable_chain_only() {
        let trs = Trs::new(vec![
            Rule::new(c("a"), c("b")),
            Rule::new(c("b"), c("c")),
            Rule::new(c("d"), c("e")),
        ]);
        assert_eq!(usable_rule_indices(&trs, &c("a")), BTreeSet::from([0, 1]));
        assert!(usable_rules_reach(&trs, &c("e")).is_empty());
    }

    #[test]
    fn variable_lhs_rules() {
        let r5 = Trs::new(vec![
            Rule::new(c("a"), c("b1")),
            Rule::new(c("a"), c("b2")),
            Rule::new(v("x"), Term::app("f", vec![v("x")])),
        ]);
        // a is not reachable from b1
        assert_eq!(usable_rule_indices(&r5, &c("b1")), BTreeSet::from([2]));
        assert_eq!(usable_rules_reach(&r5, &c("a")), r5);
    }

    #[test]
    fn arguments_are_capped() {
        // f(a) can become f(b), which matches f(b) -> c
        let trs = Trs::new(vec![
            Rule::new(c("a"), c("b")),
            Rule::new(Term::app("f", vec![c("b")]), c("c")),
            Rule::new(Term::app("g", vec![c("b")]), c("c")),
        ]);
        assert_eq!(usable_rule_indices(&trs, &Term::app("f", vec![c("a")])), BTreeSet::from([0, 1]));
    }
}
