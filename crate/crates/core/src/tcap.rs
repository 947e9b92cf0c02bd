//! The `tcap` approximation: the part of a term that no rewrite step can
//! ever touch, with every possibly-rewritable subterm replaced by a fresh
//! variable.

use crate::term::{Term, Trs};
use crate::unify::unifiable;

/// Source of fresh variables `#c0, #c1, …`. Share one generator between
/// calls whose results must not share variables.
#[derive(Debug, Default)]
pub struct FreshVars {
    next: usize,
}

impl FreshVars {
    pub fn new() -> Self {
        FreshVars::default()
    }

    pub fn fresh(&mut self) -> Term {
        let t = Term::Var(format!("#c{}", self.next));
        self.next += 1;
        t
    }
}

pub fn tcap(trs: &Trs, t: &Term) -> Term {
    tcap_with(trs, t, &mut FreshVars::new())
}

/// Left-hand sides only contain user variables, which never clash with the
/// `#c` namespace, so they are renamed apart from the capped term already.
pub fn tcap_with(trs: &Trs, t: &Term, fresh: &mut FreshVars) -> Term {
    match t {
        Term::Var(_) => fresh.fresh(),
        Term::App(f, args) => {
            let u = Term::App(f.clone(), args.iter().map(|a| tcap_with(trs, a, fresh)).collect());
            if trs.rules.iter().any(|r| unifiable(&r.lhs, &u)) {
                fresh.fresh()
            } else {
                u
            }
        }
    }
}
