//! One-step rewriting, derivation replay, search and normalisation.
//!
//! Two binding policies exist for variables that occur only in a rule's
//! right-hand side. Replaying a certificate step requires the step to bind
//! them explicitly. Search ([`successors`], [`normalize`], [`reducts_within`])
//! instantiates them with the reserved constant [`BOTTOM`](crate::term::BOTTOM);
//! any join found that way is a genuine join.

use std::collections::HashSet;
use std::fmt;

use thiserror::Error;

use crate::term::{Position, Rule, Substitution, Term, Trs};
use crate::unify::match_term;

/// Error messages number rules from 1, as certificates do.
#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum RewriteError {
    #[error("there is no rule {}", .0 + 1)]
    InvalidRule(usize),
    #[error("{0} is not a position of the term")]
    InvalidPosition(Position),
    #[error("rule {} does not match at position {pos}", .rule + 1)]
    NoMatch { pos: Position, rule: usize },
    #[error("right-hand-side-only variable {0} is not bound by the step")]
    MissingBinding(String),
    #[error("{0} is not a right-hand-side-only variable of the rule")]
    UnexpectedBinding(String),
    #[error("no normal form reached within {0} steps")]
    BudgetExhausted(usize),
}

/// One replayable rewrite step.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct DerivationStep {
    pub pos: Position,
    /// 0-based index into the rewrite system.
    pub rule: usize,
    /// Bindings for the right-hand-side-only variables of the rule.
    pub extra: Substitution,
}

impl DerivationStep {
    pub fn new(pos: Position, rule: usize) -> Self {
        DerivationStep {
            pos,
            rule,
            extra: Substitution::new(),
        }
    }

    pub fn with_extra(pos: Position, rule: usize, extra: Substitution) -> Self {
        DerivationStep { pos, rule, extra }
    }
}

impl fmt::Display for DerivationStep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "rule {} at {}", self.rule + 1, self.pos)?;
        if !self.extra.is_empty() {
            write!(f, " with {}", self.extra)?;
        }
        Ok(())
    }
}

/// Failure of a derivation at a given (0-based) step.
#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("step {} ({cause})", .index + 1)]
pub struct ReplayError {
    pub index: usize,
    pub cause: RewriteError,
}

/// Rewrites the subterm of `t` at `pos` with rule `rule_index`.
pub fn rewrite_step(
    trs: &Trs,
    t: &Term,
    pos: &Position,
    rule_index: usize,
    extra: &Substitution,
) -> Result<Term, RewriteError> {
    let rule = trs.rule(rule_index).ok_or(RewriteError::InvalidRule(rule_index))?;
    let redex = t
        .subterm_at(pos)
        .ok_or_else(|| RewriteError::InvalidPosition(pos.clone()))?;
    let mut sigma = match_term(&rule.lhs, redex).ok_or_else(|| RewriteError::NoMatch {
        pos: pos.clone(),
        rule: rule_index,
    })?;
    let rhs_only = rule.rhs_only_vars();
    if let Some(x) = extra.domain().find(|x| !rhs_only.contains(x)) {
        return Err(RewriteError::UnexpectedBinding(x.clone()));
    }
    if let Some(x) = rhs_only.iter().find(|x| !extra.contains(x)) {
        return Err(RewriteError::MissingBinding(x.clone()));
    }
    sigma.extend_with(extra);
    let contractum = rule.rhs.apply(&sigma);
    Ok(t.replace_at(pos, contractum).expect("position checked above"))
}

pub fn apply_step(trs: &Trs, t: &Term, step: &DerivationStep) -> Result<Term, RewriteError> {
    rewrite_step(trs, t, &step.pos, step.rule, &step.extra)
}

/// Replays `steps` from `start`, returning the final term.
pub fn replay(trs: &Trs, start: &Term, steps: &[DerivationStep]) -> Result<Term, ReplayError> {
    let mut t = start.clone();
    for (index, step) in steps.iter().enumerate() {
        t = apply_step(trs, &t, step).map_err(|cause| ReplayError { index, cause })?;
    }
    Ok(t)
}

/// Contractum of `rule` applied to a redex matched by `sigma`, with
/// right-hand-side-only variables sent to ⊥.
fn contract(rule: &Rule, mut sigma: Substitution) -> Term {
    for x in rule.rhs_only_vars() {
        sigma.insert(x, Term::bottom());
    }
    rule.rhs.apply(&sigma)
}

/// A one-step reduct together with the rule and position that produced it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Reduct {
    pub term: Term,
    pub rule: usize,
    pub pos: Position,
}

/// Every one-step reduct, in position-major then rule order, duplicates kept.
pub fn one_step_reducts(trs: &Trs, t: &Term) -> Vec<Reduct> {
    let mut out = Vec::new();
    for pos in t.positions() {
        let sub = t.subterm_at(&pos).expect("own position");
        for (i, rule) in trs.rules.iter().enumerate() {
            if let Some(sigma) = match_term(&rule.lhs, sub) {
                let term = t
                    .replace_at(&pos, contract(rule, sigma))
                    .expect("own position");
                out.push(Reduct {
                    term,
                    rule: i,
                    pos: pos.clone(),
                });
            }
        }
    }
    out
}

/// The set of one-step reducts of `t`.
pub fn successors(trs: &Trs, t: &Term) -> Vec<Term> {
    let mut out: Vec<Term> = one_step_reducts(trs, t).into_iter().map(|r| r.term).collect();
    out.sort();
    out.dedup();
    out
}

pub fn is_normal_form(trs: &Trs, t: &Term) -> bool {
    t.positions().iter().all(|p| {
        let sub = t.subterm_at(p).expect("own position");
        trs.rules.iter().all(|r| match_term(&r.lhs, sub).is_none())
    })
}

/// All terms reachable from `t` in at most `bound` steps.
pub fn reducts_within(trs: &Trs, t: &Term, bound: usize) -> HashSet<Term> {
    let mut seen = HashSet::new();
    seen.insert(t.clone());
    let mut frontier = vec![t.clone()];
    for _ in 0..bound {
        let mut next = Vec::new();
        for u in &frontier {
            for r in one_step_reducts(trs, u) {
                if seen.insert(r.term.clone()) {
                    next.push(r.term);
                }
            }
        }
        if next.is_empty() {
            break;
        }
        frontier = next;
    }
    seen
}

// Post-order search: the first redex found has no redex below it and is
// leftmost among such.
fn innermost_redex(trs: &Trs, t: &Term, path: &mut Vec<usize>) -> Option<(Position, Term)> {
    if let Term::App(_, args) = t {
        for (i, a) in args.iter().enumerate() {
            path.push(i);
            let found = innermost_redex(trs, a, path);
            path.pop();
            if found.is_some() {
                return found;
            }
        }
    }
    trs.rules.iter().find_map(|rule| {
        match_term(&rule.lhs, t).map(|sigma| (Position(path.clone()), contract(rule, sigma)))
    })
}

/// Leftmost-innermost normalisation, trying rules in index order.
pub fn normalize(trs: &Trs, t: &Term, step_budget: usize) -> Result<Term, RewriteError> {
    let mut t = t.clone();
    let mut steps = 0;
    while let Some((pos, contractum)) = innermost_redex(trs, &t, &mut Vec::new()) {
        if steps == step_budget {
            return Err(RewriteError::BudgetExhausted(step_budget));
        }
        t = t.replace_at(&pos, contractum).expect("redex position");
        steps += 1;
    }
    Ok(t)
}
