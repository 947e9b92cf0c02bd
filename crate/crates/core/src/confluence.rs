//! Confluence criteria: weak orthogonality, strong closedness of linear
//! systems, and joinability of critical pairs for terminating systems.
//!
//! Trivial critical pairs are skipped everywhere. Root overlaps of a rule
//! with itself are still computed, so a right-hand-side-only variable
//! always shows up as a non-trivial pair.

use std::collections::HashSet;
use std::fmt;

use thiserror::Error;

use crate::critical::{critical_pairs, CriticalPair};
use crate::poly::{prove_termination, LinearPolyInterp, TerminationError};
use crate::rewrite::{normalize, reducts_within, replay, successors, DerivationStep, ReplayError, RewriteError};
use crate::term::{Term, Trs};

pub const DEFAULT_NF_BUDGET: usize = 10_000;

/// A certificate-supplied pair of joining derivations.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExplicitJoin {
    pub left: Term,
    pub right: Term,
    pub left_steps: Vec<DerivationStep>,
    pub right_steps: Vec<DerivationStep>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum JoinMethod {
    ByNormalization(usize),
    ByBfs(usize),
    Explicit(Vec<ExplicitJoin>),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Side::Left => "left",
            Side::Right => "right",
        })
    }
}

/// Rule numbers in messages are 1-based.
#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum ConfluenceError {
    #[error("rule {} is not left-linear", .0 + 1)]
    NotLeftLinear(usize),
    #[error("rule {} has a variable left-hand side", .0 + 1)]
    VariableLhs(usize),
    #[error("critical pair {0} is not trivial")]
    NontrivialCp(CriticalPair),
    #[error("rule {} is not linear", .0 + 1)]
    NotLinear(usize),
    #[error("critical pair {0} is not strongly closed within the bound")]
    CpNotStronglyClosed(CriticalPair),
    #[error("termination: {0}")]
    Termination(#[from] TerminationError),
    #[error("critical pair {pair} has distinct normal forms {nf_left} and {nf_right}")]
    NormalFormsDiffer {
        pair: CriticalPair,
        nf_left: Term,
        nf_right: Term,
    },
    #[error("critical pair {pair}: {side} component has no normal form within {budget} steps")]
    BudgetExhausted {
        pair: CriticalPair,
        side: Side,
        budget: usize,
    },
    #[error("critical pair {pair} is not joinable within {bound} steps per side")]
    BfsBoundExceeded { pair: CriticalPair, bound: usize },
    #[error("no join is given for critical pair {0}")]
    MissingJoin(CriticalPair),
    #[error("join of ({left}, {right}), {side} derivation: {error}")]
    Replay {
        left: Term,
        right: Term,
        side: Side,
        error: ReplayError,
    },
    #[error("join of ({left}, {right}) ends in distinct terms {left_end} and {right_end}")]
    JoinDiverges {
        left: Term,
        right: Term,
        left_end: Term,
        right_end: Term,
    },
}

/// Do the `≤ bound`-step reducts of `s` and `t` intersect?
pub fn join_bfs(trs: &Trs, s: &Term, t: &Term, bound: usize) -> bool {
    if s == t {
        return true;
    }
    let from_s = reducts_within(trs, s, bound);
    if from_s.contains(t) {
        return true;
    }
    let from_t = reducts_within(trs, t, bound);
    from_s.iter().any(|u| from_t.contains(u))
}

pub fn check_weakly_orthogonal(trs: &Trs) -> Result<(), ConfluenceError> {
    if let Some(i) = trs.rules.iter().position(|r| !r.is_left_linear()) {
        return Err(ConfluenceError::NotLeftLinear(i));
    }
    if let Some(i) = trs.rules.iter().position(|r| r.lhs.is_var()) {
        return Err(ConfluenceError::VariableLhs(i));
    }
    match critical_pairs(trs, true).into_iter().next() {
        Some(cp) => Err(ConfluenceError::NontrivialCp(cp)),
        None => Ok(()),
    }
}

fn with_one_step(trs: &Trs, t: &Term) -> HashSet<Term> {
    let mut out: HashSet<Term> = successors(trs, t).into_iter().collect();
    out.insert(t.clone());
    out
}

/// `s →* u ←= t` and `s →= v ←* t` with each `→*` bounded by `bound`.
pub fn is_strongly_closed_pair(trs: &Trs, s: &Term, t: &Term, bound: usize) -> bool {
    let t_eq = with_one_step(trs, t);
    let s_star = reducts_within(trs, s, bound);
    if !s_star.iter().any(|u| t_eq.contains(u)) {
        return false;
    }
    let s_eq = with_one_step(trs, s);
    let t_star = reducts_within(trs, t, bound);
    s_eq.iter().any(|v| t_star.contains(v))
}

pub fn check_strongly_closed(trs: &Trs, bound: usize) -> Result<(), ConfluenceError> {
    if let Some(i) = trs.rules.iter().position(|r| !r.is_linear()) {
        return Err(ConfluenceError::NotLinear(i));
    }
    for cp in critical_pairs(trs, true) {
        if !is_strongly_closed_pair(trs, &cp.left, &cp.right, bound) {
            return Err(ConfluenceError::CpNotStronglyClosed(cp));
        }
    }
    Ok(())
}

pub fn check_terminating_confluent(
    trs: &Trs,
    term_cert: &[LinearPolyInterp],
    method: &JoinMethod,
) -> Result<(), ConfluenceError> {
    prove_termination(trs, term_cert)?;
    for cp in critical_pairs(trs, true) {
        check_joinable(trs, &cp, method)?;
    }
    Ok(())
}

fn check_joinable(trs: &Trs, cp: &CriticalPair, method: &JoinMethod) -> Result<(), ConfluenceError> {
    match method {
        JoinMethod::ByNormalization(budget) => {
            let nf = |t: &Term, side| {
                normalize(trs, t, *budget).map_err(|e| match e {
                    RewriteError::BudgetExhausted(budget) => ConfluenceError::BudgetExhausted {
                        pair: cp.clone(),
                        side,
                        budget,
                    },
                    other => unreachable!("normalisation only fails on its budget: {other}"),
                })
            };
            let nf_left = nf(&cp.left, Side::Left)?;
            let nf_right = nf(&cp.right, Side::Right)?;
            if nf_left == nf_right {
                Ok(())
            } else {
                Err(ConfluenceError::NormalFormsDiffer {
                    pair: cp.clone(),
                    nf_left,
                    nf_right,
                })
            }
        }
        JoinMethod::ByBfs(bound) => {
            if join_bfs(trs, &cp.left, &cp.right, *bound) {
                Ok(())
            } else {
                Err(ConfluenceError::BfsBoundExceeded {
                    pair: cp.clone(),
                    bound: *bound,
                })
            }
        }
        JoinMethod::Explicit(joins) => {
            // a join for (t, s) also serves (s, t)
            let join = joins
                .iter()
                .find_map(|j| {
                    if j.left == cp.left && j.right == cp.right {
                        Some((j, false))
                    } else if j.left == cp.right && j.right == cp.left {
                        Some((j, true))
                    } else {
                        None
                    }
                })
                .ok_or_else(|| ConfluenceError::MissingJoin(cp.clone()))?;
            check_explicit_join(trs, join.0)
        }
    }
}

pub fn check_explicit_join(trs: &Trs, join: &ExplicitJoin) -> Result<(), ConfluenceError> {
    let run = |start: &Term, steps: &[DerivationStep], side| {
        replay(trs, start, steps).map_err(|error| ConfluenceError::Replay {
            left: join.left.clone(),
            right: join.right.clone(),
            side,
            error,
        })
    };
    let left_end = run(&join.left, &join.left_steps, Side::Left)?;
    let right_end = run(&join.right, &join.right_steps, Side::Right)?;
    if left_end == right_end {
        Ok(())
    } else {
        Err(ConfluenceError::JoinDiverges {
            left: join.left.clone(),
            right: join.right.clone(),
            left_end,
            right_end,
        })
    }
}
