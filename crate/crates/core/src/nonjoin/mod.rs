//! Non-joinability of two terms with respect to a pair of rewrite systems,
//! and non-confluence via non-joinable forks.
//!
//! `NJ(R₁, R₂)(t₁, t₂)` holds when no term is reachable both from `t₁` with
//! `R₁` and from `t₂` with `R₂`. Each technique either proves it outright or
//! transforms the problem and delegates to a nested certificate.

mod algebra;
mod filter;
mod usable;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use crate::automata::{
    check_closure, ta_intersection, ta_membership, ta_witness, ClosureError, ClosureEvidence, TreeAutomaton,
};
use crate::poly::{eval_poly, poly_compare, LinearPolyInterp, PolyError, PolyOrder};
use crate::rewrite::{replay, successors, DerivationStep, ReplayError};
use crate::tcap::{tcap_with, FreshVars};
use crate::term::{Rule, Substitution, Symbol, Term, Trs};
use crate::unify::unify;

pub use algebra::{tuples, AlgebraError, FiniteAlgebra, OrderSpec};
pub use filter::{ArgumentFilter, FilterAction, FilterError};
pub use usable::{usable_rule_indices, usable_rules_reach};

use algebra::GROUND_PREFIX;

/// Which side of a non-joinability problem.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Which {
    First,
    Second,
}

impl fmt::Display for Which {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Which::First => "first",
            Which::Second => "second",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NjProblem {
    pub r1: Trs,
    pub r2: Trs,
    pub t1: Term,
    pub t2: Term,
}

impl NjProblem {
    pub fn new(r1: Trs, r2: Trs, t1: Term, t2: Term) -> Self {
        NjProblem { r1, r2, t1, t2 }
    }

    /// The problem arising from a fork in a single system.
    pub fn symmetric(trs: &Trs, t1: Term, t2: Term) -> Self {
        NjProblem::new(trs.clone(), trs.clone(), t1, t2)
    }

    fn symbols(&self) -> BTreeSet<Symbol> {
        let mut s = self.r1.signature();
        s.extend(self.r2.signature());
        s.extend(self.t1.symbols());
        s.extend(self.t2.symbols());
        s
    }

    fn map_terms(&self, f: impl Fn(&Term) -> Term) -> Self {
        NjProblem::new(self.r1.clone(), self.r2.clone(), f(&self.t1), f(&self.t2))
    }
}

/// A non-joinability proof tree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum NjCertificate {
    Ground(Substitution, Box<NjCertificate>),
    Tcap,
    DistinctNf,
    Usable(Box<NjCertificate>),
    Discrimination(LinearPolyInterp),
    Filter(ArgumentFilter, Box<NjCertificate>),
    Model(FiniteAlgebra),
    Automata {
        first: TreeAutomaton,
        second: TreeAutomaton,
        first_evidence: ClosureEvidence,
        second_evidence: ClosureEvidence,
    },
}

impl NjCertificate {
    pub fn technique(&self) -> &'static str {
        match self {
            NjCertificate::Ground(..) => "ground",
            NjCertificate::Tcap => "tcap",
            NjCertificate::DistinctNf => "distinct-nf",
            NjCertificate::Usable(_) => "usable",
            NjCertificate::Discrimination(_) => "discrimination",
            NjCertificate::Filter(..) => "filter",
            NjCertificate::Model(_) => "model",
            NjCertificate::Automata { .. } => "automata",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum NjError {
    #[error("tcaps {left} and {right} are unifiable")]
    TcapsUnifiable { left: Term, right: Term },
    #[error("{which} term {term} is not a normal form: it rewrites to {reduct}")]
    NotNormalForm { which: Which, term: Term, reduct: Term },
    #[error("both terms are {0}")]
    EqualTerms(Term),
    #[error("rule {rule} of the {which} system is not weakly oriented")]
    RuleNotWeaklyOriented { which: Which, rule: Rule },
    #[error("[{left}] is not greater than [{right}]")]
    TermsNotStrictlyOriented { left: String, right: String },
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error(transparent)]
    Filter(#[from] FilterError),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error("quasi-model condition fails for {rule} under {valuation}")]
    QuasiModelViolated { rule: Rule, valuation: String },
    #[error("[t2] = {second} is greater than or equal to [t1] = {first}")]
    InterpretationsComparable { first: usize, second: usize },
    #[error("vcsubset violated by the {0} system")]
    VcSubsetViolated(Which),
    #[error("{term} is not accepted by the {which} automaton")]
    NotAccepted { which: Which, term: Term },
    #[error("{which} automaton is not closed: {cause}")]
    ClosureRejected { which: Which, cause: ClosureError },
    #[error("automata languages intersect: state {state} accepts {witness}")]
    IntersectionNonEmpty { state: String, witness: Term },
    #[error("{technique}: {cause}")]
    Nested {
        technique: &'static str,
        cause: Box<NjError>,
    },
}

fn nested(technique: &'static str) -> impl FnOnce(NjError) -> NjError {
    move |cause| NjError::Nested {
        technique,
        cause: Box::new(cause),
    }
}

/// Maps every variable of `t₁`, `t₂` to a distinct fresh constant `#gN`.
pub fn grounding_substitution(p: &NjProblem) -> Substitution {
    let taken: BTreeSet<String> = p.symbols().into_iter().map(|s| s.name).collect();
    let mut vars = p.t1.vars();
    for x in p.t2.vars() {
        if !vars.contains(&x) {
            vars.push(x);
        }
    }
    let mut k = 0;
    let mut sigma = Substitution::new();
    for x in vars {
        let name = loop {
            let n = format!("{GROUND_PREFIX}{k}");
            k += 1;
            if !taken.contains(&n) {
                break n;
            }
        };
        sigma.insert(x, Term::constant(name));
    }
    sigma
}

pub fn auto_ground(p: &NjProblem) -> NjProblem {
    if p.t1.is_ground() && p.t2.is_ground() {
        return p.clone();
    }
    let sigma = grounding_substitution(p);
    p.map_terms(|t| t.apply(&sigma))
}

pub fn nj_ground(p: &NjProblem, sigma: &Substitution, inner: &NjCertificate) -> Result<(), NjError> {
    check_nj(&p.map_terms(|t| t.apply(sigma)), inner).map_err(nested("ground"))
}

pub fn nj_tcap(p: &NjProblem) -> Result<(), NjError> {
    let p = auto_ground(p);
    let mut fresh = FreshVars::new();
    let left = tcap_with(&p.r1, &p.t1, &mut fresh);
    let right = tcap_with(&p.r2, &p.t2, &mut fresh);
    match unify(&left, &right) {
        Some(_) => Err(NjError::TcapsUnifiable { left, right }),
        None => Ok(()),
    }
}

pub fn nj_distinct_nf(p: &NjProblem) -> Result<(), NjError> {
    if p.t1 == p.t2 {
        return Err(NjError::EqualTerms(p.t1.clone()));
    }
    for (which, trs, t) in [(Which::First, &p.r1, &p.t1), (Which::Second, &p.r2, &p.t2)] {
        if let Some(reduct) = successors(trs, t).into_iter().next() {
            return Err(NjError::NotNormalForm {
                which,
                term: t.clone(),
                reduct,
            });
        }
    }
    Ok(())
}

/// Restricts each system to the rules usable from its own term.
pub fn restrict_to_usable(p: &NjProblem) -> NjProblem {
    NjProblem::new(
        usable_rules_reach(&p.r1, &p.t1),
        usable_rules_reach(&p.r2, &p.t2),
        p.t1.clone(),
        p.t2.clone(),
    )
}

pub fn nj_discrimination(p: &NjProblem, interp: &LinearPolyInterp) -> Result<(), NjError> {
    let weak = |l: &Term, r: &Term| -> Result<bool, NjError> {
        Ok(poly_compare(&eval_poly(interp, l)?, &eval_poly(interp, r)?) != PolyOrder::Unknown)
    };
    for rule in &p.r1.rules {
        if !weak(&rule.rhs, &rule.lhs)? {
            return Err(NjError::RuleNotWeaklyOriented {
                which: Which::First,
                rule: rule.clone(),
            });
        }
    }
    for rule in &p.r2.rules {
        if !weak(&rule.lhs, &rule.rhs)? {
            return Err(NjError::RuleNotWeaklyOriented {
                which: Which::Second,
                rule: rule.clone(),
            });
        }
    }
    let left = eval_poly(interp, &p.t1)?;
    let right = eval_poly(interp, &p.t2)?;
    if poly_compare(&left, &right) != PolyOrder::Greater {
        return Err(NjError::TermsNotStrictlyOriented {
            left: left.to_string(),
            right: right.to_string(),
        });
    }
    Ok(())
}

pub fn apply_argument_filter(p: &NjProblem, pi: &ArgumentFilter, inner: &NjCertificate) -> Result<(), NjError> {
    pi.validate()?;
    let filtered = NjProblem::new(
        pi.apply_trs(&p.r1)?,
        pi.apply_trs(&p.r2)?,
        pi.apply(&p.t1)?,
        pi.apply(&p.t2)?,
    );
    check_nj(&filtered, inner).map_err(nested("filter"))
}

fn format_valuation(vars: &[String], values: &[usize]) -> String {
    let parts: Vec<String> = vars.iter().zip(values).map(|(x, v)| format!("{x}={v}")).collect();
    format!("{{{}}}", parts.join(", "))
}

/// Checks `[ℓ] ≥ [r]` for every valuation of the rule's variables.
fn check_quasi_model_rule(alg: &FiniteAlgebra, shown: &Rule, l: &Term, r: &Term) -> Result<(), NjError> {
    let mut vars = l.vars();
    for x in r.vars() {
        if !vars.contains(&x) {
            vars.push(x);
        }
    }
    for values in tuples(alg.size(), vars.len()) {
        let env: BTreeMap<&str, usize> = vars.iter().map(String::as_str).zip(values.iter().copied()).collect();
        let val = |x: &str| env[x];
        if !alg.geq(alg.eval(l, &val)?, alg.eval(r, &val)?) {
            return Err(NjError::QuasiModelViolated {
                rule: shown.clone(),
                valuation: format_valuation(&vars, &values),
            });
        }
    }
    Ok(())
}

pub fn nj_finite_model(p: &NjProblem, alg: &FiniteAlgebra) -> Result<(), NjError> {
    alg.validate()?;
    for rule in &p.r1.rules {
        check_quasi_model_rule(alg, &rule.reversed(), &rule.rhs, &rule.lhs)?;
    }
    for rule in &p.r2.rules {
        check_quasi_model_rule(alg, rule, &rule.lhs, &rule.rhs)?;
    }
    // variables stand for grounding constants, which take the default element
    let d = alg.default_element();
    let first = alg.eval(&p.t1, &|_| d)?;
    let second = alg.eval(&p.t2, &|_| d)?;
    if alg.geq(second, first) {
        return Err(NjError::InterpretationsComparable { first, second });
    }
    Ok(())
}

pub fn nj_tree_automata(
    p: &NjProblem,
    a1: &TreeAutomaton,
    a2: &TreeAutomaton,
    c1: &ClosureEvidence,
    c2: &ClosureEvidence,
) -> Result<(), NjError> {
    for (which, trs) in [(Which::First, &p.r1), (Which::Second, &p.r2)] {
        if !trs.variable_conditions().vcsubset {
            return Err(NjError::VcSubsetViolated(which));
        }
    }
    let p = auto_ground(p);
    for (which, a, t, trs, evidence) in [
        (Which::First, a1, &p.t1, &p.r1, c1),
        (Which::Second, a2, &p.t2, &p.r2, c2),
    ] {
        if !ta_membership(a, t).unwrap_or(false) {
            return Err(NjError::NotAccepted { which, term: t.clone() });
        }
        check_closure(a, trs, evidence).map_err(|cause| NjError::ClosureRejected { which, cause })?;
    }
    let product = ta_intersection(a1, a2);
    if let Some((q, witness)) = ta_witness(&product) {
        return Err(NjError::IntersectionNonEmpty {
            state: product.state_name(q).to_string(),
            witness,
        });
    }
    Ok(())
}

/// Checks `cert` against `p`, applying the automatic preprocessing steps.
pub fn check_nj(p: &NjProblem, cert: &NjCertificate) -> Result<(), NjError> {
    match cert {
        NjCertificate::Ground(sigma, inner) => nj_ground(p, sigma, inner),
        NjCertificate::Tcap => nj_tcap(p),
        NjCertificate::DistinctNf => nj_distinct_nf(p),
        NjCertificate::Usable(inner) => check_nj(&restrict_to_usable(p), inner).map_err(nested("usable")),
        NjCertificate::Discrimination(interp) => nj_discrimination(&restrict_to_usable(p), interp),
        NjCertificate::Filter(pi, inner) => apply_argument_filter(&restrict_to_usable(p), pi, inner),
        NjCertificate::Model(alg) => nj_finite_model(&restrict_to_usable(p), alg),
        NjCertificate::Automata {
            first,
            second,
            first_evidence,
            second_evidence,
        } => nj_tree_automata(p, first, second, first_evidence, second_evidence),
    }
}

/// A non-confluence proof tree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum NonConfluenceProof {
    Fork {
        start: Term,
        left: Vec<DerivationStep>,
        right: Vec<DerivationStep>,
        proof: NjCertificate,
    },
    /// Rule indices (0-based, in the listed order) of the component `R`.
    Modular {
        rules: Vec<usize>,
        proof: Box<NonConfluenceProof>,
    },
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum NonConfluenceError {
    #[error("{which} derivation: {error}")]
    Replay { which: Which, error: ReplayError },
    #[error("fork {left} <-* {start} ->* {right}: {cause}")]
    NjRejected {
        start: Term,
        left: Term,
        right: Term,
        cause: NjError,
    },
    #[error("rule {} does not exist", .0 + 1)]
    InvalidRuleIndex(usize),
    #[error("rule {} is listed twice", .0 + 1)]
    DuplicateRuleIndex(usize),
    #[error("signatures of R and S share {0}")]
    SignaturesOverlap(Symbol),
    #[error("vcsubset violated for R: rule {0} has a right-hand-side-only variable")]
    VcSubsetViolated(Rule),
    #[error("vclhs violated for the disjoint part S: rule {0} has a variable left-hand side")]
    VcLhsViolated(Rule),
    #[error("fork start {start} uses {symbol} from the disjoint part S")]
    StartOutsideComponent { start: Term, symbol: Symbol },
    #[error("component: {0}")]
    Component(Box<NonConfluenceError>),
}

pub fn check_fork(
    trs: &Trs,
    s: &Term,
    steps1: &[DerivationStep],
    steps2: &[DerivationStep],
    nj_proof: &NjCertificate,
) -> Result<(), NonConfluenceError> {
    let t1 = replay(trs, s, steps1).map_err(|error| NonConfluenceError::Replay {
        which: Which::First,
        error,
    })?;
    let t2 = replay(trs, s, steps2).map_err(|error| NonConfluenceError::Replay {
        which: Which::Second,
        error,
    })?;
    check_nj(&NjProblem::symmetric(trs, t1.clone(), t2.clone()), nj_proof).map_err(|cause| {
        NonConfluenceError::NjRejected {
            start: s.clone(),
            left: t1,
            right: t2,
            cause,
        }
    })
}

fn fork_start(proof: &NonConfluenceProof) -> &Term {
    match proof {
        NonConfluenceProof::Fork { start, .. } => start,
        NonConfluenceProof::Modular { proof, .. } => fork_start(proof),
    }
}

/// Side conditions for lifting non-confluence of `r` to `r ∪ s`, then the
/// inner proof against `r` alone.
pub fn check_modular_nonconfluence(r: &Trs, s: &Trs, inner: &NonConfluenceProof) -> Result<(), NonConfluenceError> {
    let fs = s.signature();
    if let Some(f) = r.signature().intersection(&fs).next() {
        return Err(NonConfluenceError::SignaturesOverlap(f.clone()));
    }
    if let Some(rule) = r.rules.iter().find(|rule| !rule.rhs_only_vars().is_empty()) {
        return Err(NonConfluenceError::VcSubsetViolated(rule.clone()));
    }
    if let Some(rule) = s.rules.iter().find(|rule| rule.lhs.is_var()) {
        return Err(NonConfluenceError::VcLhsViolated(rule.clone()));
    }
    let start = fork_start(inner);
    if let Some(symbol) = start.symbols().into_iter().find(|f| fs.contains(f)) {
        return Err(NonConfluenceError::StartOutsideComponent {
            start: start.clone(),
            symbol,
        });
    }
    check_nonconfluence(r, inner).map_err(|e| NonConfluenceError::Component(Box::new(e)))
}

/// Splits `trs` into the listed component and the remaining rules.
pub fn split_rules(trs: &Trs, indices: &[usize]) -> Result<(Trs, Trs), NonConfluenceError> {
    let mut seen = BTreeSet::new();
    for &i in indices {
        if i >= trs.len() {
            return Err(NonConfluenceError::InvalidRuleIndex(i));
        }
        if !seen.insert(i) {
            return Err(NonConfluenceError::DuplicateRuleIndex(i));
        }
    }
    let r = indices.iter().map(|&i| trs.rules[i].clone()).collect();
    let s = (0..trs.len()).filter(|i| !seen.contains(i)).map(|i| trs.rules[i].clone()).collect();
    Ok((r, s))
}

pub fn check_nonconfluence(trs: &Trs, proof: &NonConfluenceProof) -> Result<(), NonConfluenceError> {
    match proof {
        NonConfluenceProof::Fork {
            start,
            left,
            right,
            proof,
        } => check_fork(trs, start, left, right, proof),
        NonConfluenceProof::Modular { rules, proof } => {
            let (r, s) = split_rules(trs, rules)?;
            check_modular_nonconfluence(&r, &s, proof)
        }
    }
}
