//! Syntactic unification (with occurs check) and matching.

use crate::term::{Substitution, Term};

/// Most general unifier of `s` and `t`, idempotent, or `None`.
pub fn unify(s: &Term, t: &Term) -> Option<Substitution> {
    unify_all(vec![(s.clone(), t.clone())])
}

pub fn unifiable(s: &Term, t: &Term) -> bool {
    unify(s, t).is_some()
}

/// Simultaneous unifier of a list of equations.
pub fn unify_all(mut eqs: Vec<(Term, Term)>) -> Option<Substitution> {
    let mut sigma = Substitution::new();
    while let Some((s, t)) = eqs.pop() {
        let s = s.apply(&sigma);
        let t = t.apply(&sigma);
        match (s, t) {
            (Term::Var(x), Term::Var(y)) if x == y => {}
            (Term::Var(x), t) | (t, Term::Var(x)) => {
                if t.contains_var(&x) {
                    return None;
                }
                bind(&mut sigma, x, t);
            }
            (Term::App(f, fs), Term::App(g, gs)) => {
                if f != g {
                    return None;
                }
                eqs.extend(fs.into_iter().zip(gs));
            }
        }
    }
    Some(sigma)
}

// Keeps `sigma` idempotent: `t` is already normalised w.r.t. `sigma`.
fn bind(sigma: &mut Substitution, x: String, t: Term) {
    let single: Substitution = std::iter::once((x.clone(), t.clone())).collect();
    let updated: Substitution = sigma
        .iter()
        .map(|(y, u)| (y.clone(), u.apply(&single)))
        .collect();
    *sigma = updated;
    sigma.insert(x, t);
}

/// `σ` with `pattern·σ = subject`, binding exactly the pattern variables.
pub fn match_term(pattern: &Term, subject: &Term) -> Option<Substitution> {
    let mut sigma = Substitution::new();
    if match_into(pattern, subject, &mut sigma) {
        Some(sigma)
    } else {
        None
    }
}

/// Extends `sigma` so that `pattern·sigma = subject`.
pub fn match_into(pattern: &Term, subject: &Term, sigma: &mut Substitution) -> bool {
    match pattern {
        Term::Var(x) => match sigma.get(x) {
            Some(bound) => bound == subject,
            None => {
                sigma.insert(x.clone(), subject.clone());
                true
            }
        },
        Term::App(f, ps) => match subject {
            Term::App(g, ss) if f == g => ps.iter().zip(ss).all(|(p, s)| match_into(p, s, sigma)),
            _ => false,
        },
    }
}
