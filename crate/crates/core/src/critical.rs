//! Critical pairs, including root overlaps of a rule with itself.

use std::collections::BTreeMap;
use std::fmt;

use crate::rewrite::DerivationStep;
use crate::term::{Position, Substitution, Term, Trs};
use crate::unify::{match_term, unify};

/// Variables of the inner rule get this suffix before overlapping.
const INNER_SUFFIX: &str = "#i";

/// `(rσ, C[r′]σ)` arising from `ℓ = C[u]`, `σ = mgu(u, ℓ′)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CriticalPair {
    pub left: Term,
    pub right: Term,
    /// The overlap `ℓσ`.
    pub peak: Term,
    /// Rule `ℓ → r`, applied at the root of the peak.
    pub outer: usize,
    /// Rule `ℓ′ → r′`, applied at `pos`.
    pub inner: usize,
    pub pos: Position,
}

impl CriticalPair {
    pub fn is_trivial(&self) -> bool {
        self.left == self.right
    }

    /// The two steps `peak → left` and `peak → right`, directly replayable.
    pub fn fork_steps(&self, trs: &Trs) -> (DerivationStep, DerivationStep) {
        let extra_for = |rule: usize, contractum: &Term| -> Substitution {
            let r = &trs.rules[rule];
            let m = match_term(&r.rhs, contractum).expect("contractum is an instance of the rhs");
            r.rhs_only_vars()
                .into_iter()
                .map(|x| {
                    let t = m.get(&x).cloned().expect("rhs variable bound");
                    (x, t)
                })
                .collect()
        };
        let left_step = DerivationStep::with_extra(Position::root(), self.outer, extra_for(self.outer, &self.left));
        let sub = self.right.subterm_at(&self.pos).expect("overlap position");
        let right_step = DerivationStep::with_extra(self.pos.clone(), self.inner, extra_for(self.inner, sub));
        (left_step, right_step)
    }
}

impl fmt::Display for CriticalPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.left, self.right)
    }
}

/// Renames all variables of the given terms to `x0, x1, …` in order of
/// first occurrence across the list.
pub fn canonical_rename(terms: &[&Term]) -> Vec<Term> {
    let mut names: BTreeMap<String, String> = BTreeMap::new();
    for t in terms {
        for x in t.vars() {
            let next = format!("x{}", names.len());
            names.entry(x).or_insert(next);
        }
    }
    terms
        .iter()
        .map(|t| t.map_vars(&mut |x| names[x].clone()))
        .collect()
}

/// All critical pairs in (outer rule, inner rule, position) order, with
/// positions in leftmost-outermost order.
pub fn critical_pairs(trs: &Trs, nontrivial_only: bool) -> Vec<CriticalPair> {
    let mut out = Vec::new();
    for (i, outer) in trs.rules.iter().enumerate() {
        for (j, inner) in trs.rules.iter().enumerate() {
            let inner = inner.rename(INNER_SUFFIX);
            for pos in outer.lhs.function_positions() {
                let u = outer.lhs.subterm_at(&pos).expect("own position");
                let Some(sigma) = unify(u, &inner.lhs) else {
                    continue;
                };
                let left = outer.rhs.apply(&sigma);
                let right = outer
                    .lhs
                    .replace_at(&pos, inner.rhs.clone())
                    .expect("own position")
                    .apply(&sigma);
                if nontrivial_only && left == right {
                    continue;
                }
                let peak = outer.lhs.apply(&sigma);
                let mut renamed = canonical_rename(&[&left, &right, &peak]).into_iter();
                out.push(CriticalPair {
                    left: renamed.next().unwrap(),
                    right: renamed.next().unwrap(),
                    peak: renamed.next().unwrap(),
                    outer: i,
                    inner: j,
                    pos,
                });
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rewrite::apply_step;
    use crate::term::Rule;

    fn c(n: &str) -> Term {
        Term::constant(n)
    }
    fn v(n: &str) -> Term {
        Term::var(n)
    }
    fn f(t: Term) -> Term {
        Term::app("f", vec![t])
    }

    #[test]
    fn root_self_overlap_with_extra_variable() {
        let r1 = Trs::new(vec![Rule::new(c("a"), v("y"))]);
        let cps = critical_pairs(&r1, true);
        assert_eq!(cps.len(), 1);
        assert_eq!((cps[0].left.clone(), cps[0].right.clone()), (v("x0"), v("x1")));
        assert_eq!(cps[0].peak, c("a"));
    }

    #[test]
    fn variable_left_hand_sides_do_not_overlap() {
        let r2 = Trs::new(vec![
            Rule::new(v("x"), f(v("x"))),
            Rule::new(v("y"), Term::app("g", vec![v("y")])),
        ]);
        assert!(critical_pairs(&r2, false).is_empty());
    }

    #[test]
    fn r3_has_one_nontrivial_pair() {
        let r3 = Trs::new(vec![Rule::new(c("a"), f(v("x"))), Rule::new(f(v("x")), c("b"))]);
        let cps = critical_pairs(&r3, true);
        assert_eq!(cps.len(), 1);
        assert_eq!(cps[0].left, f(v("x0")));
        assert_eq!(cps[0].right, f(v("x1")));
        // the trivial root self-overlap of f(x) -> b is kept when asked for
        let all = critical_pairs(&r3, false);
        assert_eq!(all.len(), 2);
        assert!(all[1].is_trivial());
    }

    #[test]
    fn r5_pairs() {
        let r5 = Trs::new(vec![
            Rule::new(c("a"), c("b1")),
            Rule::new(c("a"), c("b2")),
            Rule::new(v("x"), f(v("x"))),
        ]);
        let cps = critical_pairs(&r5, true);
        let pairs: Vec<(String, String)> =
            cps.iter().map(|p| (p.left.to_string(), p.right.to_string())).collect();
        assert_eq!(
            pairs,
            [
                ("b1", "b2"),
                ("b1", "f(a)"),
                ("b2", "b1"),
                ("b2", "f(a)")
            ]
            .map(|(a, b)| (a.to_string(), b.to_string()))
        );
    }

    #[test]
    fn non_root_overlap_and_replay() {
        // f(g(x)) -> x, g(a) -> b
        let trs = Trs::new(vec![
            Rule::new(f(Term::app("g", vec![v("x")])), v("x")),
            Rule::new(Term::app("g", vec![c("a")]), c("b")),
        ]);
        let cps = critical_pairs(&trs, true);
        assert_eq!(cps.len(), 1);
        let cp = &cps[0];
        assert_eq!(cp.left, c("a"));
        assert_eq!(cp.right, f(c("b")));
        assert_eq!(cp.pos, Position(vec![0]));
        let (l, r) = cp.fork_steps(&trs);
        assert_eq!(apply_step(&trs, &cp.peak, &l).unwrap(), cp.left);
        assert_eq!(apply_step(&trs, &cp.peak, &r).unwrap(), cp.right);
    }
}
