//! Argument filters: per-symbol projection (`keep`) or collapse onto one
//! argument, applied homomorphically to terms and rules.

use std::collections::BTreeMap;
use std::fmt;

use crate::term::{Rule, Symbol, Term, Trs};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FilterAction {
    /// Strictly increasing 0-based positions; the result has arity `len()`.
    Keep(Vec<usize>),
    /// 0-based argument position replacing the whole application.
    Collapse(usize),
}

/// Filter entries are keyed by symbol name and apply at every arity of that
/// name. Unlisted symbols keep all their arguments.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ArgumentFilter {
    entries: BTreeMap<String, FilterAction>,
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum FilterError {
    #[error("filter entry for {name} refers to argument {} of {symbol}", .position + 1)]
    ArityMismatch {
        name: String,
        symbol: Symbol,
        position: usize,
    },
    #[error("kept positions of {0} are not strictly increasing")]
    UnorderedKeep(String),
}

impl ArgumentFilter {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn set(&mut self, name: impl Into<String>, action: FilterAction) {
        self.entries.insert(name.into(), action);
    }

    pub fn with(mut self, name: &str, action: FilterAction) -> Self {
        self.set(name, action);
        self
    }

    pub fn entries(&self) -> impl Iterator<Item = (&String, &FilterAction)> {
        self.entries.iter()
    }

    pub fn validate(&self) -> Result<(), FilterError> {
        for (name, action) in &self.entries {
            if let FilterAction::Keep(ps) = action {
                if ps.windows(2).any(|w| w[0] >= w[1]) {
                    return Err(FilterError::UnorderedKeep(name.clone()));
                }
            }
        }
        Ok(())
    }

    pub fn apply(&self, t: &Term) -> Result<Term, FilterError> {
        match t {
            Term::Var(_) => Ok(t.clone()),
            Term::App(f, args) => {
                let mismatch = |position| FilterError::ArityMismatch {
                    name: f.name.clone(),
                    symbol: f.clone(),
                    position,
                };
                match self.entries.get(&f.name) {
                    None => {
                        let args = args.iter().map(|a| self.apply(a)).collect::<Result<_, _>>()?;
                        Ok(Term::App(f.clone(), args))
                    }
                    Some(FilterAction::Collapse(i)) => {
                        let a = args.get(*i).ok_or_else(|| mismatch(*i))?;
                        self.apply(a)
                    }
                    Some(FilterAction::Keep(ps)) => {
                        let kept = ps
                            .iter()
                            .map(|&i| args.get(i).ok_or_else(|| mismatch(i)).and_then(|a| self.apply(a)))
                            .collect::<Result<Vec<_>, _>>()?;
                        Ok(Term::app(f.name.clone(), kept))
                    }
                }
            }
        }
    }

    pub fn apply_rule(&self, r: &Rule) -> Result<Rule, FilterError> {
        Ok(Rule::new(self.apply(&r.lhs)?, self.apply(&r.rhs)?))
    }

    /// Filters every rule and drops those that become `ℓ → ℓ`.
    pub fn apply_trs(&self, trs: &Trs) -> Result<Trs, FilterError> {
        let mut out = Vec::new();
        for r in &trs.rules {
            let fr = self.apply_rule(r)?;
            if fr.lhs != fr.rhs {
                out.push(fr);
            }
        }
        Ok(Trs::new(out))
    }
}

impl fmt::Display for ArgumentFilter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, (name, action)) in self.entries.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            match action {
                FilterAction::Keep(ps) => {
                    write!(f, "({} keep", name)?;
                    for p in ps {
                        write!(f, " {}", p + 1)?;
                    }
                    write!(f, ")")?;
                }
                FilterAction::Collapse(p) => write!(f, "({} collapse {})", name, p + 1)?,
            }
        }
        write!(f, ")")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(n: &str) -> Term {
        Term::constant(n)
    }
    fn v(n: &str) -> Term {
        Term::var(n)
    }

    #[test]
    fn keep_and_collapse() {
        let t = Term::app("f", vec![c("a"), c("c")]);
        let keep = ArgumentFilter::new().with("f", FilterAction::Keep(vec![0]));
        assert_eq!(keep.apply(&t).unwrap(), Term::app("f", vec![c("a")]));
        let collapse = ArgumentFilter::new().with("f", FilterAction::Collapse(0));
        assert_eq!(collapse.apply(&t).unwrap(), c("a"));
    }

    #[test]
    fn trivial_rules_are_dropped() {
        let trs = Trs::new(vec![Rule::new(
            Term::app("f", vec![v("x"), v("y")]),
            Term::app("f", vec![v("x"), Term::app("g", vec![v("y")])]),
        )]);
        let pi = ArgumentFilter::new().with("f", FilterAction::Keep(vec![0]));
        assert!(pi.apply_trs(&trs).unwrap().is_empty());
    }

    #[test]
    fn out_of_range_positions() {
        let pi = ArgumentFilter::new().with("g", FilterAction::Keep(vec![2]));
        assert!(matches!(
            pi.apply(&Term::app("g", vec![c("a"), c("b")])),
            Err(FilterError::ArityMismatch { position: 2, .. })
        ));
        let pi = ArgumentFilter::new().with("g", FilterAction::Keep(vec![1, 0]));
        assert!(pi.validate().is_err());
    }
}
