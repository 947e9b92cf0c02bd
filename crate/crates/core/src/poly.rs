//! Linear polynomial interpretations over the naturals.
//!
//! An interpretation gives every symbol `f/n` a vector `(c₀, c₁, …, cₙ)`
//! read as `c₀ + c₁x₁ + … + cₙxₙ`. Non-negative coefficients make it weakly
//! monotone; it is strictly monotone when every `cᵢ` with `i ≥ 1` is
//! positive. The induced pair of relations is used both for rule-removal
//! termination proofs and as a discrimination pair.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_bigint::BigUint;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::term::{Rule, Symbol, Term, Trs};

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum PolyError {
    #[error("symbol {0} is not interpreted")]
    UninterpretedSymbol(Symbol),
    #[error("interpretation of {0} is not strictly monotone")]
    NotStrictlyMonotone(Symbol),
}

/// `constant + Σ coeff(x)·x`; zero coefficients are not stored.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct LinearPoly {
    pub constant: BigUint,
    pub coeffs: BTreeMap<String, BigUint>,
}

impl LinearPoly {
    pub fn constant(c: impl Into<BigUint>) -> Self {
        LinearPoly {
            constant: c.into(),
            coeffs: BTreeMap::new(),
        }
    }

    pub fn var(x: impl Into<String>) -> Self {
        let mut coeffs = BTreeMap::new();
        coeffs.insert(x.into(), BigUint::one());
        LinearPoly {
            constant: BigUint::zero(),
            coeffs,
        }
    }

    pub fn coeff(&self, x: &str) -> BigUint {
        self.coeffs.get(x).cloned().unwrap_or_default()
    }

    fn add_scaled(&mut self, other: &LinearPoly, k: &BigUint) {
        if k.is_zero() {
            return;
        }
        self.constant += &other.constant * k;
        for (x, c) in &other.coeffs {
            *self.coeffs.entry(x.clone()).or_default() += c * k;
        }
    }

    /// Value under a valuation; unassigned variables count as 0.
    pub fn value(&self, valuation: &BTreeMap<String, BigUint>) -> BigUint {
        let mut v = self.constant.clone();
        for (x, c) in &self.coeffs {
            if let Some(a) = valuation.get(x) {
                v += c * a;
            }
        }
        v
    }
}

impl fmt::Display for LinearPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (x, c) in &self.coeffs {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            if c.is_one() {
                write!(f, "{}", x)?;
            } else {
                write!(f, "{}·{}", c, x)?;
            }
        }
        if first {
            write!(f, "{}", self.constant)
        } else if !self.constant.is_zero() {
            write!(f, " + {}", self.constant)
        } else {
            Ok(())
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PolyOrder {
    Greater,
    GreaterEqual,
    Unknown,
}

/// Coefficient-wise comparison: a sound criterion for `>` and `≥` under
/// every valuation in the naturals. `Greater` needs a strict constant gap.
pub fn poly_compare(p: &LinearPoly, q: &LinearPoly) -> PolyOrder {
    let vars_ge = q.coeffs.iter().all(|(x, c)| p.coeff(x) >= *c);
    if !vars_ge {
        PolyOrder::Unknown
    } else if p.constant > q.constant {
        PolyOrder::Greater
    } else if p.constant == q.constant {
        PolyOrder::GreaterEqual
    } else {
        PolyOrder::Unknown
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct LinearPolyInterp {
    entries: BTreeMap<Symbol, Vec<BigUint>>,
}

impl LinearPolyInterp {
    pub fn new() -> Self {
        Self::default()
    }

    /// Sets `f ↦ c₀ + c₁x₁ + …`; the symbol arity is `coeffs.len() - 1`.
    ///
    /// # Panics
    /// If `coeffs` is empty.
    pub fn set(&mut self, name: impl Into<String>, coeffs: Vec<BigUint>) {
        assert!(!coeffs.is_empty(), "an interpretation needs a constant");
        let sym = Symbol::new(name, coeffs.len() - 1);
        self.entries.insert(sym, coeffs);
    }

    pub fn with(mut self, name: &str, coeffs: &[u64]) -> Self {
        self.set(name, coeffs.iter().map(|&c| BigUint::from(c)).collect());
        self
    }

    pub fn get(&self, f: &Symbol) -> Option<&[BigUint]> {
        self.entries.get(f).map(Vec::as_slice)
    }

    pub fn entries(&self) -> impl Iterator<Item = (&Symbol, &Vec<BigUint>)> {
        self.entries.iter()
    }

    pub fn symbols(&self) -> BTreeSet<Symbol> {
        self.entries.keys().cloned().collect()
    }

    pub fn strict_monotonicity_violation(&self) -> Option<&Symbol> {
        self.entries
            .iter()
            .find(|(_, cs)| cs[1..].iter().any(Zero::is_zero))
            .map(|(f, _)| f)
    }
}

/// Symbolic value of `t` under the interpretation.
pub fn eval_poly(interp: &LinearPolyInterp, t: &Term) -> Result<LinearPoly, PolyError> {
    match t {
        Term::Var(x) => Ok(LinearPoly::var(x.clone())),
        Term::App(f, args) => {
            let cs = interp
                .get(f)
                .ok_or_else(|| PolyError::UninterpretedSymbol(f.clone()))?;
            let mut p = LinearPoly::constant(cs[0].clone());
            for (a, c) in args.iter().zip(&cs[1..]) {
                p.add_scaled(&eval_poly(interp, a)?, c);
            }
            Ok(p)
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OrientMode {
    Weak,
    Strict,
}

/// Whether each rule satisfies `[ℓ] ≥ [r]` (weak) or `[ℓ] > [r]` (strict).
pub fn orient_rules(
    interp: &LinearPolyInterp,
    rules: &[Rule],
    mode: OrientMode,
) -> Result<Vec<bool>, PolyError> {
    if mode == OrientMode::Strict {
        if let Some(f) = interp.strict_monotonicity_violation() {
            return Err(PolyError::NotStrictlyMonotone(f.clone()));
        }
    }
    rules
        .iter()
        .map(|r| {
            let ord = poly_compare(&eval_poly(interp, &r.lhs)?, &eval_poly(interp, &r.rhs)?);
            Ok(match mode {
                OrientMode::Weak => ord != PolyOrder::Unknown,
                OrientMode::Strict => ord == PolyOrder::Greater,
            })
        })
        .collect()
}

/// Rule numbers in messages are 1-based, rounds too.
#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum TerminationError {
    #[error("round {}: interpretation of {symbol} is not strictly monotone", .round + 1)]
    NotStrictlyMonotone { round: usize, symbol: Symbol },
    #[error("round {}: symbol {symbol} is not interpreted", .round + 1)]
    UninterpretedSymbol { round: usize, symbol: Symbol },
    #[error("round {}: rule {} is not oriented", .round + 1, .rule + 1)]
    RuleNotOriented { round: usize, rule: usize },
    #[error("round {}: no rule is strictly decreasing", .round + 1)]
    NoRuleRemoved { round: usize },
    #[error("rules {} remain after the last interpretation", fmt_indices(.0))]
    RulesRemain(Vec<usize>),
}

fn fmt_indices(ix: &[usize]) -> String {
    ix.iter().map(|i| (i + 1).to_string()).collect::<Vec<_>>().join(", ")
}

/// Iterated rule removal: each round removes the strictly decreasing rules
/// and must weakly orient the others. Accepted once no rule remains.
pub fn prove_termination(trs: &Trs, cert: &[LinearPolyInterp]) -> Result<(), TerminationError> {
    let mut remaining: Vec<usize> = (0..trs.len()).collect();
    for (round, interp) in cert.iter().enumerate() {
        if remaining.is_empty() {
            break;
        }
        if let Some(symbol) = interp.strict_monotonicity_violation() {
            return Err(TerminationError::NotStrictlyMonotone {
                round,
                symbol: symbol.clone(),
            });
        }
        let mut kept = Vec::new();
        for &i in &remaining {
            let rule = &trs.rules[i];
            let eval = |t: &Term| {
                eval_poly(interp, t).map_err(|e| match e {
                    PolyError::UninterpretedSymbol(symbol) | PolyError::NotStrictlyMonotone(symbol) => {
                        TerminationError::UninterpretedSymbol { round, symbol }
                    }
                })
            };
            match poly_compare(&eval(&rule.lhs)?, &eval(&rule.rhs)?) {
                PolyOrder::Greater => {}
                PolyOrder::GreaterEqual => kept.push(i),
                PolyOrder::Unknown => return Err(TerminationError::RuleNotOriented { round, rule: i }),
            }
        }
        if kept.len() == remaining.len() {
            return Err(TerminationError::NoRuleRemoved { round });
        }
        remaining = kept;
    }
    if remaining.is_empty() {
        Ok(())
    } else {
        Err(TerminationError::RulesRemain(remaining))
    }
}
