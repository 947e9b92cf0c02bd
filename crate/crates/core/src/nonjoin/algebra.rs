//! Finite ordered algebras used as quasi-models.

use std::collections::BTreeMap;
use std::fmt;

use crate::term::{Symbol, Term};

/// Constants introduced by grounding; they evaluate to the default element.
pub(crate) const GROUND_PREFIX: &str = "#g";

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum OrderSpec {
    /// `i ≥ j` iff `i ≥ j` as integers.
    Natural,
    /// `i ≥ j` iff `i = j`.
    Equality,
    /// The full relation as listed pairs `(i, j)` meaning `i ≥ j`.
    Pairs(Vec<(usize, usize)>),
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum AlgebraError {
    #[error("domain must be non-empty")]
    EmptyDomain,
    #[error("element {0} is outside the domain")]
    OutOfDomain(usize),
    #[error("table for {symbol} has {found} entries, expected {expected}")]
    TableSize {
        symbol: Symbol,
        expected: usize,
        found: usize,
    },
    #[error("not a partial order: {0}")]
    NotPartialOrder(String),
    #[error("{symbol} is not weakly monotone in argument {}", .position + 1)]
    NotWeaklyMonotone { symbol: Symbol, position: usize },
    #[error("no interpretation for {0}")]
    UninterpretedSymbol(Symbol),
}

/// A finite domain `{0, …, size-1}` with a partial order and a table per
/// symbol. Tables are indexed lexicographically with the first argument most
/// significant.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteAlgebra {
    size: usize,
    order: OrderSpec,
    geq: Vec<bool>,
    tables: BTreeMap<Symbol, Vec<usize>>,
    default: usize,
}

impl FiniteAlgebra {
    pub fn new(size: usize, order: OrderSpec, default: usize) -> Self {
        let mut geq = vec![false; size * size];
        match &order {
            OrderSpec::Natural => {
                for i in 0..size {
                    for j in 0..=i {
                        geq[i * size + j] = true;
                    }
                }
            }
            OrderSpec::Equality => {
                for i in 0..size {
                    geq[i * size + i] = true;
                }
            }
            OrderSpec::Pairs(ps) => {
                for &(i, j) in ps {
                    if i < size && j < size {
                        geq[i * size + j] = true;
                    }
                }
            }
        }
        FiniteAlgebra {
            size,
            order,
            geq,
            tables: BTreeMap::new(),
            default,
        }
    }

    pub fn set(&mut self, name: &str, arity: usize, table: Vec<usize>) {
        self.tables.insert(Symbol::new(name, arity), table);
    }

    pub fn with(mut self, name: &str, arity: usize, table: &[usize]) -> Self {
        self.set(name, arity, table.to_vec());
        self
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn order(&self) -> &OrderSpec {
        &self.order
    }

    pub fn default_element(&self) -> usize {
        self.default
    }

    pub fn tables(&self) -> impl Iterator<Item = (&Symbol, &Vec<usize>)> {
        self.tables.iter()
    }

    pub fn geq(&self, a: usize, b: usize) -> bool {
        self.geq[a * self.size + b]
    }

    fn table_index(&self, args: &[usize]) -> usize {
        args.iter().fold(0, |acc, &a| acc * self.size + a)
    }

    pub fn apply(&self, f: &Symbol, args: &[usize]) -> Result<usize, AlgebraError> {
        match self.tables.get(f) {
            Some(table) => Ok(table[self.table_index(args)]),
            None if f.arity == 0 && f.name.starts_with(GROUND_PREFIX) => Ok(self.default),
            None => Err(AlgebraError::UninterpretedSymbol(f.clone())),
        }
    }

    pub fn eval(&self, t: &Term, valuation: &dyn Fn(&str) -> usize) -> Result<usize, AlgebraError> {
        match t {
            Term::Var(x) => Ok(valuation(x)),
            Term::App(f, args) => {
                let vals = args.iter().map(|a| self.eval(a, valuation)).collect::<Result<Vec<_>, _>>()?;
                self.apply(f, &vals)
            }
        }
    }

    /// Domain, table shapes, the order axioms and weak monotonicity.
    pub fn validate(&self) -> Result<(), AlgebraError> {
        let n = self.size;
        if n == 0 {
            return Err(AlgebraError::EmptyDomain);
        }
        if self.default >= n {
            return Err(AlgebraError::OutOfDomain(self.default));
        }
        if let OrderSpec::Pairs(ps) = &self.order {
            if let Some(&(i, j)) = ps.iter().find(|(i, j)| *i >= n || *j >= n) {
                return Err(AlgebraError::OutOfDomain(i.max(j)));
            }
        }
        for (f, table) in &self.tables {
            let expected = n.pow(f.arity as u32);
            if table.len() != expected {
                return Err(AlgebraError::TableSize {
                    symbol: f.clone(),
                    expected,
                    found: table.len(),
                });
            }
            if let Some(&v) = table.iter().find(|&&v| v >= n) {
                return Err(AlgebraError::OutOfDomain(v));
            }
        }
        self.check_partial_order()?;
        self.check_monotone()
    }

    fn check_partial_order(&self) -> Result<(), AlgebraError> {
        let n = self.size;
        for a in 0..n {
            if !self.geq(a, a) {
                return Err(AlgebraError::NotPartialOrder(format!("not reflexive at {a}")));
            }
        }
        for a in 0..n {
            for b in 0..n {
                if a != b && self.geq(a, b) && self.geq(b, a) {
                    return Err(AlgebraError::NotPartialOrder(format!("{a} and {b} are mutually related")));
                }
                for c in 0..n {
                    if self.geq(a, b) && self.geq(b, c) && !self.geq(a, c) {
                        return Err(AlgebraError::NotPartialOrder(format!(
                            "{a} ≥ {b} and {b} ≥ {c} but not {a} ≥ {c}"
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    fn check_monotone(&self) -> Result<(), AlgebraError> {
        let n = self.size;
        for f in self.tables.keys() {
            for position in 0..f.arity {
                for mut args in tuples(n, f.arity) {
                    let a = args[position];
                    let fa = self.apply(f, &args)?;
                    for b in 0..n {
                        if self.geq(a, b) {
                            args[position] = b;
                            if !self.geq(fa, self.apply(f, &args)?) {
                                return Err(AlgebraError::NotWeaklyMonotone {
                                    symbol: f.clone(),
                                    position,
                                });
                            }
                        }
                    }
                }
            }
        }
        Ok(())
    }
}

/// All tuples over `{0, …, n-1}` of length `k`, lexicographically.
pub fn tuples(n: usize, k: usize) -> impl Iterator<Item = Vec<usize>> {
    let total = n.checked_pow(k as u32).unwrap_or(usize::MAX);
    (0..total).map(move |mut idx| {
        let mut v = vec![0; k];
        for slot in v.iter_mut().rev() {
            *slot = idx % n;
            idx /= n;
        }
        v
    })
}

impl fmt::Display for FiniteAlgebra {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(model {} (order ", self.size)?;
        match &self.order {
            OrderSpec::Natural => write!(f, "nat")?,
            OrderSpec::Equality => write!(f, "eq")?,
            OrderSpec::Pairs(ps) => {
                write!(f, "(")?;
                for (k, (i, j)) in ps.iter().enumerate() {
                    if k > 0 {
                        write!(f, " ")?;
                    }
                    write!(f, "({i} {j})")?;
                }
                write!(f, ")")?;
            }
        }
        write!(f, ") (interps")?;
        for (sym, table) in &self.tables {
            write!(f, " ({} {}", sym.name, sym.arity)?;
            for v in table {
                write!(f, " {v}")?;
            }
            write!(f, ")")?;
        }
        write!(f, ") (default {}))", self.default)
    }
}
