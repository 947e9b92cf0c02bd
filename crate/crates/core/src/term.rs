//! First-order terms, substitutions, positions, rules and rewrite systems.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

/// Name of the constant that instantiates right-hand-side-only variables
/// during search.
pub const BOTTOM: &str = "⊥";

/// Prefix shared by every checker-generated name (fresh variables and
/// grounding constants). User input may not contain it.
pub const RESERVED_PREFIX: char = '#';

/// A function symbol. The same name at two arities denotes two symbols.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Symbol {
    pub name: String,
    pub arity: usize,
}

impl Symbol {
    pub fn new(name: impl Into<String>, arity: usize) -> Self {
        Symbol {
            name: name.into(),
            arity,
        }
    }

    pub fn bottom() -> Self {
        Symbol::new(BOTTOM, 0)
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.name, self.arity)
    }
}

/// A variable or a function application.
///
/// Build applications through [`Term::app`] or [`Term::apply_symbol`] so the
/// argument count always equals the symbol arity.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Term {
    Var(String),
    App(Symbol, Vec<Term>),
}

impl Term {
    pub fn var(name: impl Into<String>) -> Self {
        Term::Var(name.into())
    }

    pub fn constant(name: impl Into<String>) -> Self {
        Term::App(Symbol::new(name, 0), Vec::new())
    }

    /// Application whose symbol arity is the number of arguments.
    pub fn app(name: impl Into<String>, args: Vec<Term>) -> Self {
        let arity = args.len();
        Term::App(Symbol::new(name, arity), args)
    }

    /// # Panics
    /// If `args.len()` differs from the symbol arity.
    pub fn apply_symbol(sym: Symbol, args: Vec<Term>) -> Self {
        assert_eq!(sym.arity, args.len(), "arity mismatch for {}", sym);
        Term::App(sym, args)
    }

    pub fn bottom() -> Self {
        Term::App(Symbol::bottom(), Vec::new())
    }

    pub fn is_var(&self) -> bool {
        matches!(self, Term::Var(_))
    }

    pub fn as_var(&self) -> Option<&str> {
        match self {
            Term::Var(x) => Some(x),
            Term::App(..) => None,
        }
    }

    pub fn root(&self) -> Option<&Symbol> {
        match self {
            Term::Var(_) => None,
            Term::App(f, _) => Some(f),
        }
    }

    pub fn args(&self) -> &[Term] {
        match self {
            Term::Var(_) => &[],
            Term::App(_, args) => args,
        }
    }

    pub fn is_ground(&self) -> bool {
        match self {
            Term::Var(_) => false,
            Term::App(_, args) => args.iter().all(Term::is_ground),
        }
    }

    /// Variables in left-to-right order of first occurrence.
    pub fn vars(&self) -> Vec<String> {
        let mut out = Vec::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars(&self, out: &mut Vec<String>) {
        match self {
            Term::Var(x) => {
                if !out.contains(x) {
                    out.push(x.clone());
                }
            }
            Term::App(_, args) => args.iter().for_each(|a| a.collect_vars(out)),
        }
    }

    pub fn var_set(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.visit(&mut |t| {
            if let Term::Var(x) = t {
                out.insert(x.clone());
            }
        });
        out
    }

    /// Number of occurrences of each variable.
    pub fn var_occurrences(&self) -> BTreeMap<String, usize> {
        let mut out = BTreeMap::new();
        self.visit(&mut |t| {
            if let Term::Var(x) = t {
                *out.entry(x.clone()).or_insert(0) += 1;
            }
        });
        out
    }

    pub fn is_linear(&self) -> bool {
        self.var_occurrences().values().all(|&n| n == 1)
    }

    pub fn symbols(&self) -> BTreeSet<Symbol> {
        let mut out = BTreeSet::new();
        self.visit(&mut |t| {
            if let Term::App(f, _) = t {
                out.insert(f.clone());
            }
        });
        out
    }

    pub fn contains_var(&self, x: &str) -> bool {
        match self {
            Term::Var(y) => x == y,
            Term::App(_, args) => args.iter().any(|a| a.contains_var(x)),
        }
    }

    /// Pre-order traversal.
    pub fn visit<'a>(&'a self, f: &mut impl FnMut(&'a Term)) {
        f(self);
        if let Term::App(_, args) = self {
            for a in args {
                a.visit(f);
            }
        }
    }

    pub fn size(&self) -> usize {
        match self {
            Term::Var(_) => 1,
            Term::App(_, args) => 1 + args.iter().map(Term::size).sum::<usize>(),
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            Term::Var(_) => 0,
            Term::App(_, args) => args.iter().map(|a| a.depth() + 1).max().unwrap_or(0),
        }
    }

    /// All positions in pre-order (leftmost-outermost first).
    pub fn positions(&self) -> Vec<Position> {
        let mut out = Vec::new();
        let mut cur = Vec::new();
        self.collect_positions(&mut cur, &mut out, false);
        out
    }

    /// Positions of non-variable subterms in pre-order.
    pub fn function_positions(&self) -> Vec<Position> {
        let mut out = Vec::new();
        let mut cur = Vec::new();
        self.collect_positions(&mut cur, &mut out, true);
        out
    }

    fn collect_positions(&self, cur: &mut Vec<usize>, out: &mut Vec<Position>, skip_vars: bool) {
        match self {
            Term::Var(_) => {
                if !skip_vars {
                    out.push(Position(cur.clone()));
                }
            }
            Term::App(_, args) => {
                out.push(Position(cur.clone()));
                for (i, a) in args.iter().enumerate() {
                    cur.push(i);
                    a.collect_positions(cur, out, skip_vars);
                    cur.pop();
                }
            }
        }
    }

    pub fn subterm_at(&self, pos: &Position) -> Option<&Term> {
        let mut t = self;
        for &i in &pos.0 {
            t = t.args().get(i)?;
        }
        Some(t)
    }

    /// Replaces the subterm at `pos`; `None` if the position is invalid.
    pub fn replace_at(&self, pos: &Position, replacement: Term) -> Option<Term> {
        fn go(t: &Term, path: &[usize], replacement: Term) -> Option<Term> {
            match path.split_first() {
                None => Some(replacement),
                Some((&i, rest)) => match t {
                    Term::App(f, args) if i < args.len() => {
                        let mut args = args.clone();
                        args[i] = go(&args[i], rest, replacement)?;
                        Some(Term::App(f.clone(), args))
                    }
                    _ => None,
                },
            }
        }
        go(self, &pos.0, replacement)
    }

    pub fn apply(&self, sigma: &Substitution) -> Term {
        match self {
            Term::Var(x) => sigma.get(x).cloned().unwrap_or_else(|| self.clone()),
            Term::App(f, args) => Term::App(f.clone(), args.iter().map(|a| a.apply(sigma)).collect()),
        }
    }

    /// Renames variables through `f`.
    pub fn map_vars(&self, f: &mut impl FnMut(&str) -> String) -> Term {
        match self {
            Term::Var(x) => Term::Var(f(x)),
            Term::App(g, args) => Term::App(g.clone(), args.iter().map(|a| a.map_vars(f)).collect()),
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(x) => write!(f, "{}", x),
            Term::App(g, args) if args.is_empty() => write!(f, "{}", g.name),
            Term::App(g, args) => {
                write!(f, "{}(", g.name)?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{}", a)?;
                }
                write!(f, ")")
            }
        }
    }
}

/// A path of 0-based argument indices from the root.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Position(pub Vec<usize>);

impl Position {
    pub fn root() -> Self {
        Position(Vec::new())
    }

    pub fn is_root(&self) -> bool {
        self.0.is_empty()
    }

    pub fn child(&self, i: usize) -> Position {
        let mut p = self.0.clone();
        p.push(i);
        Position(p)
    }
}

/// Printed the way certificates write it: `e` for the root, otherwise
/// 1-based argument indices joined by dots.
impl fmt::Display for Position {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "e");
        }
        for (k, i) in self.0.iter().enumerate() {
            if k > 0 {
                write!(f, ".")?;
            }
            write!(f, "{}", i + 1)?;
        }
        Ok(())
    }
}

/// Finite map from variable names to terms; unmapped variables are fixed.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Substitution(BTreeMap<String, Term>);

impl Substitution {
    pub fn new() -> Self {
        Substitution(BTreeMap::new())
    }

    pub fn get(&self, x: &str) -> Option<&Term> {
        self.0.get(x)
    }

    pub fn insert(&mut self, x: impl Into<String>, t: Term) -> Option<Term> {
        self.0.insert(x.into(), t)
    }

    pub fn contains(&self, x: &str) -> bool {
        self.0.contains_key(x)
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&String, &Term)> {
        self.0.iter()
    }

    pub fn domain(&self) -> impl Iterator<Item = &String> {
        self.0.keys()
    }

    /// `σ·σ = σ`: no domain variable occurs in the range.
    pub fn is_idempotent(&self) -> bool {
        self.0
            .values()
            .all(|t| self.0.keys().all(|x| !t.contains_var(x)))
    }

    /// Entries of `other` that are not already bound here are added.
    pub fn extend_with(&mut self, other: &Substitution) {
        for (x, t) in other.iter() {
            self.0.entry(x.clone()).or_insert_with(|| t.clone());
        }
    }
}

impl FromIterator<(String, Term)> for Substitution {
    fn from_iter<I: IntoIterator<Item = (String, Term)>>(iter: I) -> Self {
        Substitution(iter.into_iter().collect())
    }
}

impl fmt::Display for Substitution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, (x, t)) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{} ↦ {}", x, t)?;
        }
        write!(f, "}}")
    }
}

/// A rewrite rule. No variable conditions are imposed: the left-hand side
/// may be a variable and the right-hand side may introduce variables.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Rule {
    pub lhs: Term,
    pub rhs: Term,
}

impl Rule {
    pub fn new(lhs: Term, rhs: Term) -> Self {
        Rule { lhs, rhs }
    }

    /// Variables of the right-hand side that do not occur on the left.
    pub fn rhs_only_vars(&self) -> Vec<String> {
        let lhs = self.lhs.var_set();
        self.rhs
            .vars()
            .into_iter()
            .filter(|x| !lhs.contains(x))
            .collect()
    }

    pub fn is_left_linear(&self) -> bool {
        self.lhs.is_linear()
    }

    pub fn is_linear(&self) -> bool {
        self.lhs.is_linear() && self.rhs.is_linear()
    }

    pub fn reversed(&self) -> Rule {
        Rule::new(self.rhs.clone(), self.lhs.clone())
    }

    pub fn symbols(&self) -> BTreeSet<Symbol> {
        let mut s = self.lhs.symbols();
        s.extend(self.rhs.symbols());
        s
    }

    /// Both sides with variables renamed by appending `suffix`.
    pub fn rename(&self, suffix: &str) -> Rule {
        let mut f = |x: &str| format!("{}{}", x, suffix);
        Rule::new(self.lhs.map_vars(&mut f), self.rhs.map_vars(&mut f))
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} -> {}", self.lhs, self.rhs)
    }
}

/// The two standard variable conditions, reported rather than assumed.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct VariableConditions {
    /// No left-hand side is a variable.
    pub vclhs: bool,
    /// Every right-hand-side variable occurs on the left.
    pub vcsubset: bool,
}

/// An ordered list of rules. Certificates refer to rules by index, so the
/// order is significant and stable.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Trs {
    pub rules: Vec<Rule>,
}

impl Trs {
    pub fn new(rules: Vec<Rule>) -> Self {
        Trs { rules }
    }

    pub fn len(&self) -> usize {
        self.rules.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rules.is_empty()
    }

    pub fn rule(&self, i: usize) -> Option<&Rule> {
        self.rules.get(i)
    }

    pub fn signature(&self) -> BTreeSet<Symbol> {
        self.rules.iter().flat_map(Rule::symbols).collect()
    }

    pub fn variable_conditions(&self) -> VariableConditions {
        VariableConditions {
            vclhs: self.rules.iter().all(|r| !r.lhs.is_var()),
            vcsubset: self.rules.iter().all(|r| r.rhs_only_vars().is_empty()),
        }
    }

    pub fn is_linear(&self) -> bool {
        self.rules.iter().all(Rule::is_linear)
    }

    pub fn is_left_linear(&self) -> bool {
        self.rules.iter().all(Rule::is_left_linear)
    }

    /// The rules `{r → ℓ | ℓ → r ∈ self}` in the same order.
    pub fn inverse(&self) -> Trs {
        Trs::new(self.rules.iter().map(Rule::reversed).collect())
    }
}

impl FromIterator<Rule> for Trs {
    fn from_iter<I: IntoIterator<Item = Rule>>(iter: I) -> Self {
        Trs::new(iter.into_iter().collect())
    }
}

impl fmt::Display for Trs {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut vars = BTreeSet::new();
        for r in &self.rules {
            vars.extend(r.lhs.var_set());
            vars.extend(r.rhs.var_set());
        }
        if !vars.is_empty() {
            write!(f, "(VAR")?;
            for v in &vars {
                write!(f, " {}", v)?;
            }
            writeln!(f, ")")?;
        }
        writeln!(f, "(RULES")?;
        for r in &self.rules {
            writeln!(f, "  {}", r)?;
        }
        write!(f, ")")
    }
}

pub fn check_variable_conditions(trs: &Trs) -> VariableConditions {
    trs.variable_conditions()
}
