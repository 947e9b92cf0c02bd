//! Recursive-descent parsers for rewrite systems and certificates.
//!
//! Both formats are read directly from characters; there is no separate
//! s-expression tree because terms use their own `f(a,b)` syntax inside the
//! s-expression layer.

use std::collections::BTreeSet;

use num_bigint::BigUint;
use thiserror::Error;

use super::{Certificate, ConfluenceProof};
use crate::automata::{ClosureEvidence, StateId, TreeAutomaton};
use crate::confluence::{ExplicitJoin, JoinMethod, DEFAULT_NF_BUDGET};
use crate::nonjoin::{ArgumentFilter, FilterAction, FiniteAlgebra, NjCertificate, NonConfluenceProof, OrderSpec};
use crate::poly::LinearPolyInterp;
use crate::rewrite::DerivationStep;
use crate::term::{Position, Rule, Substitution, Term, Trs, BOTTOM, RESERVED_PREFIX};

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("syntax error at {line}:{col}: {message}")]
    Syntax { line: usize, col: usize, message: String },
    #[error("reserved name {name} at {line}:{col}")]
    ReservedSymbol { name: String, line: usize, col: usize },
    #[error("unknown technique {name} at {line}:{col}")]
    UnknownTechnique { name: String, line: usize, col: usize },
    #[error("malformed evidence at {line}:{col}: {message}")]
    MalformedEvidence { line: usize, col: usize, message: String },
}

type Result<T> = std::result::Result<T, ParseError>;

struct Cursor<'a> {
    chars: Vec<char>,
    pos: usize,
    vars: &'a BTreeSet<String>,
    /// Whether whitespace may separate a function symbol from its `(`.
    loose_application: bool,
}

fn is_delim(c: char) -> bool {
    c.is_whitespace() || matches!(c, '(' | ')' | ',')
}

impl<'a> Cursor<'a> {
    fn new(text: &str, vars: &'a BTreeSet<String>, loose_application: bool) -> Self {
        Cursor {
            chars: text.chars().collect(),
            pos: 0,
            vars,
            loose_application,
        }
    }

    fn line_col(&self, pos: usize) -> (usize, usize) {
        let mut line = 1;
        let mut col = 1;
        for &c in &self.chars[..pos.min(self.chars.len())] {
            if c == '\n' {
                line += 1;
                col = 1;
            } else {
                col += 1;
            }
        }
        (line, col)
    }

    fn syntax_at(&self, pos: usize, message: impl Into<String>) -> ParseError {
        let (line, col) = self.line_col(pos);
        ParseError::Syntax {
            line,
            col,
            message: message.into(),
        }
    }

    fn syntax(&self, message: impl Into<String>) -> ParseError {
        self.syntax_at(self.pos, message)
    }

    fn malformed_at(&self, pos: usize, message: impl Into<String>) -> ParseError {
        let (line, col) = self.line_col(pos);
        ParseError::MalformedEvidence {
            line,
            col,
            message: message.into(),
        }
    }

    fn skip_ws(&mut self) {
        while let Some(&c) = self.chars.get(self.pos) {
            if c.is_whitespace() {
                self.pos += 1;
            } else if c == ';' {
                while self.chars.get(self.pos).is_some_and(|&c| c != '\n') {
                    self.pos += 1;
                }
            } else {
                break;
            }
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.chars.get(self.pos).copied()
    }

    fn at_end(&mut self) -> bool {
        self.peek().is_none()
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> Result<()> {
        if self.eat(c) {
            Ok(())
        } else {
            let found = self.peek().map_or("end of input".to_string(), |f| format!("'{f}'"));
            Err(self.syntax(format!("expected '{c}', found {found}")))
        }
    }

    fn close(&mut self) -> Result<()> {
        self.expect(')')
    }

    fn atom(&mut self) -> Result<String> {
        self.skip_ws();
        let start = self.pos;
        while self.chars.get(self.pos).is_some_and(|&c| !is_delim(c)) {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.syntax("expected an identifier"));
        }
        Ok(self.chars[start..self.pos].iter().collect())
    }

    /// The next atom without consuming it.
    fn peek_atom(&mut self) -> Option<String> {
        let save = self.pos;
        let a = self.atom().ok();
        self.pos = save;
        a
    }

    fn keyword(&mut self, kw: &str) -> Result<()> {
        self.skip_ws();
        let start = self.pos;
        match self.atom() {
            Ok(a) if a == kw => Ok(()),
            _ => Err(self.syntax_at(start, format!("expected '{kw}'"))),
        }
    }

    /// `(kw` as the opening of a form.
    fn open(&mut self, kw: &str) -> Result<()> {
        self.expect('(')?;
        self.keyword(kw)
    }

    fn ident(&mut self) -> Result<String> {
        self.skip_ws();
        let start = self.pos;
        let name = self.atom()?;
        if name == BOTTOM || name.contains(RESERVED_PREFIX) {
            let (line, col) = self.line_col(start);
            return Err(ParseError::ReservedSymbol { name, line, col });
        }
        if name == "->" {
            return Err(self.syntax_at(start, "expected an identifier, found '->'"));
        }
        Ok(name)
    }

    fn uint(&mut self) -> Result<usize> {
        self.skip_ws();
        let start = self.pos;
        let a = self.atom()?;
        a.parse().map_err(|_| self.syntax_at(start, format!("expected a natural number, found '{a}'")))
    }

    fn biguint(&mut self) -> Result<BigUint> {
        self.skip_ws();
        let start = self.pos;
        let a = self.atom()?;
        a.parse().map_err(|_| self.syntax_at(start, format!("expected a natural number, found '{a}'")))
    }

    /// A 1-based index in the surface syntax, returned 0-based.
    fn index(&mut self) -> Result<usize> {
        self.skip_ws();
        let start = self.pos;
        match self.uint()? {
            0 => Err(self.syntax_at(start, "indices start at 1")),
            n => Ok(n - 1),
        }
    }

    fn application_follows(&mut self) -> bool {
        if self.loose_application {
            self.peek() == Some('(')
        } else {
            self.chars.get(self.pos) == Some(&'(')
        }
    }

    fn term(&mut self) -> Result<Term> {
        let name = self.ident()?;
        if self.application_follows() {
            self.expect('(')?;
            let mut args = Vec::new();
            if !self.eat(')') {
                loop {
                    args.push(self.term()?);
                    if self.eat(')') {
                        break;
                    }
                    self.expect(',')?;
                }
            }
            Ok(Term::app(name, args))
        } else if self.vars.contains(&name) {
            Ok(Term::var(name))
        } else {
            Ok(Term::constant(name))
        }
    }

    fn position(&mut self) -> Result<Position> {
        self.skip_ws();
        let start = self.pos;
        let a = self.atom()?;
        if a == "e" {
            return Ok(Position::root());
        }
        let mut ps = Vec::new();
        for part in a.split('.') {
            match part.parse::<usize>() {
                Ok(n) if n >= 1 => ps.push(n - 1),
                _ => return Err(self.syntax_at(start, format!("malformed position '{a}'"))),
            }
        }
        Ok(Position(ps))
    }

    /// `((x t) …)`
    fn bindings(&mut self) -> Result<Substitution> {
        self.expect('(')?;
        let mut sigma = Substitution::new();
        while !self.eat(')') {
            self.expect('(')?;
            let x = self.ident()?;
            let t = self.term()?;
            self.close()?;
            sigma.insert(x, t);
        }
        Ok(sigma)
    }

    fn step(&mut self) -> Result<DerivationStep> {
        self.expect('(')?;
        let pos = self.position()?;
        let rule = self.index()?;
        let extra = self.bindings()?;
        self.close()?;
        Ok(DerivationStep::with_extra(pos, rule, extra))
    }

    fn steps(&mut self) -> Result<Vec<DerivationStep>> {
        self.open("steps")?;
        let mut out = Vec::new();
        while !self.eat(')') {
            out.push(self.step()?);
        }
        Ok(out)
    }

    /// `(interp (f c0 c1 …) …)`
    fn interp(&mut self) -> Result<LinearPolyInterp> {
        self.open("interp")?;
        let mut interp = LinearPolyInterp::new();
        while !self.eat(')') {
            self.expect('(')?;
            let f = self.ident()?;
            let mut cs = vec![self.biguint()?];
            while !self.eat(')') {
                cs.push(self.biguint()?);
            }
            interp.set(f, cs);
        }
        Ok(interp)
    }

    fn technique_name(&mut self) -> Result<(usize, String)> {
        self.expect('(')?;
        self.skip_ws();
        let start = self.pos;
        Ok((start, self.atom()?))
    }

    fn unknown(&self, start: usize, name: String) -> ParseError {
        let (line, col) = self.line_col(start);
        ParseError::UnknownTechnique { name, line, col }
    }

    fn certificate(&mut self) -> Result<Certificate> {
        let (start, kind) = self.technique_name()?;
        let cert = match kind.as_str() {
            "confluence" => Certificate::Confluence(self.confluence_proof()?),
            "nonconfluence" => Certificate::NonConfluence(self.nonconfluence_proof()?),
            _ => return Err(self.unknown(start, kind)),
        };
        self.close()?;
        Ok(cert)
    }

    fn confluence_proof(&mut self) -> Result<ConfluenceProof> {
        let (start, name) = self.technique_name()?;
        let proof = match name.as_str() {
            "weakly-orthogonal" => ConfluenceProof::WeaklyOrthogonal,
            "strongly-closed" => ConfluenceProof::StronglyClosed(self.uint()?),
            "terminating" => {
                self.expect('(')?;
                let mut rounds = Vec::new();
                while !self.eat(')') {
                    rounds.push(self.interp()?);
                }
                ConfluenceProof::Terminating(rounds, self.join_method()?)
            }
            _ => return Err(self.unknown(start, name)),
        };
        self.close()?;
        Ok(proof)
    }

    fn join_method(&mut self) -> Result<JoinMethod> {
        let (start, name) = self.technique_name()?;
        let method = match name.as_str() {
            "nf" if self.peek() == Some(')') => JoinMethod::ByNormalization(DEFAULT_NF_BUDGET),
            "nf" => JoinMethod::ByNormalization(self.uint()?),
            "bfs" => JoinMethod::ByBfs(self.uint()?),
            "joins" => {
                let mut joins = Vec::new();
                while self.peek() == Some('(') {
                    self.expect('(')?;
                    let left = self.term()?;
                    let right = self.term()?;
                    let left_steps = self.steps()?;
                    let right_steps = self.steps()?;
                    self.close()?;
                    joins.push(ExplicitJoin {
                        left,
                        right,
                        left_steps,
                        right_steps,
                    });
                }
                JoinMethod::Explicit(joins)
            }
            _ => return Err(self.unknown(start, name)),
        };
        self.close()?;
        Ok(method)
    }

    fn nonconfluence_proof(&mut self) -> Result<NonConfluenceProof> {
        let (start, name) = self.technique_name()?;
        let proof = match name.as_str() {
            "fork" => {
                let start = self.term()?;
                let left = self.steps()?;
                let right = self.steps()?;
                let proof = self.nj_proof()?;
                NonConfluenceProof::Fork {
                    start,
                    left,
                    right,
                    proof,
                }
            }
            "modular" => {
                self.expect('(')?;
                let mut rules = vec![self.index()?];
                while !self.eat(')') {
                    rules.push(self.index()?);
                }
                let proof = Box::new(self.nonconfluence_proof()?);
                NonConfluenceProof::Modular { rules, proof }
            }
            _ => return Err(self.unknown(start, name)),
        };
        self.close()?;
        Ok(proof)
    }

    fn nj_proof(&mut self) -> Result<NjCertificate> {
        let (start, name) = self.technique_name()?;
        let proof = match name.as_str() {
            "ground" => {
                let sigma = self.bindings()?;
                NjCertificate::Ground(sigma, Box::new(self.nj_proof()?))
            }
            "tcap" => NjCertificate::Tcap,
            "distinct-nf" => NjCertificate::DistinctNf,
            "usable" => NjCertificate::Usable(Box::new(self.nj_proof()?)),
            "discrimination" => NjCertificate::Discrimination(self.interp()?),
            "filter" => {
                let pi = self.filter()?;
                NjCertificate::Filter(pi, Box::new(self.nj_proof()?))
            }
            "model" => NjCertificate::Model(self.model()?),
            "automata" => {
                let first = self.automaton()?;
                let second = self.automaton()?;
                let first_evidence = self.evidence(&first)?;
                let second_evidence = self.evidence(&second)?;
                NjCertificate::Automata {
                    first,
                    second,
                    first_evidence,
                    second_evidence,
                }
            }
            _ => return Err(self.unknown(start, name)),
        };
        self.close()?;
        Ok(proof)
    }

    fn filter(&mut self) -> Result<ArgumentFilter> {
        self.expect('(')?;
        let mut pi = ArgumentFilter::new();
        while !self.eat(')') {
            self.expect('(')?;
            let f = self.ident()?;
            self.skip_ws();
            let start = self.pos;
            let action = match self.atom()?.as_str() {
                "keep" => {
                    let mut ps = Vec::new();
                    while !self.eat(')') {
                        ps.push(self.index()?);
                    }
                    FilterAction::Keep(ps)
                }
                "collapse" => {
                    let p = self.index()?;
                    self.close()?;
                    FilterAction::Collapse(p)
                }
                other => return Err(self.syntax_at(start, format!("expected 'keep' or 'collapse', found '{other}'"))),
            };
            pi.set(f, action);
        }
        Ok(pi)
    }

    /// `D (order …) (interps (f n v…) …) (default d)`
    fn model(&mut self) -> Result<FiniteAlgebra> {
        let size = self.uint()?;
        self.open("order")?;
        let order = if self.peek() == Some('(') {
            self.expect('(')?;
            let mut pairs = Vec::new();
            while !self.eat(')') {
                self.expect('(')?;
                let a = self.uint()?;
                let b = self.uint()?;
                self.close()?;
                pairs.push((a, b));
            }
            OrderSpec::Pairs(pairs)
        } else {
            self.skip_ws();
            let start = self.pos;
            match self.atom()?.as_str() {
                "nat" => OrderSpec::Natural,
                "eq" => OrderSpec::Equality,
                other => return Err(self.syntax_at(start, format!("unknown order '{other}'"))),
            }
        };
        self.close()?;
        self.open("interps")?;
        let mut tables = Vec::new();
        while !self.eat(')') {
            self.expect('(')?;
            let f = self.ident()?;
            let arity = self.uint()?;
            let mut table = Vec::new();
            while !self.eat(')') {
                table.push(self.uint()?);
            }
            tables.push((f, arity, table));
        }
        self.open("default")?;
        let default = self.uint()?;
        self.close()?;
        let mut alg = FiniteAlgebra::new(size, order, default);
        for (f, arity, table) in tables {
            alg.set(&f, arity, table);
        }
        Ok(alg)
    }

    fn state_ref(&mut self, a: &TreeAutomaton) -> Result<StateId> {
        self.skip_ws();
        let start = self.pos;
        let name = self.atom()?;
        a.state(&name)
            .ok_or_else(|| self.malformed_at(start, format!("undeclared state '{name}'")))
    }

    fn automaton(&mut self) -> Result<TreeAutomaton> {
        self.open("automaton")?;
        let mut a = TreeAutomaton::new();
        self.open("states")?;
        while !self.eat(')') {
            let name = self.atom()?;
            a.add_state(name);
        }
        self.open("final")?;
        while !self.eat(')') {
            let q = self.state_ref(&a)?;
            a.set_final(q);
        }
        self.open("transitions")?;
        while !self.eat(')') {
            self.expect('(')?;
            let f = self.ident()?;
            if self.peek() == Some('(') {
                self.expect('(')?;
                let mut args = Vec::new();
                while !self.eat(')') {
                    args.push(self.state_ref(&a)?);
                }
                let target = self.state_ref(&a)?;
                a.add_transition(f, args, target);
            } else if f == "eps" {
                let p = self.state_ref(&a)?;
                let q = self.state_ref(&a)?;
                a.add_epsilon(p, q);
            } else {
                return Err(self.syntax(format!("expected argument states of '{f}'")));
            }
            self.close()?;
        }
        self.close()?;
        Ok(a)
    }

    fn evidence(&mut self, a: &TreeAutomaton) -> Result<ClosureEvidence> {
        let (start, name) = self.technique_name()?;
        let evidence = match name.as_str() {
            "compat" => ClosureEvidence::Compatibility,
            "state-compat" => {
                self.expect('(')?;
                let mut rel = BTreeSet::new();
                while !self.eat(')') {
                    self.expect('(')?;
                    let p = self.state_ref(a)?;
                    let q = self.state_ref(a)?;
                    self.close()?;
                    rel.insert((p, q));
                }
                ClosureEvidence::StateCompatibility(rel)
            }
            _ => return Err(self.malformed_at(start, format!("unknown closure evidence '{name}'"))),
        };
        self.close()?;
        Ok(evidence)
    }

    /// An optional leading `(VAR x …)` form.
    fn var_decl(&mut self) -> Result<Option<BTreeSet<String>>> {
        if self.peek() != Some('(') {
            return Ok(None);
        }
        let save = self.pos;
        self.pos += 1;
        if self.peek_atom().as_deref() != Some("VAR") {
            self.pos = save;
            return Ok(None);
        }
        self.keyword("VAR")?;
        let mut vars = BTreeSet::new();
        while !self.eat(')') {
            vars.insert(self.ident()?);
        }
        Ok(Some(vars))
    }

    fn skip_balanced(&mut self) -> Result<()> {
        let start = self.pos;
        let mut depth = 0usize;
        while let Some(&c) = self.chars.get(self.pos) {
            self.pos += 1;
            match c {
                '(' => depth += 1,
                ')' if depth == 0 => return Ok(()),
                ')' => depth -= 1,
                _ => {}
            }
        }
        Err(self.syntax_at(start, "unbalanced parentheses"))
    }
}

/// A parsed rewrite system with its declared variables.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParsedTrs {
    pub trs: Trs,
    pub vars: BTreeSet<String>,
}

/// `(VAR x …)? (RULES l -> r …)`; `(COMMENT …)` sections are skipped.
pub fn parse_trs_with_vars(text: &str) -> Result<ParsedTrs> {
    let empty = BTreeSet::new();
    let mut probe = Cursor::new(text, &empty, true);
    let mut vars = BTreeSet::new();
    // variables must be known before any rule is read
    while probe.eat('(') {
        let name = probe.atom()?;
        if name == "VAR" {
            while !probe.eat(')') {
                vars.insert(probe.ident()?);
            }
        } else {
            probe.skip_balanced()?;
        }
    }
    let mut c = Cursor::new(text, &vars, true);
    let mut rules = None;
    while !c.at_end() {
        c.expect('(')?;
        c.skip_ws();
        let start = c.pos;
        match c.atom()?.as_str() {
            "VAR" | "COMMENT" => c.skip_balanced()?,
            "RULES" => {
                if rules.is_some() {
                    return Err(c.syntax_at(start, "duplicate RULES section"));
                }
                let mut rs = Vec::new();
                while !c.eat(')') {
                    let lhs = c.term()?;
                    c.keyword("->")?;
                    let rhs = c.term()?;
                    rs.push(Rule::new(lhs, rhs));
                }
                rules = Some(rs);
            }
            other => return Err(c.syntax_at(start, format!("unknown section '{other}'"))),
        }
    }
    let rules = rules.ok_or_else(|| c.syntax("missing RULES section"))?;
    Ok(ParsedTrs {
        trs: Trs::new(rules),
        vars,
    })
}

pub fn parse_trs(text: &str) -> Result<Trs> {
    parse_trs_with_vars(text).map(|p| p.trs)
}

/// Parses a certificate, treating `vars` and any leading `(VAR …)` names as
/// variables.
pub fn parse_certificate_with_vars(text: &str, vars: &BTreeSet<String>) -> Result<Certificate> {
    let empty = BTreeSet::new();
    let declared = Cursor::new(text, &empty, false).var_decl()?;
    let mut all = vars.clone();
    all.extend(declared.iter().flatten().cloned());
    let mut c = Cursor::new(text, &all, false);
    c.var_decl()?;
    let cert = c.certificate()?;
    if !c.at_end() {
        return Err(c.syntax("trailing input after certificate"));
    }
    Ok(cert)
}

pub fn parse_certificate(text: &str) -> Result<Certificate> {
    parse_certificate_with_vars(text, &BTreeSet::new())
}

/// Parses a term in certificate syntax.
pub fn parse_term(text: &str, vars: &BTreeSet<String>) -> Result<Term> {
    let mut c = Cursor::new(text, vars, false);
    let t = c.term()?;
    if !c.at_end() {
        return Err(c.syntax("trailing input after term"));
    }
    Ok(t)
}
