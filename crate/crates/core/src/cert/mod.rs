//! Certificates: data model, concrete syntax and verdicts.

mod parse;

use std::collections::BTreeSet;
use std::fmt::{self, Write as _};

pub use parse::{
    parse_certificate, parse_certificate_with_vars, parse_term, parse_trs, parse_trs_with_vars, ParseError, ParsedTrs,
};

use crate::automata::{ClosureEvidence, TreeAutomaton};
use crate::confluence::{
    check_strongly_closed, check_terminating_confluent, check_weakly_orthogonal, ExplicitJoin, JoinMethod,
};
use crate::nonjoin::{check_nonconfluence, NjCertificate, NjError, NonConfluenceError, NonConfluenceProof};
use crate::poly::LinearPolyInterp;
use crate::rewrite::DerivationStep;
use crate::term::{Substitution, Term, Trs};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Certificate {
    Confluence(ConfluenceProof),
    NonConfluence(NonConfluenceProof),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ConfluenceProof {
    WeaklyOrthogonal,
    StronglyClosed(usize),
    /// Rule-removal rounds, then how critical pairs are joined.
    Terminating(Vec<LinearPolyInterp>, JoinMethod),
}

impl ConfluenceProof {
    pub fn technique(&self) -> &'static str {
        match self {
            ConfluenceProof::WeaklyOrthogonal => "weakly-orthogonal",
            ConfluenceProof::StronglyClosed(_) => "strongly-closed",
            ConfluenceProof::Terminating(..) => "terminating",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    Certified,
    Rejected(String),
}

impl Verdict {
    pub fn is_certified(&self) -> bool {
        matches!(self, Verdict::Certified)
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::Certified => f.write_str("CERTIFIED"),
            Verdict::Rejected(msg) => write!(f, "REJECTED: {msg}"),
        }
    }
}

/// The chain of technique names from `proof` down to the `depth`-th
/// nested technique.
fn nj_path(proof: &NjCertificate, depth: usize, path: &mut Vec<&'static str>) {
    path.push(proof.technique());
    if depth == 0 {
        return;
    }
    match proof {
        NjCertificate::Ground(_, inner) | NjCertificate::Usable(inner) | NjCertificate::Filter(_, inner) => {
            nj_path(inner, depth - 1, path)
        }
        _ => {}
    }
}

fn innermost(mut e: &NjError) -> (usize, &NjError) {
    let mut depth = 0;
    while let NjError::Nested { cause, .. } = e {
        depth += 1;
        e = cause;
    }
    (depth, e)
}

fn nonconfluence_rejection(
    proof: &NonConfluenceProof,
    err: &NonConfluenceError,
    path: &mut Vec<&'static str>,
) -> String {
    match (proof, err) {
        (NonConfluenceProof::Modular { proof, .. }, NonConfluenceError::Component(inner)) => {
            path.push("modular");
            nonconfluence_rejection(proof, inner, path)
        }
        (NonConfluenceProof::Modular { .. }, e) => {
            path.push("modular");
            e.to_string()
        }
        (
            NonConfluenceProof::Fork { proof, .. },
            NonConfluenceError::NjRejected {
                start,
                left,
                right,
                cause,
            },
        ) => {
            path.push("fork");
            let (depth, e) = innermost(cause);
            nj_path(proof, depth, path);
            format!("fork {left} <-* {start} ->* {right}: {e}")
        }
        (NonConfluenceProof::Fork { .. }, e) => {
            path.push("fork");
            e.to_string()
        }
    }
}

/// Checks `cert` against `trs`. A rejection names the failing condition and
/// ends with the technique path in brackets.
pub fn check_certificate(trs: &Trs, cert: &Certificate) -> Verdict {
    let mut path = Vec::new();
    let result = match cert {
        Certificate::Confluence(proof) => {
            path.extend(["confluence", proof.technique()]);
            let r = match proof {
                ConfluenceProof::WeaklyOrthogonal => check_weakly_orthogonal(trs),
                ConfluenceProof::StronglyClosed(bound) => check_strongly_closed(trs, *bound),
                ConfluenceProof::Terminating(rounds, method) => check_terminating_confluent(trs, rounds, method),
            };
            r.map_err(|e| e.to_string())
        }
        Certificate::NonConfluence(proof) => {
            path.push("nonconfluence");
            check_nonconfluence(trs, proof).map_err(|e| nonconfluence_rejection(proof, &e, &mut path))
        }
    };
    match result {
        Ok(()) => Verdict::Certified,
        Err(msg) => Verdict::Rejected(format!("{msg} [{}]", path.join("/"))),
    }
}

fn term_vars(t: &Term, out: &mut BTreeSet<String>) {
    out.extend(t.vars());
}

fn steps_vars(steps: &[DerivationStep], out: &mut BTreeSet<String>) {
    for s in steps {
        for (_, t) in s.extra.iter() {
            term_vars(t, out);
        }
    }
}

fn nj_vars(proof: &NjCertificate, out: &mut BTreeSet<String>) {
    match proof {
        NjCertificate::Ground(sigma, inner) => {
            for (_, t) in sigma.iter() {
                term_vars(t, out);
            }
            nj_vars(inner, out);
        }
        NjCertificate::Usable(inner) | NjCertificate::Filter(_, inner) => nj_vars(inner, out),
        _ => {}
    }
}

fn nonconfluence_vars(proof: &NonConfluenceProof, out: &mut BTreeSet<String>) {
    match proof {
        NonConfluenceProof::Fork {
            start,
            left,
            right,
            proof,
        } => {
            term_vars(start, out);
            steps_vars(left, out);
            steps_vars(right, out);
            nj_vars(proof, out);
        }
        NonConfluenceProof::Modular { proof, .. } => nonconfluence_vars(proof, out),
    }
}

impl Certificate {
    /// Variables occurring in terms of the certificate.
    pub fn variables(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        match self {
            Certificate::Confluence(ConfluenceProof::Terminating(_, JoinMethod::Explicit(joins))) => {
                for j in joins {
                    term_vars(&j.left, &mut out);
                    term_vars(&j.right, &mut out);
                    steps_vars(&j.left_steps, &mut out);
                    steps_vars(&j.right_steps, &mut out);
                }
            }
            Certificate::Confluence(_) => {}
            Certificate::NonConfluence(p) => nonconfluence_vars(p, &mut out),
        }
        out
    }
}

fn write_bindings(out: &mut String, sigma: &Substitution) {
    out.push('(');
    for (i, (x, t)) in sigma.iter().enumerate() {
        if i > 0 {
            out.push(' ');
        }
        let _ = write!(out, "({x} {t})");
    }
    out.push(')');
}

fn write_steps(out: &mut String, steps: &[DerivationStep]) {
    out.push_str("(steps");
    for s in steps {
        let _ = write!(out, " ({} {} ", s.pos, s.rule + 1);
        write_bindings(out, &s.extra);
        out.push(')');
    }
    out.push(')');
}

fn write_interp(out: &mut String, interp: &LinearPolyInterp) {
    out.push_str("(interp");
    for (f, cs) in interp.entries() {
        let _ = write!(out, " ({}", f.name);
        for c in cs {
            let _ = write!(out, " {c}");
        }
        out.push(')');
    }
    out.push(')');
}

fn write_evidence(out: &mut String, a: &TreeAutomaton, e: &ClosureEvidence) {
    match e {
        ClosureEvidence::Compatibility => out.push_str("(compat)"),
        ClosureEvidence::StateCompatibility(rel) => {
            out.push_str("(state-compat (");
            for (i, &(p, q)) in rel.iter().enumerate() {
                if i > 0 {
                    out.push(' ');
                }
                let _ = write!(out, "({} {})", a.state_name(p), a.state_name(q));
            }
            out.push_str("))");
        }
    }
}

fn write_nj(out: &mut String, proof: &NjCertificate) {
    match proof {
        NjCertificate::Ground(sigma, inner) => {
            out.push_str("(ground ");
            write_bindings(out, sigma);
            out.push(' ');
            write_nj(out, inner);
            out.push(')');
        }
        NjCertificate::Tcap => out.push_str("(tcap)"),
        NjCertificate::DistinctNf => out.push_str("(distinct-nf)"),
        NjCertificate::Usable(inner) => {
            out.push_str("(usable ");
            write_nj(out, inner);
            out.push(')');
        }
        NjCertificate::Discrimination(interp) => {
            out.push_str("(discrimination ");
            write_interp(out, interp);
            out.push(')');
        }
        NjCertificate::Filter(pi, inner) => {
            let _ = write!(out, "(filter {pi} ");
            write_nj(out, inner);
            out.push(')');
        }
        NjCertificate::Model(alg) => {
            let _ = write!(out, "{alg}");
        }
        NjCertificate::Automata {
            first,
            second,
            first_evidence,
            second_evidence,
        } => {
            let _ = write!(out, "(automata {first} {second} ");
            write_evidence(out, first, first_evidence);
            out.push(' ');
            write_evidence(out, second, second_evidence);
            out.push(')');
        }
    }
}

fn write_nonconfluence(out: &mut String, proof: &NonConfluenceProof) {
    match proof {
        NonConfluenceProof::Fork {
            start,
            left,
            right,
            proof,
        } => {
            let _ = write!(out, "(fork {start} ");
            write_steps(out, left);
            out.push(' ');
            write_steps(out, right);
            out.push(' ');
            write_nj(out, proof);
            out.push(')');
        }
        NonConfluenceProof::Modular { rules, proof } => {
            out.push_str("(modular (");
            let idx: Vec<String> = rules.iter().map(|i| (i + 1).to_string()).collect();
            out.push_str(&idx.join(" "));
            out.push_str(") ");
            write_nonconfluence(out, proof);
            out.push(')');
        }
    }
}

fn write_join(out: &mut String, j: &ExplicitJoin) {
    let _ = write!(out, "({} {} ", j.left, j.right);
    write_steps(out, &j.left_steps);
    out.push(' ');
    write_steps(out, &j.right_steps);
    out.push(')');
}

fn write_confluence(out: &mut String, proof: &ConfluenceProof) {
    match proof {
        ConfluenceProof::WeaklyOrthogonal => out.push_str("(weakly-orthogonal)"),
        ConfluenceProof::StronglyClosed(n) => {
            let _ = write!(out, "(strongly-closed {n})");
        }
        ConfluenceProof::Terminating(rounds, method) => {
            out.push_str("(terminating (");
            for (i, r) in rounds.iter().enumerate() {
                if i > 0 {
                    out.push(' ');
                }
                write_interp(out, r);
            }
            out.push_str(") ");
            match method {
                JoinMethod::ByNormalization(n) => {
                    let _ = write!(out, "(nf {n})");
                }
                JoinMethod::ByBfs(n) => {
                    let _ = write!(out, "(bfs {n})");
                }
                JoinMethod::Explicit(joins) => {
                    out.push_str("(joins");
                    for j in joins {
                        out.push(' ');
                        write_join(out, j);
                    }
                    out.push(')');
                }
            }
            out.push(')');
        }
    }
}

/// Prints the certificate in its concrete syntax, preceded by a `(VAR …)`
/// declaration when it mentions variables.
impl fmt::Display for Certificate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let vars = self.variables();
        let mut out = String::new();
        if !vars.is_empty() {
            out.push_str("(VAR");
            for x in &vars {
                let _ = write!(out, " {x}");
            }
            out.push_str(")\n");
        }
        match self {
            Certificate::Confluence(p) => {
                out.push_str("(confluence ");
                write_confluence(&mut out, p);
            }
            Certificate::NonConfluence(p) => {
                out.push_str("(nonconfluence ");
                write_nonconfluence(&mut out, p);
            }
        }
        out.push(')');
        f.write_str(&out)
    }
}
