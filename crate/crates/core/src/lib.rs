//! Checking confluence and non-confluence certificates for first-order term
//! rewrite systems.
//!
//! A certificate is verified against a rewrite system and yields either
//! [`Verdict::Certified`] or a rejection carrying a diagnostic. Rewrite
//! systems are taken as given: left-hand sides may be variables and
//! right-hand sides may introduce fresh variables.

#![allow(clippy::result_large_err, clippy::large_enum_variant)]

pub mod automata;
pub mod cert;
pub mod confluence;
pub mod critical;
pub mod nonjoin;
pub mod poly;
pub mod rewrite;
pub mod tcap;
pub mod term;
pub mod unify;

pub use cert::{
    check_certificate, parse_certificate, parse_certificate_with_vars, parse_term, parse_trs, parse_trs_with_vars, Certificate,
    ConfluenceProof, ParseError, Verdict,
};
pub use nonjoin::{NjCertificate, NonConfluenceProof};
pub use term::{Position, Rule, Substitution, Symbol, Term, Trs};
