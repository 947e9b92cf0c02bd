//! Test support: an independent rewriting oracle and seeded generators.
//!
//! Nothing here calls the matching, rewriting or unification code of the
//! crate; only the term data types are shared.

#![allow(dead_code)]

use std::collections::{BTreeSet, HashMap, HashSet, VecDeque};
use std::path::PathBuf;

use confcert::automata::TreeAutomaton;
use confcert::{Rule, Term, Trs};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub use rand::SeedableRng;

pub type Rng8 = ChaCha8Rng;

pub fn rng(seed: u64) -> Rng8 {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn fixture_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

pub fn fixture(name: &str) -> String {
    std::fs::read_to_string(fixture_path(name)).unwrap()
}

/// Constant used for right-hand-side-only variables.
pub const FILLER: &str = "o";

fn omatch(p: &Term, s: &Term, env: &mut HashMap<String, Term>) -> bool {
    match p {
        Term::Var(x) => match env.get(x) {
            Some(t) => t == s,
            None => {
                env.insert(x.clone(), s.clone());
                true
            }
        },
        Term::App(f, ps) => match s {
            Term::App(g, ss) if f == g => ps.iter().zip(ss).all(|(p, s)| omatch(p, s, env)),
            _ => false,
        },
    }
}

fn osubst(t: &Term, env: &HashMap<String, Term>) -> Term {
    match t {
        Term::Var(x) => env.get(x).cloned().unwrap_or_else(|| Term::constant(FILLER)),
        Term::App(f, args) => Term::App(f.clone(), args.iter().map(|a| osubst(a, env)).collect()),
    }
}

/// Whether `s` is an instance of `p`.
pub fn oracle_matches(p: &Term, s: &Term) -> bool {
    omatch(p, s, &mut HashMap::new())
}

/// All one-step reducts with the rule index used.
pub fn oracle_steps(trs: &Trs, t: &Term) -> Vec<(usize, Term)> {
    let mut out = Vec::new();
    for (i, r) in trs.rules.iter().enumerate() {
        let mut env = HashMap::new();
        if omatch(&r.lhs, t, &mut env) {
            out.push((i, osubst(&r.rhs, &env)));
        }
    }
    if let Term::App(f, args) = t {
        for (k, a) in args.iter().enumerate() {
            for (i, red) in oracle_steps(trs, a) {
                let mut new_args = args.clone();
                new_args[k] = red;
                out.push((i, Term::App(f.clone(), new_args)));
            }
        }
    }
    out
}

/// Terms reachable in at most `depth` steps, capped at `cap` terms.
pub fn oracle_reach(trs: &Trs, t: &Term, depth: usize, cap: usize) -> HashSet<Term> {
    let mut seen = HashSet::from([t.clone()]);
    let mut queue = VecDeque::from([(t.clone(), 0)]);
    while let Some((s, d)) = queue.pop_front() {
        if d == depth {
            continue;
        }
        for (_, u) in oracle_steps(trs, &s) {
            if seen.len() >= cap {
                return seen;
            }
            if seen.insert(u.clone()) {
                queue.push_back((u, d + 1));
            }
        }
    }
    seen
}

/// Whether some common reduct is found within `depth` steps on each side.
pub fn oracle_joinable(r1: &Trs, t1: &Term, r2: &Trs, t2: &Term, depth: usize) -> bool {
    oracle_joinable_capped(r1, t1, r2, t2, depth, 20_000)
}

/// As [`oracle_joinable`], exploring at most `cap` terms per side.
pub fn oracle_joinable_capped(r1: &Trs, t1: &Term, r2: &Trs, t2: &Term, depth: usize, cap: usize) -> bool {
    let a = oracle_reach(r1, t1, depth, cap);
    let b = oracle_reach(r2, t2, depth, cap);
    a.iter().any(|u| b.contains(u))
}

/// Leftmost-innermost normalisation; `None` if more than `budget` steps.
pub fn oracle_normalize(trs: &Trs, t: &Term, budget: usize) -> Option<(Term, usize)> {
    fn step(trs: &Trs, t: &Term) -> Option<Term> {
        if let Term::App(f, args) = t {
            for (k, a) in args.iter().enumerate() {
                if let Some(r) = step(trs, a) {
                    let mut new_args = args.clone();
                    new_args[k] = r;
                    return Some(Term::App(f.clone(), new_args));
                }
            }
        }
        trs.rules.iter().find_map(|r| {
            let mut env = HashMap::new();
            omatch(&r.lhs, t, &mut env).then(|| osubst(&r.rhs, &env))
        })
    }
    let mut cur = t.clone();
    for n in 0..=budget {
        match step(trs, &cur) {
            None => return Some((cur, n)),
            Some(next) => cur = next,
        }
    }
    None
}

/// A signature as (name, arity) pairs.
#[derive(Clone, Debug)]
pub struct Sig(pub Vec<(String, usize)>);

impl Sig {
    pub fn new(entries: &[(&str, usize)]) -> Self {
        Sig(entries.iter().map(|(n, a)| (n.to_string(), *a)).collect())
    }

    pub fn constants(&self) -> Vec<&(String, usize)> {
        self.0.iter().filter(|(_, a)| *a == 0).collect()
    }

    /// A random signature with at least one constant.
    pub fn random(rng: &mut Rng8, max_symbols: usize, max_arity: usize) -> Self {
        let n = rng.gen_range(1..=max_symbols);
        let names = ["a", "b", "c", "f", "g", "h"];
        let mut entries = vec![(names[0].to_string(), 0)];
        for name in names.iter().take(n).skip(1) {
            entries.push((name.to_string(), rng.gen_range(0..=max_arity)));
        }
        Sig(entries)
    }
}

pub fn random_term(rng: &mut Rng8, sig: &Sig, vars: &[&str], depth: usize) -> Term {
    let leaf = depth == 0 || rng.gen_bool(0.3);
    if leaf {
        if !vars.is_empty() && rng.gen_bool(0.4) {
            return Term::var(*vars.choose(rng).unwrap());
        }
        let (name, _) = sig.constants().choose(rng).copied().unwrap();
        return Term::constant(name.clone());
    }
    let (name, arity) = sig.0.choose(rng).unwrap().clone();
    let args = (0..arity).map(|_| random_term(rng, sig, vars, depth - 1)).collect();
    Term::app(name, args)
}

pub fn random_ground_term(rng: &mut Rng8, sig: &Sig, depth: usize) -> Term {
    random_term(rng, sig, &[], depth)
}

/// Random rules; right-hand-side variables are drawn from the left-hand
/// side unless `extra_vars` is set, and variable left-hand sides appear
/// only when `var_lhs` is set.
pub fn random_trs(rng: &mut Rng8, sig: &Sig, rules: usize, depth: usize, var_lhs: bool, extra_vars: bool) -> Trs {
    let pool = ["x", "y", "z"];
    let mut out = Vec::new();
    while out.len() < rules {
        let lhs = if var_lhs && rng.gen_bool(0.1) {
            Term::var("x")
        } else {
            let t = random_term(rng, sig, &pool, depth);
            if t.is_var() {
                continue;
            }
            t
        };
        let lv = lhs.vars();
        let rhs = if extra_vars {
            random_term(rng, sig, &pool, depth)
        } else {
            let names: Vec<&str> = lv.iter().map(String::as_str).collect();
            random_term(rng, sig, &names, depth)
        };
        out.push(Rule::new(lhs, rhs));
    }
    Trs::new(out)
}

/// States reached by `t`, computed directly from the transition list.
pub fn oracle_states(a: &TreeAutomaton, t: &Term) -> BTreeSet<usize> {
    let Term::App(f, args) = t else { return BTreeSet::new() };
    let sub: Vec<BTreeSet<usize>> = args.iter().map(|u| oracle_states(a, u)).collect();
    let mut out: BTreeSet<usize> = a
        .transitions()
        .iter()
        .filter(|tr| &tr.symbol == f && tr.args.iter().zip(&sub).all(|(q, s)| s.contains(q)))
        .map(|tr| tr.target)
        .collect();
    loop {
        let more: Vec<usize> =
            a.epsilons().iter().filter(|(p, q)| out.contains(p) && !out.contains(q)).map(|e| e.1).collect();
        if more.is_empty() {
            return out;
        }
        out.extend(more);
    }
}

pub fn oracle_accepts(a: &TreeAutomaton, t: &Term) -> bool {
    oracle_states(a, t).iter().any(|q| a.is_final(*q))
}
