mod common;

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};

use common::*;
use confcert::confluence::check_strongly_closed;
use confcert::critical::critical_pairs;
use confcert::nonjoin::{ArgumentFilter, FilterAction, FiniteAlgebra, NjCertificate, OrderSpec};
use confcert::poly::{eval_poly, poly_compare, prove_termination, LinearPoly, LinearPolyInterp, PolyOrder};
use confcert::tcap::tcap;
use confcert::unify::{match_term, unify};
use confcert::{parse_certificate, parse_term, Certificate, NonConfluenceProof, Position, Substitution, Term, Trs};
use num_bigint::BigUint;
use proptest::prelude::*;
use rand::Rng;

fn term_strategy() -> impl Strategy<Value = Term> {
    let leaf = prop_oneof![
        prop::sample::select(vec!["x", "y", "z"]).prop_map(Term::var),
        prop::sample::select(vec!["a", "b"]).prop_map(Term::constant),
    ];
    leaf.prop_recursive(4, 24, 2, |inner| {
        prop_oneof![
            inner.clone().prop_map(|t| Term::app("g", vec![t])),
            (inner.clone(), inner).prop_map(|(s, t)| Term::app("f", vec![s, t])),
        ]
    })
}

fn ground_strategy() -> impl Strategy<Value = Term> {
    let leaf = prop::sample::select(vec!["a", "b"]).prop_map(Term::constant);
    leaf.prop_recursive(3, 16, 2, |inner| {
        prop_oneof![
            inner.clone().prop_map(|t| Term::app("g", vec![t])),
            (inner.clone(), inner).prop_map(|(s, t)| Term::app("f", vec![s, t])),
        ]
    })
}

fn subst_strategy() -> impl Strategy<Value = Substitution> {
    prop::collection::vec(term_strategy(), 3).prop_map(|ts| {
        ["x", "y", "z"].iter().map(|x| x.to_string()).zip(ts).collect()
    })
}

fn poly_strategy() -> impl Strategy<Value = LinearPoly> {
    (0u64..5, prop::collection::vec(0u64..4, 3)).prop_map(|(c, cs)| {
        let mut p = LinearPoly::constant(c);
        for (x, k) in ["x", "y", "z"].iter().zip(cs) {
            if k > 0 {
                p.coeffs.insert(x.to_string(), BigUint::from(k));
            }
        }
        p
    })
}

fn valuation(rng: &mut Rng8) -> BTreeMap<String, BigUint> {
    ["x", "y", "z"].iter().map(|x| (x.to_string(), BigUint::from(rng.gen_range(0u32..50)))).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn unifiers_unify(s in term_strategy(), t in term_strategy()) {
        if let Some(sigma) = unify(&s, &t) {
            prop_assert_eq!(s.apply(&sigma), t.apply(&sigma));
            prop_assert!(sigma.is_idempotent());
        }
    }

    #[test]
    fn instances_are_unifiable_and_matched(s in term_strategy(), theta in subst_strategy()) {
        let t = s.apply(&theta);
        let renamed = t.map_vars(&mut |x| format!("{x}'"));
        prop_assert!(unify(&s, &renamed).is_some());
        let m = match_term(&s, &t);
        prop_assert!(m.is_some());
        prop_assert_eq!(s.apply(&m.unwrap()), t);
    }

    #[test]
    fn filters_commute_with_substitution(t in term_strategy(), sigma in subst_strategy(), keep in 0usize..4) {
        let pi = match keep {
            0 => ArgumentFilter::new().with("f", FilterAction::Keep(vec![0])),
            1 => ArgumentFilter::new().with("f", FilterAction::Keep(vec![1])).with("g", FilterAction::Keep(vec![])),
            2 => ArgumentFilter::new().with("f", FilterAction::Collapse(1)),
            _ => ArgumentFilter::new().with("g", FilterAction::Collapse(0)).with("f", FilterAction::Keep(vec![0, 1])),
        };
        let filtered_sigma: Substitution = sigma.iter().map(|(x, s)| (x.clone(), pi.apply(s).unwrap())).collect();
        prop_assert_eq!(pi.apply(&t.apply(&sigma)).unwrap(), pi.apply(&t).unwrap().apply(&filtered_sigma));
    }

    #[test]
    fn terms_print_and_reparse(t in term_strategy()) {
        let vars = BTreeSet::from(["x".to_string(), "y".to_string(), "z".to_string()]);
        prop_assert_eq!(parse_term(&t.to_string(), &vars).unwrap(), t);
    }

    #[test]
    fn ground_evaluation_ignores_valuation(t in ground_strategy(), table in prop::collection::vec(0usize..3, 9), u in 0usize..3) {
        let alg = FiniteAlgebra::new(3, OrderSpec::Natural, 0)
            .with("a", 0, &[1])
            .with("b", 0, &[2])
            .with("g", 1, &table[..3])
            .with("f", 2, &table);
        let v0 = alg.eval(&t, &|_| 0).unwrap();
        prop_assert_eq!(alg.eval(&t, &|_| u).unwrap(), v0);
    }

    #[test]
    fn strict_comparison_is_irreflexive(p in poly_strategy()) {
        prop_assert_ne!(poly_compare(&p, &p), PolyOrder::Greater);
        prop_assert_eq!(poly_compare(&p, &p), PolyOrder::GreaterEqual);
    }

    #[test]
    fn symbolic_comparison_is_sound(p in poly_strategy(), q in poly_strategy(), r in poly_strategy(), seed in any::<u64>()) {
        let mut g = rng(seed);
        for _ in 0..20 {
            let alpha = valuation(&mut g);
            let (vp, vq, vr) = (p.value(&alpha), q.value(&alpha), r.value(&alpha));
            match poly_compare(&p, &q) {
                PolyOrder::Greater => prop_assert!(vp > vq),
                PolyOrder::GreaterEqual => prop_assert!(vp >= vq),
                PolyOrder::Unknown => {}
            }
            if vp >= vq && vq > vr {
                prop_assert!(vp > vr);
            }
        }
    }
}

#[test]
fn strict_orientation_is_closed_under_substitution() {
    let mut g = rng(7);
    let sig = Sig::new(&[("a", 0), ("g", 1), ("f", 2)]);
    let interp = LinearPolyInterp::new().with("a", &[1]).with("g", &[1, 2]).with("f", &[0, 1, 3]);
    let mut checked = 0;
    for _ in 0..2000 {
        let s = random_term(&mut g, &sig, &["x", "y"], 3);
        let t = random_term(&mut g, &sig, &["x", "y"], 3);
        if poly_compare(&eval_poly(&interp, &s).unwrap(), &eval_poly(&interp, &t).unwrap()) != PolyOrder::Greater {
            continue;
        }
        checked += 1;
        let sigma: Substitution = ["x", "y"]
            .iter()
            .map(|x| (x.to_string(), random_term(&mut g, &sig, &["x", "y", "z"], 2)))
            .collect();
        let (ps, pt) = (eval_poly(&interp, &s.apply(&sigma)).unwrap(), eval_poly(&interp, &t.apply(&sigma)).unwrap());
        assert_eq!(poly_compare(&ps, &pt), PolyOrder::Greater, "{s} > {t} under {sigma}");
    }
    assert!(checked > 50);
}

#[test]
fn critical_pair_peaks_rewrite_to_both_components() {
    let mut g = rng(11);
    let mut seen = 0;
    for _ in 0..400 {
        let sig = Sig::random(&mut g, 4, 2);
        let n = g.gen_range(1..=3);
        let trs = random_trs(&mut g, &sig, n, 2, false, false);
        for cp in critical_pairs(&trs, false) {
            seen += 1;
            let reducts: Vec<Term> = oracle_steps(&trs, &cp.peak).into_iter().map(|(_, t)| t).collect();
            assert!(reducts.contains(&cp.left), "{trs}: {} -/-> {}", cp.peak, cp.left);
            assert!(reducts.contains(&cp.right), "{trs}: {} -/-> {}", cp.peak, cp.right);
        }
    }
    assert!(seen > 100, "only {seen} critical pairs generated");
}

#[test]
fn reducts_are_instances_of_tcap() {
    let mut g = rng(13);
    for _ in 0..300 {
        let sig = Sig::random(&mut g, 4, 2);
        let n = g.gen_range(1..=3);
        let trs = random_trs(&mut g, &sig, n, 2, true, false);
        let t = random_ground_term(&mut g, &sig, 3);
        let cap = tcap(&trs, &t);
        for u in oracle_reach(&trs, &t, 3, 500) {
            assert!(oracle_matches(&cap, &u), "{trs}: {u} is not an instance of tcap({t}) = {cap}");
        }
    }
}

/// Length of the longest derivation from `t`, or `None` once it exceeds
/// `limit`.
fn longest_run(trs: &Trs, t: &Term, limit: usize, memo: &mut HashMap<Term, usize>) -> Option<usize> {
    if let Some(&n) = memo.get(t) {
        return Some(n);
    }
    if limit == 0 {
        return if oracle_steps(trs, t).is_empty() { Some(0) } else { None };
    }
    let mut best = 0;
    for (_, u) in oracle_steps(trs, t) {
        best = best.max(1 + longest_run(trs, &u, limit - 1, memo)?);
    }
    memo.insert(t.clone(), best);
    Some(best)
}

#[test]
fn accepted_termination_proofs_have_no_long_runs() {
    let mut g = rng(17);
    let mut accepted = 0;
    for _ in 0..3000 {
        let sig = Sig::new(&[("a", 0), ("b", 0), ("g", 1), ("f", 2)]);
        let n = g.gen_range(1..=3);
        let trs = random_trs(&mut g, &sig, n, 2, false, false);
        let interp = LinearPolyInterp::new()
            .with("a", &[g.gen_range(0..3)])
            .with("b", &[g.gen_range(0..3)])
            .with("g", &[g.gen_range(0..3), g.gen_range(1..3)])
            .with("f", &[g.gen_range(0..3), g.gen_range(1..3), g.gen_range(1..3)]);
        if prove_termination(&trs, std::slice::from_ref(&interp)).is_err() {
            continue;
        }
        accepted += 1;
        for _ in 0..5 {
            let t = random_ground_term(&mut g, &sig, 2);
            let weight: usize = eval_poly(&interp, &t).unwrap().constant.try_into().unwrap();
            // every step strictly decreases the weight
            let run = longest_run(&trs, &t, weight, &mut HashMap::new());
            assert!(run.is_some(), "{trs}: a run from {t} exceeds {weight} steps");
        }
    }
    assert!(accepted > 20, "only {accepted} accepted");
}

fn peaks(trs: &Trs, s: &Term) -> Vec<(Term, Term)> {
    let side: Vec<Term> = oracle_reach(trs, s, 2, 200).into_iter().collect();
    let mut out = Vec::new();
    for (i, a) in side.iter().enumerate() {
        for b in &side[i..] {
            out.push((a.clone(), b.clone()));
        }
    }
    out
}

#[test]
fn strongly_closed_systems_join_small_peaks() {
    let mut g = rng(19);
    let mut accepted = 0;
    for _ in 0..600 {
        let sig = Sig::random(&mut g, 4, 2);
        let n = g.gen_range(1..=3);
        let trs = random_trs(&mut g, &sig, n, 2, false, false);
        if !trs.is_linear() {
            continue;
        }
        let bound = g.gen_range(0..=2);
        if check_strongly_closed(&trs, bound).is_err() {
            continue;
        }
        accepted += 1;
        for _ in 0..4 {
            let s = random_ground_term(&mut g, &sig, 2);
            let mut reach: HashMap<Term, HashSet<Term>> = HashMap::new();
            for (t1, t2) in peaks(&trs, &s).into_iter().take(10) {
                for t in [&t1, &t2] {
                    if !reach.contains_key(t) {
                        reach.insert(t.clone(), oracle_reach(&trs, t, bound + 2, 600));
                    }
                }
                assert!(
                    reach[&t1].iter().any(|u| reach[&t2].contains(u)),
                    "{trs}: peak {t1} <- {s} -> {t2} not joined"
                );
            }
        }
    }
    assert!(accepted > 20, "only {accepted} accepted");
}

#[test]
fn random_certificates_round_trip() {
    let mut g = rng(23);
    let sig = Sig::new(&[("a", 0), ("b", 0), ("g", 1), ("f", 2)]);
    for _ in 0..200 {
        let mut proof = match g.gen_range(0..4) {
            0 => NjCertificate::Tcap,
            1 => NjCertificate::DistinctNf,
            2 => NjCertificate::Discrimination(LinearPolyInterp::new().with("a", &[g.gen_range(0..9)]).with("f", &[1, 2, 3])),
            _ => NjCertificate::Model(FiniteAlgebra::new(2, OrderSpec::Equality, 1).with("g", 1, &[1, 0])),
        };
        for _ in 0..g.gen_range(0..3) {
            proof = match g.gen_range(0..3) {
                0 => NjCertificate::Usable(Box::new(proof)),
                1 => {
                    let sigma: Substitution = [("x".to_string(), random_ground_term(&mut g, &sig, 2))].into_iter().collect();
                    NjCertificate::Ground(sigma, Box::new(proof))
                }
                _ => NjCertificate::Filter(ArgumentFilter::new().with("f", FilterAction::Collapse(1)), Box::new(proof)),
            };
        }
        let cert = Certificate::NonConfluence(NonConfluenceProof::Fork {
            start: random_term(&mut g, &sig, &["x", "y"], 3),
            left: vec![confcert::rewrite::DerivationStep::new(Position(vec![g.gen_range(0..2)]), g.gen_range(0..5))],
            right: vec![],
            proof,
        });
        let printed = cert.to_string();
        assert_eq!(parse_certificate(&printed), Ok(cert), "{printed}");
    }
}
