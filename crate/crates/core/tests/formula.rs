use std::collections::BTreeSet;

use linmodal::formula::{expand, is_core, metrics, parse, Formula, Signature};
use proptest::prelude::*;

fn sig() -> Signature {
    Signature::with_letters([("P", 1), ("R", 2), ("p", 0), ("q", 0)]).unwrap()
}

fn var() -> impl Strategy<Value = String> {
    prop_oneof![Just("x".to_string()), Just("y".to_string())]
}

fn leaf() -> impl Strategy<Value = Formula> {
    prop_oneof![
        Just(Formula::Bot),
        Just(Formula::Top),
        Just(Formula::prop("p")),
        Just(Formula::prop("q")),
        var().prop_map(|v| Formula::Atom("P".into(), vec![v])),
        (var(), var()).prop_map(|(a, b)| Formula::Atom("R".into(), vec![a, b])),
    ]
}

/// Every constructor except `next`, which has no expansion.
fn formula() -> impl Strategy<Value = Formula> {
    leaf().prop_recursive(5, 48, 3, |inner| {
        let b = || inner.clone().prop_map(Box::new);
        prop_oneof![
            (b(), b()).prop_map(|(a, c)| Formula::Implies(a, c)),
            b().prop_map(Formula::Box),
            (var(), b()).prop_map(|(v, a)| Formula::Forall(v, a)),
            b().prop_map(Formula::Not),
            prop::collection::vec(inner.clone(), 2..4).prop_map(Formula::And),
            prop::collection::vec(inner.clone(), 2..4).prop_map(Formula::Or),
            (b(), b()).prop_map(|(a, c)| Formula::Iff(a, c)),
            (var(), b()).prop_map(|(v, a)| Formula::Exists(v, a)),
            b().prop_map(Formula::Dia),
            b().prop_map(Formula::BoxPlus),
            b().prop_map(Formula::PDia1),
            b().prop_map(Formula::PDia2),
            b().prop_map(Formula::XBox),
            (0..4u32, b()).prop_map(|(n, a)| Formula::BoxIter(n, a)),
            (0..4u32, b()).prop_map(|(n, a)| Formula::DiaIter(n, a)),
            (0..3u32, b()).prop_map(|(n, a)| Formula::PDia1Iter(n, a)),
            (0..3u32, b()).prop_map(|(n, a)| Formula::PDia2Iter(n, a)),
            (0..3u32, b()).prop_map(|(n, a)| Formula::XBoxIter(n, a)),
        ]
    })
}

fn variables(f: &Formula) -> BTreeSet<String> {
    let mut out = BTreeSet::new();
    f.visit(&mut |g| match g {
        Formula::Atom(_, args) => out.extend(args.iter().cloned()),
        Formula::Forall(v, _) | Formula::Exists(v, _) => {
            out.insert(v.clone());
        }
        _ => {}
    });
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn sexpr_roundtrip(f in formula()) {
        let text = f.to_sexpr();
        prop_assert_eq!(parse(&text, &sig()).unwrap(), f);
    }

    #[test]
    fn expansion_is_core_and_idempotent(f in formula()) {
        let e = expand(&f).unwrap();
        prop_assert!(is_core(&e));
        prop_assert_eq!(expand(&e).unwrap(), e);
    }

    #[test]
    fn expansion_adds_only_operator_letters(f in formula()) {
        let e = expand(&f).unwrap();
        let before = f.letters();
        for (l, a) in e.letters() {
            let allowed = before.get(&l) == Some(&a) || matches!((l.as_str(), a), ("p", 0) | ("q", 0) | ("P", 1));
            prop_assert!(allowed, "letter {}:{} introduced", l, a);
        }
        let mut vars = variables(&f);
        // ⧈₂ quantifies x
        vars.insert("x".into());
        prop_assert!(variables(&e).is_subset(&vars));
        prop_assert_eq!(e.free_vars(), f.free_vars());
    }

    #[test]
    fn iterated_diamond_depths(f in formula(), n in 0..4u32) {
        let d = metrics(&f).unwrap().modal_depth;
        prop_assert_eq!(metrics(&Formula::pdia1_iter(n, f.clone())).unwrap().modal_depth, d + 2 * n);
        prop_assert_eq!(metrics(&Formula::boxplus(f.clone())).unwrap().modal_depth, d + 1);
        prop_assert_eq!(metrics(&Formula::box_iter(n, f)).unwrap().modal_depth, d + n);
    }

    #[test]
    fn modal_depth_and_free_vars_always_computable(f in formula()) {
        let m = metrics(&f).unwrap();
        prop_assert_eq!(m.free_variables, f.free_vars());
        prop_assert!(m.variables.iter().all(|v| v == "x" || v == "y"));
    }
}

#[test]
fn arity_mismatch_is_rejected() {
    assert!(parse("(P x y)", &sig()).is_err());
    assert!(parse("(R x)", &sig()).is_err());
    assert!(parse("(S x)", &sig()).is_err());
    assert!(parse("(P z)", &sig()).is_err());
}
