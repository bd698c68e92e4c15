use std::sync::Arc;

use super::*;
use crate::formula::{parse, Formula, Signature};
use crate::kripke::generators::{build_m0, build_m0_star};
use crate::kripke::{Domain, ExplicitInterpretation, Frame, ModelSource, PredicateModel, ReflexiveSet};
use crate::reductions::{gen_separation, Separation};
use crate::tiling::{PeriodicTiling, TileSet, TileType, TilingGrid};

fn two() -> (TileSet, PeriodicTiling) {
    let t = TileSet::new(vec![TileType::new(0, 1, 5, 5), TileType::new(1, 0, 6, 6)]).unwrap();
    let p = PeriodicTiling::new(&t, TilingGrid::from_fn(2, 1, |c, _| c)).unwrap();
    (t, p)
}

fn prop_model(frame: Frame, p_at: &[usize]) -> PredicateModel {
    let mut i = ExplicitInterpretation::new(1);
    for &w in p_at {
        i.insert(w as u64, 0, vec![]);
    }
    PredicateModel::new(
        frame,
        vec![("p".into(), 0)],
        Domain::Constant { elements: vec![0], truncated: false },
        Arc::new(i),
        ModelSource::Explicit,
    )
    .unwrap()
}

fn sig() -> Signature {
    Signature::with_letters([("p", 0), ("q", 0), ("M", 1), ("P0", 1), ("P1", 1), ("Succ", 2)]).unwrap()
}

fn f(src: &str) -> Formula {
    parse(src, &sig()).unwrap()
}

#[test]
fn kleene_tables() {
    use Verdict::*;
    assert_eq!(Unknown.and(False), False);
    assert_eq!(Unknown.or(True), True);
    assert_eq!(False.implies(Unknown), True);
    assert_eq!(Unknown.implies(True), True);
    assert_eq!(True.implies(Unknown), Unknown);
    assert_eq!(Unknown.not(), Unknown);
}

#[test]
fn eval2_basics() {
    let single = prop_model(Frame::explicit(1, &[]).unwrap(), &[]);
    assert!(eval2(&single, 0, &[], &f("(box bot)")).unwrap());
    let chain = prop_model(Frame::explicit(2, &[(0, 1)]).unwrap(), &[1]);
    assert!(eval2(&chain, 0, &[], &f("(dia p)")).unwrap());
    assert!(!eval2(&chain, 0, &[], &f("p")).unwrap());
}

#[test]
fn eval2_rejects_truncated_models() {
    let m = prop_model(Frame::nat(3, ReflexiveSet::All).unwrap(), &[0, 1, 2]);
    assert_eq!(eval2(&m, 0, &[], &f("p")), Err(CheckError::Incomplete));
}

#[test]
fn box_on_truncated_prefix_is_unknown() {
    let m = prop_model(Frame::nat(5, ReflexiveSet::All).unwrap(), &[0, 1, 2, 3, 4]);
    assert_eq!(eval3(&m, 0, &[], &f("(box p)")).unwrap().verdict, Verdict::Unknown);
    assert_eq!(eval3(&m, 0, &[], &f("(dia p)")).unwrap().verdict, Verdict::True);
    // closing the frame makes the prefix the whole model
    let closed = m.rebase(m.frame().closed()).unwrap_err();
    assert!(matches!(closed, crate::kripke::KripkeError::Invalid(_)));
}

#[test]
fn diamond_on_m0_traces_world_one() {
    let (t, p) = two();
    let m = build_m0(&t, &p, 20, 5).unwrap();
    let out = eval3(&m, 0, &[], &f("(dia p)")).unwrap();
    assert_eq!(out.verdict, Verdict::True);
    assert_eq!(out.trace, vec![TraceStep::World("1".into())]);
}

#[test]
fn tail_certificate_decides_boxes() {
    let (t, p) = two();
    let m = build_m0(&t, &p, 20, 5).unwrap();
    // -1 is never tiled anywhere, including beyond the horizon
    assert_eq!(eval3(&m, 0, &[], &f("(exists x (box (not (P0 x))))")).unwrap().verdict, Verdict::True);
    // p holds at some world but not everywhere
    let out = eval3(&m, 0, &[], &f("(box p)")).unwrap();
    assert_eq!(out.verdict, Verdict::False);
    assert_eq!(out.trace, vec![TraceStep::World("0".into())]);
    // the mark 3 sits at world 6 only
    assert_eq!(
        eval3(&m, 0, &[("x", 3)], &f("(box (-> (M x) (not p)))")).unwrap().verdict,
        Verdict::True
    );
}

#[test]
fn forall_over_truncated_domain() {
    let (t, p) = two();
    let m = build_m0(&t, &p, 20, 5).unwrap();
    // in-bound counterexample
    let out = eval3(&m, 0, &[], &f("(forall x (M x))")).unwrap();
    assert_eq!(out.verdict, Verdict::False);
    assert_eq!(out.trace, vec![TraceStep::Bind { var: "x".into(), value: -1 }]);
    // no counterexample in bound, but the domain continues
    assert_eq!(eval3(&m, 1, &[], &f("(forall x (not (P0 x)))")).unwrap().verdict, Verdict::True);
    assert_eq!(eval3(&m, 0, &[], &f("(forall x (-> (M x) (P0 x)))")).unwrap().verdict, Verdict::Unknown);
}

#[test]
fn complete_models_get_definite_verdicts() {
    let m = prop_model(Frame::explicit(3, &[(0, 1), (1, 2), (0, 2)]).unwrap(), &[2]);
    for src in ["(box p)", "(dia (box p))", "(-> (box p) p)", "(box (box bot))"] {
        let v = eval3(&m, 0, &[], &f(src)).unwrap().verdict;
        assert_eq!(v, Verdict::from_bool(eval2(&m, 0, &[], &f(src)).unwrap()), "{src}");
    }
}

#[test]
fn step_limit_is_an_error() {
    let (t, p) = two();
    let m = build_m0(&t, &p, 20, 5).unwrap();
    let mut c = Checker::new(&m, CheckOptions { step_limit: 10 }).unwrap();
    let id = c.add(&f("(forall x (box (dia (M x))))")).unwrap();
    assert_eq!(c.eval(id, 0, &[]), Err(CheckError::StepLimit(10)));
}

#[test]
fn assignment_errors() {
    let (t, p) = two();
    let m = build_m0(&t, &p, 20, 5).unwrap();
    assert_eq!(eval3(&m, 0, &[], &f("(M x)")).unwrap_err(), CheckError::Unassigned("x".into()));
    assert!(matches!(eval3(&m, 0, &[("x", 99)], &f("(M x)")), Err(CheckError::OutsideDomain { .. })));
    assert!(matches!(eval3(&m, 50, &[], &f("p")), Err(CheckError::NoSuchWorld(50))));
    assert_eq!(eval3(&m, 0, &[], &f("q")).unwrap_err(), CheckError::MissingLetter("q".into()));
}

#[test]
fn blackdiamond_on_m0() {
    let (t, p) = two();
    let m = build_m0(&t, &p, 20, 5).unwrap();
    let r = r_blackdiamond(&m, Marker::Sep).unwrap();
    assert!(r.get(0, 2) && !r.get(0, 1) && !r.get(0, 0) && !r.get(2, 2) && r.get(1, 2));
    assert!(r.is_irreflexive() && r.is_transitive());
    assert!(r.power(2).get(0, 4) && !r.power(2).get(0, 2));
    assert!(r_blackdiamond(&m, Marker::AllP).is_err());
}

#[test]
fn blackdiamond_two_on_star_blocks() {
    let (t, p) = two();
    let m = build_m0_star(&t, &p, 4, 6).unwrap();
    let r = r_blackdiamond(&m, Marker::AllP).unwrap();
    // s = 1: blocks of 10 worlds, w_{m+1} is s+4 steps away
    assert!(r.power(5).get(0, 10) && !r.power(6).get(0, 10));
}

#[test]
fn separation_search_examples() {
    let opts = SearchOptions::default();
    let irr = Frame::explicit(1, &[]).unwrap();
    let found = countermodel_search(&irr, &gen_separation(Separation::Ref), &opts).unwrap().unwrap();
    assert_eq!(found.world, 0);
    assert_eq!(found.enumerated, 1);
    let z = gen_separation(Separation::Z);
    for len in 2..=6 {
        let refl = Frame::nat(len, ReflexiveSet::All).unwrap();
        assert!(countermodel_search(&refl, &z, &opts).unwrap().is_some(), "reflexive {len}");
        let strict = Frame::nat(len, ReflexiveSet::None).unwrap();
        assert!(countermodel_search(&strict, &z, &opts).unwrap().is_none(), "irreflexive {len}");
    }
}

#[test]
fn search_guard() {
    let frame = Frame::nat(6, ReflexiveSet::All).unwrap();
    let opts = SearchOptions { max_interpretations: 3, ..SearchOptions::default() };
    let z = gen_separation(Separation::Z);
    assert_eq!(countermodel_search(&frame, &z, &opts).unwrap_err(), CheckError::SearchGuard(3));
}

#[test]
fn search_handles_monadic_letters() {
    // ∀x ◇P0(x) → ◇∀x P0(x) fails once two elements exist
    let frame = Frame::nat(3, ReflexiveSet::None).unwrap();
    let phi = f("(-> (forall x (dia (P0 x))) (dia (forall x (P0 x))))");
    let found = countermodel_search(&frame, &phi, &SearchOptions { max_domain: 3, ..Default::default() })
        .unwrap()
        .unwrap();
    assert_eq!(found.model.domain().at(0).len(), 2);
    assert!(!eval2(&found.model, found.world, &[], &phi).unwrap());
}

#[test]
fn artifact_report_lines() {
    let (t, p) = two();
    let m = build_m0(&t, &p, 30, 6).unwrap();
    let a = crate::reductions::gen_base(&t);
    let rep = check_artifact(&m, &a, 0, CheckOptions::default()).unwrap();
    assert!(!rep.has_false());
    let text = rep.to_string();
    assert!(text.lines().count() == 10);
    assert!(text.starts_with("A_0: TRUE ("));
    assert!(text.contains("A_4: UNKNOWN (no False subverdict; "));
}
