//! Random models and formulas shared by the evaluator tests.
#![allow(dead_code)]

use std::collections::BTreeSet;
use std::sync::Arc;

use linmodal::checker::{eval2, CheckOptions, Checker, Verdict};
use linmodal::formula::Formula;
use linmodal::kripke::generators::{build_m0, build_m0_prime, build_m0_star};
use linmodal::kripke::{Domain, ExplicitInterpretation, Frame, ModelSource, PredicateModel, ReflexiveSet};
use linmodal::tiling::{PeriodicTiling, TileSet, TileType, TilingGrid};
use rand::seq::SliceRandom;
use rand::Rng;

pub const VARS: [&str; 2] = ["x", "y"];

pub fn random_formula(rng: &mut impl Rng, depth: u32, letters: &[(String, usize)]) -> Formula {
    let var = |rng: &mut dyn rand::RngCore| VARS[rng.gen_range(0..2)].to_string();
    if depth == 0 || rng.gen_bool(0.2) {
        if rng.gen_bool(0.1) {
            return Formula::Bot;
        }
        let (l, a) = letters.choose(rng).unwrap();
        return Formula::Atom(l.clone(), (0..*a).map(|_| var(rng)).collect());
    }
    let sub = |rng: &mut _| random_formula(rng, depth - 1, letters);
    match rng.gen_range(0..10) {
        0 | 1 => Formula::implies(sub(rng), sub(rng)),
        2 => Formula::not(sub(rng)),
        3 => Formula::and2(sub(rng), sub(rng)),
        4 => Formula::or2(sub(rng), sub(rng)),
        5 => Formula::boxed(sub(rng)),
        6 => Formula::dia(sub(rng)),
        7 => Formula::forall(&var(rng), sub(rng)),
        8 => Formula::exists(&var(rng), sub(rng)),
        _ => Formula::boxplus(sub(rng)),
    }
}

pub fn small_letters() -> Vec<(String, usize)> {
    vec![("P".into(), 1), ("R".into(), 2), ("p".into(), 0), ("q".into(), 0)]
}

fn random_interp(rng: &mut impl Rng, worlds: usize, letters: &[(String, usize)], elems: &[i64]) -> ExplicitInterpretation {
    let mut ex = ExplicitInterpretation::new(letters.len());
    let density = rng.gen_range(0.2..0.8);
    for w in 0..worlds {
        for (l, (_, a)) in letters.iter().enumerate() {
            let tuples: Vec<Vec<i64>> = match a {
                0 => vec![vec![]],
                1 => elems.iter().map(|&e| vec![e]).collect(),
                _ => elems.iter().flat_map(|&e| elems.iter().map(move |&f| vec![e, f])).collect(),
            };
            for t in tuples {
                if rng.gen_bool(density) {
                    ex.insert(w as u64, l, t);
                }
            }
        }
    }
    ex
}

/// A complete finite model: arbitrary relation or a closed chain, constant
/// or expanding domains.
pub fn random_complete_model(rng: &mut impl Rng) -> PredicateModel {
    let letters = small_letters();
    let n = rng.gen_range(1..=5);
    let frame = if rng.gen_bool(0.5) {
        let edges: Vec<(usize, usize)> =
            (0..n).flat_map(|w| (0..n).map(move |v| (w, v))).filter(|_| rng.gen_bool(0.35)).collect();
        Frame::explicit(n, &edges).unwrap()
    } else {
        let refl = match rng.gen_range(0..3) {
            0 => ReflexiveSet::All,
            1 => ReflexiveSet::None,
            _ => ReflexiveSet::Some((0..n).filter(|_| rng.gen_bool(0.5)).collect()),
        };
        Frame::nat(n, refl).unwrap().closed()
    };
    let d = rng.gen_range(1..=3);
    let elems: Vec<i64> = (0..d as i64).collect();
    let domain = if frame.is_linear() && rng.gen_bool(0.4) {
        // grows along the chain
        let mut at = Vec::new();
        let mut k = rng.gen_range(1..=d);
        for _ in 0..n {
            at.push((0..k as i64).collect());
            k = (k + rng.gen_range(0..2)).min(d);
        }
        Domain::PerWorld(at)
    } else {
        Domain::Constant { elements: elems.clone(), truncated: false }
    };
    let interp = random_interp(rng, n, &letters, &elems);
    PredicateModel::new(frame, letters, domain, Arc::new(interp), ModelSource::Explicit).unwrap()
}

fn assignments(model: &PredicateModel, w: usize, f: &Formula) -> Vec<Vec<(&'static str, i64)>> {
    let free: BTreeSet<String> = f.free_vars();
    let mut out = vec![vec![]];
    for v in VARS.iter().filter(|v| free.contains(**v)) {
        out = out
            .into_iter()
            .flat_map(|a: Vec<(&'static str, i64)>| {
                model.domain().at(w).iter().map(move |&e| {
                    let mut b = a.clone();
                    b.push((*v, e));
                    b
                })
            })
            .collect();
    }
    out
}

#[derive(Debug, Default)]
pub struct Agreement {
    pub models: usize,
    pub checked: u64,
    pub disagreements: Vec<String>,
}

/// eval2 against eval3 on `n` complete models, several formulas each.
pub fn agreement(rng: &mut impl Rng, n: usize) -> Agreement {
    let mut rep = Agreement { models: n, ..Agreement::default() };
    for _ in 0..n {
        let m = random_complete_model(rng);
        let mut c = Checker::new(&m, CheckOptions::default()).unwrap();
        for _ in 0..4 {
            let f = random_formula(rng, 4, m.letters());
            let id = c.add(&f).unwrap();
            for w in 0..m.frame().len() {
                for a in assignments(&m, w, &f) {
                    let two = eval2(&m, w, &a, &f).unwrap();
                    let three = c.eval(id, w, &a).unwrap();
                    rep.checked += 1;
                    if three != Verdict::from_bool(two) {
                        rep.disagreements.push(format!("{f} at {w} under {a:?}: eval2 {two}, eval3 {three}"));
                    }
                }
            }
        }
    }
    rep
}

pub fn two_tiles() -> (TileSet, PeriodicTiling) {
    let t = TileSet::new(vec![TileType::new(0, 1, 5, 5), TileType::new(1, 0, 6, 6)]).unwrap();
    let p = PeriodicTiling::new(&t, TilingGrid::from_fn(2, 1, |c, _| c)).unwrap();
    (t, p)
}

pub fn three_tiles() -> (TileSet, PeriodicTiling) {
    let t = TileSet::new(vec![TileType::new(0, 0, 1, 0), TileType::new(0, 0, 2, 1), TileType::new(0, 0, 0, 2)]).unwrap();
    let p = PeriodicTiling::new(&t, TilingGrid::from_fn(1, 3, |_, r| r)).unwrap();
    (t, p)
}

#[derive(Debug, Default)]
pub struct Monotonicity {
    pub pairs: usize,
    pub definite_both: u64,
    pub resolved: u64,
    pub flips: Vec<String>,
}

/// Nested prefixes of the generated witness models; verdicts at shared
/// worlds must never flip between True and False.
pub fn monotonicity(rng: &mut impl Rng, pairs: usize) -> Monotonicity {
    let mut rep = Monotonicity { pairs, ..Monotonicity::default() };
    let tilings = [two_tiles(), three_tiles()];
    for i in 0..pairs {
        let (t, p) = &tilings[i % 2];
        let bound = rng.gen_range(2..6);
        let (small, large) = match i % 3 {
            0 => {
                let h = rng.gen_range(4..14);
                (build_m0(t, p, h, bound).unwrap(), build_m0(t, p, h + rng.gen_range(1..12), bound + 2).unwrap())
            }
            1 => {
                let h = rng.gen_range(4..14);
                (
                    build_m0_prime(t, p, h, bound).unwrap(),
                    build_m0_prime(t, p, h + rng.gen_range(1..12), bound + 2).unwrap(),
                )
            }
            _ => {
                let b = rng.gen_range(1..3);
                (build_m0_star(t, p, b, bound).unwrap(), build_m0_star(t, p, b + 1, bound + 2).unwrap())
            }
        };
        let f = random_formula(rng, 4, small.letters());
        let mut cs = Checker::new(&small, CheckOptions::default()).unwrap();
        let mut cl = Checker::new(&large, CheckOptions::default()).unwrap();
        let (is, il) = (cs.add(&f).unwrap(), cl.add(&f).unwrap());
        for w in 0..small.frame().len().min(6) {
            for a in assignments(&small, w, &f) {
                let (vs, vl) = (cs.eval(is, w, &a).unwrap(), cl.eval(il, w, &a).unwrap());
                if vs.is_definite() && vl.is_definite() {
                    rep.definite_both += 1;
                    if vs != vl {
                        rep.flips.push(format!("{f} at {w} under {a:?}: {vs} then {vl}"));
                    }
                } else if vl.is_definite() {
                    rep.resolved += 1;
                } else if vs.is_definite() {
                    rep.flips.push(format!("{f} at {w} under {a:?}: {vs} became Unknown"));
                }
            }
        }
    }
    rep
}

/// Truncated views of complete chain models: a definite eval3 verdict on the
/// view must match eval2 on the whole model.
pub fn truncated_views(rng: &mut impl Rng, n: usize) -> (u64, Vec<String>) {
    let (mut definite, mut bad) = (0, Vec::new());
    let letters = small_letters();
    for _ in 0..n {
        let h = rng.gen_range(2..7);
        let d = rng.gen_range(2..4);
        let elems: Vec<i64> = (0..d).collect();
        let interp = Arc::new(random_interp(rng, h, &letters, &elems));
        let full = PredicateModel::new(
            Frame::nat(h, ReflexiveSet::All).unwrap().closed(),
            letters.clone(),
            Domain::Constant { elements: elems.clone(), truncated: false },
            interp.clone(),
            ModelSource::Explicit,
        )
        .unwrap();
        let hv = rng.gen_range(1..=h);
        let dv = rng.gen_range(1..=d) as usize;
        let view = PredicateModel::new(
            Frame::nat(hv, ReflexiveSet::All).unwrap(),
            letters.clone(),
            Domain::Constant { elements: elems[..dv].to_vec(), truncated: true },
            interp,
            ModelSource::Explicit,
        )
        .unwrap();
        let f = random_formula(rng, 4, &letters);
        let mut c = Checker::new(&view, CheckOptions::default()).unwrap();
        let id = c.add(&f).unwrap();
        for w in 0..hv {
            for a in assignments(&view, w, &f) {
                let v = c.eval(id, w, &a).unwrap();
                if let Some(b) = v.as_bool() {
                    definite += 1;
                    if b != eval2(&full, w, &a, &f).unwrap() {
                        bad.push(format!("{f} at {w} under {a:?}: view {v}"));
                    }
                }
            }
        }
    }
    (definite, bad)
}
