//! The numbered properties of the witness models, restated as decidable
//! assertions over the materialized prefix and checked by direct
//! arithmetic on the generated interpretations. Where the formula behind a
//! property is cheap to state, its three-valued verdict is cross-checked
//! against the arithmetic answer.

use std::fmt;

use rustc_hash::FxHashMap;
use serde::Serialize;

use super::{r_blackdiamond, CheckError, CheckOptions, Checker, Marker, RelationTable, Verdict};
use crate::formula::Formula;
use crate::kripke::generators::{build_m0, build_m0_prime, build_m0_star, StarLabeling, StarWorld};
use crate::kripke::PredicateModel;
use crate::reductions::{gen_beta, letters};
use crate::tiling::{PeriodicTiling, TileSet};

const EXAMPLES: usize = 8;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PropertyReport {
    pub name: String,
    pub checked: u64,
    /// Instances whose data lies outside the materialized part.
    pub skipped: u64,
    pub violations: u64,
    pub examples: Vec<String>,
}

impl PropertyReport {
    fn new(name: &str) -> Self {
        PropertyReport { name: name.to_string(), checked: 0, skipped: 0, violations: 0, examples: Vec::new() }
    }

    pub fn ok(&self) -> bool {
        self.violations == 0
    }

    fn assert(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.checked += 1;
        if !ok {
            self.violations += 1;
            if self.examples.len() < EXAMPLES {
                self.examples.push(what());
            }
        }
    }
}

impl fmt::Display for PropertyReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let status = if self.ok() { "PASS" } else { "FAIL" };
        write!(f, "{}: {status} ({} checked, {} skipped, {} violations)", self.name, self.checked, self.skipped, self.violations)?;
        for e in &self.examples {
            write!(f, "\n  {e}")?;
        }
        Ok(())
    }
}

fn letter(model: &PredicateModel, name: &str) -> Result<usize, CheckError> {
    model.letter_index(name).ok_or_else(|| CheckError::MissingLetter(name.to_string()))
}

fn tile_letters(model: &PredicateModel) -> Vec<usize> {
    (0..).map_while(|t| model.letter_index(&letters::tile(t))).collect()
}

/// `a₀, a₁, …` read off world 0: `a₀` is the least marked tiled element,
/// `aₙ₊₁` the least `b` with `aₙ ◁ b`.
pub fn mark_sequence(model: &PredicateModel) -> Result<Vec<i64>, CheckError> {
    let m = letter(model, letters::MARK)?;
    let succ = letter(model, letters::SUCC)?;
    let tiles = tile_letters(model);
    let dom = model.domain().at(0).to_vec();
    let first = dom
        .iter()
        .copied()
        .find(|&a| model.holds(0, m, &[a]) && tiles.iter().any(|&t| model.holds(0, t, &[a])));
    let Some(mut a) = first else {
        return Err(CheckError::Undecidable("no tiled mark at world 0".into()));
    };
    let mut seq = vec![a];
    while let Some(b) = dom.iter().copied().find(|&b| model.holds(0, succ, &[a, b])) {
        if seq.contains(&b) {
            break;
        }
        seq.push(b);
        a = b;
    }
    Ok(seq)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OrderBounds {
    pub max_world: usize,
    /// Bound on the mark indices `n, m`.
    pub max_index: usize,
    pub max_j: usize,
}

impl Default for OrderBounds {
    fn default() -> Self {
        OrderBounds { max_world: 100, max_index: 10, max_j: 5 }
    }
}

/// Properties (1)–(5) on a model of `A` over `⟨ℕ, ≤⟩`, plus irreflexivity
/// and transitivity of `R_⧈`.
pub fn order_suite(model: &PredicateModel, b: &OrderBounds) -> Result<Vec<PropertyReport>, CheckError> {
    let seq = mark_sequence(model)?;
    let mk = letter(model, letters::MARK)?;
    let sep = letter(model, letters::SEP)?;
    let tiles = tile_letters(model);
    let h = model.frame().len();
    let worlds = 0..=b.max_world.min(h - 1);
    let r = r_blackdiamond(model, Marker::Sep)?;
    let r2 = r.compose(&r);
    let mark = |w: usize, a: i64| model.holds(w, mk, &[a]);
    let p = |w: usize| model.holds(w, sep, &[]);
    let a = |n: usize| seq.get(n).copied();

    let mut p1 = PropertyReport::new("(1) mark change");
    for w in worlds.clone() {
        for n in 0..=b.max_index {
            let (Some(an), Some(an1)) = (a(n), a(n + 1)) else {
                p1.skipped += 1;
                continue;
            };
            let lhs = mark(w, an);
            let rhs = !p(w) && r.successors(w).any(|v| mark(v, an1)) && r2.successors(w).all(|v| !mark(v, an1));
            p1.assert(lhs == rhs, || format!("w={w} n={n}: M(a_n)={lhs}, right side={rhs}"));
        }
    }

    // prefix counts of p for the "no v in between" premise
    let mut seps = vec![0usize; h + 1];
    for w in 0..h {
        seps[w + 1] = seps[w] + p(w) as usize;
    }
    let any_sep = |x: usize, y: usize| {
        let (lo, hi) = (x.min(y), x.max(y));
        seps[hi + 1] > seps[lo]
    };
    let mut p2 = PropertyReport::new("(2) mark persistence");
    for n in 0..=b.max_index {
        let Some(an) = a(n) else {
            p2.skipped += 1;
            continue;
        };
        for u in worlds.clone() {
            if !mark(u, an) || p(u) {
                p2.checked += (b.max_world.min(h - 1) + 1) as u64;
                continue;
            }
            for u2 in worlds.clone() {
                let premise = !p(u2) && !any_sep(u, u2);
                p2.assert(!premise || mark(u2, an), || format!("u={u} u'={u2} n={n}"));
            }
        }
    }

    let mut p3 = PropertyReport::new("(3) mark uniqueness");
    for w in worlds.clone() {
        for n in 0..=b.max_index {
            for j in 1..=b.max_j {
                let (Some(an), Some(anj)) = (a(n), a(n + j)) else {
                    p3.skipped += 1;
                    continue;
                };
                p3.assert(!(mark(w, an) && mark(w, anj)), || format!("w={w} n={n} j={j}"));
            }
        }
    }

    let mut p4 = PropertyReport::new("(4) marked worlds tile every a_n");
    let mut p5 = PropertyReport::new("(5) tile agreement between equally marked worlds");
    for m in 0..=b.max_index {
        let Some(am) = a(m) else {
            p4.skipped += 1;
            p5.skipped += 1;
            continue;
        };
        let marked_worlds: Vec<usize> = worlds.clone().filter(|&w| mark(w, am)).collect();
        for n in 0..=b.max_index {
            let Some(an) = a(n) else {
                p4.skipped += 1;
                p5.skipped += 1;
                continue;
            };
            for w in worlds.clone() {
                let ok = !mark(w, am) || tiles.iter().any(|&t| model.holds(w, t, &[an]));
                p4.assert(ok, || format!("w={w} m={m} n={n}: no tile"));
            }
            for &w in &marked_worlds {
                for &v in &marked_worlds {
                    for (t, &l) in tiles.iter().enumerate() {
                        let ok = !model.holds(w, l, &[an]) || model.holds(v, l, &[an]);
                        p5.assert(ok, || format!("w={w} v={v} m={m} n={n} t={t}"));
                    }
                }
            }
        }
    }

    let mut irr = PropertyReport::new("R_⧈ irreflexive");
    irr.assert(r.is_irreflexive(), || "some w R_⧈ w".into());
    let mut tr = PropertyReport::new("R_⧈ transitive");
    tr.assert(r.is_transitive(), || "R_⧈ ∘ R_⧈ ⊄ R_⧈".into());

    let cross = order_cross_check(model, &seq, b, &r, &r2)?;
    Ok(vec![p1, p2, p3, p4, p5, irr, tr, cross])
}

fn order_cross_check(
    model: &PredicateModel,
    seq: &[i64],
    b: &OrderBounds,
    r: &RelationTable,
    r2: &RelationTable,
) -> Result<PropertyReport, CheckError> {
    use Formula as F;
    let mut rep = PropertyReport::new("(1) three-valued agreement");
    let mut c = Checker::new(model, CheckOptions::default())?;
    let my = F::atom(letters::MARK, &["y"]);
    let rhs = F::And(vec![F::not(F::prop(letters::SEP)), F::pdia1(my.clone()), F::not(F::pdia1_iter(2, my))]);
    let rhs = c.add(&rhs)?;
    let mk = letter(model, letters::MARK)?;
    let sep = letter(model, letters::SEP)?;
    let h = model.frame().len();
    for w in 0..=b.max_world.min(h - 1) {
        for n in 0..=b.max_index.min(seq.len().saturating_sub(2)) {
            let (an, an1) = (seq[n], seq[n + 1]);
            let arith = !model.holds(w, sep, &[])
                && r.successors(w).any(|v| model.holds(v, mk, &[an1]))
                && r2.successors(w).all(|v| !model.holds(v, mk, &[an1]));
            match c.eval(rhs, w, &[("x", an), ("y", an1)])?.as_bool() {
                Some(v) => rep.assert(v == arith, || format!("w={w} n={n}: eval3 {v}, arithmetic {arith}")),
                None => rep.skipped += 1,
            }
        }
    }
    Ok(rep)
}

/// `βₙ(a)` at prefix worlds, computed from the `R_⧈₂` tables:
/// `⧈₂ᵏφ` holds at `v` iff `φ` holds somewhere in `Rᵏ(v)`.
pub struct ArithmeticBeta<'m> {
    model: &'m PredicateModel,
    s: usize,
    p: usize,
    powers: Vec<RelationTable>,
    marked: FxHashMap<i64, Vec<u64>>,
}

impl<'m> ArithmeticBeta<'m> {
    pub fn new(model: &'m PredicateModel, s: usize) -> Result<Self, CheckError> {
        let r = r_blackdiamond(model, Marker::AllP)?;
        let p = letter(model, letters::P)?;
        let q = letter(model, letters::Q)?;
        let mut powers = vec![RelationTable::identity(r.len())];
        for k in 1..=s + 5 {
            let next = powers[k - 1].compose(&r);
            powers.push(next);
        }
        let n = model.frame().len();
        let marked = model
            .domain()
            .universe()
            .into_iter()
            .map(|b| {
                let row = r.set_of((0..n).filter(|&u| model.holds(u, q, &[]) && model.holds(u, p, &[b])));
                (b, row)
            })
            .collect();
        Ok(ArithmeticBeta { model, s, p, powers, marked })
    }

    pub fn relation(&self) -> &RelationTable {
        &self.powers[1]
    }

    pub fn power(&self, k: usize) -> &RelationTable {
        &self.powers[k]
    }

    /// `⧈₂ᵏ(q ∧ P(b))` at `v`.
    pub fn reach(&self, k: usize, b: i64, v: usize) -> bool {
        self.marked.get(&b).is_some_and(|row| self.powers[k].meets(v, row))
    }

    pub fn beta(&self, n: usize, a: i64, v: usize) -> bool {
        let s = self.s;
        self.model.domain().at(v).iter().any(|&b| {
            self.reach(s + 4, b, v)
                && !self.reach(s + 5, b, v)
                && self.powers[1].successors(v).any(|v2| {
                    self.model.holds(v2, self.p, &[a]) && self.reach(n + 1, b, v2) && !self.reach(n + 2, b, v2)
                })
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StarBounds {
    pub max_m: usize,
    pub max_a: i64,
}

impl Default for StarBounds {
    fn default() -> Self {
        StarBounds { max_m: 8, max_a: 10 }
    }
}

/// Properties (6)–(8) relating a model of `A*` to the model of `A′` it was
/// built from, plus the block step and the shape of `R_⧈₂`.
pub fn star_suite(
    star: &PredicateModel,
    prime: &PredicateModel,
    s: usize,
    b: &StarBounds,
) -> Result<Vec<PropertyReport>, CheckError> {
    let labels = StarLabeling { s };
    let p = letter(star, letters::P)?;
    let q = letter(star, letters::Q)?;
    let h = star.frame().len();
    let world = |w: StarWorld| {
        let u = labels.encode(w) as usize;
        (u < h).then_some(u)
    };
    let elems: Vec<i64> = star.domain().at(0).iter().copied().filter(|&a| a <= b.max_a).collect();

    let mut p6 = PropertyReport::new("(6) q ∧ P(a) at w_m iff a = m");
    for m in 0..=b.max_m {
        let Some(wm) = world(StarWorld::W(m as u64)) else {
            p6.skipped += 1;
            continue;
        };
        for &a in &elems {
            let got = star.holds(wm, q, &[]) && star.holds(wm, p, &[a]);
            p6.assert(got == (a == m as i64), || format!("m={m} a={a}: {got}"));
        }
    }

    let mut p7 = PropertyReport::new("(7) ∀x P(x) exactly at barred worlds");
    for u in 0..h {
        let barred = labels.is_barred(star.frame().code(u));
        let in_bound = star.domain().at(u).iter().all(|&e| star.holds(u, p, &[e]));
        p7.assert(in_bound == barred, || format!("world {u}: in-bound ∀ {in_bound}, barred {barred}"));
        if let Some(o) = star.interpretation().forall_atom(star.frame().code(u), p, false) {
            p7.assert(o == barred, || format!("world {u}: exact ∀ {o}, barred {barred}"));
        }
    }

    let beta = ArithmeticBeta::new(star, s)?;
    let mut p8 = PropertyReport::new("(8) β_n(a) at w_m iff P_n(a) at 2m in the primed model");
    let mut p8x = PropertyReport::new("(8) three-valued agreement");
    let mut c = Checker::new(star, CheckOptions::default())?;
    let betas: Vec<_> = (0..=s + 2).map(|n| c.add(&gen_beta(n, "x", s))).collect::<Result<_, _>>()?;
    for m in 0..=b.max_m {
        let Some(wm) = world(StarWorld::W(m as u64)) else {
            p8.skipped += 1;
            continue;
        };
        for n in 0..=s + 2 {
            let pn = letter(prime, &letters::tile(n))?;
            for &a in &elems {
                let want = prime.holds(2 * m, pn, &[a]);
                let got = beta.beta(n, a, wm);
                p8.assert(got == want, || format!("m={m} n={n} a={a}: β {got}, P_n {want}"));
                match c.eval(betas[n], wm, &[("x", a)])? {
                    Verdict::Unknown => p8x.skipped += 1,
                    v => p8x.assert(v.as_bool() == Some(got), || format!("m={m} n={n} a={a}: eval3 {v}, arithmetic {got}")),
                }
            }
        }
    }

    let mut step = PropertyReport::new("w_{m+1} ∈ R^{s+4}(w_m) − R^{s+5}(w_m)");
    for m in 0..=b.max_m {
        match (world(StarWorld::W(m as u64)), world(StarWorld::W(m as u64 + 1))) {
            (Some(wm), Some(wn)) => {
                let ok = beta.power(s + 4).get(wm, wn) && !beta.power(s + 5).get(wm, wn);
                step.assert(ok, || format!("m={m}"));
            }
            _ => step.skipped += 1,
        }
    }

    let r = beta.relation();
    let mut irr = PropertyReport::new("R_⧈₂ irreflexive");
    irr.assert(r.is_irreflexive(), || "some w R_⧈₂ w".into());
    let mut tr = PropertyReport::new("R_⧈₂ transitive");
    tr.assert(r.is_transitive(), || "R_⧈₂ ∘ R_⧈₂ ⊄ R_⧈₂".into());

    Ok(vec![p6, p7, p8, p8x, step, irr, tr])
}

/// Sizes of the models the suites run on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SuiteConfig {
    pub horizon: usize,
    pub bound: i64,
    pub blocks: usize,
    pub order: OrderBounds,
    pub star: StarBounds,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig { horizon: 101, bound: 12, blocks: 10, order: OrderBounds::default(), star: StarBounds::default() }
    }
}

/// Builds the witness models for `tiling` and runs both suites.
pub fn run_suites(tiles: &TileSet, tiling: &PeriodicTiling, cfg: &SuiteConfig) -> Result<Vec<PropertyReport>, CheckError> {
    let m0 = build_m0(tiles, tiling, cfg.horizon, cfg.bound)?;
    let mut out = order_suite(&m0, &cfg.order)?;
    let star = build_m0_star(tiles, tiling, cfg.blocks, cfg.bound)?;
    let prime = build_m0_prime(tiles, tiling, (2 * cfg.blocks + 2).max(cfg.horizon), cfg.bound)?;
    out.extend(star_suite(&star, &prime, tiles.s(), &cfg.star)?);
    Ok(out)
}
