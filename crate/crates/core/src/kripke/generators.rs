//! The intended witness models of the reductions, built from a periodic
//! tiling `f`.
//!
//! * `𝔐₀` on `⟨ℕ, ≤⟩`: world `2m` carries row `m` of the tiling, odd worlds
//!   are the separators (`p`).
//! * `𝔐₀′`: `𝔐₀` without `Succ`; `P{s+1}` and `P{s+2}` pick out the pair
//!   `(αₘ, αₘ+1)` at `2m`, where `α = 0, 0,1, 0,1,2, …`.
//! * `𝔐₀*`: blocks of `2s+8` worlds per row, see [`StarLabeling`].
//! * ordinal and dense variants carrying `𝔐₀` on part of the frame.
//!
//! Every model truncates the domain to `{-1, …, K}`. Models on prefixes of
//! `ℕ` (and on the `ω`-copies of ordinals) come with a tail certificate:
//! past a computable point the valuation type over in-bound elements is
//! periodic, so a finite set of sample worlds covers the whole tail.

use std::sync::Arc;

use rustc_hash::FxHashSet;

use super::model::for_each_tuple;
use super::{
    Domain, Frame, FrameKind, Interpretation, KripkeError, ModelSource, PredicateModel, ReflexiveSet, TailCertificate,
    TailNode, ORDINAL_SHIFT,
};
use crate::reductions::letters;
use crate::tiling::{PeriodicTiling, TileSet};

/// `T(j) = j(j+1)/2`, the first index of block `j` of `α`.
pub fn alpha_block_start(j: u64) -> u64 {
    j * (j + 1) / 2
}

/// `α_k`: the sequence `0, 0,1, 0,1,2, 0,1,2,3, …`.
pub fn alpha(k: u64) -> u64 {
    // largest j with T(j) <= k
    let mut j = (((8 * k + 1) as f64).sqrt() as u64).saturating_sub(1) / 2;
    while alpha_block_start(j + 1) <= k {
        j += 1;
    }
    while alpha_block_start(j) > k {
        j -= 1;
    }
    k - alpha_block_start(j)
}

/// Smallest `k ≥ from` with `α_k = a`.
pub fn alpha_next(a: u64, from: u64) -> u64 {
    let mut j = a;
    loop {
        let k = alpha_block_start(j) + a;
        if k >= from {
            return k;
        }
        j += 1;
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Role {
    Succ,
    Mark,
    Sep,
    Tile(usize),
    Alpha,
    AlphaNext,
}

/// The interpretation of `𝔐₀` (and, with `prime`, of `𝔐₀′`) on world codes
/// `0, 1, 2, …`.
#[derive(Debug, Clone)]
struct GridRule {
    tiling: PeriodicTiling,
    roles: Vec<Role>,
}

impl GridRule {
    fn letters(s: usize, prime: bool) -> (Vec<(String, usize)>, Vec<Role>) {
        let mut names = Vec::new();
        let mut roles = Vec::new();
        if !prime {
            names.push((letters::SUCC.to_string(), 2));
            roles.push(Role::Succ);
        }
        names.push((letters::MARK.to_string(), 1));
        roles.push(Role::Mark);
        names.push((letters::SEP.to_string(), 0));
        roles.push(Role::Sep);
        for t in 0..=s {
            names.push((letters::tile(t), 1));
            roles.push(Role::Tile(t));
        }
        if prime {
            names.push((letters::tile(s + 1), 1));
            roles.push(Role::Alpha);
            names.push((letters::tile(s + 2), 1));
            roles.push(Role::AlphaNext);
        }
        (names, roles)
    }

    fn role_holds(&self, w: u64, role: Role, args: &[i64]) -> bool {
        let even = w % 2 == 0;
        let m = w / 2;
        match role {
            Role::Succ => even && args[1] == args[0] + 1,
            Role::Sep => !even,
            Role::Mark => w as i128 == 2 * args[0] as i128,
            Role::Tile(t) => even && args[0] >= 0 && self.tiling.tile(args[0] as u64, m) == t,
            Role::Alpha => even && args[0] == alpha(m) as i64,
            Role::AlphaNext => even && args[0] == alpha(m) as i64 + 1,
        }
    }

    fn row_lacks(&self, m: u64, t: usize) -> bool {
        (0..self.tiling.horizontal_period() as u64).all(|a| self.tiling.tile(a, m) != t)
    }

    fn role_forall(&self, w: u64, role: Role, negated: bool) -> Option<bool> {
        let odd = w % 2 == 1;
        match (role, negated) {
            (Role::Succ | Role::Sep, _) => None,
            // -1 carries no tile and at most one element is marked
            (_, false) => Some(false),
            (Role::Tile(t), true) => Some(odd || self.row_lacks(w / 2, t)),
            (_, true) => Some(odd),
        }
    }
}

impl Interpretation for GridRule {
    fn holds(&self, w: u64, letter: usize, args: &[i64]) -> bool {
        self.role_holds(w, self.roles[letter], args)
    }

    fn forall_atom(&self, w: u64, letter: usize, negated: bool) -> Option<bool> {
        self.role_forall(w, self.roles[letter], negated)
    }
}

/// Worlds of `𝔐₀*`: per row `m` a block `w_m, w̄_m, v^{s+2}_m, v̄^{s+2}_m, …,
/// v^0_m, v̄^0_m` of `2s+8` consecutive naturals.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StarLabeling {
    pub s: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum StarWorld {
    W(u64),
    WBar(u64),
    V(usize, u64),
    VBar(usize, u64),
}

impl StarLabeling {
    pub fn block_len(&self) -> u64 {
        2 * self.s as u64 + 8
    }

    pub fn encode(&self, w: StarWorld) -> u64 {
        let b = self.block_len();
        match w {
            StarWorld::W(m) => b * m,
            StarWorld::WBar(m) => b * m + 1,
            StarWorld::V(n, m) => b * m + 2 + 2 * (self.s + 2 - n) as u64,
            StarWorld::VBar(n, m) => b * m + 3 + 2 * (self.s + 2 - n) as u64,
        }
    }

    pub fn decode(&self, u: u64) -> StarWorld {
        let b = self.block_len();
        let (m, off) = (u / b, u % b);
        match off {
            0 => StarWorld::W(m),
            1 => StarWorld::WBar(m),
            _ => {
                let idx = (off - 2) as usize;
                let n = self.s + 2 - idx / 2;
                if idx % 2 == 0 {
                    StarWorld::V(n, m)
                } else {
                    StarWorld::VBar(n, m)
                }
            }
        }
    }

    pub fn is_barred(&self, u: u64) -> bool {
        matches!(self.decode(u), StarWorld::WBar(_) | StarWorld::VBar(..))
    }
}

#[derive(Debug, Clone)]
struct StarRule {
    prime: GridRule,
    labels: StarLabeling,
}

const STAR_Q: usize = 1;

impl StarRule {
    // the role of P_n in the primed model
    fn prime_role(&self, n: usize) -> Role {
        let s = self.labels.s;
        if n <= s {
            Role::Tile(n)
        } else if n == s + 1 {
            Role::Alpha
        } else {
            Role::AlphaNext
        }
    }
}

impl Interpretation for StarRule {
    fn holds(&self, u: u64, letter: usize, args: &[i64]) -> bool {
        let w = self.labels.decode(u);
        if letter == STAR_Q {
            return matches!(w, StarWorld::W(_));
        }
        match w {
            StarWorld::W(m) => args[0] == m as i64,
            StarWorld::WBar(_) | StarWorld::VBar(..) => true,
            StarWorld::V(n, m) => self.prime.role_holds(2 * m, self.prime_role(n), args),
        }
    }

    fn forall_atom(&self, u: u64, letter: usize, negated: bool) -> Option<bool> {
        if letter == STAR_Q {
            return None;
        }
        let w = self.labels.decode(u);
        Some(match (w, negated) {
            (StarWorld::WBar(_) | StarWorld::VBar(..), neg) => !neg,
            (_, false) => false,
            (StarWorld::W(_), true) => false,
            (StarWorld::V(n, m), true) => match self.prime_role(n) {
                Role::Tile(t) => self.prime.row_lacks(m, t),
                _ => false,
            },
        })
    }
}

/// Carries a base interpretation on part of the frame and nothing elsewhere.
#[derive(Debug, Clone)]
struct Embedded {
    inner: GridRule,
    /// World code to base world, for the dense frame.
    by_code: Option<Vec<Option<u64>>>,
}

impl Embedded {
    fn base(&self, code: u64) -> Option<u64> {
        match &self.by_code {
            Some(map) => map.get(code as usize).copied().flatten(),
            None => (code >> ORDINAL_SHIFT == 0).then_some(code),
        }
    }
}

impl Interpretation for Embedded {
    fn holds(&self, code: u64, letter: usize, args: &[i64]) -> bool {
        self.base(code).is_some_and(|w| self.inner.holds(w, letter, args))
    }

    fn forall_atom(&self, code: u64, letter: usize, negated: bool) -> Option<bool> {
        match self.base(code) {
            Some(w) => self.inner.forall_atom(w, letter, negated),
            None if self.inner.roles[letter] == Role::Succ || self.inner.arity(letter) != 1 => None,
            None => Some(negated),
        }
    }
}

impl GridRule {
    fn arity(&self, letter: usize) -> usize {
        match self.roles[letter] {
            Role::Succ => 2,
            Role::Sep => 0,
            _ => 1,
        }
    }
}

fn check_tiling(tiles: &TileSet, tiling: &PeriodicTiling) -> Result<(), KripkeError> {
    tiling.block().validate(tiles).map_err(|e| KripkeError::Invalid(e.to_string()))
}

fn check_bound(bound: i64) -> Result<(), KripkeError> {
    if bound < 0 {
        return Err(KripkeError::Invalid("domain bound must be non-negative".into()));
    }
    Ok(())
}

fn params(tiles: &TileSet, tiling: &PeriodicTiling, extra: &[(&str, String)]) -> Vec<(String, String)> {
    let t: Vec<String> = tiles
        .tiles()
        .iter()
        .map(|t| format!("{},{},{},{}", t.left, t.right, t.up, t.down))
        .collect();
    let b = tiling.block();
    let cells: Vec<String> = (0..b.height())
        .flat_map(|r| (0..b.width()).map(move |c| (c, r)))
        .map(|(c, r)| b.get(c, r).to_string())
        .collect();
    let mut out = vec![
        ("tiles".to_string(), t.join(";")),
        ("block".to_string(), format!("{}x{}:{}", b.width(), b.height(), cells.join(","))),
    ];
    out.extend(extra.iter().map(|(k, v)| (k.to_string(), v.clone())));
    out
}

/// Valuation type of a world over `{-1, …, bound}` including the exact
/// `∀`-answers for monadic letters.
fn valuation_type(interp: &dyn Interpretation, letters: &[(String, usize)], bound: i64, code: u64) -> Vec<u8> {
    let elems: Vec<i64> = (-1..=bound).collect();
    let mut out = Vec::new();
    for (l, (_, arity)) in letters.iter().enumerate() {
        let mut buf = vec![0; *arity];
        for_each_tuple(&elems, &mut buf, 0, &mut |t| {
            out.push(interp.holds(code, l, t) as u8);
            true
        });
        if *arity == 1 {
            for neg in [false, true] {
                out.push(interp.forall_atom(code, l, neg).map_or(2, |b| b as u8));
            }
        }
    }
    out
}

fn tail_nodes(
    interp: &dyn Interpretation,
    letters: &[(String, usize)],
    bound: i64,
    transient: impl Iterator<Item = u64>,
    recurrent: impl Iterator<Item = u64>,
) -> Vec<TailNode> {
    let mut seen = FxHashSet::default();
    let mut out = Vec::new();
    for code in recurrent {
        if seen.insert(valuation_type(interp, letters, bound, code)) {
            out.push(TailNode { code, recurrent: true });
        }
    }
    for code in transient {
        if seen.insert(valuation_type(interp, letters, bound, code)) {
            out.push(TailNode { code, recurrent: false });
        }
    }
    out
}

fn m0_tail(rule: &GridRule, names: &[(String, usize)], horizon: u64, bound: i64) -> Vec<TailNode> {
    let pv = rule.tiling.vertical_period() as u64;
    let m0 = (bound as u64 + 1).max(horizon.div_ceil(2));
    tail_nodes(rule, names, bound, horizon..2 * m0, 2 * m0..2 * (m0 + pv))
}

/// First `α`-block index from which valuation types over `{-1, …, bound}`
/// repeat with period `2·pv` blocks, not before row `min_row`.
fn alpha_regime(bound: i64, pv: u64, min_row: u64) -> u64 {
    let mut j = bound as u64 + 1 + pv;
    while alpha_block_start(j) < min_row {
        j += 1;
    }
    j
}

fn m0_prime_tail(rule: &GridRule, names: &[(String, usize)], horizon: u64, bound: i64) -> Vec<TailNode> {
    let pv = rule.tiling.vertical_period() as u64;
    let j0 = alpha_regime(bound, pv, horizon.div_ceil(2));
    let (r0, r1) = (alpha_block_start(j0), alpha_block_start(j0 + 2 * pv));
    tail_nodes(rule, names, bound, horizon..2 * r0, 2 * r0..2 * r1)
}

/// `𝔐₀` on `{0, …, horizon-1}` with domain `{-1, …, bound}`.
pub fn build_m0(tiles: &TileSet, tiling: &PeriodicTiling, horizon: usize, bound: i64) -> Result<PredicateModel, KripkeError> {
    check_tiling(tiles, tiling)?;
    check_bound(bound)?;
    let (names, roles) = GridRule::letters(tiles.s(), false);
    let rule = GridRule { tiling: tiling.clone(), roles };
    let tail = m0_tail(&rule, &names, horizon as u64, bound);
    let source = ModelSource::Generated {
        generator: "M0".into(),
        params: params(tiles, tiling, &[("horizon", horizon.to_string()), ("bound", bound.to_string())]),
    };
    PredicateModel::new(Frame::nat(horizon, ReflexiveSet::All)?, names, Domain::bounded(bound), Arc::new(rule), source)?
        .with_tail(TailCertificate { segments: vec![Some(tail)] })
}

/// `𝔐₀′` on `{0, …, horizon-1}`.
pub fn build_m0_prime(
    tiles: &TileSet,
    tiling: &PeriodicTiling,
    horizon: usize,
    bound: i64,
) -> Result<PredicateModel, KripkeError> {
    check_tiling(tiles, tiling)?;
    check_bound(bound)?;
    let (names, roles) = GridRule::letters(tiles.s(), true);
    let rule = GridRule { tiling: tiling.clone(), roles };
    let tail = m0_prime_tail(&rule, &names, horizon as u64, bound);
    let source = ModelSource::Generated {
        generator: "M0prime".into(),
        params: params(tiles, tiling, &[("horizon", horizon.to_string()), ("bound", bound.to_string())]),
    };
    PredicateModel::new(Frame::nat(horizon, ReflexiveSet::All)?, names, Domain::bounded(bound), Arc::new(rule), source)?
        .with_tail(TailCertificate { segments: vec![Some(tail)] })
}

/// `𝔐₀*` on the first `blocks` rows, i.e. `blocks·(2s+8)` worlds.
pub fn build_m0_star(
    tiles: &TileSet,
    tiling: &PeriodicTiling,
    blocks: usize,
    bound: i64,
) -> Result<PredicateModel, KripkeError> {
    check_tiling(tiles, tiling)?;
    check_bound(bound)?;
    if blocks == 0 {
        return Err(KripkeError::Invalid("at least one block required".into()));
    }
    let s = tiles.s();
    let (_, roles) = GridRule::letters(s, true);
    let labels = StarLabeling { s };
    let rule = StarRule { prime: GridRule { tiling: tiling.clone(), roles }, labels };
    let names = vec![(letters::P.to_string(), 1), (letters::Q.to_string(), 0)];
    let b = labels.block_len();
    let pv = tiling.vertical_period() as u64;
    let j0 = alpha_regime(bound, pv, blocks as u64);
    let (r0, r1) = (alpha_block_start(j0), alpha_block_start(j0 + 2 * pv));
    let tail = tail_nodes(&rule, &names, bound, blocks as u64 * b..r0 * b, r0 * b..r1 * b);
    let source = ModelSource::Generated {
        generator: "M0star".into(),
        params: params(tiles, tiling, &[("blocks", blocks.to_string()), ("bound", bound.to_string())]),
    };
    let horizon = blocks * b as usize;
    PredicateModel::new(Frame::nat(horizon, ReflexiveSet::All)?, names, Domain::bounded(bound), Arc::new(rule), source)?
        .with_tail(TailCertificate { segments: vec![Some(tail)] })
}

/// `ω·m + k` under `≤`: the first copy carries `𝔐₀`, every other world has
/// empty extensions.
pub fn build_ordinal(
    tiles: &TileSet,
    tiling: &PeriodicTiling,
    m: usize,
    k: usize,
    copy_len: usize,
    bound: i64,
) -> Result<PredicateModel, KripkeError> {
    check_tiling(tiles, tiling)?;
    check_bound(bound)?;
    if m == 0 {
        return Err(KripkeError::Invalid("the ordinal needs at least one ω-copy".into()));
    }
    let frame = Frame::ordinal(m, k, copy_len)?;
    let (names, roles) = GridRule::letters(tiles.s(), false);
    let inner = GridRule { tiling: tiling.clone(), roles };
    let mut segments = vec![Some(m0_tail(&inner, &names, copy_len as u64, bound))];
    let rule = Embedded { inner, by_code: None };
    for c in 1..m {
        let code = ((c as u64) << ORDINAL_SHIFT) | copy_len as u64;
        segments.push(Some(vec![TailNode { code, recurrent: true }]));
    }
    if k > 0 {
        segments.push(None);
    }
    let source = ModelSource::Generated {
        generator: "ordinal".into(),
        params: params(
            tiles,
            tiling,
            &[("m", m.to_string()), ("k", k.to_string()), ("copy", copy_len.to_string()), ("bound", bound.to_string())],
        ),
    };
    PredicateModel::new(frame, names, Domain::bounded(bound), Arc::new(rule), source)?
        .with_tail(TailCertificate { segments })
}

/// A dense frame: chain world `k` carries world `k` of `𝔐₀`, every other
/// world copies the least chain world above it, worlds above the whole
/// chain are empty. No tail certificate.
pub fn build_dense(
    tiles: &TileSet,
    tiling: &PeriodicTiling,
    chain_len: usize,
    fill: usize,
    bound: i64,
) -> Result<PredicateModel, KripkeError> {
    check_tiling(tiles, tiling)?;
    check_bound(bound)?;
    let frame = Frame::dense(chain_len, fill)?;
    let chain = frame.chain().to_vec();
    let map = (0..frame.len())
        .map(|w| chain.iter().position(|&c| w <= c).map(|k| k as u64))
        .collect();
    let (names, roles) = GridRule::letters(tiles.s(), false);
    let rule = Embedded { inner: GridRule { tiling: tiling.clone(), roles }, by_code: Some(map) };
    let source = ModelSource::Generated {
        generator: "dense".into(),
        params: params(
            tiles,
            tiling,
            &[("chain", chain_len.to_string()), ("fill", fill.to_string()), ("bound", bound.to_string())],
        ),
    };
    PredicateModel::new(frame, names, Domain::bounded(bound), Arc::new(rule), source)
}

/// How far the intended witness reaches: rows and columns of the tiling
/// that are readable from the materialized part.
pub fn star_blocks_for_columns(cols: usize) -> usize {
    // the successor of column c-2 is certified at the first block k >= 1
    // with α_k = c-2, and needs one more block above it
    if cols < 2 {
        return 2;
    }
    alpha_next(cols as u64 - 2, 1) as usize + 2
}

impl FrameKind {
    pub fn is_nat_like(&self) -> bool {
        matches!(self, FrameKind::Nat { .. } | FrameKind::Gn { .. } | FrameKind::Hn { .. })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tiling::{TileType, TilingGrid};

    fn two() -> (TileSet, PeriodicTiling) {
        let t = TileSet::new(vec![TileType::new(0, 1, 5, 5), TileType::new(1, 0, 6, 6)]).unwrap();
        let p = PeriodicTiling::new(&t, TilingGrid::from_fn(2, 1, |c, _| c)).unwrap();
        (t, p)
    }

    #[test]
    fn alpha_sequence() {
        let first: Vec<u64> = (0..10).map(alpha).collect();
        assert_eq!(first, [0, 0, 1, 0, 1, 2, 0, 1, 2, 3]);
        for k in 0..2000 {
            assert_eq!(alpha_next(alpha(k), k), k);
        }
        assert_eq!(alpha_next(6, 1), 27);
        assert_eq!(alpha_next(0, 1), 1);
    }

    #[test]
    fn star_labels_roundtrip() {
        for s in 0..4 {
            let l = StarLabeling { s };
            for u in 0..200 {
                assert_eq!(l.encode(l.decode(u)), u);
            }
            assert_eq!(l.decode(l.block_len() * 3 + 2), StarWorld::V(s + 2, 3));
            assert_eq!(l.decode(l.block_len() * 4 - 1), StarWorld::VBar(0, 3));
        }
    }

    #[test]
    fn m0_interpretation() {
        let (t, p) = two();
        let m = build_m0(&t, &p, 20, 5).unwrap();
        assert!(m.holds_named(4, "Succ", &[3, 4]) && !m.holds_named(5, "Succ", &[3, 4]));
        assert!(m.holds_named(6, "M", &[3]) && !m.holds_named(6, "M", &[2]));
        assert!(m.holds_named(7, "p", &[]));
        assert!(m.holds_named(2, "P1", &[1]) && !m.holds_named(2, "P1", &[-1]));
        assert!(!m.tail().unwrap().segments[0].as_ref().unwrap().is_empty());
        assert!(m.check_domains().is_ok());
    }

    #[test]
    fn prime_and_star_interpretation() {
        let (t, p) = two();
        let m = build_m0_prime(&t, &p, 40, 6).unwrap();
        assert!(m.holds_named(2 * 5, "P2", &[2]) && m.holds_named(2 * 5, "P3", &[3]));
        // the element -1 never carries the pair letters
        assert!((0..40).all(|w| !m.holds_named(w, "P2", &[-1])));
        let st = build_m0_star(&t, &p, 4, 6).unwrap();
        let l = StarLabeling { s: 1 };
        let code = |w| l.encode(w) as usize;
        assert!(st.holds_named(code(StarWorld::W(2)), "q", &[]));
        assert!(st.holds_named(code(StarWorld::W(2)), "P", &[2]));
        assert!(st.holds_named(code(StarWorld::VBar(1, 2)), "P", &[-1]));
        assert!(st.holds_named(code(StarWorld::V(1, 2)), "P", &[1]));
        assert!(st.holds_named(code(StarWorld::V(2, 2)), "P", &[alpha(2) as i64]));
        assert!(st.holds_named(code(StarWorld::V(3, 2)), "P", &[alpha(2) as i64 + 1]));
    }

    #[test]
    fn embedded_models() {
        let (t, p) = two();
        let o = build_ordinal(&t, &p, 2, 1, 10, 4).unwrap();
        assert!(o.holds_named(2, "M", &[1]));
        assert!(!o.holds_named(12, "M", &[1]));
        let d = build_dense(&t, &p, 4, 1, 4).unwrap();
        // chain world k = index 2k+1, the fill world before it copies it
        assert!(d.holds_named(5, "M", &[1]) && d.holds_named(4, "M", &[1]));
    }

    #[test]
    fn star_blocks() {
        assert_eq!(star_blocks_for_columns(8), 29);
    }
}
