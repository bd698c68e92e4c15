//! The step relation induced by `⧈` (and `⧈₂`) on a materialized prefix.

use std::fmt;

use super::CheckError;
use crate::kripke::PredicateModel;
use crate::reductions::letters;

/// A binary relation on `{0, …, n-1}` stored as bit rows.
#[derive(Clone, PartialEq, Eq)]
pub struct RelationTable {
    n: usize,
    words: usize,
    bits: Vec<u64>,
}

impl fmt::Debug for RelationTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("RelationTable").field("n", &self.n).field("pairs", &self.pair_count()).finish()
    }
}

impl RelationTable {
    pub fn empty(n: usize) -> Self {
        let words = n.div_ceil(64).max(1);
        RelationTable { n, words, bits: vec![0; n * words] }
    }

    pub fn identity(n: usize) -> Self {
        let mut r = Self::empty(n);
        for w in 0..n {
            r.insert(w, w);
        }
        r
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn insert(&mut self, w: usize, v: usize) {
        self.bits[w * self.words + v / 64] |= 1 << (v % 64);
    }

    pub fn get(&self, w: usize, v: usize) -> bool {
        self.bits[w * self.words + v / 64] >> (v % 64) & 1 == 1
    }

    fn row(&self, w: usize) -> &[u64] {
        &self.bits[w * self.words..(w + 1) * self.words]
    }

    pub fn successors(&self, w: usize) -> impl Iterator<Item = usize> + '_ {
        (0..self.n).filter(move |&v| self.get(w, v))
    }

    pub fn pair_count(&self) -> usize {
        self.bits.iter().map(|b| b.count_ones() as usize).sum()
    }

    /// `w (self ∘ other) v` iff `w self u` and `u other v` for some `u`.
    pub fn compose(&self, other: &RelationTable) -> RelationTable {
        assert_eq!(self.n, other.n, "relations on different sets");
        let mut out = RelationTable::empty(self.n);
        for w in 0..self.n {
            for u in self.successors(w) {
                let src = other.row(u);
                let dst = &mut out.bits[w * self.words..(w + 1) * self.words];
                for (d, s) in dst.iter_mut().zip(src) {
                    *d |= s;
                }
            }
        }
        out
    }

    /// `Rᵏ`, with `R⁰` the identity.
    pub fn power(&self, k: usize) -> RelationTable {
        (0..k).fold(RelationTable::identity(self.n), |acc, _| acc.compose(self))
    }

    pub fn is_irreflexive(&self) -> bool {
        (0..self.n).all(|w| !self.get(w, w))
    }

    pub fn is_transitive(&self) -> bool {
        let sq = self.compose(self);
        sq.bits.iter().zip(&self.bits).all(|(a, b)| a & !b == 0)
    }

    /// Whether row `w` meets the set given as a bit row.
    pub fn meets(&self, w: usize, set: &[u64]) -> bool {
        self.row(w).iter().zip(set).any(|(a, b)| a & b != 0)
    }

    /// A bit row for membership tests with [`RelationTable::meets`].
    pub fn set_of(&self, members: impl IntoIterator<Item = usize>) -> Vec<u64> {
        let mut row = vec![0; self.words];
        for v in members {
            row[v / 64] |= 1 << (v % 64);
        }
        row
    }
}

/// The marker of the pDiamond being tabulated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Marker {
    /// The proposition `p` (for `⧈`).
    Sep,
    /// `∀x P(x)` (for `⧈₂`).
    AllP,
}

fn marker_truth(model: &PredicateModel, marker: Marker) -> Result<Vec<bool>, CheckError> {
    let n = model.frame().len();
    match marker {
        Marker::Sep => {
            let l = model.letter_index(letters::SEP).ok_or_else(|| CheckError::MissingLetter(letters::SEP.into()))?;
            Ok((0..n).map(|w| model.holds(w, l, &[])).collect())
        }
        Marker::AllP => {
            let l = model.letter_index(letters::P).ok_or_else(|| CheckError::MissingLetter(letters::P.into()))?;
            (0..n)
                .map(|w| {
                    if let Some(b) = model.interpretation().forall_atom(model.frame().code(w), l, false) {
                        return Ok(b);
                    }
                    if model.domain().truncated() {
                        return Err(CheckError::Undecidable(format!("∀x P(x) at world {w} over a truncated domain")));
                    }
                    Ok(model.domain().at(w).iter().all(|&e| model.holds(w, l, &[e])))
                })
                .collect()
        }
    }
}

/// `w R v` iff `v` refutes the marker and `w R u R v` for some `u`
/// satisfying it, over the materialized worlds.
pub fn r_blackdiamond(model: &PredicateModel, marker: Marker) -> Result<RelationTable, CheckError> {
    let pi = marker_truth(model, marker)?;
    let frame = model.frame();
    let n = frame.len();
    let mut step = RelationTable::empty(n);
    for w in 0..n {
        for &v in frame.successors(w) {
            step.insert(w, v as usize);
        }
    }
    let mut marked = RelationTable::empty(n);
    for w in 0..n {
        for &u in frame.successors(w) {
            if pi[u as usize] {
                marked.insert(w, u as usize);
            }
        }
    }
    let mut r = marked.compose(&step);
    let unmarked = r.set_of((0..n).filter(|&v| !pi[v]));
    for w in 0..n {
        for (d, m) in r.bits[w * r.words..(w + 1) * r.words].iter_mut().zip(&unmarked) {
            *d &= m;
        }
    }
    Ok(r)
}
