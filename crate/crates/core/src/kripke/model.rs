use std::fmt;
use std::sync::Arc;

use rustc_hash::FxHashSet;

use super::{Frame, KripkeError};
use crate::formula::Signature;

/// How predicate letters are interpreted. Worlds are given by their frame
/// code, letters by their index in the model's letter list.
pub trait Interpretation: Send + Sync + fmt::Debug {
    fn holds(&self, world: u64, letter: usize, args: &[i64]) -> bool;

    /// Exact truth value of `∀x L(x)` (or of `∀x ¬L(x)` when `negated`) at
    /// `world` over the *intended* domain, when the generator knows it.
    fn forall_atom(&self, _world: u64, _letter: usize, _negated: bool) -> Option<bool> {
        None
    }
}

/// Finite extension tables.
#[derive(Debug, Clone, Default)]
pub struct ExplicitInterpretation {
    facts: Vec<FxHashSet<(u64, Vec<i64>)>>,
}

impl ExplicitInterpretation {
    pub fn new(letters: usize) -> Self {
        ExplicitInterpretation { facts: vec![FxHashSet::default(); letters] }
    }

    pub fn insert(&mut self, world: u64, letter: usize, args: Vec<i64>) {
        self.facts[letter].insert((world, args));
    }

    /// All facts, sorted, for serialization.
    pub fn facts(&self) -> Vec<(u64, usize, Vec<i64>)> {
        let mut out: Vec<_> = self
            .facts
            .iter()
            .enumerate()
            .flat_map(|(l, set)| set.iter().map(move |(w, a)| (*w, l, a.clone())))
            .collect();
        out.sort();
        out
    }
}

impl Interpretation for ExplicitInterpretation {
    fn holds(&self, world: u64, letter: usize, args: &[i64]) -> bool {
        self.facts[letter].contains(&(world, args.to_vec()))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Domain {
    /// The same elements at every world. `truncated` means the intended
    /// domain is larger.
    Constant { elements: Vec<i64>, truncated: bool },
    /// Complete per-world domains (expanding along the relation).
    PerWorld(Vec<Vec<i64>>),
}

impl Domain {
    /// `{-1, …, bound}`, truncated.
    pub fn bounded(bound: i64) -> Domain {
        Domain::Constant { elements: (-1..=bound).collect(), truncated: true }
    }

    pub fn at(&self, w: usize) -> &[i64] {
        match self {
            Domain::Constant { elements, .. } => elements,
            Domain::PerWorld(v) => &v[w],
        }
    }

    pub fn truncated(&self) -> bool {
        matches!(self, Domain::Constant { truncated: true, .. })
    }

    /// Sorted union of all world domains.
    pub fn universe(&self) -> Vec<i64> {
        let mut u: Vec<i64> = match self {
            Domain::Constant { elements, .. } => elements.clone(),
            Domain::PerWorld(v) => v.iter().flatten().copied().collect(),
        };
        u.sort_unstable();
        u.dedup();
        u
    }
}

/// A world beyond the materialized prefix standing for every tail world
/// with the same valuation over in-bound elements.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TailNode {
    pub code: u64,
    /// The valuation type occurs above every tail world; otherwise it only
    /// occurs somewhere in the tail.
    pub recurrent: bool,
}

/// Valuation types covering every unmaterialized world of each truncated
/// segment. `segments[i]` belongs to `frame.segments()[i]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TailCertificate {
    pub segments: Vec<Option<Vec<TailNode>>>,
}

/// Provenance of a model, used for serialization and reports.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ModelSource {
    Explicit,
    Generated { generator: String, params: Vec<(String, String)> },
}

/// A predicate Kripke model (or a finite view of one).
#[derive(Debug, Clone)]
pub struct PredicateModel {
    frame: Frame,
    letters: Vec<(String, usize)>,
    domain: Domain,
    interp: Arc<dyn Interpretation>,
    tail: Option<TailCertificate>,
    source: ModelSource,
}

impl PredicateModel {
    pub fn new(
        frame: Frame,
        letters: Vec<(String, usize)>,
        domain: Domain,
        interp: Arc<dyn Interpretation>,
        source: ModelSource,
    ) -> Result<Self, KripkeError> {
        if let Domain::PerWorld(v) = &domain {
            if v.len() != frame.len() {
                return Err(KripkeError::Invalid("one domain per world required".into()));
            }
        }
        if (0..frame.len()).any(|w| domain.at(w).is_empty()) {
            return Err(KripkeError::Invalid("domains must be non-empty".into()));
        }
        let mut names: Vec<&str> = letters.iter().map(|(n, _)| n.as_str()).collect();
        names.sort_unstable();
        if names.windows(2).any(|w| w[0] == w[1]) {
            return Err(KripkeError::Invalid("duplicate letter".into()));
        }
        Ok(PredicateModel { frame, letters, domain, interp, tail: None, source })
    }

    /// Attaches a tail certificate; it must describe the frame's segments.
    pub fn with_tail(mut self, tail: TailCertificate) -> Result<Self, KripkeError> {
        let segs = self.frame.segments();
        if tail.segments.len() != segs.len()
            || tail.segments.iter().zip(segs).any(|(t, s)| t.is_some() && !s.truncated)
        {
            return Err(KripkeError::Invalid("tail certificate does not match the frame".into()));
        }
        self.tail = Some(tail);
        Ok(self)
    }

    /// The same interpretation on another frame with identical world codes
    /// and segment layout (for instance a different reflexive set).
    pub fn rebase(&self, frame: Frame) -> Result<Self, KripkeError> {
        let same = frame.len() == self.frame.len()
            && frame.segments() == self.frame.segments()
            && (0..frame.len()).all(|w| frame.code(w) == self.frame.code(w));
        if !same {
            return Err(KripkeError::Invalid("rebased frame must keep worlds and segments".into()));
        }
        let mut m = self.clone();
        m.frame = frame;
        Ok(m)
    }

    pub fn with_source(mut self, source: ModelSource) -> Self {
        self.source = source;
        self
    }

    /// Adds (or replaces) a recipe parameter of a generated model.
    pub fn with_param(mut self, key: &str, value: &str) -> Self {
        if let ModelSource::Generated { params, .. } = &mut self.source {
            params.retain(|(k, _)| k != key);
            params.push((key.to_string(), value.to_string()));
        }
        self
    }

    pub fn frame(&self) -> &Frame {
        &self.frame
    }

    pub fn letters(&self) -> &[(String, usize)] {
        &self.letters
    }

    pub fn letter_index(&self, name: &str) -> Option<usize> {
        self.letters.iter().position(|(n, _)| n == name)
    }

    pub fn signature(&self) -> Signature {
        let mut s = Signature::new();
        for (n, a) in &self.letters {
            // letters were validated on construction by the callers that
            // produce formulas for them; skip anything the parser rejects
            let _ = s.declare(n, *a);
        }
        s
    }

    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    pub fn interpretation(&self) -> &Arc<dyn Interpretation> {
        &self.interp
    }

    pub fn tail(&self) -> Option<&TailCertificate> {
        self.tail.as_ref()
    }

    pub fn source(&self) -> &ModelSource {
        &self.source
    }

    /// Truth of an atom at a prefix world.
    pub fn holds(&self, w: usize, letter: usize, args: &[i64]) -> bool {
        self.interp.holds(self.frame.code(w), letter, args)
    }

    pub fn holds_named(&self, w: usize, letter: &str, args: &[i64]) -> bool {
        self.letter_index(letter).is_some_and(|l| self.holds(w, l, args))
    }

    /// Whether nothing of the intended model is cut off.
    pub fn is_complete(&self) -> bool {
        !self.frame.is_truncated() && !self.domain.truncated()
    }

    /// Checks the expanding-domain condition and that atoms true at a world
    /// only mention elements of that world's domain. Generated models are
    /// checked on `-1 … bound` only.
    pub fn check_domains(&self) -> Result<(), KripkeError> {
        let f = &self.frame;
        for w in 0..f.len() {
            let dw = self.domain.at(w);
            for &v in f.successors(w) {
                let dv = self.domain.at(v as usize);
                if let Some(a) = dw.iter().find(|a| !dv.contains(a)) {
                    return Err(KripkeError::Invalid(format!(
                        "element {a} of world {w} missing at its successor {v}"
                    )));
                }
            }
        }
        if let ModelSource::Explicit = self.source {
            let universe = self.domain.universe();
            for w in 0..f.len() {
                let dw = self.domain.at(w);
                for (l, (name, arity)) in self.letters.iter().enumerate() {
                    let mut args = vec![0i64; *arity];
                    if !for_each_tuple(&universe, &mut args, 0, &mut |t| {
                        !self.holds(w, l, t) || t.iter().all(|a| dw.contains(a))
                    }) {
                        return Err(KripkeError::Invalid(format!(
                            "atom {name} at world {w} uses elements outside its domain"
                        )));
                    }
                }
            }
        }
        Ok(())
    }
}

/// Calls `f` on every tuple over `elems`; stops early when `f` returns false.
pub(crate) fn for_each_tuple(elems: &[i64], buf: &mut [i64], i: usize, f: &mut impl FnMut(&[i64]) -> bool) -> bool {
    if i == buf.len() {
        return f(buf);
    }
    for &e in elems {
        buf[i] = e;
        if !for_each_tuple(elems, buf, i + 1, f) {
            return false;
        }
    }
    true
}
