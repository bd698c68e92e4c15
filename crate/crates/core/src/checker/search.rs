//! Exhaustive search for countermodels on small finite frames.

use std::sync::Arc;

use super::{eval2, CheckError};
use crate::formula::{expand, Formula};
use crate::kripke::{Domain, ExplicitInterpretation, Frame, Interpretation, ModelSource, PredicateModel};

pub const DEFAULT_SEARCH_CAP: u64 = 1 << 22;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchOptions {
    /// Largest constant domain tried.
    pub max_domain: usize,
    /// Guard on the number of interpretations enumerated.
    pub max_interpretations: u64,
    /// Only look for a refutation at this world.
    pub world: Option<usize>,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions { max_domain: 2, max_interpretations: DEFAULT_SEARCH_CAP, world: None }
    }
}

#[derive(Debug, Clone)]
pub struct Countermodel {
    pub model: PredicateModel,
    pub world: usize,
    /// Interpretations enumerated up to and including this one.
    pub enumerated: u64,
}

/// Interpretation read from a bitmask: proposition letters first (one bit
/// per world), then monadic letters (one bit per world and element).
#[derive(Debug, Clone)]
struct MaskInterp {
    mask: u64,
    worlds: usize,
    domain: usize,
    props: usize,
    arity: Vec<usize>,
    slot: Vec<usize>,
}

impl MaskInterp {
    fn bit(&self, world: usize, letter: usize, args: &[i64]) -> usize {
        let j = self.slot[letter];
        if self.arity[letter] == 0 {
            j * self.worlds + world
        } else {
            self.props * self.worlds + (j * self.worlds + world) * self.domain + args[0] as usize
        }
    }
}

impl Interpretation for MaskInterp {
    fn holds(&self, world: u64, letter: usize, args: &[i64]) -> bool {
        self.mask >> self.bit(world as usize, letter, args) & 1 == 1
    }
}

/// Enumerates interpretations on `frame` (taken as complete, i.e. without
/// anything beyond its materialized worlds) with constant domains
/// `{0, …, d-1}`, `d` ascending, and returns the first model refuting `φ`.
pub fn countermodel_search(frame: &Frame, f: &Formula, opts: &SearchOptions) -> Result<Option<Countermodel>, CheckError> {
    if opts.max_domain == 0 {
        return Err(CheckError::Unsupported("max_domain must be at least 1".into()));
    }
    let frame = frame.closed();
    let core = expand(f)?;
    if let Some(v) = core.free_vars().into_iter().next() {
        return Err(CheckError::Unassigned(v));
    }
    let mut letters: Vec<(String, usize)> = core.letters().into_iter().collect();
    if let Some((l, a)) = letters.iter().find(|(_, a)| *a > 1) {
        return Err(CheckError::Unsupported(format!("letter {l} has arity {a}; only arity ≤ 1 is searched")));
    }
    letters.sort_by(|a, b| (a.1, &a.0).cmp(&(b.1, &b.0)));
    let props = letters.iter().filter(|(_, a)| *a == 0).count();
    let monadic = letters.len() - props;
    let worlds = frame.len();
    let targets: Vec<usize> = match opts.world {
        Some(w) if w >= worlds => return Err(CheckError::NoSuchWorld(w)),
        Some(w) => vec![w],
        None => (0..worlds).collect(),
    };
    let max_d = if monadic == 0 { 1 } else { opts.max_domain };
    let mut enumerated = 0u64;
    for d in 1..=max_d {
        let bits = props * worlds + monadic * worlds * d;
        if bits >= 63 {
            return Err(CheckError::SearchGuard(opts.max_interpretations));
        }
        let mut slot = Vec::new();
        let (mut np, mut nm) = (0, 0);
        for (_, a) in &letters {
            if *a == 0 {
                slot.push(np);
                np += 1;
            } else {
                slot.push(nm);
                nm += 1;
            }
        }
        let elements: Vec<i64> = (0..d as i64).collect();
        for mask in 0..1u64 << bits {
            enumerated += 1;
            if enumerated > opts.max_interpretations {
                return Err(CheckError::SearchGuard(opts.max_interpretations));
            }
            let interp = MaskInterp {
                mask,
                worlds,
                domain: d,
                props,
                arity: letters.iter().map(|(_, a)| *a).collect(),
                slot: slot.clone(),
            };
            let model = PredicateModel::new(
                frame.clone(),
                letters.clone(),
                Domain::Constant { elements: elements.clone(), truncated: false },
                Arc::new(interp.clone()),
                ModelSource::Explicit,
            )?;
            for &w in &targets {
                if !eval2(&model, w, &[], &core)? {
                    let model = explicit_copy(&model, &interp, &elements)?;
                    return Ok(Some(Countermodel { model, world: w, enumerated }));
                }
            }
        }
    }
    Ok(None)
}

fn explicit_copy(model: &PredicateModel, mask: &MaskInterp, elements: &[i64]) -> Result<PredicateModel, CheckError> {
    let mut ex = ExplicitInterpretation::new(model.letters().len());
    for (l, (_, a)) in model.letters().iter().enumerate() {
        for w in 0..model.frame().len() {
            if *a == 0 {
                if mask.holds(w as u64, l, &[]) {
                    ex.insert(w as u64, l, vec![]);
                }
            } else {
                for &e in elements {
                    if mask.holds(w as u64, l, &[e]) {
                        ex.insert(w as u64, l, vec![e]);
                    }
                }
            }
        }
    }
    Ok(PredicateModel::new(
        model.frame().clone(),
        model.letters().to_vec(),
        model.domain().clone(),
        Arc::new(ex),
        ModelSource::Explicit,
    )?)
}
