//! The two-valued truth definition.

use rustc_hash::FxHashMap;

use super::CheckError;
use crate::formula::{expand, Formula};
use crate::kripke::PredicateModel;

/// Truth of `f` at world `w` of a complete finite model.
pub fn eval2(model: &PredicateModel, w: usize, assignment: &[(&str, i64)], f: &Formula) -> Result<bool, CheckError> {
    if !model.is_complete() {
        return Err(CheckError::Incomplete);
    }
    if w >= model.frame().len() {
        return Err(CheckError::NoSuchWorld(w));
    }
    let core = expand(f)?;
    let mut g: FxHashMap<String, i64> = FxHashMap::default();
    for (v, value) in assignment {
        g.insert(v.to_string(), *value);
    }
    for v in core.free_vars() {
        match g.get(&v) {
            None => return Err(CheckError::Unassigned(v)),
            Some(&value) if !model.domain().at(w).contains(&value) => {
                return Err(CheckError::OutsideDomain { var: v, value, world: w })
            }
            Some(_) => {}
        }
    }
    truth(model, w, &mut g, &core)
}

fn truth(model: &PredicateModel, w: usize, g: &mut FxHashMap<String, i64>, f: &Formula) -> Result<bool, CheckError> {
    Ok(match f {
        Formula::Atom(l, args) => {
            let ix = model.letter_index(l).ok_or_else(|| CheckError::MissingLetter(l.clone()))?;
            let arity = model.letters()[ix].1;
            if arity != args.len() {
                return Err(CheckError::Arity { letter: l.clone(), model: arity, formula: args.len() });
            }
            let vals = args
                .iter()
                .map(|a| g.get(a).copied().ok_or_else(|| CheckError::Unassigned(a.clone())))
                .collect::<Result<Vec<_>, _>>()?;
            model.holds(w, ix, &vals)
        }
        Formula::Bot => false,
        Formula::Implies(a, b) => !truth(model, w, g, a)? || truth(model, w, g, b)?,
        Formula::Box(a) => {
            for &v in model.frame().successors(w) {
                if !truth(model, v as usize, g, a)? {
                    return Ok(false);
                }
            }
            true
        }
        Formula::Forall(x, a) => {
            let saved = g.get(x).copied();
            let mut all = true;
            for &e in model.domain().at(w) {
                g.insert(x.clone(), e);
                if !truth(model, w, g, a)? {
                    all = false;
                    break;
                }
            }
            match saved {
                Some(s) => g.insert(x.clone(), s),
                None => g.remove(x),
            };
            all
        }
        _ => unreachable!("expanded formulas only use the core connectives"),
    })
}
