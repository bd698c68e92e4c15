//! Per-conjunct check reports for formula artifacts.

use std::fmt;
use std::thread;

use serde::Serialize;

use super::{CheckError, CheckOptions, Checker, TraceStep, Verdict};
use crate::formula::Formula;
use crate::kripke::PredicateModel;
use crate::reductions::ReductionArtifact;

// deep formulas recurse once per subformula level
const WORKER_STACK: usize = 256 << 20;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ConjunctReport {
    pub name: String,
    pub verdict: Verdict,
    pub obligations: u64,
    pub trace: Vec<TraceStep>,
}

impl fmt::Display for ConjunctReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.verdict {
            Verdict::True => write!(f, "{}: TRUE ({} obligations checked)", self.name, self.obligations),
            Verdict::Unknown => {
                write!(f, "{}: UNKNOWN (no False subverdict; {} obligations checked)", self.name, self.obligations)
            }
            Verdict::False => {
                let t: Vec<String> = self.trace.iter().map(|s| s.to_string()).collect();
                write!(f, "{}: FALSE (trace: {}; {} obligations checked)", self.name, t.join(", "), self.obligations)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CheckReport {
    pub world: usize,
    pub conjuncts: Vec<ConjunctReport>,
}

impl CheckReport {
    pub fn has_false(&self) -> bool {
        self.conjuncts.iter().any(|c| c.verdict == Verdict::False)
    }

    pub fn get(&self, name: &str) -> Option<&ConjunctReport> {
        self.conjuncts.iter().find(|c| c.name == name)
    }
}

impl fmt::Display for CheckReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.conjuncts {
            writeln!(f, "{c}")?;
        }
        Ok(())
    }
}

fn check_one(model: &PredicateModel, name: &str, f: &Formula, world: usize, opts: CheckOptions) -> Result<ConjunctReport, CheckError> {
    let mut c = Checker::new(model, opts)?;
    let id = c.add(f)?;
    let verdict = c.eval(id, world, &[])?;
    let trace = if verdict.is_definite() { c.trace(id, world, &[]) } else { Vec::new() };
    Ok(ConjunctReport { name: name.to_string(), verdict, obligations: c.steps(), trace })
}

/// Evaluates every conjunct of `artifact` at `world`, one worker per
/// conjunct.
pub fn check_artifact(
    model: &PredicateModel,
    artifact: &ReductionArtifact,
    world: usize,
    opts: CheckOptions,
) -> Result<CheckReport, CheckError> {
    let results: Vec<Result<ConjunctReport, CheckError>> = thread::scope(|s| {
        let handles: Vec<_> = artifact
            .conjuncts
            .iter()
            .map(|c| {
                thread::Builder::new()
                    .stack_size(WORKER_STACK)
                    .spawn_scoped(s, move || check_one(model, &c.name, &c.formula, world, opts))
                    .expect("spawn checker worker")
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("checker worker panicked")).collect()
    });
    Ok(CheckReport { world, conjuncts: results.into_iter().collect::<Result<_, _>>()? })
}

/// For `f = ∀x φ`, the verdict of `φ` at `world` for each element `x` of
/// the materialized domain.
pub fn instance_verdicts(
    model: &PredicateModel,
    world: usize,
    f: &Formula,
    opts: CheckOptions,
) -> Result<Vec<(i64, Verdict)>, CheckError> {
    let Formula::Forall(v, body) = f else {
        return Err(CheckError::Unsupported("instances need a universally quantified formula".into()));
    };
    if world >= model.frame().len() {
        return Err(CheckError::NoSuchWorld(world));
    }
    let mut c = Checker::new(model, opts)?;
    let id = c.add(body)?;
    model
        .domain()
        .at(world)
        .iter()
        .map(|&e| Ok((e, c.eval(id, world, &[(v.as_str(), e)])?)))
        .collect()
}
