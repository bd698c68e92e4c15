use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use super::{Dag, Formula, FormulaError, NodeKind};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LetterCensus {
    pub arity: usize,
    /// Occurrences in the expanded tree (saturating).
    pub occurrences: u64,
}

/// Syntactic measurements of the fully expanded formula.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Metrics {
    pub size: u64,
    pub modal_depth: u32,
    pub quantifier_depth: u32,
    /// Every variable occurring free or bound.
    pub variables: BTreeSet<String>,
    pub free_variables: BTreeSet<String>,
    pub letters: BTreeMap<String, LetterCensus>,
}

impl Metrics {
    pub fn uses_only_vars(&self, allowed: &[&str]) -> bool {
        self.variables.iter().all(|v| allowed.contains(&v.as_str()))
    }

    /// Letters whose arity is at most one.
    pub fn monadic(&self) -> bool {
        self.letters.values().all(|l| l.arity <= 1)
    }
}

/// Computes [`Metrics`] without materializing the expansion.
pub fn metrics(f: &Formula) -> Result<Metrics, FormulaError> {
    let mut dag = Dag::new();
    let root = dag.add(f)?;
    let n = root as usize + 1;
    let mut mult = vec![0u64; n];
    mult[root as usize] = 1;
    let mut variables = BTreeSet::new();
    let mut counts: BTreeMap<u32, u64> = BTreeMap::new();
    // children always have smaller ids than their parents
    for id in (0..n).rev() {
        let m = mult[id];
        if m == 0 {
            continue;
        }
        match dag.kind(id as u32) {
            NodeKind::Atom { letter, args } => {
                let e = counts.entry(*letter).or_default();
                *e = e.saturating_add(m);
                for a in args {
                    variables.insert(dag.var_name(*a).to_string());
                }
            }
            NodeKind::Bot => {}
            NodeKind::Implies(a, b) => {
                mult[*a as usize] = mult[*a as usize].saturating_add(m);
                mult[*b as usize] = mult[*b as usize].saturating_add(m);
            }
            NodeKind::Box(a) => mult[*a as usize] = mult[*a as usize].saturating_add(m),
            NodeKind::Forall(v, a) => {
                variables.insert(dag.var_name(*v).to_string());
                mult[*a as usize] = mult[*a as usize].saturating_add(m);
            }
        }
    }
    let letters = counts
        .into_iter()
        .map(|(l, c)| {
            let (name, arity) = dag.letter(l);
            (name.to_string(), LetterCensus { arity, occurrences: c })
        })
        .collect();
    Ok(Metrics {
        size: dag.tree_size(root),
        modal_depth: dag.modal_depth(root),
        quantifier_depth: dag.quantifier_depth(root),
        variables,
        free_variables: dag.free_vars(root).iter().map(|&v| dag.var_name(v).to_string()).collect(),
        letters,
    })
}
