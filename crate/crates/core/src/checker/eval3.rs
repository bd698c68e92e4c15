//! Three-valued bounded evaluation.

use std::sync::Arc;

use rustc_hash::FxHashMap;

use super::graph::{EvalGraph, SegmentTail};
use super::{CheckError, TraceStep, Verdict};
use crate::formula::{Dag, Formula, NodeId, NodeKind};
use crate::kripke::{Domain, PredicateModel};

pub const DEFAULT_STEP_LIMIT: u64 = 400_000_000;

const UNSET: u16 = u16::MAX;
const TRACE_CAP: usize = 256;
// dense memo tables above this many entries fall back to hashing
const DENSE_CAP: usize = 1 << 24;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CheckOptions {
    /// Maximum number of memo entries computed before giving up.
    pub step_limit: u64,
}

impl Default for CheckOptions {
    fn default() -> Self {
        CheckOptions { step_limit: DEFAULT_STEP_LIMIT }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub verdict: Verdict,
    pub trace: Vec<TraceStep>,
    /// Evaluation obligations (memo entries) computed.
    pub steps: u64,
}

enum Key {
    Dense(usize),
    Sparse(Vec<u32>),
}

#[derive(Default)]
struct Memo {
    dense: Vec<Option<Box<[u8]>>>,
    sparse: FxHashMap<(NodeId, Vec<u32>), u8>,
}

impl Memo {
    fn get(&self, id: NodeId, key: &Key) -> Option<Verdict> {
        match key {
            Key::Dense(i) => self.dense[id as usize].as_ref().and_then(|t| Verdict::from_code(t[*i])),
            Key::Sparse(k) => self.sparse.get(&(id, k.clone())).and_then(|c| Verdict::from_code(*c)),
        }
    }

    fn set(&mut self, id: NodeId, key: Key, size: usize, v: Verdict) {
        match key {
            Key::Dense(i) => {
                let t = self.dense[id as usize].get_or_insert_with(|| vec![0u8; size].into_boxed_slice());
                t[i] = v.code();
            }
            Key::Sparse(k) => {
                self.sparse.insert((id, k), v.code());
            }
        }
    }
}

/// A memoizing evaluator bound to one model. Formulas are added to an
/// internal [`Dag`] and may share subformulas.
pub struct Checker<'m> {
    model: &'m PredicateModel,
    dag: Dag,
    graph: EvalGraph,
    universe: Vec<i64>,
    elem_ix: FxHashMap<i64, u16>,
    dom_of: Vec<u32>,
    dom_sets: Vec<Arc<[u16]>>,
    truncated_domain: bool,
    letter_map: Vec<usize>,
    values: Memo,
    suffix: Memo,
    steps: u64,
    limit: u64,
}

impl<'m> Checker<'m> {
    pub fn new(model: &'m PredicateModel, opts: CheckOptions) -> Result<Self, CheckError> {
        let graph = EvalGraph::new(model);
        let universe = model.domain().universe();
        if universe.len() >= UNSET as usize {
            return Err(CheckError::Unsupported("domain too large".into()));
        }
        let elem_ix: FxHashMap<i64, u16> = universe.iter().enumerate().map(|(i, e)| (*e, i as u16)).collect();
        let to_ix = |d: &[i64]| -> Arc<[u16]> { d.iter().map(|e| elem_ix[e]).collect() };
        let (dom_of, dom_sets) = match model.domain() {
            Domain::Constant { elements, .. } => (vec![0; graph.len()], vec![to_ix(elements)]),
            Domain::PerWorld(v) => {
                if graph.len() != v.len() {
                    return Err(CheckError::Unsupported("per-world domains with a tail certificate".into()));
                }
                ((0..v.len() as u32).collect(), v.iter().map(|d| to_ix(d)).collect())
            }
        };
        Ok(Checker {
            model,
            dag: Dag::new(),
            graph,
            universe,
            elem_ix,
            dom_of,
            dom_sets,
            truncated_domain: model.domain().truncated(),
            letter_map: Vec::new(),
            values: Memo::default(),
            suffix: Memo::default(),
            steps: 0,
            limit: opts.step_limit,
        })
    }

    pub fn dag(&self) -> &Dag {
        &self.dag
    }

    pub fn model(&self) -> &PredicateModel {
        self.model
    }

    /// Obligations computed so far.
    pub fn steps(&self) -> u64 {
        self.steps
    }

    pub fn add(&mut self, f: &Formula) -> Result<NodeId, CheckError> {
        let id = self.dag.add(f)?;
        for ix in self.letter_map.len()..self.dag.letter_count() {
            let (name, arity) = self.dag.letter(ix as u32);
            let l = self.model.letter_index(name).ok_or_else(|| CheckError::MissingLetter(name.to_string()))?;
            let model_arity = self.model.letters()[l].1;
            if model_arity != arity {
                return Err(CheckError::Arity { letter: name.to_string(), model: model_arity, formula: arity });
            }
            self.letter_map.push(l);
        }
        self.values.dense.resize_with(self.dag.len(), || None);
        self.suffix.dense.resize_with(self.dag.len(), || None);
        Ok(id)
    }

    fn env_for(&self, id: NodeId, world: usize, assignment: &[(&str, i64)]) -> Result<Vec<u16>, CheckError> {
        if world >= self.graph.prefix {
            return Err(CheckError::NoSuchWorld(world));
        }
        let mut env = vec![UNSET; self.dag.var_count()];
        for (name, value) in assignment {
            if let Some(v) = self.dag.lookup_var(name) {
                let outside = || CheckError::OutsideDomain { var: name.to_string(), value: *value, world };
                let ix = *self.elem_ix.get(value).ok_or_else(outside)?;
                if !self.dom_sets[self.dom_of[world] as usize].contains(&ix) {
                    return Err(outside());
                }
                env[v as usize] = ix;
            }
        }
        for &v in self.dag.free_vars(id) {
            if env[v as usize] == UNSET {
                return Err(CheckError::Unassigned(self.dag.var_name(v).to_string()));
            }
        }
        Ok(env)
    }

    /// Verdict of node `id` at prefix world `world`.
    pub fn eval(&mut self, id: NodeId, world: usize, assignment: &[(&str, i64)]) -> Result<Verdict, CheckError> {
        let mut env = self.env_for(id, world, assignment)?;
        self.ev(id, world, &mut env)
    }

    pub fn eval_formula(&mut self, f: &Formula, world: usize, assignment: &[(&str, i64)]) -> Result<Verdict, CheckError> {
        let id = self.add(f)?;
        self.eval(id, world, assignment)
    }

    /// The path behind an already computed definite verdict.
    pub fn trace(&self, id: NodeId, world: usize, assignment: &[(&str, i64)]) -> Vec<TraceStep> {
        let mut out = Vec::new();
        if let Ok(mut env) = self.env_for(id, world, assignment) {
            self.walk(id, world, &mut env, &mut out);
        }
        out
    }

    fn table_size(&self, id: NodeId) -> Option<usize> {
        let k = self.dag.free_vars(id).len();
        if k > 2 {
            return None;
        }
        let size = self.graph.len().checked_mul(self.universe.len().checked_pow(k as u32)?)?;
        (size <= DENSE_CAP).then_some(size)
    }

    fn key(&self, id: NodeId, w: usize, env: &[u16]) -> Key {
        let fv = self.dag.free_vars(id);
        if self.table_size(id).is_some() {
            let u = self.universe.len();
            let mut i = w;
            for &v in fv {
                i = i * u + env[v as usize] as usize;
            }
            Key::Dense(i)
        } else {
            let mut k = Vec::with_capacity(fv.len() + 1);
            k.push(w as u32);
            k.extend(fv.iter().map(|&v| env[v as usize] as u32));
            Key::Sparse(k)
        }
    }

    fn lookup(&self, id: NodeId, w: usize, env: &[u16]) -> Option<Verdict> {
        self.values.get(id, &self.key(id, w, env))
    }

    fn tick(&mut self) -> Result<(), CheckError> {
        self.steps += 1;
        if self.steps > self.limit {
            return Err(CheckError::StepLimit(self.limit));
        }
        Ok(())
    }

    fn ev(&mut self, id: NodeId, w: usize, env: &mut [u16]) -> Result<Verdict, CheckError> {
        let key = self.key(id, w, env);
        if let Some(v) = self.values.get(id, &key) {
            return Ok(v);
        }
        self.tick()?;
        let v = match self.dag.kind(id) {
            NodeKind::Atom { letter, args } => {
                let vals: Vec<i64> = args.iter().map(|a| self.universe[env[*a as usize] as usize]).collect();
                let l = self.letter_map[*letter as usize];
                Verdict::from_bool(self.model.interpretation().holds(self.graph.codes[w], l, &vals))
            }
            NodeKind::Bot => Verdict::False,
            &NodeKind::Implies(a, b) => {
                let va = self.ev(a, w, env)?;
                if va == Verdict::False {
                    Verdict::True
                } else {
                    va.implies(self.ev(b, w, env)?)
                }
            }
            &NodeKind::Box(a) => self.box_value(id, a, w, env)?,
            &NodeKind::Forall(v, a) => self.forall_value(v, a, w, env)?,
        };
        let size = self.table_size(id).unwrap_or(0);
        self.values.set(id, key, size, v);
        Ok(v)
    }

    fn box_value(&mut self, bx: NodeId, a: NodeId, w: usize, env: &mut [u16]) -> Result<Verdict, CheckError> {
        if !self.graph.linear {
            let mut acc = Verdict::True;
            for i in 0..self.model.frame().successors(w).len() {
                let s = self.model.frame().successors(w)[i] as usize;
                acc = acc.and(self.ev(a, s, env)?);
                if acc == Verdict::False {
                    break;
                }
            }
            return Ok(acc);
        }
        if w < self.graph.prefix {
            let here = if self.model.frame().is_reflexive(w) { self.ev(a, w, env)? } else { Verdict::True };
            return Ok(here.and(self.suffix_value(bx, a, w, env)?));
        }
        let g = self.graph.segment[w] as usize;
        let SegmentTail::Nodes { recurrent, transient } = self.graph.tails[g].clone() else {
            unreachable!("tail node outside a certified segment")
        };
        let mut acc = Verdict::True;
        for r in recurrent {
            acc = acc.and(self.ev(a, r, env)?);
        }
        if g + 1 < self.graph.segments() {
            let v0 = self.graph.seg_start[g + 1];
            acc = acc.and(self.ev(a, v0, env)?).and(self.suffix_value(bx, a, v0, env)?);
        }
        if acc == Verdict::True {
            for t in transient {
                if self.ev(a, t, env)? != Verdict::True {
                    acc = Verdict::Unknown;
                    break;
                }
            }
        }
        Ok(acc)
    }

    /// Conjunction of `a` over everything strictly above prefix world `w`.
    fn suffix_value(&mut self, bx: NodeId, a: NodeId, w: usize, env: &mut [u16]) -> Result<Verdict, CheckError> {
        let size = self.table_size(bx).unwrap_or(0);
        let last = self.graph.prefix - 1;
        let mut top = w;
        let mut known = self.suffix.get(bx, &self.key(bx, top, env));
        while known.is_none() && top < last {
            top += 1;
            known = self.suffix.get(bx, &self.key(bx, top, env));
        }
        let mut acc = match known {
            Some(v) => v,
            None => {
                self.tick()?;
                let mut v = Verdict::True;
                for g in self.graph.segment[last] as usize..self.graph.segments() {
                    v = v.and(self.segment_tail(g, a, env)?);
                }
                let key = self.key(bx, last, env);
                self.suffix.set(bx, key, size, v);
                v
            }
        };
        for v in (w..top).rev() {
            self.tick()?;
            acc = acc.and(self.ev(a, v + 1, env)?);
            let g = self.graph.segment[v] as usize;
            if g != self.graph.segment[v + 1] as usize {
                acc = acc.and(self.segment_tail(g, a, env)?);
            }
            let key = self.key(bx, v, env);
            self.suffix.set(bx, key, size, acc);
        }
        Ok(acc)
    }

    fn segment_tail(&mut self, g: usize, a: NodeId, env: &mut [u16]) -> Result<Verdict, CheckError> {
        Ok(match self.graph.tails[g].clone() {
            SegmentTail::Complete => Verdict::True,
            SegmentTail::Uncovered => Verdict::Unknown,
            SegmentTail::Nodes { recurrent, transient } => {
                let mut acc = Verdict::True;
                for n in recurrent.start..transient.end {
                    acc = acc.and(self.ev(a, n, env)?);
                }
                acc
            }
        })
    }

    fn domain_at(&self, w: usize) -> Arc<[u16]> {
        self.dom_sets[self.dom_of[w] as usize].clone()
    }

    fn forall_value(&mut self, v: u32, a: NodeId, w: usize, env: &mut [u16]) -> Result<Verdict, CheckError> {
        if !self.dag.free_vars(a).contains(&v) {
            return self.ev(a, w, env);
        }
        let saved = env[v as usize];
        let mut acc = Verdict::True;
        for &e in self.domain_at(w).iter() {
            env[v as usize] = e;
            match self.ev(a, w, env)? {
                Verdict::False => {
                    acc = Verdict::False;
                    break;
                }
                Verdict::Unknown => acc = Verdict::Unknown,
                Verdict::True => {}
            }
        }
        env[v as usize] = saved;
        if acc == Verdict::False || !self.truncated_domain {
            return Ok(acc);
        }
        Ok(match self.oracle_pattern(v, a) {
            Some((l, negated)) => self
                .model
                .interpretation()
                .forall_atom(self.graph.codes[w], l, negated)
                .map_or(Verdict::Unknown, Verdict::from_bool),
            None => Verdict::Unknown,
        })
    }

    /// `∀v L(v)` or `∀v ¬L(v)`.
    fn oracle_pattern(&self, v: u32, a: NodeId) -> Option<(usize, bool)> {
        let unary = |id: NodeId| match self.dag.kind(id) {
            NodeKind::Atom { letter, args } if args.as_slice() == [v] => Some(self.letter_map[*letter as usize]),
            _ => None,
        };
        match self.dag.kind(a) {
            NodeKind::Atom { .. } => unary(a).map(|l| (l, false)),
            &NodeKind::Implies(x, b) if matches!(self.dag.kind(b), NodeKind::Bot) => unary(x).map(|l| (l, true)),
            _ => None,
        }
    }

    /// Successors of node `w` in the order the evaluator inspects them.
    fn successor_order(&self, w: usize) -> Vec<usize> {
        let frame = self.model.frame();
        if !self.graph.linear {
            return frame.successors(w).iter().map(|&s| s as usize).collect();
        }
        let mut out = Vec::new();
        let g = self.graph.segment[w] as usize;
        if w < self.graph.prefix {
            if frame.is_reflexive(w) {
                out.push(w);
            }
            out.extend(w + 1..self.graph.prefix);
            out.extend(self.graph.tail_nodes_from(g));
        } else {
            if let SegmentTail::Nodes { recurrent, .. } = &self.graph.tails[g] {
                out.extend(recurrent.clone());
            }
            if g + 1 < self.graph.segments() {
                out.extend(self.graph.seg_start[g + 1]..self.graph.prefix);
                out.extend(self.graph.tail_nodes_from(g + 1));
            }
        }
        out
    }

    fn walk(&self, id: NodeId, w: usize, env: &mut [u16], out: &mut Vec<TraceStep>) {
        if out.len() >= TRACE_CAP {
            return;
        }
        let Some(val) = self.lookup(id, w, env) else { return };
        match self.dag.kind(id) {
            &NodeKind::Implies(a, b) => match val {
                Verdict::True => {
                    if self.lookup(a, w, env) == Some(Verdict::False) {
                        self.walk(a, w, env, out);
                    } else {
                        self.walk(b, w, env, out);
                    }
                }
                Verdict::False => {
                    self.walk(a, w, env, out);
                    self.walk(b, w, env, out);
                }
                Verdict::Unknown => {}
            },
            &NodeKind::Box(a) if val == Verdict::False => {
                for s in self.successor_order(w) {
                    if self.lookup(a, s, env) == Some(Verdict::False) {
                        out.push(TraceStep::World(self.graph.label(self.model, s)));
                        self.walk(a, s, env, out);
                        return;
                    }
                }
            }
            &NodeKind::Forall(v, a) if val == Verdict::False => {
                if !self.dag.free_vars(a).contains(&v) {
                    return self.walk(a, w, env, out);
                }
                let saved = env[v as usize];
                for &e in self.domain_at(w).iter() {
                    env[v as usize] = e;
                    if self.lookup(a, w, env) == Some(Verdict::False) {
                        out.push(TraceStep::Bind {
                            var: self.dag.var_name(v).to_string(),
                            value: self.universe[e as usize],
                        });
                        self.walk(a, w, env, out);
                        break;
                    }
                }
                env[v as usize] = saved;
            }
            _ => {}
        }
    }
}

/// One-shot evaluation of `f` at `world` under `assignment`.
pub fn eval3(
    model: &PredicateModel,
    world: usize,
    assignment: &[(&str, i64)],
    f: &Formula,
) -> Result<Outcome, CheckError> {
    let mut c = Checker::new(model, CheckOptions::default())?;
    let id = c.add(f)?;
    let verdict = c.eval(id, world, assignment)?;
    let trace = if verdict.is_definite() { c.trace(id, world, assignment) } else { Vec::new() };
    Ok(Outcome { verdict, trace, steps: c.steps() })
}
