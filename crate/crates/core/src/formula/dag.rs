//! Hash-consed core formulas.
//!
//! Derived operators are expanded while they are added, so repeated
//! subformulas (the two copies made by `□⁺` or `↔`, say) become one shared
//! node. Metrics and the evaluator work on this form, which stays linear in
//! the size of the unexpanded input even when the expanded tree is huge.

use rustc_hash::FxHashMap;

use super::{Formula, FormulaError};

pub type NodeId = u32;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum NodeKind {
    Atom { letter: u32, args: Vec<u32> },
    Bot,
    Implies(NodeId, NodeId),
    Box(NodeId),
    Forall(u32, NodeId),
}

#[derive(Debug, Default, Clone)]
pub struct Dag {
    nodes: Vec<NodeKind>,
    index: FxHashMap<NodeKind, NodeId>,
    letters: Vec<(String, usize)>,
    letter_ix: FxHashMap<String, u32>,
    vars: Vec<String>,
    var_ix: FxHashMap<String, u32>,
    free: Vec<Vec<u32>>,
    modal_depth: Vec<u32>,
    quant_depth: Vec<u32>,
    tree_size: Vec<u64>,
}

fn union(a: &[u32], b: &[u32]) -> Vec<u32> {
    let mut v: Vec<u32> = a.iter().chain(b).copied().collect();
    v.sort_unstable();
    v.dedup();
    v
}

impl Dag {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn kind(&self, id: NodeId) -> &NodeKind {
        &self.nodes[id as usize]
    }

    /// Sorted ids of the free variables of a node.
    pub fn free_vars(&self, id: NodeId) -> &[u32] {
        &self.free[id as usize]
    }

    pub fn modal_depth(&self, id: NodeId) -> u32 {
        self.modal_depth[id as usize]
    }

    pub fn quantifier_depth(&self, id: NodeId) -> u32 {
        self.quant_depth[id as usize]
    }

    /// Node count of the fully expanded tree (saturating).
    pub fn tree_size(&self, id: NodeId) -> u64 {
        self.tree_size[id as usize]
    }

    pub fn letter(&self, ix: u32) -> (&str, usize) {
        let (n, a) = &self.letters[ix as usize];
        (n, *a)
    }

    pub fn letter_count(&self) -> usize {
        self.letters.len()
    }

    pub fn var_name(&self, ix: u32) -> &str {
        &self.vars[ix as usize]
    }

    pub fn var_count(&self) -> usize {
        self.vars.len()
    }

    pub fn var_id(&mut self, name: &str) -> u32 {
        if let Some(&i) = self.var_ix.get(name) {
            return i;
        }
        let i = self.vars.len() as u32;
        self.vars.push(name.to_string());
        self.var_ix.insert(name.to_string(), i);
        i
    }

    pub fn lookup_var(&self, name: &str) -> Option<u32> {
        self.var_ix.get(name).copied()
    }

    fn letter_id(&mut self, name: &str, arity: usize) -> Result<u32, FormulaError> {
        if let Some(&i) = self.letter_ix.get(name) {
            let expected = self.letters[i as usize].1;
            if expected != arity {
                return Err(FormulaError::ArityMismatch { letter: name.to_string(), expected, found: arity });
            }
            return Ok(i);
        }
        let i = self.letters.len() as u32;
        self.letters.push((name.to_string(), arity));
        self.letter_ix.insert(name.to_string(), i);
        Ok(i)
    }

    fn intern(&mut self, kind: NodeKind) -> NodeId {
        if let Some(&id) = self.index.get(&kind) {
            return id;
        }
        let (free, md, qd, size) = match &kind {
            NodeKind::Atom { args, .. } => {
                let mut f = args.clone();
                f.sort_unstable();
                f.dedup();
                (f, 0, 0, 1)
            }
            NodeKind::Bot => (Vec::new(), 0, 0, 1),
            NodeKind::Implies(a, b) => {
                let (a, b) = (*a as usize, *b as usize);
                (
                    union(&self.free[a], &self.free[b]),
                    self.modal_depth[a].max(self.modal_depth[b]),
                    self.quant_depth[a].max(self.quant_depth[b]),
                    self.tree_size[a].saturating_add(self.tree_size[b]).saturating_add(1),
                )
            }
            NodeKind::Box(a) => {
                let a = *a as usize;
                (self.free[a].clone(), self.modal_depth[a] + 1, self.quant_depth[a], self.tree_size[a].saturating_add(1))
            }
            NodeKind::Forall(v, a) => {
                let a = *a as usize;
                let f = self.free[a].iter().copied().filter(|x| x != v).collect();
                (f, self.modal_depth[a], self.quant_depth[a] + 1, self.tree_size[a].saturating_add(1))
            }
        };
        let id = self.nodes.len() as NodeId;
        self.nodes.push(kind.clone());
        self.index.insert(kind, id);
        self.free.push(free);
        self.modal_depth.push(md);
        self.quant_depth.push(qd);
        self.tree_size.push(size);
        id
    }

    pub fn bot(&mut self) -> NodeId {
        self.intern(NodeKind::Bot)
    }
    pub fn imp(&mut self, a: NodeId, b: NodeId) -> NodeId {
        self.intern(NodeKind::Implies(a, b))
    }
    pub fn boxed(&mut self, a: NodeId) -> NodeId {
        self.intern(NodeKind::Box(a))
    }
    pub fn forall(&mut self, v: u32, a: NodeId) -> NodeId {
        self.intern(NodeKind::Forall(v, a))
    }
    pub fn atom(&mut self, letter: &str, args: &[&str]) -> Result<NodeId, FormulaError> {
        let l = self.letter_id(letter, args.len())?;
        let args = args.iter().map(|a| self.var_id(a)).collect();
        Ok(self.intern(NodeKind::Atom { letter: l, args }))
    }
    pub fn neg(&mut self, a: NodeId) -> NodeId {
        let b = self.bot();
        self.imp(a, b)
    }
    pub fn top(&mut self) -> NodeId {
        let b = self.bot();
        self.imp(b, b)
    }
    pub fn and2(&mut self, a: NodeId, b: NodeId) -> NodeId {
        let nb = self.neg(b);
        let i = self.imp(a, nb);
        self.neg(i)
    }
    pub fn or2(&mut self, a: NodeId, b: NodeId) -> NodeId {
        let na = self.neg(a);
        self.imp(na, b)
    }
    pub fn dia(&mut self, a: NodeId) -> NodeId {
        let na = self.neg(a);
        let b = self.boxed(na);
        self.neg(b)
    }

    fn pdia(&mut self, marker: NodeId, a: NodeId) -> NodeId {
        let nm = self.neg(marker);
        let inner = self.and2(nm, a);
        let d = self.dia(inner);
        let outer = self.and2(marker, d);
        self.dia(outer)
    }

    fn xbox(&mut self, q: NodeId, a: NodeId) -> NodeId {
        let nq = self.neg(q);
        let l_imp = self.imp(nq, a);
        let l_box = self.boxed(l_imp);
        let left = self.and2(q, l_box);
        let r_imp = self.imp(q, a);
        let r_box = self.boxed(r_imp);
        let right = self.and2(nq, r_box);
        self.or2(left, right)
    }

    fn forall_p(&mut self) -> Result<NodeId, FormulaError> {
        let p = self.atom("P", &["x"])?;
        let x = self.var_id("x");
        Ok(self.forall(x, p))
    }

    /// Adds `f`, expanding derived operators on the way.
    pub fn add(&mut self, f: &Formula) -> Result<NodeId, FormulaError> {
        use Formula::*;
        Ok(match f {
            Atom(l, args) => {
                let args: Vec<&str> = args.iter().map(String::as_str).collect();
                self.atom(l, &args)?
            }
            Bot => self.bot(),
            Implies(a, b) => {
                let (a, b) = (self.add(a)?, self.add(b)?);
                self.imp(a, b)
            }
            Box(a) => {
                let a = self.add(a)?;
                self.boxed(a)
            }
            Forall(v, a) => {
                let a = self.add(a)?;
                let v = self.var_id(v);
                self.forall(v, a)
            }
            Top => self.top(),
            Not(a) => {
                let a = self.add(a)?;
                self.neg(a)
            }
            And(items) | Or(items) => {
                let ids = items.iter().map(|g| self.add(g)).collect::<Result<Vec<_>, _>>()?;
                let is_and = matches!(f, And(..));
                match ids.split_last() {
                    None if is_and => self.top(),
                    None => self.bot(),
                    Some((&last, rest)) => rest.iter().rev().fold(last, |acc, &a| {
                        if is_and {
                            self.and2(a, acc)
                        } else {
                            self.or2(a, acc)
                        }
                    }),
                }
            }
            Iff(a, b) => {
                let (a, b) = (self.add(a)?, self.add(b)?);
                let ab = self.imp(a, b);
                let ba = self.imp(b, a);
                self.and2(ab, ba)
            }
            Exists(v, a) => {
                let a = self.add(a)?;
                let na = self.neg(a);
                let v = self.var_id(v);
                let all = self.forall(v, na);
                self.neg(all)
            }
            Dia(a) => {
                let a = self.add(a)?;
                self.dia(a)
            }
            BoxPlus(a) => {
                let a = self.add(a)?;
                let b = self.boxed(a);
                self.and2(a, b)
            }
            PDia1(a) | PDia1Iter(_, a) => {
                let n = if let PDia1Iter(n, _) = f { *n } else { 1 };
                let mut a = self.add(a)?;
                let p = self.atom("p", &[])?;
                for _ in 0..n {
                    a = self.pdia(p, a);
                }
                a
            }
            PDia2(a) | PDia2Iter(_, a) => {
                let n = if let PDia2Iter(n, _) = f { *n } else { 1 };
                let mut a = self.add(a)?;
                let p = self.forall_p()?;
                for _ in 0..n {
                    a = self.pdia(p, a);
                }
                a
            }
            XBox(a) | XBoxIter(_, a) => {
                let n = if let XBoxIter(n, _) = f { *n } else { 1 };
                let mut a = self.add(a)?;
                let q = self.atom("q", &[])?;
                for _ in 0..n {
                    a = self.xbox(q, a);
                }
                a
            }
            BoxIter(n, a) => {
                let mut a = self.add(a)?;
                for _ in 0..*n {
                    a = self.boxed(a);
                }
                a
            }
            DiaIter(n, a) => {
                let a = self.add(a)?;
                let mut b = self.neg(a);
                for _ in 0..*n {
                    b = self.boxed(b);
                }
                self.neg(b)
            }
            Next(_) => return Err(FormulaError::NotSupported("next")),
        })
    }

    /// Rebuilds the core tree of a node. Exponential for heavily shared
    /// nodes; check [`Dag::tree_size`] first.
    pub fn to_formula(&self, id: NodeId) -> Formula {
        match self.kind(id) {
            NodeKind::Atom { letter, args } => Formula::Atom(
                self.letters[*letter as usize].0.clone(),
                args.iter().map(|&a| self.vars[a as usize].clone()).collect(),
            ),
            NodeKind::Bot => Formula::Bot,
            NodeKind::Implies(a, b) => Formula::implies(self.to_formula(*a), self.to_formula(*b)),
            NodeKind::Box(a) => Formula::boxed(self.to_formula(*a)),
            NodeKind::Forall(v, a) => Formula::forall(&self.vars[*v as usize], self.to_formula(*a)),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::{expand, parse, Signature};

    #[test]
    fn shares_and_agrees_with_tree_expansion() {
        let sig = Signature::with_letters([("p", 0), ("q", 0), ("P", 1), ("M", 1)]).unwrap();
        let f = parse("(boxp (iff (xbox (M x)) (pdia2n 2 (boxp (dian 3 p)))))", &sig).unwrap();
        let mut d = Dag::new();
        let a = d.add(&f).unwrap();
        let b = d.add(&expand(&f).unwrap()).unwrap();
        assert_eq!(a, b);
        assert_eq!(d.to_formula(a), expand(&f).unwrap());
        assert_eq!(d.tree_size(a) as usize, expand(&f).unwrap().size());
    }

    #[test]
    fn nested_boxplus_stays_small() {
        let mut f = Formula::prop("p");
        for _ in 0..70 {
            f = Formula::boxplus(f);
        }
        let mut d = Dag::new();
        let id = d.add(&f).unwrap();
        assert!(d.len() < 400);
        assert_eq!(d.modal_depth(id), 70);
        assert_eq!(d.tree_size(id), u64::MAX);
    }
}
