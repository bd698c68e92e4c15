//! Formulas of the two-variable monomodal first-order language.
//!
//! A [`Formula`] is a tree over five core constructors (atoms, `⊥`, `→`,
//! `□`, `∀`) plus a family of derived operators that [`expand`] rewrites
//! into core form. Formulas can be read and written as S-expressions
//! ([`parse`], [`Formula::to_sexpr`]) and pretty-printed in mathematical
//! notation through `Display`.

mod dag;
mod expand;
mod metrics;
mod parse;
mod print;

use std::collections::BTreeMap;
use std::collections::BTreeSet;
use std::fmt;

pub use dag::{Dag, NodeId, NodeKind};
pub use expand::{expand, is_core};
pub use metrics::{metrics, Metrics};
pub use parse::parse;

use thiserror::Error;

/// Variable names. The language only needs two, but nothing here assumes so.
pub type Var = String;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Formula {
    Atom(String, Vec<Var>),
    Bot,
    Implies(Box<Formula>, Box<Formula>),
    Box(Box<Formula>),
    Forall(Var, Box<Formula>),

    Top,
    Not(Box<Formula>),
    And(Vec<Formula>),
    Or(Vec<Formula>),
    Iff(Box<Formula>, Box<Formula>),
    Exists(Var, Box<Formula>),
    Dia(Box<Formula>),
    /// Reflexive box `□⁺φ = φ ∧ □φ`.
    BoxPlus(Box<Formula>),
    /// `⧈φ = ◇(p ∧ ◇(¬p ∧ φ))`.
    PDia1(Box<Formula>),
    /// `⧈₂φ = ◇(∀xP(x) ∧ ◇(¬∀xP(x) ∧ φ))`.
    PDia2(Box<Formula>),
    /// `⊠φ = (q ∧ □(¬q → φ)) ∨ (¬q ∧ □(q → φ))`.
    XBox(Box<Formula>),
    BoxIter(u32, Box<Formula>),
    DiaIter(u32, Box<Formula>),
    PDia1Iter(u32, Box<Formula>),
    PDia2Iter(u32, Box<Formula>),
    XBoxIter(u32, Box<Formula>),
    /// Reserved for a future "next world" operator; has no expansion.
    Next(Box<Formula>),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FormulaError {
    #[error("parse error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    #[error("undeclared letter `{0}`")]
    UndeclaredLetter(String),
    #[error("letter `{letter}` has arity {expected}, used with {found} argument(s)")]
    ArityMismatch {
        letter: String,
        expected: usize,
        found: usize,
    },
    #[error("`{0}` is not a declared variable")]
    UndeclaredVariable(String),
    #[error("operator `{0}` has no expansion")]
    NotSupported(&'static str),
    #[error("signature error: {0}")]
    Signature(String),
}

/// Predicate letters with arities, plus the admissible variable names.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Signature {
    letters: BTreeMap<String, usize>,
    vars: BTreeSet<Var>,
}

impl Default for Signature {
    fn default() -> Self {
        Signature {
            letters: BTreeMap::new(),
            vars: ["x", "y"].iter().map(|s| s.to_string()).collect(),
        }
    }
}

pub(crate) fn valid_ident(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '\'')
}

const RESERVED: &[&str] = &[
    "bot", "T", "not", "and", "or", "iff", "box", "dia", "boxp", "pdia1", "pdia2", "xbox",
    "boxn", "dian", "pdia1n", "pdia2n", "xboxn", "forall", "exists", "next", "->",
];

impl Signature {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_letters<'a>(
        letters: impl IntoIterator<Item = (&'a str, usize)>,
    ) -> Result<Self, FormulaError> {
        let mut sig = Signature::new();
        for (name, arity) in letters {
            sig.declare(name, arity)?;
        }
        Ok(sig)
    }

    pub fn declare(&mut self, name: &str, arity: usize) -> Result<(), FormulaError> {
        if !valid_ident(name) || RESERVED.contains(&name) {
            return Err(FormulaError::Signature(format!("invalid letter name `{name}`")));
        }
        if self.vars.contains(name) {
            return Err(FormulaError::Signature(format!(
                "letter `{name}` clashes with a variable"
            )));
        }
        match self.letters.get(name) {
            Some(&a) if a != arity => Err(FormulaError::Signature(format!(
                "letter `{name}` declared twice with arities {a} and {arity}"
            ))),
            _ => {
                self.letters.insert(name.to_string(), arity);
                Ok(())
            }
        }
    }

    pub fn set_vars<'a>(&mut self, vars: impl IntoIterator<Item = &'a str>) -> Result<(), FormulaError> {
        let vars: BTreeSet<Var> = vars.into_iter().map(str::to_string).collect();
        if vars.is_empty() {
            return Err(FormulaError::Signature("empty variable set".into()));
        }
        for v in &vars {
            if !valid_ident(v) || RESERVED.contains(&v.as_str()) || self.letters.contains_key(v) {
                return Err(FormulaError::Signature(format!("invalid variable `{v}`")));
            }
        }
        self.vars = vars;
        Ok(())
    }

    pub fn arity(&self, letter: &str) -> Option<usize> {
        self.letters.get(letter).copied()
    }

    pub fn letters(&self) -> impl Iterator<Item = (&str, usize)> {
        self.letters.iter().map(|(k, &v)| (k.as_str(), v))
    }

    pub fn vars(&self) -> impl Iterator<Item = &str> {
        self.vars.iter().map(String::as_str)
    }

    pub fn has_var(&self, v: &str) -> bool {
        self.vars.contains(v)
    }

    /// Parses the signature file format: one `name arity` per line, an
    /// optional `vars a b ...` line, `#` comments.
    pub fn parse_file(text: &str) -> Result<Self, FormulaError> {
        let mut sig = Signature::new();
        for line in text.lines() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let parts: Vec<&str> = line.split_whitespace().collect();
            if parts[0] == "vars" {
                sig.set_vars(parts[1..].iter().copied())?;
                continue;
            }
            if parts.len() != 2 {
                return Err(FormulaError::Signature(format!("bad line `{line}`")));
            }
            let arity: usize = parts[1]
                .parse()
                .map_err(|_| FormulaError::Signature(format!("bad arity in `{line}`")))?;
            sig.declare(parts[0], arity)?;
        }
        Ok(sig)
    }

    pub fn to_file(&self) -> String {
        let mut out = String::new();
        out.push_str("vars");
        for v in &self.vars {
            out.push(' ');
            out.push_str(v);
        }
        out.push('\n');
        for (k, v) in &self.letters {
            out.push_str(&format!("{k} {v}\n"));
        }
        out
    }

    /// Checks that every atom of `f` is declared with the right arity and
    /// only uses declared variables.
    pub fn check(&self, f: &Formula) -> Result<(), FormulaError> {
        let mut err = None;
        f.visit(&mut |g| {
            if err.is_some() {
                return;
            }
            match g {
                Formula::Atom(l, args) => match self.arity(l) {
                    None => err = Some(FormulaError::UndeclaredLetter(l.clone())),
                    Some(a) if a != args.len() => {
                        err = Some(FormulaError::ArityMismatch {
                            letter: l.clone(),
                            expected: a,
                            found: args.len(),
                        })
                    }
                    Some(_) => {
                        if let Some(v) = args.iter().find(|v| !self.has_var(v)) {
                            err = Some(FormulaError::UndeclaredVariable(v.clone()));
                        }
                    }
                },
                Formula::Forall(v, _) | Formula::Exists(v, _) if !self.has_var(v) => {
                    err = Some(FormulaError::UndeclaredVariable(v.clone()))
                }
                _ => {}
            }
        });
        err.map_or(Ok(()), Err)
    }
}

fn bx(f: Formula) -> Box<Formula> {
    Box::new(f)
}

/// Short constructors. They build the derived node, not its expansion.
impl Formula {
    pub fn atom(letter: &str, args: &[&str]) -> Formula {
        Formula::Atom(letter.to_string(), args.iter().map(|s| s.to_string()).collect())
    }
    pub fn prop(letter: &str) -> Formula {
        Formula::Atom(letter.to_string(), Vec::new())
    }
    pub fn implies(a: Formula, b: Formula) -> Formula {
        Formula::Implies(bx(a), bx(b))
    }
    pub fn boxed(a: Formula) -> Formula {
        Formula::Box(bx(a))
    }
    pub fn forall(v: &str, a: Formula) -> Formula {
        Formula::Forall(v.to_string(), bx(a))
    }
    pub fn exists(v: &str, a: Formula) -> Formula {
        Formula::Exists(v.to_string(), bx(a))
    }
    pub fn not(a: Formula) -> Formula {
        Formula::Not(bx(a))
    }
    pub fn and2(a: Formula, b: Formula) -> Formula {
        Formula::And(vec![a, b])
    }
    pub fn or2(a: Formula, b: Formula) -> Formula {
        Formula::Or(vec![a, b])
    }
    pub fn iff(a: Formula, b: Formula) -> Formula {
        Formula::Iff(bx(a), bx(b))
    }
    pub fn dia(a: Formula) -> Formula {
        Formula::Dia(bx(a))
    }
    pub fn boxplus(a: Formula) -> Formula {
        Formula::BoxPlus(bx(a))
    }
    pub fn pdia1(a: Formula) -> Formula {
        Formula::PDia1(bx(a))
    }
    pub fn pdia2(a: Formula) -> Formula {
        Formula::PDia2(bx(a))
    }
    pub fn xbox(a: Formula) -> Formula {
        Formula::XBox(bx(a))
    }
    pub fn box_iter(n: u32, a: Formula) -> Formula {
        Formula::BoxIter(n, bx(a))
    }
    pub fn pdia1_iter(n: u32, a: Formula) -> Formula {
        Formula::PDia1Iter(n, bx(a))
    }
    pub fn pdia2_iter(n: u32, a: Formula) -> Formula {
        Formula::PDia2Iter(n, bx(a))
    }
    pub fn xbox_iter(n: u32, a: Formula) -> Formula {
        Formula::XBoxIter(n, bx(a))
    }

    /// Conjunction that collapses singletons (and leaves `[]` as `⊤`).
    pub fn conj(mut items: Vec<Formula>) -> Formula {
        if items.len() == 1 {
            items.pop().unwrap()
        } else {
            Formula::And(items)
        }
    }

    /// Disjunction that collapses singletons (and leaves `[]` as `⊥`).
    pub fn disj(mut items: Vec<Formula>) -> Formula {
        if items.len() == 1 {
            items.pop().unwrap()
        } else {
            Formula::Or(items)
        }
    }

    /// Immediate subformulas, in order.
    pub fn children(&self) -> Vec<&Formula> {
        use Formula::*;
        match self {
            Atom(..) | Bot | Top => vec![],
            Implies(a, b) | Iff(a, b) => vec![a, b],
            And(v) | Or(v) => v.iter().collect(),
            Box(a) | Forall(_, a) | Not(a) | Exists(_, a) | Dia(a) | BoxPlus(a) | PDia1(a)
            | PDia2(a) | XBox(a) | BoxIter(_, a) | DiaIter(_, a) | PDia1Iter(_, a)
            | PDia2Iter(_, a) | XBoxIter(_, a) | Next(a) => vec![a],
        }
    }

    /// Pre-order traversal.
    pub fn visit(&self, f: &mut impl FnMut(&Formula)) {
        f(self);
        for c in self.children() {
            c.visit(f);
        }
    }

    /// Rebuilds the node with each child replaced by `f(child)`.
    pub fn map_children(&self, f: &mut impl FnMut(&Formula) -> Formula) -> Formula {
        use Formula::*;
        match self {
            Atom(..) | Bot | Top => self.clone(),
            Implies(a, b) => Implies(bx(f(a)), bx(f(b))),
            Iff(a, b) => Iff(bx(f(a)), bx(f(b))),
            And(v) => And(v.iter().map(&mut *f).collect()),
            Or(v) => Or(v.iter().map(&mut *f).collect()),
            Box(a) => Box(bx(f(a))),
            Forall(x, a) => Forall(x.clone(), bx(f(a))),
            Not(a) => Not(bx(f(a))),
            Exists(x, a) => Exists(x.clone(), bx(f(a))),
            Dia(a) => Dia(bx(f(a))),
            BoxPlus(a) => BoxPlus(bx(f(a))),
            PDia1(a) => PDia1(bx(f(a))),
            PDia2(a) => PDia2(bx(f(a))),
            XBox(a) => XBox(bx(f(a))),
            BoxIter(n, a) => BoxIter(*n, bx(f(a))),
            DiaIter(n, a) => DiaIter(*n, bx(f(a))),
            PDia1Iter(n, a) => PDia1Iter(*n, bx(f(a))),
            PDia2Iter(n, a) => PDia2Iter(*n, bx(f(a))),
            XBoxIter(n, a) => XBoxIter(*n, bx(f(a))),
            Next(a) => Next(bx(f(a))),
        }
    }

    /// Number of nodes of the tree as written (no expansion).
    pub fn size(&self) -> usize {
        let mut n = 0;
        self.visit(&mut |_| n += 1);
        n
    }

    /// Letters occurring in the formula as written, with arities.
    pub fn letters(&self) -> BTreeMap<String, usize> {
        let mut out = BTreeMap::new();
        self.visit(&mut |g| {
            if let Formula::Atom(l, a) = g {
                out.insert(l.clone(), a.len());
            }
        });
        out
    }

    /// Free variables of the formula as written.
    pub fn free_vars(&self) -> BTreeSet<Var> {
        fn go(f: &Formula, bound: &mut Vec<Var>, out: &mut BTreeSet<Var>) {
            match f {
                Formula::Atom(_, args) => {
                    for a in args {
                        if !bound.contains(a) {
                            out.insert(a.clone());
                        }
                    }
                }
                Formula::Forall(v, a) | Formula::Exists(v, a) => {
                    bound.push(v.clone());
                    go(a, bound, out);
                    bound.pop();
                }
                _ => {
                    for c in f.children() {
                        go(c, bound, out);
                    }
                }
            }
        }
        let mut out = BTreeSet::new();
        go(self, &mut Vec::new(), &mut out);
        out
    }

    /// Simultaneous renaming of free variables; bound occurrences are left
    /// alone. Capture is not avoided, callers rename into fresh names or use
    /// the two-variable discipline where it cannot happen.
    pub fn rename_free(&self, map: &BTreeMap<Var, Var>) -> Formula {
        match self {
            Formula::Atom(l, args) => Formula::Atom(
                l.clone(),
                args.iter()
                    .map(|a| map.get(a).cloned().unwrap_or_else(|| a.clone()))
                    .collect(),
            ),
            Formula::Forall(v, a) | Formula::Exists(v, a) => {
                let mut inner = map.clone();
                inner.remove(v);
                let body = a.rename_free(&inner);
                if matches!(self, Formula::Forall(..)) {
                    Formula::Forall(v.clone(), bx(body))
                } else {
                    Formula::Exists(v.clone(), bx(body))
                }
            }
            _ => self.map_children(&mut |c| c.rename_free(map)),
        }
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&print::math(self))
    }
}

impl Formula {
    /// Canonical S-expression form; `parse(f.to_sexpr())` gives `f` back.
    pub fn to_sexpr(&self) -> String {
        print::sexpr(self)
    }
}
