//! Formula families reducing the recurrent tiling problem to satisfiability
//! over linear frames.
//!
//! [`gen_base`] builds `A = A₀ ∧ … ∧ A₉` over the letters `Succ` (the grid
//! successor `◁`), `M`, `p` and `P0 … Ps`. [`prime_pass`] removes `Succ`,
//! [`star_pass`] then removes every letter but the monadic `P` and the
//! proposition `q`, and [`boxplus_pass`] adapts a formula to frames between
//! `<` and `≤`.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;
use thiserror::Error;

use crate::formula::{self, expand, parse, Formula, FormulaError, Metrics, Signature};
use crate::tiling::{TileSet, TileType, TilingError};

/// Letter names used by the generated formulas.
pub mod letters {
    pub const SUCC: &str = "Succ";
    pub const MARK: &str = "M";
    pub const SEP: &str = "p";
    pub const P: &str = "P";
    pub const Q: &str = "q";

    pub fn tile(n: usize) -> String {
        format!("P{n}")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Variant {
    /// `A₀ … A₉` over `Succ, M, p, P0 … Ps`.
    A,
    /// `Succ(a,b)` replaced by `⧈(P{s+1}(a) ∧ P{s+2}(b))`.
    APrime,
    /// Monadic `P` and propositional `q` only.
    AStar,
    /// `A*` with every `□` read reflexively.
    APlus,
    /// `A₀ … A₈`.
    B,
    /// `A₀ … A₈` and the ordinal form of `A₉`.
    ABullet,
}

impl Variant {
    pub const ALL: [Variant; 6] = [Variant::A, Variant::APrime, Variant::AStar, Variant::APlus, Variant::B, Variant::ABullet];

    pub fn name(self) -> &'static str {
        match self {
            Variant::A => "A",
            Variant::APrime => "Aprime",
            Variant::AStar => "Astar",
            Variant::APlus => "Aplus",
            Variant::B => "B",
            Variant::ABullet => "Abullet",
        }
    }

    fn suffix(self) -> &'static str {
        match self {
            Variant::A | Variant::B | Variant::ABullet => "",
            Variant::APrime => "'",
            Variant::AStar => "*",
            Variant::APlus => "+",
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Variant {
    type Err = ReductionError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Variant::ALL
            .into_iter()
            .find(|v| v.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| ReductionError::UnknownVariant(s.to_string()))
    }
}

#[derive(Debug, Error)]
pub enum ReductionError {
    #[error(transparent)]
    Formula(#[from] FormulaError),
    #[error(transparent)]
    Tiling(#[from] TilingError),
    #[error("unknown variant `{0}`")]
    UnknownVariant(String),
    #[error("`{pass}` expects a {expected} artifact, got {found}")]
    WrongInput { pass: &'static str, expected: Variant, found: Variant },
    #[error("artifact file line {line}: {msg}")]
    Format { line: usize, msg: String },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NamedConjunct {
    pub name: String,
    /// Position `i` of `A_i` in the family.
    pub index: usize,
    pub formula: Formula,
}

/// A generated formula family together with what it was generated from.
#[derive(Debug, Clone, PartialEq)]
pub struct ReductionArtifact {
    pub variant: Variant,
    pub tiles: TileSet,
    pub conjuncts: Vec<NamedConjunct>,
    pub signature: Signature,
}

impl ReductionArtifact {
    pub fn s(&self) -> usize {
        self.tiles.s()
    }

    pub fn conjunction(&self) -> Formula {
        Formula::conj(self.conjuncts.iter().map(|c| c.formula.clone()).collect())
    }

    pub fn get(&self, index: usize) -> Option<&NamedConjunct> {
        self.conjuncts.iter().find(|c| c.index == index)
    }

    pub fn metrics(&self) -> Result<Metrics, FormulaError> {
        formula::metrics(&self.conjunction())
    }

    /// Header lines `#! …`, then for each conjunct a `# A_i` line followed
    /// by its S-expression.
    pub fn to_file(&self) -> String {
        let mut out = format!("#! variant {}\n", self.variant.name());
        for (i, t) in self.tiles.tiles().iter().enumerate() {
            out.push_str(&format!("#! tile {i}: {} {} {} {}\n", t.left, t.right, t.up, t.down));
        }
        let sig: Vec<String> = self.signature.letters().map(|(l, a)| format!("{l}:{a}")).collect();
        out.push_str(&format!("#! letters {}\n", sig.join(" ")));
        for c in &self.conjuncts {
            out.push_str(&format!("# {}\n{}\n", c.name, c.formula.to_sexpr()));
        }
        out
    }

    pub fn parse_file(text: &str) -> Result<Self, ReductionError> {
        let ferr = |line: usize, msg: &str| ReductionError::Format { line, msg: msg.to_string() };
        let mut variant = None;
        let mut tiles = Vec::new();
        let mut signature = Signature::new();
        let mut conjuncts = Vec::new();
        let mut pending: Option<String> = None;
        for (i, raw) in text.lines().enumerate() {
            let ln = i + 1;
            let line = raw.trim();
            if line.is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix("#!") {
                let mut words = rest.split_whitespace();
                match words.next() {
                    Some("variant") => {
                        variant = Some(words.next().ok_or_else(|| ferr(ln, "missing variant"))?.parse()?)
                    }
                    Some("tile") => {
                        let nums: Vec<u32> = words
                            .skip(1)
                            .map(|w| w.parse().map_err(|_| ferr(ln, "bad colour")))
                            .collect::<Result<_, _>>()?;
                        if nums.len() != 4 {
                            return Err(ferr(ln, "expected four colours"));
                        }
                        tiles.push(TileType::new(nums[0], nums[1], nums[2], nums[3]));
                    }
                    Some("letters") => {
                        for w in words {
                            let (l, a) = w.split_once(':').ok_or_else(|| ferr(ln, "expected name:arity"))?;
                            let a: usize = a.parse().map_err(|_| ferr(ln, "bad arity"))?;
                            signature.declare(l, a)?;
                        }
                    }
                    _ => return Err(ferr(ln, "unknown header")),
                }
            } else if let Some(name) = line.strip_prefix('#') {
                if pending.is_some() {
                    return Err(ferr(ln, "conjunct name without formula"));
                }
                pending = Some(name.trim().to_string());
            } else {
                let name = pending.take().ok_or_else(|| ferr(ln, "formula without `# A_i` name line"))?;
                let index = conjunct_index(&name).ok_or_else(|| ferr(ln, "name must look like A_i"))?;
                let formula = parse(line, &signature)?;
                conjuncts.push(NamedConjunct { name, index, formula });
            }
        }
        if pending.is_some() {
            return Err(ferr(0, "trailing conjunct name"));
        }
        Ok(ReductionArtifact {
            variant: variant.ok_or_else(|| ferr(0, "missing `#! variant` header"))?,
            tiles: TileSet::new(tiles)?,
            conjuncts,
            signature,
        })
    }
}

fn conjunct_index(name: &str) -> Option<usize> {
    let digits: String = name.strip_prefix("A_")?.chars().take_while(|c| c.is_ascii_digit()).collect();
    digits.parse().ok()
}

fn atom1(l: &str, v: &str) -> Formula {
    Formula::atom(l, &[v])
}

fn tile_atom(t: usize, v: &str) -> Formula {
    Formula::atom(&letters::tile(t), &[v])
}

fn succ() -> Formula {
    Formula::atom(letters::SUCC, &["x", "y"])
}

fn mark(v: &str) -> Formula {
    atom1(letters::MARK, v)
}

/// `U(v) = ⋀_t ¬P_t(v)`.
fn unused(s: usize, v: &str) -> Formula {
    Formula::conj((0..=s).map(|t| Formula::not(tile_atom(t, v))).collect())
}

fn name(i: usize, variant: Variant) -> String {
    format!("A_{i}{}", variant.suffix())
}

fn base_signature(s: usize) -> Signature {
    let mut sig = Signature::new();
    sig.declare(letters::SUCC, 2).unwrap();
    sig.declare(letters::MARK, 1).unwrap();
    sig.declare(letters::SEP, 0).unwrap();
    for t in 0..=s {
        sig.declare(&letters::tile(t), 1).unwrap();
    }
    sig
}

fn base_conjunct(i: usize, tiles: &TileSet) -> Formula {
    use Formula as F;
    let s = tiles.s();
    let ts = 0..=s;
    let all = |f: F| F::forall("x", F::forall("y", f));
    match i {
        0 => F::exists("x", F::boxed(unused(s, "x"))),
        1 => F::exists("x", F::and2(F::not(unused(s, "x")), mark("x"))),
        2 => F::forall("x", F::exists("y", succ())),
        3 => all(F::implies(succ(), F::boxed(F::implies(F::exists("x", mark("x")), succ())))),
        4 => all(F::implies(
            succ(),
            F::boxed(F::iff(
                mark("x"),
                F::And(vec![F::not(F::prop(letters::SEP)), F::pdia1(mark("y")), F::not(F::pdia1_iter(2, mark("y")))]),
            )),
        )),
        5 => all(F::boxed(F::conj(
            ts.map(|t| {
                F::implies(
                    F::and2(mark("x"), tile_atom(t, "y")),
                    F::boxed(F::implies(mark("x"), tile_atom(t, "y"))),
                )
            })
            .collect(),
        ))),
        6 => F::forall(
            "x",
            F::boxed(F::conj(
                ts.map(|t| {
                    let others: Vec<F> = (0..=s).filter(|&u| u != t).map(|u| F::not(tile_atom(u, "x"))).collect();
                    let rhs = if others.is_empty() { F::Top } else { F::conj(others) };
                    F::implies(tile_atom(t, "x"), rhs)
                })
                .collect(),
            )),
        ),
        7 => all(F::boxed(F::conj(
            ts.map(|t| {
                let next: Vec<F> = (0..=s)
                    .filter(|&u| tiles.h_ok(t, u))
                    .map(|u| tile_atom(u, "y"))
                    .collect();
                F::implies(F::and2(succ(), tile_atom(t, "x")), or_bot(next))
            })
            .collect(),
        ))),
        8 => all(F::boxed(F::conj(
            ts.map(|t| {
                let above: Vec<F> = (0..=s)
                    .filter(|&u| tiles.v_ok(t, u))
                    .map(|u| tile_atom(u, "y"))
                    .collect();
                F::implies(
                    F::and2(mark("x"), tile_atom(t, "y")),
                    F::boxed(F::implies(F::exists("y", F::and2(succ(), mark("y"))), or_bot(above))),
                )
            })
            .collect(),
        ))),
        9 => F::forall("x", F::implies(mark("x"), F::boxed(F::pdia1(tile_atom(0, "x"))))),
        _ => unreachable!("conjunct index out of range"),
    }
}

fn or_bot(items: Vec<Formula>) -> Formula {
    if items.is_empty() {
        Formula::Bot
    } else {
        Formula::disj(items)
    }
}

/// `A₀ … A₉` for the tile set.
pub fn gen_base(tiles: &TileSet) -> ReductionArtifact {
    ReductionArtifact {
        variant: Variant::A,
        tiles: tiles.clone(),
        conjuncts: (0..=9)
            .map(|i| NamedConjunct { name: name(i, Variant::A), index: i, formula: base_conjunct(i, tiles) })
            .collect(),
        signature: base_signature(tiles.s()),
    }
}

/// The ordinal form of the recurrence conjunct:
/// `∀x (M(x) → □(∃y M(y) → ⧈(∃y M(y) → P_{t₀}(x))))`.
pub fn a9_bullet() -> Formula {
    use Formula as F;
    let some_mark = || F::exists("y", mark("y"));
    F::forall(
        "x",
        F::implies(mark("x"), F::boxed(F::implies(some_mark(), F::pdia1(F::implies(some_mark(), tile_atom(0, "x")))))),
    )
}

/// Replaces every `Succ(a, b)` with `⧈(P{s+1}(a) ∧ P{s+2}(b))`.
pub fn prime_formula(f: &Formula, s: usize) -> Formula {
    match f {
        Formula::Atom(l, args) if l == letters::SUCC => Formula::pdia1(Formula::and2(
            tile_atom(s + 1, &args[0]),
            tile_atom(s + 2, &args[1]),
        )),
        _ => f.map_children(&mut |c| prime_formula(c, s)),
    }
}

pub fn prime_pass(base: &ReductionArtifact) -> Result<ReductionArtifact, ReductionError> {
    if base.variant != Variant::A {
        return Err(ReductionError::WrongInput { pass: "prime", expected: Variant::A, found: base.variant });
    }
    let s = base.s();
    let mut sig = Signature::new();
    sig.declare(letters::MARK, 1)?;
    sig.declare(letters::SEP, 0)?;
    for t in 0..=s + 2 {
        sig.declare(&letters::tile(t), 1)?;
    }
    Ok(ReductionArtifact {
        variant: Variant::APrime,
        tiles: base.tiles.clone(),
        conjuncts: base
            .conjuncts
            .iter()
            .map(|c| NamedConjunct {
                name: name(c.index, Variant::APrime),
                index: c.index,
                formula: prime_formula(&c.formula, s),
            })
            .collect(),
        signature: sig,
    })
}

fn other(v: &str) -> &'static str {
    if v == "x" {
        "y"
    } else {
        "x"
    }
}

/// `q ∧ P(v)`.
pub fn marked(v: &str) -> Formula {
    Formula::and2(Formula::prop(letters::Q), atom1(letters::P, v))
}

fn forall_p() -> Formula {
    Formula::forall("x", atom1(letters::P, "x"))
}

/// The tile-encoding formula
///
/// `βₙ(x) = ∃y (⧈₂^{s+4}(q∧P(y)) ∧ ¬⧈₂^{s+5}(q∧P(y)) ∧
///          ⧈₂(⧈₂^{n+1}(q∧P(y)) ∧ ¬⧈₂^{n+2}(q∧P(y)) ∧ P(x)))`,
/// with the roles of the variables swapped for `βₙ(y)`.
pub fn gen_beta(n: usize, var: &str, s: usize) -> Formula {
    use Formula as F;
    let w = other(var);
    let block = |k: usize| F::pdia2_iter(k as u32, marked(w));
    F::exists(
        w,
        F::And(vec![
            block(s + 4),
            F::not(block(s + 5)),
            F::pdia2(F::And(vec![block(n + 1), F::not(block(n + 2)), atom1(letters::P, var)])),
        ]),
    )
}

/// Rewrites a formula of the primed family into the `P`, `q` language.
pub fn star_formula(f: &Formula, s: usize) -> Formula {
    match f {
        Formula::Atom(l, args) if l == letters::MARK => marked(&args[0]),
        Formula::Atom(l, args) if l == letters::SEP && args.is_empty() => forall_p(),
        Formula::Atom(l, args) if args.len() == 1 => match tile_index(l) {
            Some(n) if n <= s + 2 => gen_beta(n, &args[0], s),
            _ => f.clone(),
        },
        Formula::PDia1(a) => Formula::pdia2(star_formula(a, s)),
        Formula::PDia1Iter(k, a) => Formula::pdia2_iter(*k, star_formula(a, s)),
        _ => f.map_children(&mut |c| star_formula(c, s)),
    }
}

fn tile_index(letter: &str) -> Option<usize> {
    let d = letter.strip_prefix('P')?;
    if d.is_empty() || !d.chars().all(|c| c.is_ascii_digit()) {
        return None;
    }
    d.parse().ok()
}

/// `A₄*`, installed directly rather than obtained through the pass.
pub fn a4_star(s: usize) -> Formula {
    use Formula as F;
    F::forall(
        "x",
        F::forall(
            "y",
            F::implies(
                F::pdia2(F::and2(gen_beta(s + 1, "x", s), gen_beta(s + 2, "y", s))),
                F::boxed(F::iff(
                    marked("x"),
                    F::And(vec![
                        F::not(forall_p()),
                        F::pdia2_iter(s as u32 + 4, marked("y")),
                        F::not(F::pdia2_iter(s as u32 + 5, marked("y"))),
                    ]),
                )),
            ),
        ),
    )
}

/// `A₉* = ∀x (q ∧ P(x) → □⧈₂β₀(x))`.
pub fn a9_star(s: usize) -> Formula {
    use Formula as F;
    F::forall("x", F::implies(marked("x"), F::boxed(F::pdia2(gen_beta(0, "x", s)))))
}

fn star_signature() -> Signature {
    Signature::with_letters([(letters::P, 1), (letters::Q, 0)]).unwrap()
}

pub fn star_pass(primed: &ReductionArtifact) -> Result<ReductionArtifact, ReductionError> {
    if primed.variant != Variant::APrime {
        return Err(ReductionError::WrongInput { pass: "star", expected: Variant::APrime, found: primed.variant });
    }
    let s = primed.s();
    let conjuncts = primed
        .conjuncts
        .iter()
        .map(|c| NamedConjunct {
            name: name(c.index, Variant::AStar),
            index: c.index,
            formula: match c.index {
                4 => a4_star(s),
                9 => a9_star(s),
                _ => star_formula(&c.formula, s),
            },
        })
        .collect();
    Ok(ReductionArtifact { variant: Variant::AStar, tiles: primed.tiles.clone(), conjuncts, signature: star_signature() })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum BoxPlusMode {
    /// Expand all abbreviations first, then turn every `□` into `□⁺`.
    Expanded,
    /// Keep abbreviations, unfolding modal ones one level so that their
    /// hidden boxes are reachable.
    Unexpanded,
}

/// Replaces every `□` with `□⁺`.
pub fn boxplus_pass(f: &Formula, mode: BoxPlusMode) -> Result<Formula, FormulaError> {
    match mode {
        BoxPlusMode::Expanded => Ok(plus_core(&expand(f)?)),
        BoxPlusMode::Unexpanded => plus_derived(f),
    }
}

fn plus_core(f: &Formula) -> Formula {
    match f {
        Formula::Box(a) => Formula::boxplus(plus_core(a)),
        _ => f.map_children(&mut plus_core),
    }
}

fn dia_plus(a: Formula) -> Formula {
    Formula::not(Formula::boxplus(Formula::not(a)))
}

fn pdia_plus(marker: &Formula, a: Formula) -> Formula {
    dia_plus(Formula::and2(marker.clone(), dia_plus(Formula::and2(Formula::not(marker.clone()), a))))
}

fn iterate(n: u32, a: Formula, step: impl Fn(Formula) -> Formula) -> Formula {
    (0..n).fold(a, |acc, _| step(acc))
}

fn xbox_plus(a: Formula) -> Formula {
    use Formula as F;
    let q = F::prop(letters::Q);
    F::or2(
        F::and2(q.clone(), F::boxplus(F::implies(F::not(q.clone()), a.clone()))),
        F::and2(F::not(q.clone()), F::boxplus(F::implies(q, a))),
    )
}

fn plus_derived(f: &Formula) -> Result<Formula, FormulaError> {
    use Formula as F;
    let sep = F::prop(letters::SEP);
    Ok(match f {
        F::Box(a) => F::boxplus(plus_derived(a)?),
        F::BoxIter(n, a) => iterate(*n, plus_derived(a)?, F::boxplus),
        F::Dia(a) => dia_plus(plus_derived(a)?),
        F::DiaIter(n, a) => iterate(*n, plus_derived(a)?, dia_plus),
        F::PDia1(a) => pdia_plus(&sep, plus_derived(a)?),
        F::PDia1Iter(n, a) => {
            let a = plus_derived(a)?;
            iterate(*n, a, |g| pdia_plus(&sep, g))
        }
        F::PDia2(a) => pdia_plus(&forall_p(), plus_derived(a)?),
        F::PDia2Iter(n, a) => {
            let a = plus_derived(a)?;
            iterate(*n, a, |g| pdia_plus(&forall_p(), g))
        }
        F::XBox(a) => xbox_plus(plus_derived(a)?),
        F::XBoxIter(n, a) => iterate(*n, plus_derived(a)?, xbox_plus),
        F::BoxPlus(a) => F::boxplus(plus_derived(a)?),
        F::Next(_) => return Err(FormulaError::NotSupported("next")),
        _ => {
            let mut err = None;
            let g = f.map_children(&mut |c| match plus_derived(c) {
                Ok(g) => g,
                Err(e) => {
                    err = Some(e);
                    Formula::Bot
                }
            });
            if let Some(e) = err {
                return Err(e);
            }
            g
        }
    })
}

/// Builds the artifact of a variant.
pub fn gen_variant(tiles: &TileSet, variant: Variant) -> Result<ReductionArtifact, ReductionError> {
    let base = gen_base(tiles);
    Ok(match variant {
        Variant::A => base,
        Variant::APrime => prime_pass(&base)?,
        Variant::AStar => star_pass(&prime_pass(&base)?)?,
        Variant::APlus => {
            let star = star_pass(&prime_pass(&base)?)?;
            let conjuncts = star
                .conjuncts
                .iter()
                .map(|c| {
                    Ok(NamedConjunct {
                        name: name(c.index, Variant::APlus),
                        index: c.index,
                        formula: boxplus_pass(&c.formula, BoxPlusMode::Expanded)?,
                    })
                })
                .collect::<Result<_, FormulaError>>()?;
            ReductionArtifact { variant: Variant::APlus, conjuncts, ..star }
        }
        Variant::B => {
            let mut b = base;
            b.variant = Variant::B;
            b.conjuncts.retain(|c| c.index <= 8);
            b
        }
        Variant::ABullet => {
            let mut b = base;
            b.variant = Variant::ABullet;
            b.conjuncts.retain(|c| c.index <= 8);
            b.conjuncts.push(NamedConjunct { name: "A_9•".into(), index: 9, formula: a9_bullet() });
            b
        }
    })
}

/// Formulas separating finite-chain logics from one another.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Separation {
    /// `Z = □(□p → p) → (◇□p → □p)`.
    Z,
    /// `□p → p`.
    Ref,
    /// `□ⁿ(□p → p)`.
    BoxIterRef(u32),
    /// `⊠ⁿZ`.
    XBoxIterZ(u32),
}

impl FromStr for Separation {
    type Err = ReductionError;
    /// `Z`, `ref`, `boxn:<n>` or `xboxn:<n>`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || ReductionError::UnknownVariant(s.to_string());
        match s {
            "Z" | "z" => Ok(Separation::Z),
            "ref" => Ok(Separation::Ref),
            _ => {
                let (head, n) = s.split_once(':').ok_or_else(bad)?;
                let n: u32 = n.parse().map_err(|_| bad())?;
                match head {
                    "boxn" => Ok(Separation::BoxIterRef(n)),
                    "xboxn" => Ok(Separation::XBoxIterZ(n)),
                    _ => Err(bad()),
                }
            }
        }
    }
}

pub fn separation_signature() -> Signature {
    Signature::with_letters([(letters::SEP, 0), (letters::Q, 0)]).unwrap()
}

pub fn gen_separation(kind: Separation) -> Formula {
    use Formula as F;
    let p = || F::prop(letters::SEP);
    let refl = || F::implies(F::boxed(p()), p());
    let z = || F::implies(F::boxed(refl()), F::implies(F::dia(F::boxed(p())), F::boxed(p())));
    match kind {
        Separation::Z => z(),
        Separation::Ref => refl(),
        Separation::BoxIterRef(n) => F::box_iter(n, refl()),
        Separation::XBoxIterZ(n) => F::xbox_iter(n, z()),
    }
}
