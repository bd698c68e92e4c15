use super::{Formula, FormulaError};

fn bx(f: Formula) -> Box<Formula> {
    Box::new(f)
}

fn imp(a: Formula, b: Formula) -> Formula {
    Formula::Implies(bx(a), bx(b))
}

fn neg(a: Formula) -> Formula {
    imp(a, Formula::Bot)
}

fn and2(a: Formula, b: Formula) -> Formula {
    neg(imp(a, neg(b)))
}

fn top() -> Formula {
    imp(Formula::Bot, Formula::Bot)
}

fn dia(a: Formula) -> Formula {
    neg(Formula::Box(bx(neg(a))))
}

fn forall_p() -> Formula {
    Formula::Forall("x".into(), bx(Formula::atom("P", &["x"])))
}

fn iterate(n: u32, a: Formula, step: impl Fn(Formula) -> Formula) -> Formula {
    (0..n).fold(a, |acc, _| step(acc))
}

/// Rewrites every derived operator into `Atom`/`⊥`/`→`/`□`/`∀`.
///
/// `⧈` uses the letter `p`, `⧈₂` uses `P` (as `∀x P(x)`) and `⊠` uses `q`;
/// iterates unfold from the inside, `⧈⁰φ = φ`.
pub fn expand(f: &Formula) -> Result<Formula, FormulaError> {
    use Formula::*;
    Ok(match f {
        Atom(..) | Bot => f.clone(),
        Implies(a, b) => imp(expand(a)?, expand(b)?),
        Box(a) => Box(bx(expand(a)?)),
        Forall(v, a) => Forall(v.clone(), bx(expand(a)?)),
        Top => top(),
        Not(a) => neg(expand(a)?),
        And(items) => {
            let mut parts = items.iter().map(expand).collect::<Result<Vec<_>, _>>()?;
            match parts.pop() {
                None => top(),
                Some(last) => parts.into_iter().rev().fold(last, |acc, a| and2(a, acc)),
            }
        }
        Or(items) => {
            let mut parts = items.iter().map(expand).collect::<Result<Vec<_>, _>>()?;
            match parts.pop() {
                None => Bot,
                Some(last) => parts.into_iter().rev().fold(last, |acc, a| imp(neg(a), acc)),
            }
        }
        Iff(a, b) => {
            let (a, b) = (expand(a)?, expand(b)?);
            and2(imp(a.clone(), b.clone()), imp(b, a))
        }
        Exists(v, a) => neg(Forall(v.clone(), bx(neg(expand(a)?)))),
        Dia(a) => dia(expand(a)?),
        BoxPlus(a) => {
            let a = expand(a)?;
            and2(a.clone(), Box(bx(a)))
        }
        PDia1(a) => pdia1(expand(a)?),
        PDia2(a) => pdia2(expand(a)?),
        XBox(a) => xbox(expand(a)?),
        BoxIter(n, a) => iterate(*n, expand(a)?, |g| Box(bx(g))),
        DiaIter(n, a) => neg(iterate(*n, neg(expand(a)?), |g| Box(bx(g)))),
        PDia1Iter(n, a) => iterate(*n, expand(a)?, pdia1),
        PDia2Iter(n, a) => iterate(*n, expand(a)?, pdia2),
        XBoxIter(n, a) => iterate(*n, expand(a)?, xbox),
        Next(_) => return Err(FormulaError::NotSupported("next")),
    })
}

fn pdia1(a: Formula) -> Formula {
    let p = Formula::prop("p");
    dia(and2(p.clone(), dia(and2(neg(p), a))))
}

fn pdia2(a: Formula) -> Formula {
    dia(and2(forall_p(), dia(and2(neg(forall_p()), a))))
}

fn xbox(a: Formula) -> Formula {
    let q = Formula::prop("q");
    let left = and2(q.clone(), Formula::Box(bx(imp(neg(q.clone()), a.clone()))));
    let right = and2(neg(q.clone()), Formula::Box(bx(imp(q, a))));
    imp(neg(left), right)
}

/// True when only core constructors occur.
pub fn is_core(f: &Formula) -> bool {
    let mut ok = true;
    f.visit(&mut |g| {
        if !matches!(
            g,
            Formula::Atom(..) | Formula::Bot | Formula::Implies(..) | Formula::Box(..) | Formula::Forall(..)
        ) {
            ok = false;
        }
    });
    ok
}
