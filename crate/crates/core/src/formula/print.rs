use super::Formula;

pub(super) fn sexpr(f: &Formula) -> String {
    let mut out = String::new();
    write_sexpr(f, &mut out);
    out
}

fn write_sexpr(f: &Formula, out: &mut String) {
    use Formula::*;
    let unary = |name: &str, a: &Formula, out: &mut String| {
        out.push('(');
        out.push_str(name);
        out.push(' ');
        write_sexpr(a, out);
        out.push(')');
    };
    let iter = |name: &str, n: u32, a: &Formula, out: &mut String| {
        out.push_str(&format!("({name} {n} "));
        write_sexpr(a, out);
        out.push(')');
    };
    match f {
        Atom(l, args) if args.is_empty() => out.push_str(l),
        Atom(l, args) => {
            out.push('(');
            out.push_str(l);
            for a in args {
                out.push(' ');
                out.push_str(a);
            }
            out.push(')');
        }
        Bot => out.push_str("bot"),
        Top => out.push_str("T"),
        Implies(a, b) | Iff(a, b) => {
            out.push_str(if matches!(f, Implies(..)) { "(-> " } else { "(iff " });
            write_sexpr(a, out);
            out.push(' ');
            write_sexpr(b, out);
            out.push(')');
        }
        And(items) | Or(items) => {
            out.push_str(if matches!(f, And(..)) { "(and" } else { "(or" });
            for a in items {
                out.push(' ');
                write_sexpr(a, out);
            }
            out.push(')');
        }
        Forall(v, a) | Exists(v, a) => {
            let q = if matches!(f, Forall(..)) { "forall" } else { "exists" };
            out.push_str(&format!("({q} {v} "));
            write_sexpr(a, out);
            out.push(')');
        }
        Box(a) => unary("box", a, out),
        Not(a) => unary("not", a, out),
        Dia(a) => unary("dia", a, out),
        BoxPlus(a) => unary("boxp", a, out),
        PDia1(a) => unary("pdia1", a, out),
        PDia2(a) => unary("pdia2", a, out),
        XBox(a) => unary("xbox", a, out),
        Next(a) => unary("next", a, out),
        BoxIter(n, a) => iter("boxn", *n, a, out),
        DiaIter(n, a) => iter("dian", *n, a, out),
        PDia1Iter(n, a) => iter("pdia1n", *n, a, out),
        PDia2Iter(n, a) => iter("pdia2n", *n, a, out),
        XBoxIter(n, a) => iter("xboxn", *n, a, out),
    }
}

fn superscript(n: u32) -> String {
    const DIGITS: [char; 10] = ['⁰', '¹', '²', '³', '⁴', '⁵', '⁶', '⁷', '⁸', '⁹'];
    n.to_string()
        .chars()
        .map(|c| DIGITS[c.to_digit(10).unwrap() as usize])
        .collect()
}

// binding strength: 0 for → and ↔, 1 for ∨, 2 for ∧, 3 for everything tighter
fn level(f: &Formula) -> u8 {
    match f {
        Formula::Implies(..) | Formula::Iff(..) => 0,
        Formula::Or(v) if v.len() > 1 => 1,
        Formula::And(v) if v.len() > 1 => 2,
        _ => 3,
    }
}

fn operand(f: &Formula, min: u8, out: &mut String) {
    if level(f) < min {
        out.push('(');
        write_math(f, out);
        out.push(')');
    } else {
        write_math(f, out);
    }
}

pub(super) fn math(f: &Formula) -> String {
    let mut out = String::new();
    write_math(f, &mut out);
    out
}

fn write_math(f: &Formula, out: &mut String) {
    use Formula::*;
    let prefix = |op: &str, a: &Formula, out: &mut String| {
        out.push_str(op);
        operand(a, 3, out);
    };
    match f {
        Atom(l, args) if args.is_empty() => out.push_str(l),
        Atom(l, args) => {
            out.push_str(l);
            out.push('(');
            out.push_str(&args.join(", "));
            out.push(')');
        }
        Bot => out.push('⊥'),
        Top => out.push('⊤'),
        Implies(a, b) | Iff(a, b) => {
            operand(a, 1, out);
            out.push_str(if matches!(f, Implies(..)) { " → " } else { " ↔ " });
            operand(b, 1, out);
        }
        And(items) | Or(items) => match items.len() {
            0 => out.push(if matches!(f, And(..)) { '⊤' } else { '⊥' }),
            1 => write_math(&items[0], out),
            _ => {
                let (sep, min) = if matches!(f, And(..)) { (" ∧ ", 3) } else { (" ∨ ", 2) };
                for (i, a) in items.iter().enumerate() {
                    if i > 0 {
                        out.push_str(sep);
                    }
                    operand(a, min, out);
                }
            }
        },
        Forall(v, a) | Exists(v, a) => {
            out.push(if matches!(f, Forall(..)) { '∀' } else { '∃' });
            out.push_str(v);
            if !matches!(**a, Forall(..) | Exists(..)) {
                out.push(' ');
            }
            operand(a, 3, out);
        }
        Box(a) => prefix("□", a, out),
        Not(a) => prefix("¬", a, out),
        Dia(a) => prefix("◇", a, out),
        BoxPlus(a) => prefix("□⁺", a, out),
        PDia1(a) => prefix("⧈", a, out),
        PDia2(a) => prefix("⧈₂", a, out),
        XBox(a) => prefix("⊠", a, out),
        Next(a) => prefix("○", a, out),
        BoxIter(n, a) => prefix(&format!("□{}", superscript(*n)), a, out),
        DiaIter(n, a) => prefix(&format!("◇{}", superscript(*n)), a, out),
        PDia1Iter(n, a) => prefix(&format!("⧈{}", superscript(*n)), a, out),
        PDia2Iter(n, a) => prefix(&format!("⧈₂{}", superscript(*n)), a, out),
        XBoxIter(n, a) => prefix(&format!("⊠{}", superscript(*n)), a, out),
    }
}
