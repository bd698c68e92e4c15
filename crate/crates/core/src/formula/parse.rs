use super::{valid_ident, Formula, FormulaError, Signature};

#[derive(Debug, Clone, PartialEq)]
enum Tok<'a> {
    Open,
    Close,
    Word(&'a str),
}

fn tokenize(src: &str) -> Result<Vec<(usize, Tok<'_>)>, FormulaError> {
    let mut out = Vec::new();
    let bytes = src.as_bytes();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        if c.is_ascii_whitespace() {
            i += 1;
        } else if c == b';' {
            while i < bytes.len() && bytes[i] != b'\n' {
                i += 1;
            }
        } else if c == b'(' {
            out.push((i, Tok::Open));
            i += 1;
        } else if c == b')' {
            out.push((i, Tok::Close));
            i += 1;
        } else {
            let start = i;
            while i < bytes.len() && !bytes[i].is_ascii_whitespace() && bytes[i] != b'(' && bytes[i] != b')' {
                i += 1;
            }
            out.push((start, Tok::Word(&src[start..i])));
        }
    }
    Ok(out)
}

struct Parser<'a, 's> {
    toks: Vec<(usize, Tok<'a>)>,
    pos: usize,
    end: usize,
    sig: &'s Signature,
}

fn perr(pos: usize, msg: impl Into<String>) -> FormulaError {
    FormulaError::Parse { pos, msg: msg.into() }
}

impl<'a> Parser<'a, '_> {
    fn here(&self) -> usize {
        self.toks.get(self.pos).map_or(self.end, |t| t.0)
    }

    fn next(&mut self) -> Result<(usize, Tok<'a>), FormulaError> {
        let t = self
            .toks
            .get(self.pos)
            .cloned()
            .ok_or_else(|| perr(self.end, "unexpected end of input"))?;
        self.pos += 1;
        Ok(t)
    }

    fn close(&mut self) -> Result<(), FormulaError> {
        match self.next()? {
            (_, Tok::Close) => Ok(()),
            (p, _) => Err(perr(p, "expected `)`")),
        }
    }

    fn word(&mut self) -> Result<(usize, &'a str), FormulaError> {
        match self.next()? {
            (p, Tok::Word(w)) => Ok((p, w)),
            (p, _) => Err(perr(p, "expected a name")),
        }
    }

    fn var(&mut self) -> Result<String, FormulaError> {
        let (p, w) = self.word()?;
        if !valid_ident(w) {
            return Err(perr(p, format!("`{w}` is not a variable name")));
        }
        if !self.sig.has_var(w) {
            return Err(FormulaError::UndeclaredVariable(w.to_string()));
        }
        Ok(w.to_string())
    }

    fn count(&mut self) -> Result<u32, FormulaError> {
        let (p, w) = self.word()?;
        w.parse().map_err(|_| perr(p, format!("expected an iteration count, found `{w}`")))
    }

    fn letter(&self, p: usize, name: &str, args: Vec<String>) -> Result<Formula, FormulaError> {
        if !valid_ident(name) {
            return Err(perr(p, format!("unexpected `{name}`")));
        }
        match self.sig.arity(name) {
            None => Err(FormulaError::UndeclaredLetter(name.to_string())),
            Some(a) if a != args.len() => Err(FormulaError::ArityMismatch {
                letter: name.to_string(),
                expected: a,
                found: args.len(),
            }),
            Some(_) => Ok(Formula::Atom(name.to_string(), args)),
        }
    }

    fn expr(&mut self) -> Result<Formula, FormulaError> {
        let (p, t) = self.next()?;
        match t {
            Tok::Close => Err(perr(p, "unexpected `)`")),
            Tok::Word("bot") => Ok(Formula::Bot),
            Tok::Word("T") => Ok(Formula::Top),
            Tok::Word(w) => self.letter(p, w, Vec::new()),
            Tok::Open => {
                let (hp, head) = self.word()?;
                let f = self.compound(hp, head)?;
                Ok(f)
            }
        }
    }

    fn unary(&mut self, build: fn(Box<Formula>) -> Formula) -> Result<Formula, FormulaError> {
        let a = self.expr()?;
        self.close()?;
        Ok(build(Box::new(a)))
    }

    fn iter(&mut self, build: fn(u32, Box<Formula>) -> Formula) -> Result<Formula, FormulaError> {
        let n = self.count()?;
        let a = self.expr()?;
        self.close()?;
        Ok(build(n, Box::new(a)))
    }

    fn list(&mut self) -> Result<Vec<Formula>, FormulaError> {
        let mut items = Vec::new();
        while !matches!(self.toks.get(self.pos), Some((_, Tok::Close)) | None) {
            items.push(self.expr()?);
        }
        self.close()?;
        Ok(items)
    }

    fn compound(&mut self, hp: usize, head: &'a str) -> Result<Formula, FormulaError> {
        use Formula as F;
        match head {
            "->" | "iff" => {
                let a = self.expr()?;
                let b = self.expr()?;
                self.close()?;
                Ok(if head == "->" { F::implies(a, b) } else { F::iff(a, b) })
            }
            "not" => self.unary(F::Not),
            "box" => self.unary(F::Box),
            "dia" => self.unary(F::Dia),
            "boxp" => self.unary(F::BoxPlus),
            "pdia1" => self.unary(F::PDia1),
            "pdia2" => self.unary(F::PDia2),
            "xbox" => self.unary(F::XBox),
            "next" => self.unary(F::Next),
            "boxn" => self.iter(F::BoxIter),
            "dian" => self.iter(F::DiaIter),
            "pdia1n" => self.iter(F::PDia1Iter),
            "pdia2n" => self.iter(F::PDia2Iter),
            "xboxn" => self.iter(F::XBoxIter),
            "and" => Ok(F::And(self.list()?)),
            "or" => Ok(F::Or(self.list()?)),
            "forall" | "exists" => {
                let v = self.var()?;
                let a = self.expr()?;
                self.close()?;
                Ok(if head == "forall" { F::forall(&v, a) } else { F::exists(&v, a) })
            }
            "bot" | "T" => Err(perr(hp, format!("`{head}` takes no arguments"))),
            _ => {
                let mut args = Vec::new();
                loop {
                    match self.toks.get(self.pos) {
                        Some((_, Tok::Close)) => break,
                        Some((p, Tok::Word(_))) => {
                            let p = *p;
                            let v = self.var().map_err(|e| match e {
                                FormulaError::Parse { .. } => perr(p, "expected a variable"),
                                e => e,
                            })?;
                            args.push(v);
                        }
                        Some((p, Tok::Open)) => return Err(perr(*p, "atom arguments must be variables")),
                        None => return Err(perr(self.end, "unexpected end of input")),
                    }
                }
                self.close()?;
                self.letter(hp, head, args)
            }
        }
    }
}

/// Parses one S-expression formula, checking letters and arities against
/// `sig`. Errors carry the byte offset of the offending token.
pub fn parse(src: &str, sig: &Signature) -> Result<Formula, FormulaError> {
    let toks = tokenize(src)?;
    let mut p = Parser { toks, pos: 0, end: src.len(), sig };
    let f = p.expr()?;
    if p.pos < p.toks.len() {
        return Err(perr(p.here(), "trailing input"));
    }
    Ok(f)
}
