//! Line-based model files.
//!
//! Generated models are stored by their recipe:
//!
//! ```text
//! generator M0star
//! param tiles 0,1,5,5;1,0,6,6
//! param block 2x1:0,1
//! param blocks 10
//! param bound 12
//! ```
//!
//! An optional `param frame <spec>` re-bases the interpretation onto
//! another frame with the same worlds. Explicit models list everything:
//!
//! ```text
//! explicit
//! worlds 3
//! edge 0 1
//! domain 0 1        # constant; or `domainat <w> <elements…>` per world
//! letter P 1
//! atom 1 P 0
//! ```

use std::collections::BTreeMap;
use std::sync::Arc;

use super::generators::{build_dense, build_m0, build_m0_prime, build_m0_star, build_ordinal};
use super::{Domain, ExplicitInterpretation, Frame, FrameSpec, KripkeError, ModelSource, PredicateModel};
use crate::tiling::{PeriodicTiling, TileSet, TileType, TilingGrid};

fn ferr(line: usize, msg: impl Into<String>) -> KripkeError {
    KripkeError::Format { line, msg: msg.into() }
}

pub fn write_model(m: &PredicateModel) -> Result<String, KripkeError> {
    match m.source() {
        ModelSource::Generated { generator, params } => {
            let mut out = format!("generator {generator}\n");
            for (k, v) in params {
                out.push_str(&format!("param {k} {v}\n"));
            }
            Ok(out)
        }
        ModelSource::Explicit => {
            let f = m.frame();
            if f.is_truncated() {
                return Err(KripkeError::Invalid("explicit model files describe complete models".into()));
            }
            let mut out = format!("explicit\nworlds {}\n", f.len());
            for w in 0..f.len() {
                for &v in f.successors(w) {
                    out.push_str(&format!("edge {w} {v}\n"));
                }
            }
            let join = |v: &[i64]| v.iter().map(|e| e.to_string()).collect::<Vec<_>>().join(" ");
            match m.domain() {
                Domain::Constant { elements, truncated: false } => out.push_str(&format!("domain {}\n", join(elements))),
                Domain::Constant { .. } => return Err(KripkeError::Invalid("truncated explicit domain".into())),
                Domain::PerWorld(v) => {
                    for (w, d) in v.iter().enumerate() {
                        out.push_str(&format!("domainat {w} {}\n", join(d)));
                    }
                }
            }
            for (name, arity) in m.letters() {
                out.push_str(&format!("letter {name} {arity}\n"));
            }
            let universe = m.domain().universe();
            for w in 0..f.len() {
                for (l, (name, arity)) in m.letters().iter().enumerate() {
                    let mut buf = vec![0; *arity];
                    super::model::for_each_tuple(&universe, &mut buf, 0, &mut |t| {
                        if m.holds(w, l, t) {
                            let args: Vec<String> = t.iter().map(|a| a.to_string()).collect();
                            let sep = if args.is_empty() { "" } else { " " };
                            out.push_str(&format!("atom {w} {name}{sep}{}\n", args.join(" ")));
                        }
                        true
                    });
                }
            }
            Ok(out)
        }
    }
}

fn parse_tiles(v: &str, line: usize) -> Result<TileSet, KripkeError> {
    let tiles = v
        .split(';')
        .map(|t| {
            let c: Vec<u32> = t.split(',').map(|x| x.trim().parse()).collect::<Result<_, _>>().map_err(|_| ferr(line, "bad tile"))?;
            if c.len() != 4 {
                return Err(ferr(line, "a tile has four colours"));
            }
            Ok(TileType::new(c[0], c[1], c[2], c[3]))
        })
        .collect::<Result<Vec<_>, _>>()?;
    TileSet::new(tiles).map_err(|e| ferr(line, e.to_string()))
}

fn parse_block(v: &str, tiles: &TileSet, line: usize) -> Result<PeriodicTiling, KripkeError> {
    let (dims, cells) = v.split_once(':').ok_or_else(|| ferr(line, "block is `WxH:cells`"))?;
    let (w, h) = dims.split_once('x').ok_or_else(|| ferr(line, "block is `WxH:cells`"))?;
    let num = |s: &str| s.trim().parse::<usize>().map_err(|_| ferr(line, "bad number"));
    let cells = cells.split(',').map(num).collect::<Result<Vec<_>, _>>()?;
    let grid = TilingGrid::new(num(w)?, num(h)?, cells).map_err(|e| ferr(line, e.to_string()))?;
    PeriodicTiling::new(tiles, grid).map_err(|e| ferr(line, e.to_string()))
}

/// The tile set and periodic tiling a generated model was built from.
pub fn recipe_tiling(m: &PredicateModel) -> Result<Option<(TileSet, PeriodicTiling)>, KripkeError> {
    let ModelSource::Generated { params, .. } = m.source() else { return Ok(None) };
    let get = |k: &str| params.iter().find(|(key, _)| key == k).map(|(_, v)| v.as_str());
    let (Some(t), Some(b)) = (get("tiles"), get("block")) else { return Ok(None) };
    let tiles = parse_tiles(t, 0)?;
    let tiling = parse_block(b, &tiles, 0)?;
    Ok(Some((tiles, tiling)))
}

pub fn parse_model(text: &str) -> Result<PredicateModel, KripkeError> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty());
    let (ln, head) = lines.next().ok_or_else(|| ferr(0, "empty model file"))?;
    let mut words = head.split_whitespace();
    match words.next() {
        Some("generator") => {
            let gen = words.next().ok_or_else(|| ferr(ln, "missing generator name"))?.to_string();
            let mut params = BTreeMap::new();
            let mut order = Vec::new();
            for (ln, line) in lines {
                let mut w = line.splitn(3, ' ');
                if w.next() != Some("param") {
                    return Err(ferr(ln, "expected `param <key> <value>`"));
                }
                let k = w.next().ok_or_else(|| ferr(ln, "missing key"))?.to_string();
                let v = w.next().unwrap_or("").trim().to_string();
                order.push((k.clone(), v.clone()));
                params.insert(k, (ln, v));
            }
            let get = |k: &str| params.get(k).ok_or_else(|| ferr(0, format!("missing param `{k}`")));
            let num = |k: &str| -> Result<i64, KripkeError> {
                let (ln, v) = get(k)?;
                v.parse().map_err(|_| ferr(*ln, format!("bad number for `{k}`")))
            };
            let unum = |k: &str| -> Result<usize, KripkeError> {
                let n = num(k)?;
                usize::try_from(n).map_err(|_| ferr(0, format!("`{k}` must be non-negative")))
            };
            let (tl, tv) = get("tiles")?;
            let tiles = parse_tiles(tv, *tl)?;
            let (bl, bv) = get("block")?;
            let tiling = parse_block(bv, &tiles, *bl)?;
            let bound = num("bound")?;
            let model = match gen.as_str() {
                "M0" => build_m0(&tiles, &tiling, unum("horizon")?, bound)?,
                "M0prime" => build_m0_prime(&tiles, &tiling, unum("horizon")?, bound)?,
                "M0star" => build_m0_star(&tiles, &tiling, unum("blocks")?, bound)?,
                "ordinal" => build_ordinal(&tiles, &tiling, unum("m")?, unum("k")?, unum("copy")?, bound)?,
                "dense" => build_dense(&tiles, &tiling, unum("chain")?, unum("fill")?, bound)?,
                other => return Err(ferr(ln, format!("unknown generator `{other}`"))),
            };
            let model = match params.get("frame") {
                Some((fl, spec)) => {
                    let spec: FrameSpec = spec.parse().map_err(|e: KripkeError| ferr(*fl, e.to_string()))?;
                    model.rebase(spec.build(model.frame().len())?)?
                }
                None => model,
            };
            Ok(model.with_source(ModelSource::Generated { generator: gen, params: order }))
        }
        Some("explicit") => parse_explicit(lines),
        _ => Err(ferr(ln, "expected `generator` or `explicit`")),
    }
}

fn parse_explicit<'a>(lines: impl Iterator<Item = (usize, &'a str)>) -> Result<PredicateModel, KripkeError> {
    let mut worlds = None;
    let mut edges = Vec::new();
    let mut constant: Option<Vec<i64>> = None;
    let mut per_world: BTreeMap<usize, Vec<i64>> = BTreeMap::new();
    let mut letters: Vec<(String, usize)> = Vec::new();
    let mut atoms = Vec::new();
    for (ln, line) in lines {
        let parts: Vec<&str> = line.split_whitespace().collect();
        let num = |s: &str| s.parse::<i64>().map_err(|_| ferr(ln, format!("bad number `{s}`")));
        let unum = |s: &str| s.parse::<usize>().map_err(|_| ferr(ln, format!("bad index `{s}`")));
        match parts[0] {
            "worlds" if parts.len() == 2 => worlds = Some(unum(parts[1])?),
            "edge" if parts.len() == 3 => edges.push((unum(parts[1])?, unum(parts[2])?)),
            "domain" => constant = Some(parts[1..].iter().map(|s| num(s)).collect::<Result<_, _>>()?),
            "domainat" if parts.len() >= 2 => {
                per_world.insert(unum(parts[1])?, parts[2..].iter().map(|s| num(s)).collect::<Result<_, _>>()?);
            }
            "letter" if parts.len() == 3 => letters.push((parts[1].to_string(), unum(parts[2])?)),
            "atom" if parts.len() >= 3 => {
                let w = unum(parts[1])?;
                let args: Vec<i64> = parts[3..].iter().map(|s| num(s)).collect::<Result<_, _>>()?;
                atoms.push((ln, w, parts[2].to_string(), args));
            }
            _ => return Err(ferr(ln, format!("unrecognized line `{line}`"))),
        }
    }
    let n = worlds.ok_or_else(|| ferr(0, "missing `worlds`"))?;
    let frame = Frame::explicit(n, &edges)?;
    let domain = match (constant, per_world.is_empty()) {
        (Some(d), true) => Domain::Constant { elements: d, truncated: false },
        (None, false) => {
            let v: Vec<Vec<i64>> = (0..n).map(|w| per_world.get(&w).cloned().unwrap_or_default()).collect();
            Domain::PerWorld(v)
        }
        _ => return Err(ferr(0, "give either `domain` or `domainat` lines")),
    };
    let mut interp = ExplicitInterpretation::new(letters.len());
    for (ln, w, name, args) in atoms {
        let l = letters
            .iter()
            .position(|(n, _)| *n == name)
            .ok_or_else(|| ferr(ln, format!("undeclared letter `{name}`")))?;
        if letters[l].1 != args.len() {
            return Err(ferr(ln, format!("`{name}` has arity {}", letters[l].1)));
        }
        if w >= n {
            return Err(ferr(ln, "world out of range"));
        }
        if let Some(a) = args.iter().find(|a| !domain.at(w).contains(a)) {
            return Err(ferr(ln, format!("element {a} is not in the domain of world {w}")));
        }
        interp.insert(w as u64, l, args);
    }
    let model = PredicateModel::new(frame, letters, domain, Arc::new(interp), ModelSource::Explicit)?;
    model.check_domains()?;
    Ok(model)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kripke::generators::build_m0_star;

    #[test]
    fn explicit_roundtrip() {
        let text = "explicit\nworlds 2\nedge 0 1\nedge 1 1\ndomain 0 1\nletter P 1\nletter p 0\natom 1 P 0\natom 0 p\n";
        let m = parse_model(text).unwrap();
        assert!(m.holds_named(1, "P", &[0]) && !m.holds_named(0, "P", &[0]) && m.holds_named(0, "p", &[]));
        let again = write_model(&m).unwrap();
        assert_eq!(write_model(&parse_model(&again).unwrap()).unwrap(), again);
    }

    #[test]
    fn explicit_domain_violations() {
        let shrinking = "explicit\nworlds 2\nedge 0 1\ndomainat 0 0 1\ndomainat 1 0\nletter P 1\n";
        assert!(parse_model(shrinking).is_err());
        let outside = "explicit\nworlds 1\ndomainat 0 0\nletter P 1\natom 0 P 3\n";
        assert!(parse_model(outside).is_err());
    }

    #[test]
    fn generated_roundtrip() {
        let tiles = TileSet::new(vec![TileType::new(0, 1, 5, 5), TileType::new(1, 0, 6, 6)]).unwrap();
        let tiling = PeriodicTiling::new(&tiles, TilingGrid::from_fn(2, 1, |c, _| c)).unwrap();
        let m = build_m0_star(&tiles, &tiling, 3, 5).unwrap();
        let text = write_model(&m).unwrap();
        let back = parse_model(&text).unwrap();
        assert_eq!(back.frame(), m.frame());
        assert_eq!(write_model(&back).unwrap(), text);
        let rebased = format!("{text}param frame natrefl:2,5\n");
        let r = parse_model(&rebased).unwrap();
        assert!(r.frame().is_reflexive(5) && !r.frame().is_reflexive(4));
    }
}
