//! Reading a tiling back out of a model of `A`, `A′` or `A*`.
//!
//! The marks `a₀, a₁, …` are found from the root: `a₀` is a tiled marked
//! element, `aₙ₊₁` the least element in grid-successor position to `aₙ`.
//! Row `m` of the grid is read at `w_m`, the least world marked by `a_m`.

use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::checker::{r_blackdiamond, ArithmeticBeta, CheckError, Marker, RelationTable};
use crate::kripke::generators::{alpha_next, build_m0, build_m0_prime, build_m0_star, star_blocks_for_columns};
use crate::kripke::{KripkeError, PredicateModel};
use crate::reductions::{letters, Variant};
use crate::tiling::{check_grid, GridReport, PeriodicTiling, TileSet, TilingError, TilingGrid};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ExtractionError {
    #[error("the root carries no tiled mark")]
    NoMark,
    #[error("world {world} carries the marks {marks:?}")]
    DuplicateMark { world: String, marks: Vec<i64> },
    #[error("representative worlds decrease at row {row}")]
    NotMonotone { row: usize },
    #[error("cell ({col}, {row}) has no tile letter at world {world}")]
    NoTile { col: usize, row: usize, world: String },
    #[error("cell ({col}, {row}) has the tile letters {tiles:?} at world {world}")]
    TwoTiles { col: usize, row: usize, world: String, tiles: Vec<usize> },
    #[error("the prefix certifies no complete row")]
    Empty,
    #[error("extraction is defined for models of A, A′ and A*, not {0}")]
    Variant(Variant),
    #[error(transparent)]
    Check(#[from] CheckError),
    #[error(transparent)]
    Kripke(#[from] KripkeError),
    #[error(transparent)]
    Tiling(#[from] TilingError),
}

/// Which letters encode marks, tiles and the grid successor.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Style {
    Base,
    Primed,
    Star,
}

fn style(v: Variant) -> Result<Style, ExtractionError> {
    match v {
        Variant::A | Variant::B | Variant::ABullet => Ok(Style::Base),
        Variant::APrime => Ok(Style::Primed),
        Variant::AStar | Variant::APlus => Ok(Style::Star),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MarkTrace {
    pub variant: Variant,
    /// `a₀, a₁, …` as far as the successor search reached.
    pub marks: Vec<i64>,
    /// `w_m` for the marks that occur in the prefix.
    pub worlds: Vec<usize>,
    /// The mark of each prefix world, if any.
    pub per_world: Vec<Option<i64>>,
    /// The successor search ran out of domain or prefix.
    pub truncated: bool,
}

impl MarkTrace {
    /// Marks whose representative world is materialized.
    pub fn certified(&self) -> usize {
        self.worlds.len()
    }
}

struct Letters {
    s: usize,
    style: Style,
    mark: usize,
    q: usize,
    tiles: Vec<usize>,
    succ: Option<usize>,
    pair: Option<(usize, usize)>,
}

fn letter(model: &PredicateModel, name: &str) -> Result<usize, ExtractionError> {
    model.letter_index(name).ok_or_else(|| CheckError::MissingLetter(name.to_string()).into())
}

impl Letters {
    fn new(model: &PredicateModel, style: Style, s: usize) -> Result<Self, ExtractionError> {
        Ok(match style {
            Style::Star => {
                let p = letter(model, letters::P)?;
                Letters { s, style, mark: p, q: letter(model, letters::Q)?, tiles: vec![], succ: None, pair: None }
            }
            _ => {
                let tiles = (0..=s).map(|t| letter(model, &letters::tile(t))).collect::<Result<_, _>>()?;
                let (succ, pair) = if style == Style::Base {
                    (Some(letter(model, letters::SUCC)?), None)
                } else {
                    (None, Some((letter(model, &letters::tile(s + 1))?, letter(model, &letters::tile(s + 2))?)))
                };
                Letters { s, style, mark: letter(model, letters::MARK)?, q: usize::MAX, tiles, succ, pair }
            }
        })
    }
}

/// Evaluation context shared by mark and tile extraction.
struct Reader<'m> {
    model: &'m PredicateModel,
    l: Letters,
    sep: Option<RelationTable>,
    beta: Option<ArithmeticBeta<'m>>,
    elems: Vec<i64>,
}

impl<'m> Reader<'m> {
    fn new(model: &'m PredicateModel, variant: Variant, s: usize) -> Result<Self, ExtractionError> {
        let st = style(variant)?;
        let l = Letters::new(model, st, s)?;
        let sep = if st == Style::Primed { Some(r_blackdiamond(model, Marker::Sep)?) } else { None };
        let beta = if st == Style::Star { Some(ArithmeticBeta::new(model, s)?) } else { None };
        let mut elems = model.domain().at(0).to_vec();
        elems.sort_unstable();
        Ok(Reader { model, l, sep, beta, elems })
    }

    fn marked(&self, w: usize, a: i64) -> bool {
        match self.l.style {
            Style::Star => self.model.holds(w, self.l.q, &[]) && self.model.holds(w, self.l.mark, &[a]),
            _ => self.model.holds(w, self.l.mark, &[a]),
        }
    }

    /// The tile indices `t` with `P_t(a)` (or `β_t(a)`) at `w`.
    fn tiles_at(&self, w: usize, a: i64) -> Vec<usize> {
        match &self.beta {
            Some(b) => (0..=self.l.s).filter(|&t| b.beta(t, a, w)).collect(),
            None => (0..=self.l.s).filter(|&t| self.model.holds(w, self.l.tiles[t], &[a])).collect(),
        }
    }

    fn successor(&self, a: i64) -> Option<i64> {
        let root = 0;
        match self.l.style {
            Style::Base => self.elems.iter().copied().find(|&b| self.model.holds(root, self.l.succ.unwrap(), &[a, b])),
            Style::Primed => {
                let (x, y) = self.l.pair.unwrap();
                let r = self.sep.as_ref().unwrap();
                let at: Vec<usize> = r.successors(root).filter(|&v| self.model.holds(v, x, &[a])).collect();
                self.elems.iter().copied().find(|&b| at.iter().any(|&v| self.model.holds(v, y, &[b])))
            }
            Style::Star => {
                let beta = self.beta.as_ref().unwrap();
                let (s1, s2) = (self.l.s + 1, self.l.s + 2);
                let at: Vec<usize> = beta.relation().successors(root).filter(|&v| beta.beta(s1, a, v)).collect();
                self.elems.iter().copied().find(|&b| at.iter().any(|&v| beta.beta(s2, b, v)))
            }
        }
    }
}

/// Recovers the mark sequence and the representative worlds.
pub fn extract_marks(model: &PredicateModel, variant: Variant, s: usize) -> Result<MarkTrace, ExtractionError> {
    let r = Reader::new(model, variant, s)?;
    marks_with(&r, variant)
}

fn marks_with(r: &Reader, variant: Variant) -> Result<MarkTrace, ExtractionError> {
    let model = r.model;
    let a0 = r.elems.iter().copied().find(|&a| r.marked(0, a) && !r.tiles_at(0, a).is_empty());
    let Some(mut a) = a0 else { return Err(ExtractionError::NoMark) };
    let mut marks = vec![a];
    let mut truncated = true;
    while let Some(b) = r.successor(a) {
        if marks.contains(&b) {
            // a cycle: the sequence is complete within the bound
            truncated = false;
            break;
        }
        marks.push(b);
        a = b;
    }
    let h = model.frame().len();
    let mut worlds = Vec::new();
    for &a in &marks {
        match (0..h).find(|&w| r.marked(w, a)) {
            Some(w) => worlds.push(w),
            None => break,
        }
    }
    if let Some(row) = worlds.windows(2).position(|p| p[1] < p[0]) {
        return Err(ExtractionError::NotMonotone { row: row + 1 });
    }
    let mut per_world = Vec::with_capacity(h);
    for w in 0..h {
        let here: Vec<i64> = marks.iter().copied().filter(|&a| r.marked(w, a)).collect();
        if here.len() > 1 {
            return Err(ExtractionError::DuplicateMark { world: model.frame().label(w).to_string(), marks: here });
        }
        per_world.push(here.first().copied());
    }
    Ok(MarkTrace { variant, marks, worlds, per_world, truncated })
}

/// Where a grid cell was read.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CellSource {
    pub col: usize,
    pub row: usize,
    pub world: String,
    pub atom: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Extraction {
    pub trace: MarkTrace,
    pub grid: TilingGrid,
    pub report: GridReport,
    pub provenance: Vec<CellSource>,
}

impl Extraction {
    /// One `col row world atom` line per cell.
    pub fn provenance_file(&self) -> String {
        let mut out = String::from("# col row world atom\n");
        for c in &self.provenance {
            out.push_str(&format!("{} {} {} {}\n", c.col, c.row, c.world, c.atom));
        }
        out
    }
}

/// Reads the window of at most `cols × rows` cells certified by the prefix.
pub fn extract_tiling(
    model: &PredicateModel,
    tiles: &TileSet,
    variant: Variant,
    cols: usize,
    rows: usize,
) -> Result<Extraction, ExtractionError> {
    let r = Reader::new(model, variant, tiles.s())?;
    let trace = marks_with(&r, variant)?;
    // β at w_m looks ahead to the next q-world
    let readable = match r.l.style {
        Style::Star => {
            let h = model.frame().len();
            let last_q = (0..h).rev().find(|&w| model.holds(w, r.l.q, &[]));
            trace.worlds.iter().filter(|&&w| last_q.is_some_and(|q| q > w)).count()
        }
        _ => trace.certified(),
    };
    let height = rows.min(readable);
    let width = cols.min(trace.marks.len());
    if height == 0 || width == 0 {
        return Err(ExtractionError::Empty);
    }
    let mut cells = Vec::with_capacity(width * height);
    let mut provenance = Vec::new();
    for row in 0..height {
        let w = trace.worlds[row];
        let label = model.frame().label(w).to_string();
        for col in 0..width {
            let a = trace.marks[col];
            let found = r.tiles_at(w, a);
            match found.as_slice() {
                [] => return Err(ExtractionError::NoTile { col, row, world: label }),
                [t] => {
                    cells.push(*t);
                    let atom = match r.l.style {
                        Style::Star => format!("β{t}({a})"),
                        _ => format!("{}({a})", letters::tile(*t)),
                    };
                    provenance.push(CellSource { col, row, world: label.clone(), atom });
                }
                _ => return Err(ExtractionError::TwoTiles { col, row, world: label, tiles: found }),
            }
        }
    }
    let grid = TilingGrid::new(width, height, cells)?;
    let report = check_grid(tiles, &grid, false)?;
    Ok(Extraction { trace, grid, report, provenance })
}

/// A cell where two windows disagree.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct CellDiff {
    pub col: usize,
    pub row: usize,
    pub expected: Option<usize>,
    pub found: Option<usize>,
}

impl fmt::Display for CellDiff {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let show = |c: Option<usize>| c.map_or("-".to_string(), |t| t.to_string());
        write!(f, "({}, {}): expected {}, found {}", self.col, self.row, show(self.expected), show(self.found))
    }
}

/// Cell-by-cell comparison over the union of both windows.
pub fn diff_windows(expected: &TilingGrid, found: &TilingGrid) -> Vec<CellDiff> {
    let w = expected.width().max(found.width());
    let h = expected.height().max(found.height());
    let at = |g: &TilingGrid, c: usize, r: usize| (c < g.width() && r < g.height()).then(|| g.get(c, r));
    let mut out = Vec::new();
    for row in 0..h {
        for col in 0..w {
            let (e, f) = (at(expected, col, row), at(found, col, row));
            if e != f {
                out.push(CellDiff { col, row, expected: e, found: f });
            }
        }
    }
    out
}

/// Bounds of the witness model that make a `cols × rows` window readable.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct WindowBounds {
    pub horizon: usize,
    pub bound: i64,
    pub blocks: usize,
}

pub fn default_bounds(s: usize, variant: Variant, cols: usize, rows: usize) -> WindowBounds {
    let horizon = (2 * s + 8) * (rows + 2);
    let bound = (cols.max(rows) + 2) as i64;
    let horizon = match variant {
        // the successor witness of element n-2 sits at world 2k; marks and
        // columns both walk that relation
        Variant::APrime if cols.max(rows) >= 2 => {
            horizon.max(2 * alpha_next(cols.max(rows) as u64 - 2, 1) as usize + 2)
        }
        _ => horizon,
    };
    // marks advance through the same successor relation as columns
    let blocks = (rows + 2).max(star_blocks_for_columns(cols.max(rows)));
    // block k is marked by the element k, which must be in the domain
    let bound = match variant {
        Variant::AStar | Variant::APlus => bound.max(blocks as i64),
        _ => bound,
    };
    WindowBounds { horizon, bound, blocks }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Roundtrip {
    pub expected: TilingGrid,
    pub extraction: Extraction,
    pub diffs: Vec<CellDiff>,
}

impl Roundtrip {
    pub fn ok(&self) -> bool {
        self.diffs.is_empty() && self.extraction.report.ok()
    }
}

/// Builds the witness model of `variant` for `tiling`, extracts the
/// `cols × rows` window and compares it with the tiling's unfolding.
pub fn roundtrip(
    tiles: &TileSet,
    tiling: &PeriodicTiling,
    variant: Variant,
    cols: usize,
    rows: usize,
    bounds: Option<WindowBounds>,
) -> Result<Roundtrip, ExtractionError> {
    let b = bounds.unwrap_or_else(|| default_bounds(tiles.s(), variant, cols, rows));
    let model = match style(variant)? {
        Style::Base => build_m0(tiles, tiling, b.horizon, b.bound)?,
        Style::Primed => build_m0_prime(tiles, tiling, b.horizon, b.bound)?,
        Style::Star => build_m0_star(tiles, tiling, b.blocks, b.bound)?,
    };
    let extraction = extract_tiling(&model, tiles, variant, cols, rows)?;
    let expected = tiling.unfold(cols, rows);
    let diffs = diff_windows(&expected, &extraction.grid);
    Ok(Roundtrip { expected, extraction, diffs })
}
