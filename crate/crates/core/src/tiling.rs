//! Wang tiles, finite grids, periodic tilings and a small backtracking
//! solver.
//!
//! Coordinates are `(column, row)`, row 0 at the bottom. A grid `f` tiles
//! when horizontally adjacent tiles agree (`right(f(n,m)) = left(f(n+1,m))`)
//! and vertically adjacent tiles agree (`up(f(n,m)) = down(f(n,m+1))`).

use std::fmt;

use serde::Serialize;
use thiserror::Error;

/// Largest grid `solve` accepts by default (cells).
pub const DEFAULT_SOLVE_LIMIT: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct TileType {
    pub left: u32,
    pub right: u32,
    pub up: u32,
    pub down: u32,
}

impl TileType {
    pub fn new(left: u32, right: u32, up: u32, down: u32) -> Self {
        TileType { left, right, up, down }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TilingError {
    #[error("a tile set needs at least one tile")]
    Empty,
    #[error("line {line}: {msg}")]
    Format { line: usize, msg: String },
    #[error("tile index {0} out of range")]
    BadTile(usize),
    #[error("grid {width}x{height} exceeds the solver guard of {limit} cells")]
    GuardExceeded { width: usize, height: usize, limit: usize },
    #[error("grid dimensions must be positive")]
    EmptyGrid,
}

/// A finite, non-empty list of tile types. Tile 0 plays the role of `t₀`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TileSet {
    tiles: Vec<TileType>,
}

impl TileSet {
    pub fn new(tiles: Vec<TileType>) -> Result<Self, TilingError> {
        if tiles.is_empty() {
            return Err(TilingError::Empty);
        }
        Ok(TileSet { tiles })
    }

    pub fn tiles(&self) -> &[TileType] {
        &self.tiles
    }

    pub fn len(&self) -> usize {
        self.tiles.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// `s = |T| - 1`.
    pub fn s(&self) -> usize {
        self.tiles.len() - 1
    }

    pub fn get(&self, i: usize) -> TileType {
        self.tiles[i]
    }

    pub fn h_ok(&self, a: usize, b: usize) -> bool {
        self.tiles[a].right == self.tiles[b].left
    }

    pub fn v_ok(&self, below: usize, above: usize) -> bool {
        self.tiles[below].up == self.tiles[above].down
    }

    /// Format: `tiles k` then `k` lines `i: left right up down`.
    pub fn parse(text: &str) -> Result<Self, TilingError> {
        let mut lines = content_lines(text);
        let (ln, head) = lines.next().ok_or(TilingError::Empty)?;
        let k = header(ln, head, "tiles", 1)?[0];
        let mut tiles = vec![None; k];
        for (ln, line) in lines {
            let (idx, rest) = line
                .split_once(':')
                .ok_or_else(|| ferr(ln, "expected `i: left right up down`"))?;
            let idx: usize = idx.trim().parse().map_err(|_| ferr(ln, "bad tile index"))?;
            let nums = numbers::<u32>(ln, rest)?;
            if nums.len() != 4 {
                return Err(ferr(ln, "expected four edge colours"));
            }
            let slot = tiles.get_mut(idx).ok_or_else(|| ferr(ln, "tile index out of range"))?;
            if slot.is_some() {
                return Err(ferr(ln, "duplicate tile index"));
            }
            *slot = Some(TileType::new(nums[0], nums[1], nums[2], nums[3]));
        }
        let tiles: Option<Vec<_>> = tiles.into_iter().collect();
        TileSet::new(tiles.ok_or_else(|| ferr(0, "missing tile lines"))?)
    }

    pub fn to_file(&self) -> String {
        let mut out = format!("tiles {}\n", self.tiles.len());
        for (i, t) in self.tiles.iter().enumerate() {
            out.push_str(&format!("{i}: {} {} {} {}\n", t.left, t.right, t.up, t.down));
        }
        out
    }
}

fn ferr(line: usize, msg: &str) -> TilingError {
    TilingError::Format { line, msg: msg.to_string() }
}

fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty())
}

fn numbers<T: std::str::FromStr>(ln: usize, s: &str) -> Result<Vec<T>, TilingError> {
    s.split_whitespace()
        .map(|w| w.parse().map_err(|_| ferr(ln, &format!("bad number `{w}`"))))
        .collect()
}

fn header(ln: usize, line: &str, word: &str, n: usize) -> Result<Vec<usize>, TilingError> {
    let mut parts = line.split_whitespace();
    if parts.next() != Some(word) {
        return Err(ferr(ln, &format!("expected `{word}` header")));
    }
    let rest: Vec<&str> = parts.collect();
    let nums = numbers::<usize>(ln, &rest.join(" "))?;
    if nums.len() != n {
        return Err(ferr(ln, "wrong number of header fields"));
    }
    Ok(nums)
}

/// A `width × height` block of tile indices.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TilingGrid {
    width: usize,
    height: usize,
    cells: Vec<usize>,
}

impl TilingGrid {
    pub fn new(width: usize, height: usize, cells: Vec<usize>) -> Result<Self, TilingError> {
        if width == 0 || height == 0 {
            return Err(TilingError::EmptyGrid);
        }
        if cells.len() != width * height {
            return Err(ferr(0, "cell count does not match dimensions"));
        }
        Ok(TilingGrid { width, height, cells })
    }

    pub fn from_fn(width: usize, height: usize, f: impl Fn(usize, usize) -> usize) -> Self {
        let mut cells = Vec::with_capacity(width * height);
        for row in 0..height {
            for col in 0..width {
                cells.push(f(col, row));
            }
        }
        TilingGrid { width, height, cells }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn get(&self, col: usize, row: usize) -> usize {
        self.cells[row * self.width + col]
    }

    pub fn validate(&self, tiles: &TileSet) -> Result<(), TilingError> {
        match self.cells.iter().find(|&&c| c >= tiles.len()) {
            Some(&c) => Err(TilingError::BadTile(c)),
            None => Ok(()),
        }
    }

    /// Format: `grid n m` then `m` rows of `n` indices, row 0 first.
    pub fn parse(text: &str) -> Result<Self, TilingError> {
        let mut lines = content_lines(text);
        let (ln, head) = lines.next().ok_or(TilingError::EmptyGrid)?;
        let dims = header(ln, head, "grid", 2)?;
        let (w, h) = (dims[0], dims[1]);
        let mut cells = Vec::new();
        let mut rows = 0;
        for (ln, line) in lines {
            let row = numbers::<usize>(ln, line)?;
            if row.len() != w {
                return Err(ferr(ln, "row length does not match width"));
            }
            cells.extend(row);
            rows += 1;
        }
        if rows != h {
            return Err(ferr(ln, "row count does not match height"));
        }
        TilingGrid::new(w, h, cells)
    }

    pub fn to_file(&self) -> String {
        let mut out = format!("grid {} {}\n", self.width, self.height);
        for row in 0..self.height {
            let line: Vec<String> = (0..self.width).map(|c| self.get(c, row).to_string()).collect();
            out.push_str(&line.join(" "));
            out.push('\n');
        }
        out
    }
}

impl fmt::Display for TilingGrid {
    /// Top row first, the way the plane is usually drawn.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for row in (0..self.height).rev() {
            let line: Vec<String> = (0..self.width).map(|c| self.get(c, row).to_string()).collect();
            writeln!(f, "{}", line.join(" "))?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Adjacency {
    Horizontal,
    Vertical,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub kind: Adjacency,
    pub at: (usize, usize),
    pub next: (usize, usize),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GridReport {
    pub horizontal_ok: bool,
    pub vertical_ok: bool,
    pub violations: Vec<Violation>,
}

impl GridReport {
    pub fn ok(&self) -> bool {
        self.horizontal_ok && self.vertical_ok
    }
}

/// Checks both matching conditions. With `wrap`, the right edge must match
/// the left edge and the top the bottom, as needed for periodic blocks.
pub fn check_grid(tiles: &TileSet, grid: &TilingGrid, wrap: bool) -> Result<GridReport, TilingError> {
    grid.validate(tiles)?;
    let (w, h) = (grid.width, grid.height);
    let mut violations = Vec::new();
    for row in 0..h {
        for col in 0..w {
            let t = grid.get(col, row);
            if col + 1 < w || wrap {
                let n = ((col + 1) % w, row);
                if !tiles.h_ok(t, grid.get(n.0, n.1)) {
                    violations.push(Violation { kind: Adjacency::Horizontal, at: (col, row), next: n });
                }
            }
            if row + 1 < h || wrap {
                let n = (col, (row + 1) % h);
                if !tiles.v_ok(t, grid.get(n.0, n.1)) {
                    violations.push(Violation { kind: Adjacency::Vertical, at: (col, row), next: n });
                }
            }
        }
    }
    Ok(GridReport {
        horizontal_ok: violations.iter().all(|v| v.kind != Adjacency::Horizontal),
        vertical_ok: violations.iter().all(|v| v.kind != Adjacency::Vertical),
        violations,
    })
}

/// Options for [`solve`].
#[derive(Debug, Clone, Copy)]
pub struct SolveOptions {
    pub wrap: bool,
    /// Require tile 0 somewhere in column 0.
    pub t0_in_first_column: bool,
    pub max_cells: usize,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions { wrap: false, t0_in_first_column: false, max_cells: DEFAULT_SOLVE_LIMIT }
    }
}

/// Deterministic backtracking search, row-major, trying tiles in index
/// order. Returns the lexicographically first solution.
pub fn solve(
    tiles: &TileSet,
    width: usize,
    height: usize,
    opts: SolveOptions,
) -> Result<Option<TilingGrid>, TilingError> {
    if width == 0 || height == 0 {
        return Err(TilingError::EmptyGrid);
    }
    if width * height > opts.max_cells {
        return Err(TilingError::GuardExceeded { width, height, limit: opts.max_cells });
    }
    let mut cells = vec![0usize; width * height];
    let found = place(tiles, width, height, &opts, &mut cells, 0, false);
    Ok(found.then(|| TilingGrid { width, height, cells }))
}

fn place(
    tiles: &TileSet,
    w: usize,
    h: usize,
    opts: &SolveOptions,
    cells: &mut [usize],
    i: usize,
    seen_t0: bool,
) -> bool {
    if i == w * h {
        return true;
    }
    let (col, row) = (i % w, i / w);
    for t in 0..tiles.len() {
        if col > 0 && !tiles.h_ok(cells[i - 1], t) {
            continue;
        }
        if row > 0 && !tiles.v_ok(cells[i - w], t) {
            continue;
        }
        if opts.wrap {
            if col == w - 1 && !tiles.h_ok(t, if w == 1 { t } else { cells[i + 1 - w] }) {
                continue;
            }
            if row == h - 1 && !tiles.v_ok(t, if h == 1 { t } else { cells[col] }) {
                continue;
            }
        }
        let seen = seen_t0 || (col == 0 && t == 0);
        if opts.t0_in_first_column && col == 0 && row == h - 1 && !seen {
            continue;
        }
        cells[i] = t;
        if place(tiles, w, h, opts, cells, i + 1, seen) {
            return true;
        }
    }
    false
}

/// A tiling of the quadrant given by repeating a block in both directions.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PeriodicTiling {
    block: TilingGrid,
}

impl PeriodicTiling {
    /// Accepts the block only if it tiles with wrap-around, so that every
    /// unfolding is a valid tiling.
    pub fn new(tiles: &TileSet, block: TilingGrid) -> Result<Self, TilingError> {
        let report = check_grid(tiles, &block, true)?;
        if !report.ok() {
            return Err(ferr(0, "block does not tile periodically"));
        }
        Ok(PeriodicTiling { block })
    }

    pub fn block(&self) -> &TilingGrid {
        &self.block
    }

    pub fn horizontal_period(&self) -> usize {
        self.block.width
    }

    pub fn vertical_period(&self) -> usize {
        self.block.height
    }

    pub fn tile(&self, col: u64, row: u64) -> usize {
        let w = self.block.width as u64;
        let h = self.block.height as u64;
        self.block.get((col % w) as usize, (row % h) as usize)
    }

    pub fn unfold(&self, width: usize, height: usize) -> TilingGrid {
        TilingGrid::from_fn(width, height, |c, r| self.tile(c as u64, r as u64))
    }

    /// Rows `m` whose first tile is `t₀`.
    pub fn t0_rows(&self) -> Vec<usize> {
        (0..self.block.height).filter(|&r| self.block.get(0, r) == 0).collect()
    }
}

/// A periodic tiling with `t₀` in column 0 of the block: `t₀` then recurs
/// in column 0 infinitely often.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RecurrentCertificate {
    pub tiling: PeriodicTiling,
    pub t0_row: usize,
}

pub fn recurrent_certificate(tiles: &TileSet, block: &TilingGrid) -> Result<Option<RecurrentCertificate>, TilingError> {
    let report = check_grid(tiles, block, true)?;
    if !report.ok() {
        return Ok(None);
    }
    let tiling = PeriodicTiling { block: block.clone() };
    Ok(tiling.t0_rows().first().copied().map(|t0_row| RecurrentCertificate { tiling, t0_row }))
}

/// The smallest periodic block (by area, then width) with `t₀` in column 0
/// and both sides at most `max_side`.
pub fn find_recurrent(tiles: &TileSet, max_side: usize) -> Option<RecurrentCertificate> {
    let mut dims: Vec<(usize, usize)> = (1..=max_side)
        .flat_map(|w| (1..=max_side).map(move |h| (w, h)))
        .collect();
    dims.sort_by_key(|&(w, h)| (w * h, w));
    let opts = SolveOptions { wrap: true, t0_in_first_column: true, max_cells: max_side * max_side };
    for (w, h) in dims {
        if let Ok(Some(g)) = solve(tiles, w, h, opts) {
            return recurrent_certificate(tiles, &g).ok().flatten();
        }
    }
    None
}
