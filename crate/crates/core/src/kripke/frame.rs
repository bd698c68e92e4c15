use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use num_rational::Ratio;
use serde::Serialize;

use super::KripkeError;

/// Worlds of an ordinal frame are coded as `copy << ORDINAL_SHIFT | index`.
pub const ORDINAL_SHIFT: u32 = 40;

/// Which worlds of a prefix of `ℕ` see themselves.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum ReflexiveSet {
    All,
    None,
    Some(BTreeSet<usize>),
}

impl ReflexiveSet {
    pub fn contains(&self, w: usize) -> bool {
        match self {
            ReflexiveSet::All => true,
            ReflexiveSet::None => false,
            ReflexiveSet::Some(s) => s.contains(&w),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum FrameKind {
    /// Finite frame with an arbitrary relation.
    Explicit,
    /// `{0, …, H-1}` ordered by `<`, plus reflexive loops on a subset.
    Nat { reflexive: ReflexiveSet },
    /// Irreflexive below `n`, reflexive from `n` on.
    Gn { n: usize },
    /// Reflexive below `n`, irreflexive from `n` on.
    Hn { n: usize },
    /// `ω·m + k` under `≤`; each `ω`-copy is cut after `copy_len` worlds.
    Ordinal { m: usize, k: usize, copy_len: usize },
    /// A finite suborder of `ℚ` under `≤` with designated chain worlds.
    Dense { chain_len: usize, fill: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Segment {
    pub start: usize,
    pub end: usize,
    /// The intended frame continues past `end` inside this segment.
    pub truncated: bool,
}

/// A finite (prefix of a) Kripke frame.
///
/// Non-explicit frames are *linear*: world indices follow the frame order
/// and `w < v` implies `w R v`. Every world has a `code` that generated
/// interpretations use to locate it in the intended frame.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Frame {
    kind: FrameKind,
    succ: Vec<Vec<u32>>,
    reflexive: Vec<bool>,
    codes: Vec<u64>,
    labels: Vec<String>,
    segment_of: Vec<u32>,
    segments: Vec<Segment>,
    #[serde(skip)]
    rational: Vec<Ratio<i64>>,
    chain: Vec<usize>,
}

impl Frame {
    fn linear(kind: FrameKind, reflexive: Vec<bool>, codes: Vec<u64>, labels: Vec<String>, segments: Vec<Segment>) -> Frame {
        let n = reflexive.len();
        let succ = (0..n)
            .map(|w| (0..n).filter(|&v| w < v || (w == v && reflexive[w])).map(|v| v as u32).collect())
            .collect();
        let mut segment_of = vec![0; n];
        for (i, s) in segments.iter().enumerate() {
            for w in s.start..s.end {
                segment_of[w] = i as u32;
            }
        }
        Frame { kind, succ, reflexive, codes, labels, segment_of, segments, rational: Vec::new(), chain: Vec::new() }
    }

    fn one_segment(n: usize, truncated: bool) -> Vec<Segment> {
        vec![Segment { start: 0, end: n, truncated }]
    }

    /// A finite frame; `edges` are `(w, v)` pairs with `w R v`.
    pub fn explicit(n: usize, edges: &[(usize, usize)]) -> Result<Frame, KripkeError> {
        if n == 0 {
            return Err(KripkeError::Invalid("a frame needs at least one world".into()));
        }
        let mut succ: Vec<BTreeSet<u32>> = vec![BTreeSet::new(); n];
        for &(w, v) in edges {
            if w >= n || v >= n {
                return Err(KripkeError::Invalid(format!("edge ({w}, {v}) outside 0..{n}")));
            }
            succ[w].insert(v as u32);
        }
        let reflexive = (0..n).map(|w| succ[w].contains(&(w as u32))).collect();
        Ok(Frame {
            kind: FrameKind::Explicit,
            succ: succ.into_iter().map(|s| s.into_iter().collect()).collect(),
            reflexive,
            codes: (0..n as u64).collect(),
            labels: (0..n).map(|w| w.to_string()).collect(),
            segment_of: vec![0; n],
            segments: Self::one_segment(n, false),
            rational: Vec::new(),
            chain: Vec::new(),
        })
    }

    fn checked(h: usize) -> Result<(), KripkeError> {
        if h == 0 {
            return Err(KripkeError::Invalid("horizon must be positive".into()));
        }
        Ok(())
    }

    /// Worlds `0 … horizon-1` of `ℕ`.
    pub fn nat(horizon: usize, reflexive: ReflexiveSet) -> Result<Frame, KripkeError> {
        Self::checked(horizon)?;
        let refl = (0..horizon).map(|w| reflexive.contains(w)).collect();
        Ok(Self::linear(
            FrameKind::Nat { reflexive },
            refl,
            (0..horizon as u64).collect(),
            (0..horizon).map(|w| w.to_string()).collect(),
            Self::one_segment(horizon, true),
        ))
    }

    pub fn gn(n: usize, horizon: usize) -> Result<Frame, KripkeError> {
        Self::checked(horizon)?;
        Ok(Self::linear(
            FrameKind::Gn { n },
            (0..horizon).map(|w| w >= n).collect(),
            (0..horizon as u64).collect(),
            (0..horizon).map(|w| w.to_string()).collect(),
            Self::one_segment(horizon, true),
        ))
    }

    pub fn hn(n: usize, horizon: usize) -> Result<Frame, KripkeError> {
        Self::checked(horizon)?;
        Ok(Self::linear(
            FrameKind::Hn { n },
            (0..horizon).map(|w| w < n).collect(),
            (0..horizon as u64).collect(),
            (0..horizon).map(|w| w.to_string()).collect(),
            Self::one_segment(horizon, true),
        ))
    }

    pub fn ordinal(m: usize, k: usize, copy_len: usize) -> Result<Frame, KripkeError> {
        if m == 0 && k == 0 {
            return Err(KripkeError::Invalid("empty ordinal".into()));
        }
        if m > 0 {
            Self::checked(copy_len)?;
        }
        let mut codes = Vec::new();
        let mut labels = Vec::new();
        let mut segments = Vec::new();
        for c in 0..m {
            segments.push(Segment { start: codes.len(), end: codes.len() + copy_len, truncated: true });
            for i in 0..copy_len {
                codes.push(((c as u64) << ORDINAL_SHIFT) | i as u64);
                labels.push(if c == 0 { i.to_string() } else { format!("ω·{c}+{i}") });
            }
        }
        if k > 0 {
            segments.push(Segment { start: codes.len(), end: codes.len() + k, truncated: false });
            for j in 0..k {
                codes.push(((m as u64) << ORDINAL_SHIFT) | j as u64);
                labels.push(if m == 0 { j.to_string() } else { format!("ω·{m}+{j}") });
            }
        }
        let n = codes.len();
        Ok(Self::linear(FrameKind::Ordinal { m, k, copy_len }, vec![true; n], codes, labels, segments))
    }

    /// `chain_len` designated worlds labelled `1, 2, …` with `fill` worlds
    /// inserted before each of them (labels `k + j/(fill+1)`), under `≤`.
    pub fn dense(chain_len: usize, fill: usize) -> Result<Frame, KripkeError> {
        Self::checked(chain_len)?;
        let mut rational = Vec::new();
        let mut chain = Vec::new();
        for k in 0..chain_len as i64 {
            for j in 1..=fill as i64 {
                rational.push(Ratio::new(k * (fill as i64 + 1) + j, fill as i64 + 1));
            }
            chain.push(rational.len());
            rational.push(Ratio::from_integer(k + 1));
        }
        let n = rational.len();
        let labels = rational.iter().map(|r| r.to_string()).collect();
        let mut f = Self::linear(
            FrameKind::Dense { chain_len, fill },
            vec![true; n],
            (0..n as u64).collect(),
            labels,
            Self::one_segment(n, true),
        );
        f.rational = rational;
        f.chain = chain;
        Ok(f)
    }

    pub fn kind(&self) -> &FrameKind {
        &self.kind
    }

    pub fn len(&self) -> usize {
        self.succ.len()
    }

    pub fn is_empty(&self) -> bool {
        self.succ.is_empty()
    }

    pub fn successors(&self, w: usize) -> &[u32] {
        &self.succ[w]
    }

    pub fn sees(&self, w: usize, v: usize) -> bool {
        self.succ[w].binary_search(&(v as u32)).is_ok()
    }

    pub fn is_reflexive(&self, w: usize) -> bool {
        self.reflexive[w]
    }

    pub fn code(&self, w: usize) -> u64 {
        self.codes[w]
    }

    pub fn label(&self, w: usize) -> &str {
        &self.labels[w]
    }

    pub fn is_linear(&self) -> bool {
        self.kind != FrameKind::Explicit
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    pub fn segment_of(&self, w: usize) -> usize {
        self.segment_of[w] as usize
    }

    /// The intended frame has worlds above `w` that are not materialized.
    pub fn truncated_above(&self, w: usize) -> bool {
        self.segments[self.segment_of(w)..].iter().any(|s| s.truncated)
    }

    pub fn is_truncated(&self) -> bool {
        self.segments.iter().any(|s| s.truncated)
    }

    /// Rational labels of a dense frame.
    pub fn rational_label(&self, w: usize) -> Option<Ratio<i64>> {
        self.rational.get(w).copied()
    }

    /// Indices of the designated chain worlds of a dense frame, in order.
    pub fn chain(&self) -> &[usize] {
        &self.chain
    }

    /// The same worlds and relation with every segment marked complete, so
    /// that evaluation treats the prefix as the whole frame.
    pub fn closed(&self) -> Frame {
        let mut f = self.clone();
        for s in &mut f.segments {
            s.truncated = false;
        }
        f
    }
}

/// Textual frame descriptions used by the command line and model files.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FrameSpec {
    NatLe,
    NatLt,
    NatRefl(BTreeSet<usize>),
    Gn(usize),
    Hn(usize),
    Ordinal(usize, usize),
    Dense(usize, usize),
}

impl FrameSpec {
    /// Materializes the frame description. `horizon` is the number of worlds for prefixes
    /// of `ℕ`, the length of each `ω`-copy for ordinals and the chain length
    /// for dense frames unless the description fixes it.
    pub fn build(&self, horizon: usize) -> Result<Frame, KripkeError> {
        match self {
            FrameSpec::NatLe => Frame::nat(horizon, ReflexiveSet::All),
            FrameSpec::NatLt => Frame::nat(horizon, ReflexiveSet::None),
            FrameSpec::NatRefl(s) => Frame::nat(horizon, ReflexiveSet::Some(s.clone())),
            FrameSpec::Gn(n) => Frame::gn(*n, horizon),
            FrameSpec::Hn(n) => Frame::hn(*n, horizon),
            FrameSpec::Ordinal(m, k) => Frame::ordinal(*m, *k, horizon),
            FrameSpec::Dense(c, f) => Frame::dense(*c, *f),
        }
    }
}

impl FromStr for FrameSpec {
    type Err = KripkeError;

    /// `natle`, `natlt`, `natrefl:1,4,9`, `gn:<n>`, `hn:<n>`, `ord:<m>,<k>`,
    /// `dense:<chain>[x<fill>]`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || KripkeError::Invalid(format!("bad frame spec `{s}`"));
        let num = |t: &str| t.trim().parse::<usize>().map_err(|_| bad());
        let lower = s.to_ascii_lowercase();
        let (head, arg) = match lower.split_once(':') {
            Some((h, a)) => (h.to_string(), Some(a.to_string())),
            None => (lower.clone(), None),
        };
        match (head.as_str(), arg) {
            ("natle", None) => Ok(FrameSpec::NatLe),
            ("natlt", None) => Ok(FrameSpec::NatLt),
            ("natrefl", Some(a)) => {
                let set = if a.is_empty() {
                    BTreeSet::new()
                } else {
                    a.split(',').map(num).collect::<Result<_, _>>()?
                };
                Ok(FrameSpec::NatRefl(set))
            }
            ("gn", Some(a)) => Ok(FrameSpec::Gn(num(&a)?)),
            ("hn", Some(a)) => Ok(FrameSpec::Hn(num(&a)?)),
            ("ord", Some(a)) => {
                let (m, k) = a.split_once(',').ok_or_else(bad)?;
                Ok(FrameSpec::Ordinal(num(m)?, num(k)?))
            }
            ("dense", Some(a)) => match a.split_once('x') {
                Some((c, f)) => Ok(FrameSpec::Dense(num(c)?, num(f)?)),
                None => Ok(FrameSpec::Dense(num(&a)?, 1)),
            },
            _ => Err(bad()),
        }
    }
}

impl fmt::Display for FrameSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FrameSpec::NatLe => write!(f, "natle"),
            FrameSpec::NatLt => write!(f, "natlt"),
            FrameSpec::NatRefl(s) => {
                let v: Vec<String> = s.iter().map(|w| w.to_string()).collect();
                write!(f, "natrefl:{}", v.join(","))
            }
            FrameSpec::Gn(n) => write!(f, "gn:{n}"),
            FrameSpec::Hn(n) => write!(f, "hn:{n}"),
            FrameSpec::Ordinal(m, k) => write!(f, "ord:{m},{k}"),
            FrameSpec::Dense(c, x) => write!(f, "dense:{c}x{x}"),
        }
    }
}
