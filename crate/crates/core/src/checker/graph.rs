//! The finite structure the three-valued evaluator runs on.
//!
//! Nodes `0 … H-1` are the materialized worlds. For every truncated segment
//! with a tail certificate, one extra node per valuation type stands for all
//! unmaterialized worlds of that type. Evaluation at a tail node is a sound
//! approximation of every world it stands for: a definite verdict at node
//! `t` holds at each such world. By induction on formulas:
//!
//! * atoms and `∀` only look at in-bound elements and at the exact
//!   `∀`-answers of the generator, and both are part of the type;
//! * a world of a recurrent type sees, strictly above itself, worlds of
//!   every recurrent type of its segment and everything in later segments,
//!   so a `False` there refutes `□`;
//! * a world of any tail type sees only worlds of the listed types, so `□`
//!   is `True` when all listed types are `True`;
//! * transient types are only *possible* successors: they can block `True`
//!   but never force `False`.
//!
//! A materialized world surely sees every tail type of its own and later
//! segments, and nothing else beyond the prefix.

use std::ops::Range;

use crate::kripke::PredicateModel;

#[derive(Debug, Clone)]
pub(crate) enum SegmentTail {
    /// Nothing above the segment's last materialized world.
    Complete,
    /// Truncated without a certificate.
    Uncovered,
    /// Certified; recurrent nodes come first.
    Nodes { recurrent: Range<usize>, transient: Range<usize> },
}

#[derive(Debug, Clone)]
pub(crate) struct EvalGraph {
    pub prefix: usize,
    pub codes: Vec<u64>,
    pub linear: bool,
    /// Segment of each node.
    pub segment: Vec<u32>,
    pub seg_start: Vec<usize>,
    pub tails: Vec<SegmentTail>,
}

impl EvalGraph {
    pub fn new(model: &PredicateModel) -> EvalGraph {
        let frame = model.frame();
        let prefix = frame.len();
        let mut codes: Vec<u64> = (0..prefix).map(|w| frame.code(w)).collect();
        let mut segment: Vec<u32> = (0..prefix).map(|w| frame.segment_of(w) as u32).collect();
        let mut tails = Vec::new();
        for (g, seg) in frame.segments().iter().enumerate() {
            let cert = model.tail().and_then(|t| t.segments[g].as_ref());
            tails.push(match (seg.truncated, cert) {
                (false, _) => SegmentTail::Complete,
                (true, None) => SegmentTail::Uncovered,
                (true, Some(nodes)) => {
                    let start = codes.len();
                    let mut rec: Vec<u64> = nodes.iter().filter(|n| n.recurrent).map(|n| n.code).collect();
                    let trans: Vec<u64> = nodes.iter().filter(|n| !n.recurrent).map(|n| n.code).collect();
                    let mid = start + rec.len();
                    codes.append(&mut rec);
                    codes.extend(trans.iter());
                    segment.resize(codes.len(), g as u32);
                    SegmentTail::Nodes { recurrent: start..mid, transient: mid..codes.len() }
                }
            });
        }
        EvalGraph {
            prefix,
            codes,
            linear: frame.is_linear(),
            segment,
            seg_start: frame.segments().iter().map(|s| s.start).collect(),
            tails,
        }
    }

    pub fn len(&self) -> usize {
        self.codes.len()
    }

    pub fn segments(&self) -> usize {
        self.tails.len()
    }

    pub fn label(&self, model: &PredicateModel, node: usize) -> String {
        if node < self.prefix {
            model.frame().label(node).to_string()
        } else {
            format!("tail:{}", self.codes[node])
        }
    }

    /// Every tail node of segments `g…`, in order.
    pub fn tail_nodes_from(&self, g: usize) -> impl Iterator<Item = usize> + '_ {
        self.tails[g..].iter().flat_map(|t| match t {
            SegmentTail::Nodes { recurrent, transient } => recurrent.start..transient.end,
            _ => 0..0,
        })
    }
}
