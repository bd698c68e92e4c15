//! Frames, predicate models and the generated witness models.

mod frame;
pub mod generators;
mod io;
mod model;

pub use frame::{Frame, FrameKind, FrameSpec, ReflexiveSet, Segment, ORDINAL_SHIFT};
pub use io::{parse_model, recipe_tiling, write_model};
pub use model::{
    Domain, ExplicitInterpretation, Interpretation, ModelSource, PredicateModel, TailCertificate, TailNode,
};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum KripkeError {
    #[error("invalid model: {0}")]
    Invalid(String),
    #[error("model file line {line}: {msg}")]
    Format { line: usize, msg: String },
}
