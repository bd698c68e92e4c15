//! Truth of formulas in predicate Kripke models.
//!
//! [`eval2`] is the two-valued truth definition on complete finite models.
//! [`Checker`] is a three-valued evaluator for prefixes of infinite models:
//! a definite verdict is one that the intended model agrees with, and
//! [`Verdict::Unknown`] is returned whenever the materialized part does not
//! decide the formula.

mod eval2;
mod eval3;
mod graph;
pub mod props;
mod relation;
mod report;
mod search;

pub use eval2::eval2;
pub use eval3::{eval3, CheckOptions, Checker, Outcome, DEFAULT_STEP_LIMIT};
pub use props::{ArithmeticBeta, PropertyReport};
pub use relation::{r_blackdiamond, Marker, RelationTable};
pub use report::{check_artifact, instance_verdicts, CheckReport, ConjunctReport};
pub use search::{countermodel_search, Countermodel, SearchOptions, DEFAULT_SEARCH_CAP};

use serde::Serialize;
use thiserror::Error;

use crate::formula::FormulaError;
use crate::kripke::KripkeError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Verdict {
    False,
    Unknown,
    True,
}

impl Verdict {
    pub fn from_bool(b: bool) -> Verdict {
        if b {
            Verdict::True
        } else {
            Verdict::False
        }
    }

    pub fn is_definite(self) -> bool {
        self != Verdict::Unknown
    }

    pub fn as_bool(self) -> Option<bool> {
        match self {
            Verdict::True => Some(true),
            Verdict::False => Some(false),
            Verdict::Unknown => None,
        }
    }

    /// Strong Kleene conjunction.
    pub fn and(self, other: Verdict) -> Verdict {
        use Verdict::*;
        match (self, other) {
            (False, _) | (_, False) => False,
            (True, True) => True,
            _ => Unknown,
        }
    }

    pub fn or(self, other: Verdict) -> Verdict {
        self.not().and(other.not()).not()
    }

    pub fn not(self) -> Verdict {
        match self {
            Verdict::True => Verdict::False,
            Verdict::False => Verdict::True,
            Verdict::Unknown => Verdict::Unknown,
        }
    }

    pub fn implies(self, other: Verdict) -> Verdict {
        self.not().or(other)
    }

    pub(crate) fn code(self) -> u8 {
        match self {
            Verdict::False => 1,
            Verdict::Unknown => 2,
            Verdict::True => 3,
        }
    }

    pub(crate) fn from_code(c: u8) -> Option<Verdict> {
        match c {
            1 => Some(Verdict::False),
            2 => Some(Verdict::Unknown),
            3 => Some(Verdict::True),
            _ => None,
        }
    }
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Verdict::True => "TRUE",
            Verdict::False => "FALSE",
            Verdict::Unknown => "UNKNOWN",
        })
    }
}

/// One step of the path justifying a definite verdict.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum TraceStep {
    /// Moved to the world with this label.
    World(String),
    /// Chose this element for a quantified variable.
    Bind { var: String, value: i64 },
}

impl std::fmt::Display for TraceStep {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            TraceStep::World(w) => write!(f, "world {w}"),
            TraceStep::Bind { var, value } => write!(f, "{var}={value}"),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CheckError {
    #[error(transparent)]
    Formula(#[from] FormulaError),
    #[error(transparent)]
    Kripke(#[from] KripkeError),
    #[error("letter `{0}` is not interpreted by the model")]
    MissingLetter(String),
    #[error("letter `{letter}` has arity {model} in the model but {formula} in the formula")]
    Arity { letter: String, model: usize, formula: usize },
    #[error("free variable `{0}` is unassigned")]
    Unassigned(String),
    #[error("value {value} of `{var}` is not in the domain of world {world}")]
    OutsideDomain { var: String, value: i64, world: usize },
    #[error("world {0} is not in the model")]
    NoSuchWorld(usize),
    #[error("the model is truncated; two-valued evaluation needs a complete model")]
    Incomplete,
    #[error("evaluation step limit of {0} exceeded")]
    StepLimit(u64),
    #[error("search guard of {0} interpretations exceeded")]
    SearchGuard(u64),
    #[error("{0}")]
    Undecidable(String),
    #[error("{0}")]
    Unsupported(String),
}

#[cfg(test)]
mod tests;
