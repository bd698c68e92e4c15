//! Two-variable first-order modal logic over linear frames.
//!
//! The crate builds the tiling reductions (formula families `A`, `A′`, `A*`
//! and their frame variants), the intended witness models for a given
//! periodic tiling, a bounded model checker for them, and the inverse
//! extraction of a tiling from a model.

pub mod formula;
pub mod tiling;
pub mod reductions;
pub mod kripke;
pub mod checker;
pub mod extraction;
