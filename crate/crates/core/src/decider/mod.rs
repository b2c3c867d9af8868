//! The per-candidate decision cascade: a greedy positive filter, a discrete
//! negative filter run in both orientations, and the recursive exact
//! decider.

mod cascade;
mod filters;
mod recursive;

use serde::Serialize;

pub use cascade::{
    decide_cascade, Cascade, CascadeConfig, CascadeOutcome, ExactDecider, Stage, StageTimings,
};
pub use filters::{greedy_filter, greedy_leash, negative_filter, negative_filter_both};
pub use recursive::{
    decide_recursive, decide_recursive_with, RecursionStats, RecursiveOptions, AUDIT_MAX_VERTICES,
    BLOCK_VISIT_CONSTANT,
};

pub use crate::freespace::Frontier;

/// Outcome of a cheap filter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum FilterVerdict {
    CertifiedYes,
    CertifiedNo,
    Unknown,
}
