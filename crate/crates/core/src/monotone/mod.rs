//! Monotone Boolean functions elicited from an expert.
//!
//! The cube `{0,1}^n` is split into Hansel chains; questions walk the chains
//! shortest first, and each answer is extended to every comparable vector by
//! monotonicity. The finished table is turned into a minimal DNF from the
//! lowest 1-vector of each chain. Two-level models `f(g(w), h(y), …)` are
//! assembled from separately elicited parts.

mod bitvec;
mod chains;
mod dnf;
mod elicit;
pub mod fixtures;
mod hierarchy;

use thiserror::Error;

pub use bitvec::{BitVector, MAX_WIDTH};
pub use chains::{hansel_chains, same_chain_set, ChainPlan, HanselChain};
pub use dnf::{dnf_of_units, variable_names, Dnf};
pub use elicit::{
    is_monotone, lower_units, phrase_question, run_interview, ElicitationState, InterviewOutcome, Mode, Provenance,
    TruthTable,
};
pub use hierarchy::HierarchySpec;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MonotoneError {
    #[error("width {0} outside 1..=24")]
    WidthOutOfRange(usize),
    #[error("width mismatch: expected {expected}, found {found}")]
    WidthMismatch { expected: usize, found: usize },
    #[error("invalid bit string `{0}`")]
    InvalidBitString(String),
    #[error("invalid chain plan: {0}")]
    InvalidPlan(String),
    #[error("invalid DNF: {0}")]
    InvalidDnf(String),
    #[error("answer {vector}={} contradicts {conflicting}={}", bit(.value), bit(.conflicting_value))]
    Inconsistent {
        vector: BitVector,
        value: bool,
        conflicting: BitVector,
        conflicting_value: bool,
    },
    #[error("{found} is not the pending question ({})", pending(.expected))]
    OutOfOrder {
        expected: Option<BitVector>,
        found: BitVector,
    },
    #[error("nothing to undo")]
    NothingToUndo,
    #[error("not monotone: f({lower})=1 but f({upper})=0")]
    NotMonotone { lower: BitVector, upper: BitVector },
}

fn bit(b: &bool) -> u8 {
    u8::from(*b)
}

fn pending(expected: &Option<BitVector>) -> String {
    match expected {
        Some(v) => format!("expected {v}"),
        None => "interview complete".into(),
    }
}

pub(crate) fn binomial(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u64, |acc, i| acc * (n - i) / (i + 1))
}

/// Worst-case number of questions of the chain interview:
/// `C(n, ⌊n/2⌋) + C(n, ⌊n/2⌋ + 1)`.
pub fn question_bound(n: usize) -> u64 {
    let n = n as u64;
    binomial(n, n / 2) + binomial(n, n / 2 + 1)
}

/// The extracted model: lower units, the DNF they spell and its minimal form.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Extraction {
    pub units: Vec<BitVector>,
    pub raw: Dnf,
    pub minimal: Dnf,
}

pub fn extract_dnf(table: &TruthTable, plan: &ChainPlan) -> Result<Extraction, MonotoneError> {
    let units = lower_units(table, plan)?;
    let raw = dnf_of_units(plan.width(), &units)?;
    let minimal = raw.minimize_absorption();
    Ok(Extraction { units, raw, minimal })
}
