//! Probabilistic rule induction by semantic probabilistic inference, and
//! monotone Boolean expert elicitation over Hansel chains.
//!
//! * [`rule_core`]: literals, productions, generality and the empirical measure.
//! * [`learner`]: the fix-point learning operator, significance filtering,
//!   prediction with refusal and leave-one-out evaluation.
//! * [`monotone`]: chain decomposition of the Boolean cube, interview state,
//!   DNF extraction and hierarchical composition.
//! * [`io`]: CSV ingestion, discretization and JSON persistence.
//! * [`synthetic`]: case generator labelled by the hierarchical expert model.

pub mod io;
pub mod learner;
pub mod monotone;
pub mod rule_core;
pub mod synthetic;
