//! Literals, conjunctions and productions over a finite attribute signature,
//! their generality relations, and the empirical measure a dataset induces.

mod data;
mod generality;
mod literal;
mod measure;
mod ruleset;

use thiserror::Error;

pub use data::{Attribute, AttributeKind, AttributeSignature, Case, Dataset, Value};
pub use generality::{
    predicted_facts, rule_at_least_as_general, rule_more_general, ruleset_more_mu_general,
    ruleset_not_less_general,
};
pub use literal::{Conjunction, Literal, Predicate, Rule};
pub use measure::{in_prod_mu, mu, mu_cond, mu_cond_defined, Probability};
pub use ruleset::{AnnotatedRule, RuleSet};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RuleError {
    #[error("invalid signature: {0}")]
    InvalidSignature(String),
    #[error("invalid literal: {0}")]
    InvalidLiteral(String),
    #[error("unknown attribute index {0}")]
    UnknownAttribute(usize),
    #[error("type mismatch on attribute `{attribute}`: {detail}")]
    TypeMismatch { attribute: String, detail: String },
    #[error("conjunction contains a literal and its negation: {0}")]
    InconsistentConjunction(String),
    #[error("rule conclusion is empty")]
    EmptyConclusion,
    #[error("attribute {0} occurs in both premise and conclusion")]
    SharedAttribute(usize),
    #[error("duplicate case id `{0}`")]
    DuplicateCaseId(String),
    #[error("case `{id}` has {found} values, signature has {expected}")]
    CaseShape {
        id: String,
        expected: usize,
        found: usize,
    },
    #[error("dataset is empty")]
    EmptyDataset,
    #[error("measure undefined: premise has zero support")]
    UndefinedMeasure,
    #[error("invalid probability {num}/{den}")]
    InvalidProbability { num: u64, den: u64 },
    #[error("invalid probability threshold `{0}`")]
    InvalidThreshold(String),
}
