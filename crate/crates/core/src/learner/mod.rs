//! The fix-point learning operator over productions for a fixed goal.
//!
//! Rules are refined by adding premise literals from a verifiable pool; a
//! refinement is accepted only when it strictly raises the exact conditional
//! probability of the goal. The learner iterates the operator from the
//! empty-premise rule until nothing changes; every rule left is maximally
//! specific within the configured premise-length bound.

mod lattice;
mod operator;
mod predict;
mod significance;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::rule_core::{Conjunction, Literal, Probability, Rule, RuleError};

pub use lattice::{Coverage, FixpointEngine, PremiseKey, MAX_PREMISE_LEN};
pub use operator::{
    apply_t, is_fixpoint, is_ums, learn, learn_classifier, learn_fixpoint, minimal_followers,
    pi_holds, prob_infer, refine, Diagnostic, Learned,
};
pub use predict::{evaluate_round_robin, predict_case, EvalMetrics, Prediction, Verdict};
pub use significance::{fisher_one_sided, significance, SignificanceReport};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LearnError {
    #[error(transparent)]
    Rule(#[from] RuleError),
    #[error("invalid target: {0}")]
    InvalidTarget(String),
    #[error("invalid search configuration: {0}")]
    InvalidConfig(String),
    #[error("rule outside the refinement lattice: {0}")]
    OutsideLattice(String),
    #[error("round-robin evaluation needs at least 2 cases, got {0}")]
    TooFewCases(usize),
}

/// The goal to predict and the literals premises may be built from.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TargetSpec {
    goal: Conjunction,
    pool: Vec<Literal>,
}

impl TargetSpec {
    /// Validates the target: non-empty goal, pool disjoint from the goal's
    /// attributes and closed under negation. The pool is stored sorted.
    pub fn new(goal: Conjunction, pool: impl IntoIterator<Item = Literal>) -> Result<Self, LearnError> {
        if goal.is_empty() {
            return Err(LearnError::InvalidTarget("goal is empty".into()));
        }
        let mut pool: Vec<Literal> = pool.into_iter().collect();
        pool.sort();
        pool.dedup();
        let goal_attrs = goal.attributes();
        for l in &pool {
            if goal_attrs.contains(&l.attribute()) {
                return Err(LearnError::InvalidTarget(format!(
                    "pool literal on goal attribute {}",
                    l.attribute()
                )));
            }
            if pool.binary_search(&l.negate()).is_err() {
                return Err(LearnError::InvalidTarget(format!(
                    "pool is not closed under negation: missing complement of {l:?}"
                )));
            }
        }
        if pool.len() > u16::MAX as usize {
            return Err(LearnError::InvalidTarget("pool too large".into()));
        }
        Ok(Self { goal, pool })
    }

    /// A single-literal goal with a pool built from the given literals and
    /// their negations.
    pub fn single(goal: Literal, pool: impl IntoIterator<Item = Literal>) -> Result<Self, LearnError> {
        let pool: Vec<Literal> = pool
            .into_iter()
            .flat_map(|l| [l.negate(), l])
            .collect();
        Self::new(Conjunction::single(goal), pool)
    }

    pub fn goal(&self) -> &Conjunction {
        &self.goal
    }

    pub fn pool(&self) -> &[Literal] {
        &self.pool
    }

    pub fn goal_rule(&self, premise: Conjunction) -> Result<Rule, LearnError> {
        Ok(Rule::new(premise, self.goal.clone())?)
    }

    /// The target for the opposite class; defined for single-literal goals.
    pub fn negated(&self) -> Result<TargetSpec, LearnError> {
        let mut it = self.goal.iter();
        match (it.next(), it.next()) {
            (Some(l), None) => Ok(TargetSpec {
                goal: Conjunction::single(l.negate()),
                pool: self.pool.clone(),
            }),
            _ => Err(LearnError::InvalidTarget(
                "negated target needs a single-literal goal".into(),
            )),
        }
    }
}

/// Search bound and acceptance thresholds.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SearchConfig {
    pub max_premise_len: usize,
    pub min_conditional_probability: Probability,
    pub significance_alpha: Option<f64>,
}

impl Default for SearchConfig {
    fn default() -> Self {
        Self {
            max_premise_len: 4,
            min_conditional_probability: Probability::ZERO,
            significance_alpha: None,
        }
    }
}

impl SearchConfig {
    pub fn validate(&self) -> Result<(), LearnError> {
        if !(1..=MAX_PREMISE_LEN).contains(&self.max_premise_len) {
            return Err(LearnError::InvalidConfig(format!(
                "max_premise_len must be in 1..={MAX_PREMISE_LEN}"
            )));
        }
        if let Some(alpha) = self.significance_alpha {
            if !(alpha > 0.0 && alpha <= 1.0) {
                return Err(LearnError::InvalidConfig(format!("alpha {alpha} not in (0, 1]")));
            }
        }
        Ok(())
    }
}

/// Named threshold presets: conditional probability at least 0.75, 0.85 and
/// 0.95, each with significance level 0.05.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Preset {
    Discovery1,
    Discovery2,
    Discovery3,
}

impl Preset {
    pub const ALL: [Preset; 3] = [Preset::Discovery1, Preset::Discovery2, Preset::Discovery3];

    pub fn name(self) -> &'static str {
        match self {
            Preset::Discovery1 => "discovery1",
            Preset::Discovery2 => "discovery2",
            Preset::Discovery3 => "discovery3",
        }
    }

    pub fn min_conditional_probability(self) -> Probability {
        match self {
            Preset::Discovery1 => Probability { num: 75, den: 100 },
            Preset::Discovery2 => Probability { num: 85, den: 100 },
            Preset::Discovery3 => Probability { num: 95, den: 100 },
        }
    }

    pub fn config(self) -> SearchConfig {
        SearchConfig {
            min_conditional_probability: self.min_conditional_probability(),
            significance_alpha: Some(0.05),
            ..SearchConfig::default()
        }
    }
}

impl std::str::FromStr for Preset {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Preset::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| format!("unknown preset `{s}` (expected discovery1, discovery2 or discovery3)"))
    }
}
