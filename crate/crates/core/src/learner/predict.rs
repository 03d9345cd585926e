use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::lattice::Coverage;
use super::operator::classifier_from_coverage;
use super::{LearnError, SearchConfig, TargetSpec};
use crate::rule_core::{AnnotatedRule, Case, Probability, Rule, RuleSet};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Positive,
    Negative,
    Refused,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Prediction {
    pub verdict: Verdict,
    pub winning_rule: Option<Rule>,
    pub probability: Option<Probability>,
}

impl Prediction {
    fn refused() -> Self {
        Self {
            verdict: Verdict::Refused,
            winning_rule: None,
            probability: None,
        }
    }

    fn from_rule(verdict: Verdict, r: &AnnotatedRule) -> Self {
        Self {
            verdict,
            winning_rule: Some(r.rule.clone()),
            probability: Some(r.probability),
        }
    }
}

/// Fires every rule whose premise the case satisfies and takes the side of
/// the most probable one. No fired rule, or an exact tie between a goal rule
/// and a negated-goal rule, is a refusal. Within one side the earlier rule
/// in set order wins ties.
pub fn predict_case(rules: &RuleSet, case: &Case) -> Result<Prediction, LearnError> {
    let sig = &rules.signature;
    let mut best_pos: Option<&AnnotatedRule> = None;
    let mut best_neg: Option<&AnnotatedRule> = None;
    for r in rules.iter() {
        if !r.rule.premise().satisfied(case, sig)? {
            continue;
        }
        let slot = if rules.is_positive(&r.rule) {
            &mut best_pos
        } else {
            &mut best_neg
        };
        if slot.is_none_or(|b| r.probability > b.probability) {
            *slot = Some(r);
        }
    }
    Ok(match (best_pos, best_neg) {
        (None, None) => Prediction::refused(),
        (Some(p), None) => Prediction::from_rule(Verdict::Positive, p),
        (None, Some(n)) => Prediction::from_rule(Verdict::Negative, n),
        (Some(p), Some(n)) => match p.probability.cmp(&n.probability) {
            std::cmp::Ordering::Greater => Prediction::from_rule(Verdict::Positive, p),
            std::cmp::Ordering::Less => Prediction::from_rule(Verdict::Negative, n),
            std::cmp::Ordering::Equal => Prediction::refused(),
        },
    })
}

/// Leave-one-out summary. The error rates are fractions of the diagnosed
/// cases.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct EvalMetrics {
    pub total: usize,
    pub diagnosed: usize,
    pub refused: usize,
    pub correct: usize,
    pub false_positives: usize,
    pub false_negatives: usize,
    pub accuracy: f64,
    pub false_positive_rate: f64,
    pub false_negative_rate: f64,
    pub refusal_rate: f64,
}

impl EvalMetrics {
    fn from_outcomes(outcomes: &[(Verdict, bool)]) -> Self {
        let mut m = EvalMetrics {
            total: outcomes.len(),
            ..Default::default()
        };
        for &(verdict, actual) in outcomes {
            match (verdict, actual) {
                (Verdict::Refused, _) => m.refused += 1,
                (Verdict::Positive, true) | (Verdict::Negative, false) => m.correct += 1,
                (Verdict::Positive, false) => m.false_positives += 1,
                (Verdict::Negative, true) => m.false_negatives += 1,
            }
        }
        m.diagnosed = m.total - m.refused;
        let frac = |k: usize, n: usize| if n == 0 { 0.0 } else { k as f64 / n as f64 };
        m.accuracy = frac(m.correct, m.diagnosed);
        m.false_positive_rate = frac(m.false_positives, m.diagnosed);
        m.false_negative_rate = frac(m.false_negatives, m.diagnosed);
        m.refusal_rate = frac(m.refused, m.total);
        m
    }
}

/// Round-Robin evaluation: each case is predicted by a classifier learned on
/// all the other cases. Folds run in parallel; the result does not depend on
/// scheduling.
pub fn evaluate_round_robin(
    d: &crate::rule_core::Dataset,
    target: &TargetSpec,
    cfg: &SearchConfig,
) -> Result<EvalMetrics, LearnError> {
    cfg.validate()?;
    if d.len() < 2 {
        return Err(LearnError::TooFewCases(d.len()));
    }
    let negated = target.negated()?;
    let positive = Coverage::new(d, target)?;
    let negative = Coverage::new(d, &negated)?;
    let sig = d.signature();
    let outcomes = d
        .cases()
        .par_iter()
        .enumerate()
        .map(|(i, case)| {
            let rules = classifier_from_coverage(
                target,
                &negated,
                &positive.without_case(i),
                &negative.without_case(i),
                sig,
                cfg,
            );
            let verdict = predict_case(&rules, case)?.verdict;
            let actual = target.goal().satisfied(case, sig)?;
            Ok((verdict, actual))
        })
        .collect::<Result<Vec<_>, LearnError>>()?;
    Ok(EvalMetrics::from_outcomes(&outcomes))
}
