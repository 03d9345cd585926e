use std::collections::BTreeSet;

use log::debug;
use serde::{Deserialize, Serialize};

use super::lattice::{Coverage, FixpointEngine, PremiseKey};
use super::significance::fisher_from_table;
use super::{LearnError, SearchConfig, TargetSpec};
use crate::rule_core::{
    in_prod_mu, mu, mu_cond_defined, rule_more_general, AnnotatedRule, Conjunction, Dataset, Rule,
    RuleError, RuleSet,
};

/// `r1 ⊏ r2`: `r2` specializes `r1` and strictly raises its conditional
/// probability.
pub fn prob_infer(r1: &Rule, r2: &Rule, d: &Dataset) -> Result<bool, LearnError> {
    let p1 = mu_cond_defined(r1, d)?;
    let p2 = mu_cond_defined(r2, d)?;
    Ok(rule_more_general(r1, r2) && p1 < p2)
}

/// Points 1 and 2: the rule predicts part of the goal from pool literals,
/// and its premise strictly raises the probability of the conclusion and of
/// each conclusion literal.
pub fn pi_holds(rule: &Rule, target: &TargetSpec, d: &Dataset) -> Result<bool, LearnError> {
    let conditional = mu_cond_defined(rule, d)?;
    let point1 = rule.conclusion().is_subset(target.goal())
        && rule
            .premise()
            .iter()
            .all(|l| target.pool().binary_search(l).is_ok());
    if !point1 {
        return Ok(false);
    }
    if mu(rule.conclusion(), d)? >= conditional {
        return Ok(false);
    }
    for literal in rule.conclusion().iter() {
        let single = Conjunction::single(literal.clone());
        let restricted = Rule::new(rule.premise().clone(), single.clone())?;
        if mu(&single, d)? >= mu_cond_defined(&restricted, d)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// One-literal extensions of the premise by pool literals, in pool order.
pub fn refine(rule: &Rule, target: &TargetSpec, cfg: &SearchConfig) -> Vec<Rule> {
    if rule.premise().len() >= cfg.max_premise_len {
        return Vec::new();
    }
    target
        .pool()
        .iter()
        .filter(|l| !rule.premise().contains(l) && !rule.premise().contradicts(l))
        .filter_map(|l| {
            let premise = rule.premise().with(l.clone()).ok()?;
            Rule::new(premise, rule.conclusion().clone()).ok()
        })
        .collect()
}

fn engine<'t>(
    target: &'t TargetSpec,
    d: &Dataset,
    cfg: &SearchConfig,
) -> Result<FixpointEngine<'t>, LearnError> {
    cfg.validate()?;
    let coverage = Coverage::new(d, target)?;
    Ok(FixpointEngine::new(&coverage, target, cfg.max_premise_len))
}

/// Minimal followers of a rule within the bounded lattice.
pub fn minimal_followers(
    rule: &Rule,
    target: &TargetSpec,
    d: &Dataset,
    cfg: &SearchConfig,
) -> Result<Vec<Rule>, LearnError> {
    if !in_prod_mu(rule, d)? {
        return Err(RuleError::UndefinedMeasure.into());
    }
    if rule.conclusion() != target.goal() {
        // followers keep the conclusion; no such rule can enter Π
        return Ok(Vec::new());
    }
    let mut engine = engine(target, d, cfg)?;
    let key = engine.key_of(rule)?;
    Ok(engine
        .minimal_followers_of(&key)
        .iter()
        .map(|k| engine.rule_of(k))
        .collect())
}

fn keys_of(engine: &FixpointEngine, s: &BTreeSet<Rule>) -> Result<BTreeSet<PremiseKey>, LearnError> {
    s.iter().map(|r| engine.key_of(r)).collect()
}

/// One application of the learning operator.
pub fn apply_t(
    s: &BTreeSet<Rule>,
    target: &TargetSpec,
    d: &Dataset,
    cfg: &SearchConfig,
) -> Result<BTreeSet<Rule>, LearnError> {
    let mut engine = engine(target, d, cfg)?;
    let keys = keys_of(&engine, s)?;
    Ok(engine.apply(&keys).iter().map(|k| engine.rule_of(k)).collect())
}

pub fn is_fixpoint(
    s: &BTreeSet<Rule>,
    target: &TargetSpec,
    d: &Dataset,
    cfg: &SearchConfig,
) -> Result<bool, LearnError> {
    let mut engine = engine(target, d, cfg)?;
    let keys = keys_of(&engine, s)?;
    Ok(engine.apply(&keys) == keys)
}

/// Maximal specificity within the premise bound (points 1–3).
pub fn is_ums(
    rule: &Rule,
    target: &TargetSpec,
    d: &Dataset,
    cfg: &SearchConfig,
) -> Result<bool, LearnError> {
    if !pi_holds(rule, target, d)? {
        return Ok(false);
    }
    if rule.conclusion() != target.goal() {
        return Err(LearnError::OutsideLattice(
            "maximal specificity is checked for rules concluding the whole goal".into(),
        ));
    }
    let engine = engine(target, d, cfg)?;
    let key = engine.key_of(rule)?;
    Ok(engine.is_ums_key(&key))
}

/// Why a learning run produced nothing.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Diagnostic {
    /// The goal holds in every case or in none; no premise can raise it.
    ConstantGoal,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Learned {
    pub rules: RuleSet,
    pub diagnostic: Option<Diagnostic>,
}

/// The operator's fix-point reached from the empty-premise rule, before any
/// threshold or significance filtering.
pub fn learn_fixpoint(
    target: &TargetSpec,
    d: &Dataset,
    cfg: &SearchConfig,
) -> Result<BTreeSet<Rule>, LearnError> {
    let mut engine = engine(target, d, cfg)?;
    let fixpoint = engine.fixpoint();
    Ok(fixpoint.iter().map(|k| engine.rule_of(k)).collect())
}

pub(crate) fn annotated_fixpoint(
    engine: &mut FixpointEngine,
    cfg: &SearchConfig,
) -> Vec<AnnotatedRule> {
    let fixpoint = engine.fixpoint();
    debug!(
        "fix-point: {} rules over a lattice of {} premises",
        fixpoint.len(),
        engine.lattice_size()
    );
    let mut rules: Vec<(PremiseKey, AnnotatedRule)> = fixpoint
        .into_iter()
        .filter_map(|key| {
            let probability = engine.probability(&key)?;
            if probability < cfg.min_conditional_probability {
                return None;
            }
            let p_value = fisher_from_table(engine.contingency(&key)?).0;
            if cfg.significance_alpha.is_some_and(|alpha| p_value > alpha) {
                return None;
            }
            let rule = engine.rule_of(&key);
            let support = engine.support(&key)?;
            Some((
                key,
                AnnotatedRule {
                    rule,
                    probability,
                    support,
                    p_value: Some(p_value),
                },
            ))
        })
        .collect();
    rules.sort_by(|(ka, a), (kb, b)| {
        b.probability
            .cmp(&a.probability)
            .then(b.support.cmp(&a.support))
            .then_with(|| ka.cmp(kb))
    });
    rules.into_iter().map(|(_, r)| r).collect()
}

fn constant_goal(coverage: &Coverage) -> bool {
    coverage.goal_count() == 0 || coverage.goal_count() == coverage.cases()
}

/// Learns the maximally specific rules for the goal, filtered by the
/// configured probability threshold and significance level.
pub fn learn(target: &TargetSpec, d: &Dataset, cfg: &SearchConfig) -> Result<Learned, LearnError> {
    cfg.validate()?;
    if d.is_empty() {
        return Err(RuleError::EmptyDataset.into());
    }
    let coverage = Coverage::new(d, target)?;
    let mut rules = RuleSet::new(d.signature().clone(), target.goal().clone());
    if constant_goal(&coverage) {
        return Ok(Learned {
            rules,
            diagnostic: Some(Diagnostic::ConstantGoal),
        });
    }
    let mut engine = FixpointEngine::new(&coverage, target, cfg.max_premise_len);
    rules.rules = annotated_fixpoint(&mut engine, cfg);
    Ok(Learned {
        rules,
        diagnostic: None,
    })
}

/// Rules for the goal and for its negation in one set, as consumed by
/// [`super::predict_case`].
pub fn learn_classifier(
    target: &TargetSpec,
    d: &Dataset,
    cfg: &SearchConfig,
) -> Result<Learned, LearnError> {
    let positive = learn(target, d, cfg)?;
    if positive.diagnostic.is_some() {
        return Ok(positive);
    }
    let negative = learn(&target.negated()?, d, cfg)?;
    let mut rules = positive.rules;
    rules.rules.extend(negative.rules.rules);
    Ok(Learned {
        rules,
        diagnostic: None,
    })
}

pub(crate) fn classifier_from_coverage(
    target: &TargetSpec,
    negated: &TargetSpec,
    positive: &Coverage,
    negative: &Coverage,
    signature: &crate::rule_core::AttributeSignature,
    cfg: &SearchConfig,
) -> RuleSet {
    let mut rules = RuleSet::new(signature.clone(), target.goal().clone());
    if constant_goal(positive) {
        return rules;
    }
    let mut pos = FixpointEngine::new(positive, target, cfg.max_premise_len);
    rules.rules = annotated_fixpoint(&mut pos, cfg);
    let mut neg = FixpointEngine::new(negative, negated, cfg.max_premise_len);
    rules.rules.extend(annotated_fixpoint(&mut neg, cfg));
    rules
}
