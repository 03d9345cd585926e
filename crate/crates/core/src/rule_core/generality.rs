use std::collections::BTreeSet;

use super::data::Dataset;
use super::literal::{Conjunction, Literal, Rule};
use super::measure::mu_cond_defined;
use super::RuleError;

/// Strict generality: `r1` assumes no more and concludes no less than `r2`,
/// and the two are different rules.
pub fn rule_more_general(r1: &Rule, r2: &Rule) -> bool {
    r1 != r2 && rule_at_least_as_general(r1, r2)
}

/// Reflexive closure of [`rule_more_general`].
pub fn rule_at_least_as_general(r1: &Rule, r2: &Rule) -> bool {
    r1.premise().is_subset(r2.premise()) && r2.conclusion().is_subset(r1.conclusion())
}

/// Every rule of `s2` has a generalization (or itself) in `s`.
pub fn ruleset_not_less_general<'a>(
    s: impl IntoIterator<Item = &'a Rule> + Clone,
    s2: impl IntoIterator<Item = &'a Rule>,
) -> bool {
    s2.into_iter()
        .all(|r2| s.clone().into_iter().any(|r| rule_at_least_as_general(r, r2)))
}

/// `s` generalizes every rule of `s2` without lowering its conditional
/// probability, and at least one pairing is a strict generalization.
pub fn ruleset_more_mu_general(s: &[Rule], s2: &[Rule], d: &Dataset) -> Result<bool, RuleError> {
    let estimates = s
        .iter()
        .map(|r| mu_cond_defined(r, d))
        .collect::<Result<Vec<_>, _>>()?;
    let mut strict = false;
    for r2 in s2 {
        let p2 = mu_cond_defined(r2, d)?;
        let mut witnessed = false;
        for (r, p) in s.iter().zip(&estimates) {
            if rule_at_least_as_general(r, r2) && *p >= p2 {
                witnessed = true;
                if r != r2 {
                    strict = true;
                }
            }
        }
        if !witnessed {
            return Ok(false);
        }
    }
    Ok(strict)
}

/// Conclusion literals of every rule whose premise is contained in the
/// observation set.
pub fn predicted_facts<'a>(
    rules: impl IntoIterator<Item = &'a Rule>,
    observed: &[Literal],
) -> Result<BTreeSet<Literal>, RuleError> {
    let observed = Conjunction::new(observed.iter().cloned())?;
    Ok(rules
        .into_iter()
        .filter(|r| r.premise().is_subset(&observed))
        .flat_map(|r| r.conclusion().iter().cloned())
        .collect())
}
