use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::data::Dataset;
use super::literal::{Conjunction, Rule};
use super::RuleError;

/// An exact frequency `num / den` with `den > 0`.
///
/// Kept as unreduced counts; comparison and equality are by value (cross
/// multiplication), so `2/4 == 1/2`.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct Probability {
    pub num: u64,
    pub den: u64,
}

impl Probability {
    pub fn new(num: u64, den: u64) -> Result<Self, RuleError> {
        if den == 0 || num > den {
            return Err(RuleError::InvalidProbability { num, den });
        }
        Ok(Self { num, den })
    }

    pub const ONE: Probability = Probability { num: 1, den: 1 };
    pub const ZERO: Probability = Probability { num: 0, den: 1 };

    pub fn as_f64(self) -> f64 {
        self.num as f64 / self.den as f64
    }

    /// Parses a decimal such as `0.95` into the exact fraction `95/100`.
    pub fn from_decimal_str(text: &str) -> Result<Self, RuleError> {
        let bad = || RuleError::InvalidThreshold(text.to_string());
        let text = text.trim();
        let (int, frac) = text.split_once('.').unwrap_or((text, ""));
        if frac.len() > 18 || !int.chars().chain(frac.chars()).all(|c| c.is_ascii_digit()) {
            return Err(bad());
        }
        let den = 10u64.pow(frac.len() as u32);
        let int: u64 = if int.is_empty() { 0 } else { int.parse().map_err(|_| bad())? };
        let frac: u64 = if frac.is_empty() { 0 } else { frac.parse().map_err(|_| bad())? };
        let num = int
            .checked_mul(den)
            .and_then(|v| v.checked_add(frac))
            .ok_or_else(bad)?;
        Probability::new(num, den).map_err(|_| bad())
    }
}

impl Ord for Probability {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.num as u128 * other.den as u128).cmp(&(other.num as u128 * self.den as u128))
    }
}

impl PartialOrd for Probability {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl PartialEq for Probability {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Probability {}

impl fmt::Display for Probability {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

fn count(conj: &Conjunction, d: &Dataset) -> Result<u64, RuleError> {
    let mut n = 0;
    for case in d.cases() {
        if conj.satisfied(case, d.signature())? {
            n += 1;
        }
    }
    Ok(n)
}

/// Empirical probability of a conjunction: the fraction of cases satisfying it.
pub fn mu(conj: &Conjunction, d: &Dataset) -> Result<Probability, RuleError> {
    if d.is_empty() {
        return Err(RuleError::EmptyDataset);
    }
    Ok(Probability {
        num: count(conj, d)?,
        den: d.len() as u64,
    })
}

/// Conditional probability of the conclusion given the premise, or `None`
/// when no case satisfies the premise.
pub fn mu_cond(rule: &Rule, d: &Dataset) -> Result<Option<Probability>, RuleError> {
    let mut premise = 0;
    let mut both = 0;
    for case in d.cases() {
        if rule.premise().satisfied(case, d.signature())? {
            premise += 1;
            if rule.conclusion().satisfied(case, d.signature())? {
                both += 1;
            }
        }
    }
    Ok((premise > 0).then_some(Probability {
        num: both,
        den: premise,
    }))
}

/// Like [`mu_cond`] but treats an unsatisfiable premise as an error.
pub fn mu_cond_defined(rule: &Rule, d: &Dataset) -> Result<Probability, RuleError> {
    mu_cond(rule, d)?.ok_or(RuleError::UndefinedMeasure)
}

/// Whether the rule's premise has non-zero empirical probability.
pub fn in_prod_mu(rule: &Rule, d: &Dataset) -> Result<bool, RuleError> {
    Ok(!d.is_empty() && count(rule.premise(), d)? > 0)
}
