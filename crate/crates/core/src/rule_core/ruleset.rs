use serde::{Deserialize, Serialize};

use super::data::AttributeSignature;
use super::literal::{Conjunction, Rule};
use super::measure::Probability;

/// A rule with the statistics it was accepted under.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AnnotatedRule {
    pub rule: Rule,
    /// Exact conditional probability of the conclusion given the premise.
    pub probability: Probability,
    /// Number of cases satisfying the premise.
    pub support: u64,
    pub p_value: Option<f64>,
}

/// Learned rules for a goal. Rules concluding the goal are the positive
/// side; rules concluding its negation are the negative side.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RuleSet {
    pub signature: AttributeSignature,
    pub target: Conjunction,
    pub rules: Vec<AnnotatedRule>,
}

impl RuleSet {
    pub fn new(signature: AttributeSignature, target: Conjunction) -> Self {
        Self {
            signature,
            target,
            rules: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.rules.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rules.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &AnnotatedRule> {
        self.rules.iter()
    }

    pub fn plain_rules(&self) -> Vec<Rule> {
        self.rules.iter().map(|a| a.rule.clone()).collect()
    }

    /// Whether a rule concludes the target (as opposed to its negation).
    pub fn is_positive(&self, rule: &Rule) -> bool {
        rule.conclusion() == &self.target
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        for a in &self.rules {
            out.push_str(&format!(
                "{}  [p={} ({:.4}), support={}{}]\n",
                a.rule.render(&self.signature),
                a.probability,
                a.probability.as_f64(),
                a.support,
                a.p_value.map(|p| format!(", p-value={p:.4}")).unwrap_or_default()
            ));
        }
        out
    }
}
