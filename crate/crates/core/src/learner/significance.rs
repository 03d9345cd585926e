use serde::{Deserialize, Serialize};

use super::LearnError;
use crate::rule_core::{Dataset, Rule, RuleError};

/// One-sided Fisher exact test of a rule's premise against its conclusion.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SignificanceReport {
    /// `[[premise∧concl, premise∧¬concl], [¬premise∧concl, ¬premise∧¬concl]]`
    pub contingency: [[u64; 2]; 2],
    pub p_value: f64,
    /// Set when a margin is constant and the test carries no information.
    pub degenerate: bool,
}

pub fn significance(rule: &Rule, d: &Dataset) -> Result<SignificanceReport, LearnError> {
    let sig = d.signature();
    let mut table = [[0u64; 2]; 2];
    for case in d.cases() {
        let p = rule.premise().satisfied(case, sig)?;
        let c = rule.conclusion().satisfied(case, sig)?;
        table[usize::from(!p)][usize::from(!c)] += 1;
    }
    if table[0][0] + table[0][1] == 0 {
        return Err(RuleError::UndefinedMeasure.into());
    }
    let (p_value, degenerate) = fisher_from_table(table);
    Ok(SignificanceReport {
        contingency: table,
        p_value,
        degenerate,
    })
}

pub(crate) fn fisher_from_table(t: [[u64; 2]; 2]) -> (f64, bool) {
    match fisher_one_sided(t[0][0], t[0][1], t[1][0], t[1][1]) {
        Some(p) => (p, false),
        None => (1.0, true),
    }
}

/// `P(X ≥ a)` for `X ~ Hypergeometric(N = a+b+c+d, K = a+c, n = a+b)`: the
/// chance of at least the observed co-occurrence under independence.
///
/// Returns `None` when a margin is degenerate (premise never or always true,
/// conclusion constant).
pub fn fisher_one_sided(a: u64, b: u64, c: u64, d: u64) -> Option<f64> {
    let total = a + b + c + d;
    let successes = a + c;
    let draws = a + b;
    if draws == 0 || draws == total || successes == 0 || successes == total {
        return None;
    }
    let lo = draws.saturating_sub(total - successes);
    let hi = draws.min(successes);

    // pmf ratio between consecutive support points
    let up = |x: u64| {
        ((successes - x) as f64 * (draws - x) as f64)
            / ((x + 1) as f64 * (x + 1 + total - successes - draws) as f64)
    };
    // walk from the mode so every unnormalized term is ≤ 1
    let mode = (((draws + 1) as f64 * (successes + 1) as f64) / (total + 2) as f64).floor() as u64;
    let mode = mode.clamp(lo, hi);

    let mut tail = 0.0;
    let mut all = 0.0;
    let mut term = 1.0;
    for x in mode..=hi {
        all += term;
        if x >= a {
            tail += term;
        }
        if x < hi {
            term *= up(x);
        }
    }
    term = 1.0;
    let mut x = mode;
    while x > lo {
        term /= up(x - 1);
        x -= 1;
        all += term;
        if x >= a {
            tail += term;
        }
    }
    Some((tail / all).clamp(0.0, 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rule_core::{Conjunction, Literal};

    #[test]
    fn balanced_table() {
        let p = fisher_one_sided(1, 1, 1, 1).unwrap();
        assert!((p - 5.0 / 6.0).abs() < 1e-15);
    }

    #[test]
    fn perfectly_associated_table() {
        // C(10,5) = 252
        let p = fisher_one_sided(5, 0, 0, 5).unwrap();
        assert!((p - 1.0 / 252.0).abs() / (1.0 / 252.0) < 1e-13);
    }

    #[test]
    fn degenerate_margins() {
        assert_eq!(fisher_one_sided(3, 2, 0, 0), None);
        assert_eq!(fisher_one_sided(3, 0, 4, 0), None);
        assert_eq!(fisher_one_sided(0, 0, 2, 3), None);
    }

    #[test]
    fn rule_significance_with_constant_conclusion() {
        let d = crate::rule_core::Dataset::from_binary_rows(
            ["a", "goal"],
            &[vec![true, true], vec![false, true], vec![true, true]],
        )
        .unwrap();
        let r = crate::rule_core::Rule::new(
            Conjunction::single(Literal::flag(0)),
            Conjunction::single(Literal::flag(1)),
        )
        .unwrap();
        let report = significance(&r, &d).unwrap();
        assert!(report.degenerate);
        assert_eq!(report.p_value, 1.0);
        assert_eq!(report.contingency, [[2, 0], [1, 0]]);
    }

    #[test]
    fn tail_is_monotone_in_observed_count() {
        let mut prev = 1.0;
        for a in 0..=6 {
            let p = fisher_one_sided(a, 6 - a, 6 - a, 14 + a).unwrap();
            assert!(p <= prev + 1e-15);
            prev = p;
        }
    }
}
