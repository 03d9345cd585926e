use proptest::prelude::*;
use spi_discovery::learner::{
    evaluate_round_robin, fisher_one_sided, is_ums, learn, learn_classifier, pi_holds, predict_case, significance,
    Preset, SearchConfig, TargetSpec, Verdict,
};
use spi_discovery::rule_core::{Dataset, Literal, Probability};
use spi_discovery::synthetic::{self, SyntheticConfig};

fn dataset(attrs: usize, rows: &[Vec<bool>]) -> Dataset {
    let names: Vec<String> = (0..attrs).map(|i| format!("a{i}")).chain(["goal".into()]).collect();
    Dataset::from_binary_rows(names, rows).unwrap()
}

fn target(attrs: usize) -> TargetSpec {
    TargetSpec::single(
        Literal::flag(attrs),
        (0..attrs).flat_map(|a| [Literal::flag(a), Literal::flag(a).negate()]),
    )
    .unwrap()
}

fn rows() -> impl Strategy<Value = (usize, Vec<Vec<bool>>)> {
    (1usize..=4).prop_flat_map(|attrs| {
        (
            Just(attrs),
            prop::collection::vec(prop::collection::vec(any::<bool>(), attrs + 1), 2..20),
        )
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn learned_rules_are_maximally_specific((attrs, rows) in rows()) {
        let d = dataset(attrs, &rows);
        let t = target(attrs);
        let cfg = SearchConfig { max_premise_len: 3, ..SearchConfig::default() };
        let out = learn(&t, &d, &cfg).unwrap();
        for a in out.rules.iter() {
            prop_assert!(pi_holds(&a.rule, &t, &d).unwrap());
            prop_assert!(is_ums(&a.rule, &t, &d, &cfg).unwrap());
            prop_assert!(a.rule.premise().len() <= 3);
        }
    }

    #[test]
    fn thresholds_are_honoured((attrs, rows) in rows(), cp in 0u64..=100) {
        let d = dataset(attrs, &rows);
        let cfg = SearchConfig {
            max_premise_len: 3,
            min_conditional_probability: Probability::new(cp, 100).unwrap(),
            significance_alpha: Some(0.1),
        };
        let out = learn_classifier(&target(attrs), &d, &cfg).unwrap();
        for a in out.rules.iter() {
            prop_assert!(a.probability >= cfg.min_conditional_probability);
            prop_assert!(a.p_value.unwrap() <= 0.1);
            let report = significance(&a.rule, &d).unwrap();
            prop_assert_eq!(report.p_value, a.p_value.unwrap());
            prop_assert_eq!(report.contingency[0][0] + report.contingency[0][1], a.support);
        }
    }

    #[test]
    fn predictions_and_metrics_are_consistent((attrs, rows) in rows()) {
        let d = dataset(attrs, &rows);
        let t = target(attrs);
        let cfg = SearchConfig { max_premise_len: 2, ..SearchConfig::default() };
        let rules = learn_classifier(&t, &d, &cfg).unwrap().rules;
        for case in d.cases() {
            let p = predict_case(&rules, case).unwrap();
            prop_assert_eq!(p.verdict == Verdict::Refused, p.winning_rule.is_none());
        }
        let m = evaluate_round_robin(&d, &t, &cfg).unwrap();
        prop_assert_eq!(m.total, d.len());
        prop_assert_eq!(m.diagnosed + m.refused, m.total);
        prop_assert_eq!(m.correct + m.false_positives + m.false_negatives, m.diagnosed);
        prop_assert_eq!(evaluate_round_robin(&d, &t, &cfg).unwrap(), m);
    }

    #[test]
    fn fisher_is_a_probability(a in 0u64..30, b in 0u64..30, c in 0u64..30, d in 0u64..30) {
        let n = a + b + c + d;
        let degenerate = a + b == 0 || a + b == n || a + c == 0 || a + c == n;
        match fisher_one_sided(a, b, c, d) {
            None => prop_assert!(degenerate),
            Some(p) => {
                prop_assert!(!degenerate);
                prop_assert!((0.0..=1.0).contains(&p));
                // one more co-occurrence, same margins: never less significant
                if b > 0 && c > 0 {
                    prop_assert!(fisher_one_sided(a + 1, b - 1, c - 1, d + 1).unwrap() <= p + 1e-15);
                }
            }
        }
    }

    #[test]
    fn decimal_thresholds_are_exact(num in 0u64..=1000) {
        let text = format!("{}.{:03}", num / 1000, num % 1000);
        prop_assert_eq!(Probability::from_decimal_str(&text).unwrap(), Probability::new(num, 1000).unwrap());
    }
}

#[test]
fn constant_goal_is_diagnosed() {
    let rows = vec![vec![true, true], vec![false, true], vec![true, true]];
    let out = learn(&target(1), &dataset(1, &rows), &SearchConfig::default()).unwrap();
    assert!(out.rules.is_empty());
    assert!(out.diagnostic.is_some());
}

#[test]
fn presets_tighten_monotonically_on_synthetic_cases() {
    let d = synthetic::expert_cases(&SyntheticConfig::default());
    let t = synthetic::label_target(&d).unwrap();
    let counts: Vec<usize> = Preset::ALL
        .iter()
        .map(|p| learn_classifier(&t, &d, &p.config()).unwrap().rules.len())
        .collect();
    assert!(counts.windows(2).all(|w| w[0] >= w[1]), "{counts:?}");
}

#[test]
fn invalid_configurations_are_rejected() {
    let d = dataset(1, &[vec![true, true], vec![false, false]]);
    for cfg in [
        SearchConfig { max_premise_len: 0, ..SearchConfig::default() },
        SearchConfig { max_premise_len: 9, ..SearchConfig::default() },
        SearchConfig { significance_alpha: Some(0.0), ..SearchConfig::default() },
    ] {
        assert!(learn(&target(1), &d, &cfg).is_err(), "{cfg:?}");
    }
}

#[test]
fn strictest_preset_is_at_least_as_accurate_without_noise() {
    let d = synthetic::expert_cases(&SyntheticConfig {
        cases: 100,
        noise: 0.0,
        seed: 0,
    });
    let t = synthetic::label_target(&d).unwrap();
    let loose = evaluate_round_robin(&d, &t, &Preset::Discovery1.config()).unwrap();
    let strict = evaluate_round_robin(&d, &t, &Preset::Discovery3.config()).unwrap();
    assert!(strict.accuracy >= loose.accuracy, "{strict:?} vs {loose:?}");
}
