//! Learns rules from a small mixed-type case table and diagnoses a new case.

use spi_discovery::io::{discretize, read_cases_csv, AttributeRule, DiscretizationSpec};
use spi_discovery::learner::{learn_classifier, predict_case, Preset, TargetSpec};
use spi_discovery::rule_core::{Attribute, AttributeSignature, Case, Conjunction, Literal, Value};

const CASES: &str = "\
id,NUM,VOL,DEN,malignant
p01,12,6.5,high,1
p02,3,1.0,low,0
p03,25,9.0,high,1
p04,4,2.5,moderate,0
p05,18,7.5,moderate,1
p06,2,0.5,low,0
p07,15,3.0,high,1
p08,6,8.0,low,0
p09,22,6.0,moderate,1
p10,5,1.5,moderate,0
p11,9,5.5,high,1
p12,1,0.8,low,0
p13,30,4.0,low,1
p14,7,2.0,high,0
";

fn main() {
    let sig = AttributeSignature::new(vec![
        Attribute::numeric("NUM"),
        Attribute::numeric("VOL"),
        Attribute::categorical("DEN", ["low", "moderate", "high"]),
        Attribute::binary("malignant"),
    ])
    .unwrap();
    let cases = read_cases_csv(CASES.as_bytes(), &sig).unwrap();
    let spec = DiscretizationSpec::default()
        .with("NUM", AttributeRule::Thresholds(vec![10.0, 20.0]))
        .with("VOL", AttributeRule::Thresholds(vec![5.0]));
    let disc = discretize(&cases, &spec).unwrap();

    let goal = Conjunction::single(Literal::parse("malignant", &sig).unwrap());
    let target = TargetSpec::new(goal.clone(), disc.pool_for(&goal)).unwrap();
    let mut cfg = Preset::Discovery2.config();
    cfg.max_premise_len = 2;
    cfg.significance_alpha = Some(0.1);
    let learned = learn_classifier(&target, &cases, &cfg).unwrap();
    let positive: Vec<_> = learned.rules.iter().filter(|a| learned.rules.is_positive(&a.rule)).collect();
    println!("{} rules, {} for malignant:", learned.rules.len(), positive.len());
    for a in positive {
        println!("  {}  cp={}", a.rule.render(&sig), a.probability);
    }

    let new_case = Case::new(
        "new",
        vec![
            Value::Numeric(14.0),
            Value::Numeric(6.0),
            Value::Categorical("moderate".into()),
            Value::Binary(false),
        ],
    );
    let p = predict_case(&learned.rules, &new_case).unwrap();
    match &p.winning_rule {
        Some(rule) => println!("verdict {:?} by {}", p.verdict, rule.render(&sig)),
        None => println!("no rule applies; refused"),
    }
}
