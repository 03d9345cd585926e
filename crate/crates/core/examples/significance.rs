//! One-sided Fisher test of a rule's premise against its conclusion.

use spi_discovery::learner::{fisher_one_sided, significance};
use spi_discovery::rule_core::{Conjunction, Dataset, Literal, Rule};

fn main() {
    // (a, goal) counts: a agrees with goal in 14 of 18 cases
    let counts = [((true, true), 7), ((true, false), 2), ((false, true), 2), ((false, false), 7)];
    let rows: Vec<Vec<bool>> = counts
        .iter()
        .flat_map(|&((a, g), k)| std::iter::repeat_n(vec![a, g], k))
        .collect();
    let d = Dataset::from_binary_rows(["a", "goal"], &rows).unwrap();
    let rule = Rule::new(Conjunction::single(Literal::flag(0)), Conjunction::single(Literal::flag(1))).unwrap();
    let report = significance(&rule, &d).unwrap();
    println!("{}", rule.render(d.signature()));
    println!("contingency {:?}", report.contingency);
    println!("p = {:.5}", report.p_value);
    for alpha in [0.01, 0.05, 0.1] {
        println!("  significant at {alpha}: {}", report.p_value <= alpha);
    }
    // a premise true in every case carries no information
    println!("degenerate table: {:?}", fisher_one_sided(6, 6, 0, 0));
}
