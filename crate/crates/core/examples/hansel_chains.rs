//! Prints the Hansel chain partition of the n-cube and the question bound.
//!
//! `cargo run --example hansel_chains -- 5`

use spi_discovery::monotone::{fixtures, hansel_chains, question_bound, same_chain_set};

fn main() {
    let n: usize = std::env::args().nth(1).map_or(5, |a| a.parse().expect("n must be a number"));
    let plan = hansel_chains(n).expect("n in 1..=24");
    for (i, chain) in plan.chains().iter().enumerate() {
        println!("{:>3}: {}", i + 1, chain.render());
    }
    println!(
        "{} chains; at most {} questions instead of {}",
        plan.chains().len(),
        question_bound(n),
        1u64 << n
    );
    if n == 5 {
        let published = fixtures::reference_plan();
        println!("same chains as the bundled n=5 order: {}", same_chain_set(&plan, &published));
    }
}
