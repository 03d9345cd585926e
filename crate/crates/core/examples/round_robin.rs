//! Leave-one-out evaluation on cases sampled from the bundled expert model,
//! under each threshold preset.
//!
//! `cargo run --release --example round_robin -- 200 0.05`

use spi_discovery::learner::{evaluate_round_robin, Preset};
use spi_discovery::synthetic::{expert_cases, label_target, SyntheticConfig};

fn main() {
    let mut args = std::env::args().skip(1);
    let cases = args.next().map_or(200, |a| a.parse().expect("case count"));
    let noise = args.next().map_or(0.05, |a| a.parse().expect("noise rate"));
    let d = expert_cases(&SyntheticConfig { cases, noise, seed: 0 });
    let target = label_target(&d).unwrap();
    println!("preset      min-cp  diagnosed  refused  accuracy  FPR     FNR");
    for preset in Preset::ALL {
        let m = evaluate_round_robin(&d, &target, &preset.config()).unwrap();
        println!(
            "{:<11} {:<7.2} {:<10} {:<8} {:<9.4} {:<7.4} {:.4}",
            preset.name(),
            preset.min_conditional_probability().as_f64(),
            m.diagnosed,
            m.refused,
            m.accuracy,
            m.false_positive_rate,
            m.false_negative_rate
        );
    }
}
