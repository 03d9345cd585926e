//! Replays the expert interview for `f(x1..x5)` in the bundled chain order,
//! showing which answers settle which other cases.

use spi_discovery::monotone::{extract_dnf, fixtures, phrase_question, ElicitationState};

fn main() {
    let oracle = fixtures::f_table();
    let names = ["x1", "x2", "x3", "x4", "x5"];
    let mut state = ElicitationState::new(fixtures::reference_plan());
    while let Some(q) = state.next_question() {
        let (chain, pos) = state.plan().label(&q).unwrap();
        let answer = oracle.get(&q).unwrap();
        let settled = state.submit_answer(q, answer).unwrap();
        println!("{}.{} {}", chain + 1, pos + 1, phrase_question(&q, &names));
        let others: Vec<String> = settled.iter().map(|v| v.to_string()).collect();
        println!("    {} -> also settles [{}]", u8::from(answer), others.join(" "));
    }
    println!("{} questions for 32 cases", state.question_count());
    let table = state.table().unwrap();
    let model = extract_dnf(&table, state.plan()).unwrap();
    println!("f = {}", model.minimal.render_with(&names));
}
