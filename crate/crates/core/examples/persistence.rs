//! Saves an interview halfway, loads it back and finishes it.

use spi_discovery::io::{load_model, save_model, StoredModel};
use spi_discovery::monotone::{extract_dnf, fixtures, ElicitationState};

fn main() {
    let oracle = fixtures::f_table();
    let mut state = ElicitationState::new(fixtures::reference_plan());
    for _ in 0..5 {
        let q = state.next_question().unwrap();
        state.submit_answer(q, oracle.get(&q).unwrap()).unwrap();
    }
    let path = std::env::temp_dir().join("spi-discovery-session.json");
    save_model(&StoredModel::Session(state.clone()), &path).unwrap();
    println!("saved after {} answers to {}", state.question_count(), path.display());

    let StoredModel::Session(mut resumed) = load_model(&path).unwrap() else {
        panic!("expected a session");
    };
    assert_eq!(resumed, state);
    println!("next question: {}", resumed.next_question().unwrap());
    while let Some(q) = resumed.next_question() {
        resumed.submit_answer(q, oracle.get(&q).unwrap()).unwrap();
    }
    let model = extract_dnf(&resumed.table().unwrap(), resumed.plan()).unwrap();
    println!("finished in {} questions: f = {}", resumed.question_count(), model.minimal.render("x"));
    std::fs::remove_file(&path).ok();
}
