//! Elicits g, h and f separately and composes them into one model over
//! eleven raw inputs.

use spi_discovery::monotone::{
    extract_dnf, fixtures, hansel_chains, run_interview, BitVector, ChainPlan, HierarchySpec, Mode, TruthTable,
};

fn elicit(table: &TruthTable, plan: ChainPlan) -> (usize, spi_discovery::monotone::Dnf) {
    let out = run_interview(plan.clone(), Mode::Hansel, |v| table.get(&v).unwrap()).unwrap();
    (out.asked.len(), extract_dnf(&out.table, &plan).unwrap().minimal)
}

fn main() {
    let (qg, g) = elicit(&fixtures::g_table(), hansel_chains(3).unwrap());
    let (qh, h) = elicit(&fixtures::h_table(), fixtures::reference_plan());
    let (qf, f) = elicit(&fixtures::f_table(), fixtures::reference_plan());
    println!("g = {}  ({qg} questions)", g.render("w"));
    println!("h = {}  ({qh} questions)", h.render("y"));
    println!("f = {}  ({qf} questions)", f.render("x"));

    let model = HierarchySpec::new(f, g, h).unwrap();
    println!("flattened: {}", model.flatten().render_with(&model.input_names()));
    println!(
        "{} questions in all, against 2^{} = {} for a flat table",
        qg + qh + qf,
        model.input_width(),
        model.unassisted_question_count()
    );

    for raw in ["01010000000", "00000000100", "10100000001"] {
        let v: BitVector = raw.parse().unwrap();
        println!("f({raw}) = {}", u8::from(model.eval_flat(&v).unwrap()));
    }
}
