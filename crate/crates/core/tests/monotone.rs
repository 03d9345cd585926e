use std::collections::BTreeSet;

use proptest::prelude::*;
use spi_discovery::io::{from_json_str, to_json_string, StoredModel};
use spi_discovery::monotone::{
    extract_dnf, fixtures, hansel_chains, question_bound, run_interview, BitVector, Dnf, ElicitationState,
    MonotoneError, Mode, TruthTable,
};

/// A monotone function given by the up-sets of some masks.
fn function(n: usize, masks: &[u32]) -> TruthTable {
    TruthTable::from_fn(n, |v| masks.iter().any(|&m| m & v.bits() == m)).unwrap()
}

/// The masks with every strict superset of another mask removed.
fn absorbed(masks: &[u32]) -> BTreeSet<u32> {
    let set: BTreeSet<u32> = masks.iter().copied().collect();
    set.iter()
        .copied()
        .filter(|&m| !set.iter().any(|&o| o != m && o & m == o))
        .collect()
}

fn monotone_function() -> impl Strategy<Value = (usize, Vec<u32>)> {
    (1usize..=7).prop_flat_map(|n| (Just(n), prop::collection::vec(0u32..1 << n, 0..6)))
}

proptest! {
    #[test]
    fn interview_reconstructs_and_minimizes((n, masks) in monotone_function()) {
        let table = function(n, &masks);
        let plan = hansel_chains(n).unwrap();
        let out = run_interview(plan.clone(), Mode::Hansel, |v| table.get(&v).unwrap()).unwrap();
        prop_assert_eq!(&out.table, &table);
        prop_assert!(out.asked.len() as u64 <= question_bound(n));
        let model = extract_dnf(&out.table, &plan).unwrap();
        prop_assert!(model.minimal.is_minimal());
        let got: BTreeSet<u32> = model.minimal.masks().collect();
        prop_assert_eq!(got, absorbed(&masks));
        for (v, x) in table.iter() {
            prop_assert_eq!(model.raw.eval(&v).unwrap(), x);
        }
    }

    #[test]
    fn undo_then_replay_is_identity((n, masks) in monotone_function(), keep in 0usize..20) {
        let table = function(n, &masks);
        let plan = hansel_chains(n).unwrap();
        let done = run_interview(plan.clone(), Mode::Hansel, |v| table.get(&v).unwrap()).unwrap();
        let keep = keep.min(done.asked.len());
        let mut state = done.state.clone();
        for _ in keep..done.asked.len() {
            state.undo().unwrap();
        }
        let prefix = ElicitationState::replay(plan, Mode::Hansel, &done.asked[..keep]).unwrap();
        prop_assert_eq!(&state, &prefix);
        let stored = StoredModel::Session(prefix.clone());
        prop_assert_eq!(from_json_str(&to_json_string(&stored)).unwrap(), stored);
    }

    #[test]
    fn exhaustive_mode_asks_every_vector((n, masks) in monotone_function()) {
        let n = n.min(5);
        let masks: Vec<u32> = masks.iter().map(|m| m & ((1 << n) - 1)).collect();
        let table = function(n, &masks);
        let out = run_interview(hansel_chains(n).unwrap(), Mode::Exhaustive, |v| table.get(&v).unwrap()).unwrap();
        prop_assert_eq!(out.asked.len(), 1 << n);
        prop_assert_eq!(out.table, table);
    }
}

#[test]
fn chains_partition_the_cube() {
    for n in 1..=12 {
        let plan = hansel_chains(n).unwrap();
        let mut seen = vec![false; 1 << n];
        for chain in plan.chains() {
            for w in chain.vectors().windows(2) {
                let (a, b) = (w[0].bits(), w[1].bits());
                assert!(a & b == a && (b ^ a).count_ones() == 1, "n={n}: {} !< {}", w[0], w[1]);
            }
            // symmetric about the middle level
            let first = chain.vectors()[0].count_ones() as usize;
            assert_eq!(first + first + chain.len() - 1, n, "n={n}: {}", chain.render());
            for v in chain.vectors() {
                assert!(!std::mem::replace(&mut seen[v.bits() as usize], true));
            }
        }
        assert!(seen.iter().all(|&s| s), "n={n}");
        let lens: Vec<usize> = plan.chains().iter().map(|c| c.len()).collect();
        assert!(lens.windows(2).all(|w| w[0] <= w[1]), "shortest chains first");
    }
}

#[test]
fn contradicting_a_propagated_value_names_its_source() {
    let mut state = ElicitationState::new(fixtures::reference_plan());
    let q: BitVector = "01100".parse().unwrap();
    state.submit_answer(q, true).unwrap();
    let above: BitVector = "11100".parse().unwrap();
    match state.submit_answer(above, false) {
        Err(MonotoneError::Inconsistent { conflicting, conflicting_value, .. }) => {
            assert_eq!(conflicting, q);
            assert!(conflicting_value);
        }
        other => panic!("{other:?}"),
    }
}

#[test]
fn expert_model_composes_like_its_flattening() {
    let model = fixtures::expert_model();
    let flat = model.flatten();
    assert_eq!(model.unassisted_question_count(), 2048);
    for bits in 0..1u32 << 11 {
        let v = BitVector::new(11, bits).unwrap();
        let bools = v.to_bools();
        let w = BitVector::from_bools(&bools[..3]).unwrap();
        let y = BitVector::from_bools(&bools[3..8]).unwrap();
        let x = BitVector::from_bools(&bools[8..]).unwrap();
        let direct = model.compose(&w, &y, &x).unwrap();
        assert_eq!(flat.eval(&v).unwrap(), direct, "{v}");
        assert_eq!(model.eval_flat(&v).unwrap(), direct, "{v}");
    }
}

#[test]
fn dnf_parse_render_round_trip() {
    for (text, prefix) in [("x1x2 ∨ x3 ∨ x1x5 ∨ x2x5 ∨ x4x5", "x"), ("y1 ∨ y2 ∨ y3y4y5", "y"), ("⊥", "x")] {
        assert_eq!(Dnf::parse(text, 5).unwrap().render(prefix), text);
    }
}
