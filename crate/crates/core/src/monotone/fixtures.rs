//! The worked breast-cancer example: the published chain order for `n = 5`,
//! the two tabulated expert functions and the resulting three-part model.

use super::{ChainPlan, Dnf, HierarchySpec, TruthTable};

pub const REFERENCE_ORDER_JSON: &str = include_str!("../../fixtures/reference_order.json");
pub const F_TABLE_JSON: &str = include_str!("../../fixtures/f_table.json");
pub const H_TABLE_JSON: &str = include_str!("../../fixtures/h_table.json");
pub const G_TABLE_JSON: &str = include_str!("../../fixtures/g_table.json");

/// The ten chains of the 5-cube in the order the published interview uses.
pub fn reference_plan() -> ChainPlan {
    serde_json::from_str(REFERENCE_ORDER_JSON).expect("bundled chain order is valid")
}

/// `f(x1, …, x5)`: the top-level suspicion-of-cancer function.
pub fn f_table() -> TruthTable {
    serde_json::from_str(F_TABLE_JSON).expect("bundled table is valid")
}

/// `h(y1, …, y5)`: the second intermediate attribute.
pub fn h_table() -> TruthTable {
    serde_json::from_str(H_TABLE_JSON).expect("bundled table is valid")
}

/// `g(w1, w2, w3) = w2 ∨ w1w3` tabulated.
pub fn g_table() -> TruthTable {
    serde_json::from_str(G_TABLE_JSON).expect("bundled table is valid")
}

/// `f(g(w), h(y), x3, x4, x5)` with the published minimal forms.
pub fn expert_model() -> HierarchySpec {
    HierarchySpec::new(
        Dnf::parse("x1x2 ∨ x3 ∨ x1x5 ∨ x2x5 ∨ x4x5", 5).expect("valid"),
        Dnf::parse("w2 ∨ w1w3", 3).expect("valid"),
        Dnf::parse("y1 ∨ y2 ∨ y3y4y5", 5).expect("valid"),
    )
    .expect("widths 5/3/5")
}
