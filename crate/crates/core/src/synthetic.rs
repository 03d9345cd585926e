//! Cases drawn uniformly over the raw inputs of a hierarchical expert model
//! and labelled by it, with optional label noise.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::learner::{LearnError, TargetSpec};
use crate::monotone::{fixtures, BitVector, HierarchySpec};
use crate::rule_core::{AttributeSignature, Case, Dataset, Literal, Value};

pub const LABEL: &str = "malignant";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SyntheticConfig {
    pub cases: usize,
    /// Probability of flipping each label.
    pub noise: f64,
    pub seed: u64,
}

impl Default for SyntheticConfig {
    fn default() -> Self {
        Self {
            cases: 200,
            noise: 0.05,
            seed: 0,
        }
    }
}

/// Binary attributes `w1 … y1 … x3 …` followed by the label.
pub fn signature(model: &HierarchySpec) -> AttributeSignature {
    let mut names = model.input_names();
    names.push(LABEL.into());
    AttributeSignature::binary(names).expect("generated names are distinct")
}

pub fn generate(model: &HierarchySpec, cfg: &SyntheticConfig) -> Dataset {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let width = model.input_width();
    let cases = (0..cfg.cases)
        .map(|i| {
            let inputs: Vec<bool> = (0..width).map(|_| rng.random()).collect();
            let v = BitVector::from_bools(&inputs).expect("model width is valid");
            let clean = model.eval_flat(&v).expect("width matches the model");
            let label = clean ^ (rng.random::<f64>() < cfg.noise);
            let mut values: Vec<Value> = inputs.into_iter().map(Value::Binary).collect();
            values.push(Value::Binary(label));
            Case::new(format!("s{:03}", i + 1), values)
        })
        .collect();
    Dataset::new(signature(model), cases).expect("generated cases conform")
}

/// The bundled expert model with the default configuration's shape.
pub fn expert_cases(cfg: &SyntheticConfig) -> Dataset {
    generate(&fixtures::expert_model(), cfg)
}

/// Predict the label from every input flag.
pub fn label_target(d: &Dataset) -> Result<TargetSpec, LearnError> {
    let sig = d.signature();
    let label = sig
        .index_of(LABEL)
        .ok_or_else(|| LearnError::InvalidTarget(format!("no `{LABEL}` attribute")))?;
    TargetSpec::single(
        Literal::flag(label),
        (0..sig.len()).filter(|&i| i != label).map(Literal::flag),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_for_a_seed() {
        let cfg = SyntheticConfig {
            cases: 30,
            ..SyntheticConfig::default()
        };
        assert_eq!(expert_cases(&cfg), expert_cases(&cfg));
        let other = SyntheticConfig { seed: 1, ..cfg.clone() };
        assert_ne!(expert_cases(&cfg), expert_cases(&other));
    }

    #[test]
    fn noise_free_labels_follow_the_model() {
        let model = fixtures::expert_model();
        let cfg = SyntheticConfig {
            cases: 100,
            noise: 0.0,
            seed: 7,
        };
        let d = generate(&model, &cfg);
        assert_eq!(d.signature().len(), 12);
        for c in d.cases() {
            let bits: Vec<bool> = c.values[..11]
                .iter()
                .map(|v| matches!(v, Value::Binary(true)))
                .collect();
            let v = BitVector::from_bools(&bits).unwrap();
            assert_eq!(c.values[11], Value::Binary(model.eval_flat(&v).unwrap()));
        }
        let t = label_target(&d).unwrap();
        assert_eq!(t.pool().len(), 22);
    }
}
