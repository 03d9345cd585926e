use std::collections::BTreeMap;
use std::path::Path;

use log::warn;
use serde::{Deserialize, Serialize};

use super::IoError;
use crate::rule_core::{AttributeKind, AttributeSignature, Conjunction, Dataset, Literal, Value};

/// How one attribute becomes premise literals.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AttributeRule {
    /// The flag and its negation.
    Binary,
    /// One equality literal per declared value, with negations.
    Categorical,
    /// `A>t` for each threshold and `t_i<A<t_{i+1}` between neighbours, with
    /// negations.
    Thresholds(Vec<f64>),
    /// Contributes no literals.
    Skip,
}

/// Per-attribute rules keyed by attribute name. Binary and categorical
/// attributes default to their natural rule; numeric attributes need
/// thresholds or an explicit skip.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct DiscretizationSpec {
    pub rules: BTreeMap<String, AttributeRule>,
}

impl DiscretizationSpec {
    pub fn with(mut self, attribute: impl Into<String>, rule: AttributeRule) -> Self {
        self.rules.insert(attribute.into(), rule);
        self
    }

    fn rule_for(&self, name: &str, kind: &AttributeKind) -> Result<AttributeRule, IoError> {
        if let Some(rule) = self.rules.get(name) {
            return Ok(rule.clone());
        }
        match kind {
            AttributeKind::Binary => Ok(AttributeRule::Binary),
            AttributeKind::Categorical(_) => Ok(AttributeRule::Categorical),
            AttributeKind::Numeric => Err(IoError::Spec(format!(
                "numeric attribute `{name}` has no thresholds"
            ))),
        }
    }
}

/// A signature together with how to discretize it: the contents of a
/// `--spec` file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DatasetSchema {
    pub signature: AttributeSignature,
    #[serde(default)]
    pub discretization: DiscretizationSpec,
}

impl DatasetSchema {
    pub fn load(path: impl AsRef<Path>) -> Result<Self, IoError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| IoError::io(path, e))?;
        serde_json::from_str(&text).map_err(IoError::from_json)
    }
}

/// Literal columns over the cases: `rows[case][column]` is whether the case
/// satisfies `literals[column]`.
#[derive(Clone, Debug, PartialEq)]
pub struct BinaryView {
    pub literals: Vec<Literal>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<bool>>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Discretized {
    /// Sorted and closed under negation.
    pub pool: Vec<Literal>,
    pub view: BinaryView,
    pub warnings: Vec<String>,
}

impl Discretized {
    /// The pool minus literals on the goal's attributes.
    pub fn pool_for(&self, goal: &Conjunction) -> Vec<Literal> {
        let attrs = goal.attributes();
        self.pool
            .iter()
            .filter(|l| !attrs.contains(&l.attribute()))
            .cloned()
            .collect()
    }
}

pub fn discretize(d: &Dataset, spec: &DiscretizationSpec) -> Result<Discretized, IoError> {
    let sig = d.signature();
    for name in spec.rules.keys() {
        if sig.index_of(name).is_none() {
            return Err(IoError::Spec(format!("`{name}` is not in the signature")));
        }
    }
    let mut pool = Vec::new();
    let mut warnings = Vec::new();
    for (i, attr) in sig.attributes().iter().enumerate() {
        let rule = spec.rule_for(&attr.name, &attr.kind)?;
        let positives: Vec<Literal> = match (&rule, &attr.kind) {
            (AttributeRule::Skip, _) => Vec::new(),
            (AttributeRule::Binary, AttributeKind::Binary) => vec![Literal::flag(i)],
            (AttributeRule::Categorical, AttributeKind::Categorical(values)) => {
                values.iter().map(|v| Literal::equals(i, v.clone())).collect()
            }
            (AttributeRule::Thresholds(ts), AttributeKind::Numeric) => {
                if ts.is_empty() {
                    return Err(IoError::Spec(format!("`{}`: empty threshold list", attr.name)));
                }
                if ts.windows(2).any(|w| !(w[0] < w[1])) {
                    return Err(IoError::Spec(format!(
                        "`{}`: thresholds must be strictly increasing",
                        attr.name
                    )));
                }
                let observed = d.cases().iter().filter_map(|c| match c.value(i) {
                    Some(Value::Numeric(x)) => Some(*x),
                    _ => None,
                });
                let (lo, hi) = observed.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), x| {
                    (lo.min(x), hi.max(x))
                });
                for &t in ts {
                    if !(t > lo && t < hi) {
                        let msg = format!(
                            "`{}`: threshold {t} outside the observed range [{lo}, {hi}]",
                            attr.name
                        );
                        warn!("{msg}");
                        warnings.push(msg);
                    }
                }
                let mut lits = Vec::new();
                for (k, &t) in ts.iter().enumerate() {
                    lits.push(Literal::gt(i, t)?);
                    if let Some(&next) = ts.get(k + 1) {
                        lits.push(Literal::in_range(i, t, next)?);
                    }
                }
                lits
            }
            (rule, kind) => {
                return Err(IoError::Spec(format!(
                    "`{}`: rule {rule:?} does not apply to a {kind:?} attribute",
                    attr.name
                )))
            }
        };
        for l in positives {
            pool.push(l.negate());
            pool.push(l);
        }
    }
    pool.sort();
    pool.dedup();
    let columns = pool.iter().map(|l| l.render(sig)).collect();
    let rows = d
        .cases()
        .iter()
        .map(|c| pool.iter().map(|l| l.satisfied(c, sig)).collect::<Result<Vec<_>, _>>())
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Discretized {
        view: BinaryView {
            literals: pool.clone(),
            columns,
            rows,
        },
        pool,
        warnings,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rule_core::{Attribute, Case};

    fn data() -> Dataset {
        let sig = AttributeSignature::new(vec![
            Attribute::numeric("NUM"),
            Attribute::numeric("VOL"),
            Attribute::categorical("DEN", ["low", "moderate"]),
            Attribute::binary("malignant"),
        ])
        .unwrap();
        let case = |id: &str, num: f64, vol: f64, den: &str, m: bool| {
            Case::new(
                id,
                vec![
                    Value::Numeric(num),
                    Value::Numeric(vol),
                    Value::Categorical(den.into()),
                    Value::Binary(m),
                ],
            )
        };
        Dataset::new(
            sig,
            vec![
                case("a", 5.0, 2.0, "low", false),
                case("b", 15.0, 7.0, "moderate", true),
                case("c", 25.0, 9.0, "moderate", true),
            ],
        )
        .unwrap()
    }

    fn spec() -> DiscretizationSpec {
        DiscretizationSpec::default()
            .with("NUM", AttributeRule::Thresholds(vec![10.0, 20.0]))
            .with("VOL", AttributeRule::Thresholds(vec![5.0]))
    }

    #[test]
    fn literal_shapes() {
        let d = data();
        let out = discretize(&d, &spec()).unwrap();
        let rendered: Vec<&str> = out.view.columns.iter().map(String::as_str).collect();
        for want in ["VOL>5", "¬(VOL>5)", "10<NUM<20", "NUM>10", "NUM>20", "DEN=moderate", "malignant", "¬malignant"] {
            assert!(rendered.contains(&want), "{want} missing from {rendered:?}");
        }
        assert_eq!(out.pool.len(), 2 * (3 + 1 + 2 + 1));
        for l in &out.pool {
            assert!(out.pool.contains(&l.negate()));
        }
        assert!(out.warnings.is_empty());
    }

    #[test]
    fn view_matches_satisfaction() {
        let d = data();
        let out = discretize(&d, &spec()).unwrap();
        for (case, row) in d.cases().iter().zip(&out.view.rows) {
            for (l, &bit) in out.pool.iter().zip(row) {
                assert_eq!(l.satisfied(case, d.signature()).unwrap(), bit);
            }
        }
    }

    #[test]
    fn deterministic_and_warns_out_of_range() {
        let d = data();
        let s = DiscretizationSpec::default()
            .with("NUM", AttributeRule::Thresholds(vec![10.0, 100.0]))
            .with("VOL", AttributeRule::Skip);
        let a = discretize(&d, &s).unwrap();
        let b = discretize(&d, &s).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.warnings.len(), 1);
    }

    #[test]
    fn spec_errors() {
        let d = data();
        assert!(discretize(&d, &DiscretizationSpec::default()).is_err());
        let decreasing = spec().with("NUM", AttributeRule::Thresholds(vec![20.0, 10.0]));
        assert!(discretize(&d, &decreasing).is_err());
        let wrong_kind = spec().with("DEN", AttributeRule::Binary);
        assert!(discretize(&d, &wrong_kind).is_err());
        let unknown = spec().with("XYZ", AttributeRule::Skip);
        assert!(discretize(&d, &unknown).is_err());
    }

    #[test]
    fn goal_pool() {
        let d = data();
        let out = discretize(&d, &spec()).unwrap();
        let goal = Conjunction::single(Literal::flag(3));
        assert!(out.pool_for(&goal).iter().all(|l| l.attribute() != 3));
    }

    #[test]
    fn schema_json() {
        let text = r#"{
            "signature": {"attributes": [
                {"name": "VOL", "kind": "numeric"},
                {"name": "malignant", "kind": "binary"}
            ]},
            "discretization": {"VOL": {"thresholds": [5]}}
        }"#;
        let schema: DatasetSchema = serde_json::from_str(text).unwrap();
        assert_eq!(schema.signature.len(), 2);
        assert_eq!(schema.discretization.rules["VOL"], AttributeRule::Thresholds(vec![5.0]));
    }
}
