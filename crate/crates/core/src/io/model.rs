use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value as Json;

use super::IoError;
use crate::monotone::{BitVector, ChainPlan, ElicitationState, HierarchySpec, Mode, Provenance};
use crate::rule_core::{AnnotatedRule, AttributeSignature, Conjunction, Literal, Probability, Rule, RuleSet};

pub const SCHEMA_VERSION: u32 = 1;

/// Anything that can be written to and read back from a model file.
#[derive(Clone, Debug, PartialEq)]
pub enum StoredModel {
    RuleSet(RuleSet),
    Session(ElicitationState),
    Hierarchy(HierarchySpec),
}

impl StoredModel {
    pub fn kind(&self) -> &'static str {
        match self {
            StoredModel::RuleSet(_) => "ruleset",
            StoredModel::Session(_) => "elicitation-session",
            StoredModel::Hierarchy(_) => "hierarchy",
        }
    }
}

#[derive(Serialize, Deserialize)]
struct RuleDoc {
    premise: Vec<String>,
    conclusion: Vec<String>,
    probability: Probability,
    support: u64,
    p_value: Option<f64>,
}

#[derive(Serialize, Deserialize)]
struct RuleSetDoc {
    signature: AttributeSignature,
    target: Vec<String>,
    rules: Vec<RuleDoc>,
}

fn render_all(c: &Conjunction, sig: &AttributeSignature) -> Vec<String> {
    c.iter().map(|l| l.render(sig)).collect()
}

fn parse_all(texts: &[String], sig: &AttributeSignature) -> Result<Conjunction, IoError> {
    let lits = texts
        .iter()
        .map(|t| Literal::parse(t, sig))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Conjunction::new(lits)?)
}

impl RuleSetDoc {
    fn from_ruleset(rs: &RuleSet) -> Self {
        let sig = &rs.signature;
        Self {
            signature: sig.clone(),
            target: render_all(&rs.target, sig),
            rules: rs
                .iter()
                .map(|a| RuleDoc {
                    premise: render_all(a.rule.premise(), sig),
                    conclusion: render_all(a.rule.conclusion(), sig),
                    probability: a.probability,
                    support: a.support,
                    p_value: a.p_value,
                })
                .collect(),
        }
    }

    fn into_ruleset(self) -> Result<RuleSet, IoError> {
        let sig = self.signature;
        let target = parse_all(&self.target, &sig)?;
        let rules = self
            .rules
            .into_iter()
            .map(|r| {
                let rule = Rule::new(parse_all(&r.premise, &sig)?, parse_all(&r.conclusion, &sig)?)?;
                let probability = Probability::new(r.probability.num, r.probability.den)?;
                Ok(AnnotatedRule {
                    rule,
                    probability,
                    support: r.support,
                    p_value: r.p_value,
                })
            })
            .collect::<Result<Vec<_>, IoError>>()?;
        let mut rs = RuleSet::new(sig, target);
        rs.rules = rules;
        Ok(rs)
    }
}

/// The persisted form of one interview: the plan, the answers in the order
/// given, and the provenance of every known vector (checked on load).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SessionDoc {
    pub n: usize,
    #[serde(default)]
    pub mode: Mode,
    pub chain_order: Vec<Vec<String>>,
    pub answers: Vec<(String, u8)>,
    pub provenance: BTreeMap<String, Provenance>,
}

impl SessionDoc {
    pub fn from_state(s: &ElicitationState) -> Self {
        Self {
            n: s.width(),
            mode: s.mode(),
            chain_order: s.plan().to_strings(),
            answers: s.asked().iter().map(|(v, x)| (v.to_string(), u8::from(*x))).collect(),
            provenance: s.known().map(|(v, _, p)| (v.to_string(), p)).collect(),
        }
    }

    pub fn into_state(self) -> Result<ElicitationState, IoError> {
        let plan = ChainPlan::from_strings(self.n, &self.chain_order)?;
        let answers = self
            .answers
            .iter()
            .map(|(v, x)| {
                let v: BitVector = v.parse()?;
                match x {
                    0 => Ok((v, false)),
                    1 => Ok((v, true)),
                    other => Err(IoError::Invalid(format!("answer {other} for {v} is not 0 or 1"))),
                }
            })
            .collect::<Result<Vec<_>, IoError>>()?;
        let state = ElicitationState::replay(plan, self.mode, &answers)?;
        let replayed: BTreeMap<String, Provenance> =
            state.known().map(|(v, _, p)| (v.to_string(), p)).collect();
        if replayed != self.provenance {
            return Err(IoError::Invalid(
                "recorded provenance does not match the replayed answers".into(),
            ));
        }
        Ok(state)
    }
}

fn tagged(kind: &str, payload: Json) -> Json {
    let mut map = match payload {
        Json::Object(m) => m,
        _ => unreachable!("payloads are objects"),
    };
    map.insert("schema_version".into(), Json::from(SCHEMA_VERSION));
    map.insert("kind".into(), Json::from(kind));
    Json::Object(map)
}

/// Rebuilds every object with its keys in sorted order.
fn canonical(v: Json) -> Json {
    match v {
        Json::Object(m) => {
            let sorted: BTreeMap<String, Json> = m.into_iter().map(|(k, v)| (k, canonical(v))).collect();
            Json::Object(sorted.into_iter().collect())
        }
        Json::Array(a) => Json::Array(a.into_iter().map(canonical).collect()),
        other => other,
    }
}

pub fn to_json_value(m: &StoredModel) -> Json {
    let payload = match m {
        StoredModel::RuleSet(rs) => serde_json::to_value(RuleSetDoc::from_ruleset(rs)),
        StoredModel::Session(s) => serde_json::to_value(SessionDoc::from_state(s)),
        StoredModel::Hierarchy(h) => serde_json::to_value(h),
    }
    .expect("model documents serialize");
    canonical(tagged(m.kind(), payload))
}

/// Canonical text: sorted keys, two-space indent, trailing newline.
pub fn to_json_string(m: &StoredModel) -> String {
    let mut s = serde_json::to_string_pretty(&to_json_value(m)).expect("values serialize");
    s.push('\n');
    s
}

pub fn from_json_str(text: &str) -> Result<StoredModel, IoError> {
    let value: Json = serde_json::from_str(text).map_err(IoError::from_json)?;
    from_json_value(value)
}

pub fn from_json_value(value: Json) -> Result<StoredModel, IoError> {
    let Json::Object(mut map) = value else {
        return Err(IoError::Invalid("model document must be a JSON object".into()));
    };
    let version = map
        .remove("schema_version")
        .ok_or_else(|| IoError::Invalid("schema_version missing".into()))?;
    match version.as_u64() {
        Some(v) if v == u64::from(SCHEMA_VERSION) => {}
        _ => {
            return Err(IoError::UnsupportedVersion {
                found: version.to_string(),
                supported: SCHEMA_VERSION,
            })
        }
    }
    let kind = map
        .remove("kind")
        .and_then(|k| k.as_str().map(str::to_owned))
        .ok_or_else(|| IoError::Invalid("kind missing".into()))?;
    let payload = Json::Object(map);
    let de = |e: serde_json::Error| IoError::Invalid(format!("{kind} payload: {e}"));
    Ok(match kind.as_str() {
        "ruleset" => StoredModel::RuleSet(serde_json::from_value::<RuleSetDoc>(payload).map_err(de)?.into_ruleset()?),
        "elicitation-session" => {
            StoredModel::Session(serde_json::from_value::<SessionDoc>(payload).map_err(de)?.into_state()?)
        }
        "hierarchy" => StoredModel::Hierarchy(serde_json::from_value(payload).map_err(de)?),
        other => return Err(IoError::Invalid(format!("unknown model kind `{other}`"))),
    })
}

pub fn save_model(m: &StoredModel, path: impl AsRef<Path>) -> Result<(), IoError> {
    let path = path.as_ref();
    std::fs::write(path, to_json_string(m)).map_err(|e| IoError::io(path, e))
}

pub fn load_model(path: impl AsRef<Path>) -> Result<StoredModel, IoError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| IoError::io(path, e))?;
    from_json_str(&text)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::monotone::fixtures;
    use crate::rule_core::Attribute;

    fn ruleset() -> RuleSet {
        let sig = AttributeSignature::new(vec![
            Attribute::numeric("NUM"),
            Attribute::numeric("VOL"),
            Attribute::numeric("TOT"),
            Attribute::categorical("DEN", ["low", "moderate"]),
            Attribute::binary("malignant"),
        ])
        .unwrap();
        let lit = |t: &str| Literal::parse(t, &sig).unwrap();
        let target = Conjunction::single(lit("malignant"));
        let mut rs = RuleSet::new(sig.clone(), target.clone());
        rs.rules = vec![
            AnnotatedRule {
                rule: Rule::new(
                    Conjunction::new([lit("TOT>30"), lit("VOL>5"), lit("DEN=moderate")]).unwrap(),
                    target.clone(),
                )
                .unwrap(),
                probability: Probability::new(12, 13).unwrap(),
                support: 13,
                p_value: Some(0.0123456789),
            },
            AnnotatedRule {
                rule: Rule::new(
                    Conjunction::new([lit("10<NUM<20")]).unwrap(),
                    Conjunction::single(lit("¬malignant")),
                )
                .unwrap(),
                probability: Probability::new(9, 10).unwrap(),
                support: 10,
                p_value: None,
            },
        ];
        rs
    }

    #[test]
    fn ruleset_round_trip_is_byte_stable() {
        let m = StoredModel::RuleSet(ruleset());
        let text = to_json_string(&m);
        let back = from_json_str(&text).unwrap();
        assert_eq!(back, m);
        assert_eq!(to_json_string(&back), text);
        assert!(text.contains("\"TOT>30\""));
    }

    #[test]
    fn session_round_trip() {
        let f = fixtures::f_table();
        let mut s = ElicitationState::new(fixtures::reference_plan());
        for _ in 0..5 {
            let q = s.next_question().unwrap();
            s.submit_answer(q, f.get(&q).unwrap()).unwrap();
        }
        let back = from_json_str(&to_json_string(&StoredModel::Session(s.clone()))).unwrap();
        match back {
            StoredModel::Session(r) => {
                assert_eq!(r.next_question(), s.next_question());
                assert_eq!(r, s);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn version_and_syntax_errors() {
        let m = StoredModel::Hierarchy(fixtures::expert_model());
        let text = to_json_string(&m).replace("\"schema_version\": 1", "\"schema_version\": 2");
        assert!(matches!(from_json_str(&text), Err(IoError::UnsupportedVersion { .. })));
        match from_json_str("{\n  \"kind\": ") {
            Err(IoError::Json { line, .. }) => assert_eq!(line, 2),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn tampered_provenance_is_rejected() {
        let mut s = ElicitationState::new(fixtures::reference_plan());
        let q = s.next_question().unwrap();
        s.submit_answer(q, true).unwrap();
        let mut doc = SessionDoc::from_state(&s);
        doc.provenance.insert("11100".into(), Provenance::Asked);
        assert!(doc.into_state().is_err());
    }
}
