use std::collections::HashSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::RuleError;

/// The value domain of one attribute.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AttributeKind {
    Binary,
    Categorical(Vec<String>),
    Numeric,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Attribute {
    pub name: String,
    pub kind: AttributeKind,
}

impl Attribute {
    pub fn new(name: impl Into<String>, kind: AttributeKind) -> Self {
        Self {
            name: name.into(),
            kind,
        }
    }

    pub fn binary(name: impl Into<String>) -> Self {
        Self::new(name, AttributeKind::Binary)
    }

    pub fn numeric(name: impl Into<String>) -> Self {
        Self::new(name, AttributeKind::Numeric)
    }

    pub fn categorical<S: Into<String>>(
        name: impl Into<String>,
        values: impl IntoIterator<Item = S>,
    ) -> Self {
        Self::new(
            name,
            AttributeKind::Categorical(values.into_iter().map(Into::into).collect()),
        )
    }
}

/// Ordered, finite attribute vocabulary. The order is used for deterministic
/// tie-breaking everywhere downstream.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AttributeSignature {
    attributes: Vec<Attribute>,
}

impl AttributeSignature {
    pub fn new(attributes: Vec<Attribute>) -> Result<Self, RuleError> {
        let mut seen = HashSet::new();
        for attr in &attributes {
            if attr.name.is_empty() {
                return Err(RuleError::InvalidSignature("empty attribute name".into()));
            }
            if !seen.insert(attr.name.as_str()) {
                return Err(RuleError::InvalidSignature(format!(
                    "duplicate attribute name `{}`",
                    attr.name
                )));
            }
            if let AttributeKind::Categorical(values) = &attr.kind {
                if values.is_empty() {
                    return Err(RuleError::InvalidSignature(format!(
                        "categorical attribute `{}` has no values",
                        attr.name
                    )));
                }
            }
        }
        Ok(Self { attributes })
    }

    /// A signature of binary attributes with the given names.
    pub fn binary<S: Into<String>>(names: impl IntoIterator<Item = S>) -> Result<Self, RuleError> {
        Self::new(names.into_iter().map(Attribute::binary).collect())
    }

    pub fn attributes(&self) -> &[Attribute] {
        &self.attributes
    }

    pub fn len(&self) -> usize {
        self.attributes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.attributes.is_empty()
    }

    pub fn get(&self, index: usize) -> Option<&Attribute> {
        self.attributes.get(index)
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.attributes.iter().position(|a| a.name == name)
    }

    pub fn name(&self, index: usize) -> &str {
        self.attributes
            .get(index)
            .map(|a| a.name.as_str())
            .unwrap_or("?")
    }
}

impl<'de> Deserialize<'de> for AttributeSignature {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw {
            attributes: Vec<Attribute>,
        }
        let raw = Raw::deserialize(deserializer)?;
        AttributeSignature::new(raw.attributes).map_err(serde::de::Error::custom)
    }
}

/// A single observed attribute value.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Value {
    Binary(bool),
    Numeric(f64),
    Categorical(String),
}

impl Value {
    pub fn conforms_to(&self, kind: &AttributeKind) -> bool {
        match (self, kind) {
            (Value::Binary(_), AttributeKind::Binary) => true,
            (Value::Numeric(x), AttributeKind::Numeric) => x.is_finite(),
            (Value::Categorical(v), AttributeKind::Categorical(values)) => values.contains(v),
            _ => false,
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Binary(b) => write!(f, "{}", u8::from(*b)),
            Value::Numeric(x) => write!(f, "{x}"),
            Value::Categorical(s) => f.write_str(s),
        }
    }
}

/// One object of the domain: a full assignment of the signature.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Case {
    pub id: String,
    pub values: Vec<Value>,
}

impl Case {
    pub fn new(id: impl Into<String>, values: Vec<Value>) -> Self {
        Self {
            id: id.into(),
            values,
        }
    }

    pub fn value(&self, attribute: usize) -> Option<&Value> {
        self.values.get(attribute)
    }
}

/// A table of cases over a fixed signature. Source of the empirical measure.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Dataset {
    signature: AttributeSignature,
    cases: Vec<Case>,
}

impl Dataset {
    pub fn new(signature: AttributeSignature, cases: Vec<Case>) -> Result<Self, RuleError> {
        let mut ids = HashSet::new();
        for case in &cases {
            if !ids.insert(case.id.as_str()) {
                return Err(RuleError::DuplicateCaseId(case.id.clone()));
            }
            if case.values.len() != signature.len() {
                return Err(RuleError::CaseShape {
                    id: case.id.clone(),
                    expected: signature.len(),
                    found: case.values.len(),
                });
            }
            for (attr, value) in signature.attributes().iter().zip(&case.values) {
                if !value.conforms_to(&attr.kind) {
                    return Err(RuleError::TypeMismatch {
                        attribute: attr.name.clone(),
                        detail: format!("case `{}` holds value `{value}`", case.id),
                    });
                }
            }
        }
        Ok(Self { signature, cases })
    }

    /// Builds a dataset of binary attributes from rows of 0/1 flags; case ids
    /// are the row numbers.
    pub fn from_binary_rows<S: Into<String>>(
        names: impl IntoIterator<Item = S>,
        rows: &[Vec<bool>],
    ) -> Result<Self, RuleError> {
        let signature = AttributeSignature::binary(names)?;
        let cases = rows
            .iter()
            .enumerate()
            .map(|(i, row)| Case::new(i.to_string(), row.iter().map(|&b| Value::Binary(b)).collect()))
            .collect();
        Self::new(signature, cases)
    }

    pub fn signature(&self) -> &AttributeSignature {
        &self.signature
    }

    pub fn cases(&self) -> &[Case] {
        &self.cases
    }

    pub fn len(&self) -> usize {
        self.cases.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cases.is_empty()
    }

    /// The same dataset with one case removed.
    pub fn without_case(&self, index: usize) -> Dataset {
        let mut cases = self.cases.clone();
        cases.remove(index);
        Dataset {
            signature: self.signature.clone(),
            cases,
        }
    }
}

impl<'de> Deserialize<'de> for Dataset {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw {
            signature: AttributeSignature,
            cases: Vec<Case>,
        }
        let raw = Raw::deserialize(deserializer)?;
        Dataset::new(raw.signature, raw.cases).map_err(serde::de::Error::custom)
    }
}
