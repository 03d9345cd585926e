use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::fmt;
use std::hash::{Hash, Hasher};

use serde::{Deserialize, Serialize};

use super::data::{AttributeKind, AttributeSignature, Case, Value};
use super::RuleError;

/// The test a literal applies to one attribute value.
///
/// `Eq` is used for binary and categorical attributes; the threshold forms
/// are for numeric attributes only. All comparisons are strict.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Predicate {
    Eq(Value),
    Gt(f64),
    Lt(f64),
    InRange(f64, f64),
}

impl Predicate {
    fn rank(&self) -> u8 {
        match self {
            Predicate::Eq(_) => 0,
            Predicate::Gt(_) => 1,
            Predicate::Lt(_) => 2,
            Predicate::InRange(..) => 3,
        }
    }

    fn validate(&self) -> Result<(), RuleError> {
        match self {
            Predicate::Eq(Value::Numeric(_)) => Err(RuleError::InvalidLiteral(
                "equality on numeric values is not supported; use thresholds".into(),
            )),
            Predicate::Eq(_) => Ok(()),
            Predicate::Gt(t) | Predicate::Lt(t) if !t.is_finite() => {
                Err(RuleError::InvalidLiteral(format!("threshold {t} is not finite")))
            }
            Predicate::InRange(lo, hi) if !(lo.is_finite() && hi.is_finite() && lo < hi) => Err(
                RuleError::InvalidLiteral(format!("range ({lo}, {hi}) requires finite lo < hi")),
            ),
            _ => Ok(()),
        }
    }

    fn holds(&self, value: &Value) -> Option<bool> {
        match (self, value) {
            (Predicate::Eq(Value::Binary(a)), Value::Binary(b)) => Some(a == b),
            (Predicate::Eq(Value::Categorical(a)), Value::Categorical(b)) => Some(a == b),
            (Predicate::Gt(t), Value::Numeric(x)) => Some(x > t),
            (Predicate::Lt(t), Value::Numeric(x)) => Some(x < t),
            (Predicate::InRange(lo, hi), Value::Numeric(x)) => Some(lo < x && x < hi),
            _ => None,
        }
    }

    fn accepts(&self, kind: &AttributeKind) -> bool {
        match (self, kind) {
            (Predicate::Eq(Value::Binary(_)), AttributeKind::Binary) => true,
            (Predicate::Eq(Value::Categorical(v)), AttributeKind::Categorical(values)) => {
                values.contains(v)
            }
            (Predicate::Gt(_) | Predicate::Lt(_) | Predicate::InRange(..), AttributeKind::Numeric) => {
                true
            }
            _ => false,
        }
    }
}

fn cmp_value(a: &Value, b: &Value) -> Ordering {
    match (a, b) {
        (Value::Binary(x), Value::Binary(y)) => x.cmp(y),
        (Value::Numeric(x), Value::Numeric(y)) => x.total_cmp(y),
        (Value::Categorical(x), Value::Categorical(y)) => x.cmp(y),
        _ => value_rank(a).cmp(&value_rank(b)),
    }
}

fn value_rank(v: &Value) -> u8 {
    match v {
        Value::Binary(_) => 0,
        Value::Numeric(_) => 1,
        Value::Categorical(_) => 2,
    }
}

impl Ord for Predicate {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Predicate::Eq(a), Predicate::Eq(b)) => cmp_value(a, b),
            (Predicate::Gt(a), Predicate::Gt(b)) | (Predicate::Lt(a), Predicate::Lt(b)) => {
                a.total_cmp(b)
            }
            (Predicate::InRange(a, b), Predicate::InRange(c, d)) => {
                a.total_cmp(c).then(b.total_cmp(d))
            }
            _ => self.rank().cmp(&other.rank()),
        }
    }
}

impl PartialOrd for Predicate {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl PartialEq for Predicate {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Predicate {}

impl Hash for Predicate {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.rank().hash(state);
        match self {
            Predicate::Eq(Value::Binary(b)) => b.hash(state),
            Predicate::Eq(Value::Numeric(x)) => x.to_bits().hash(state),
            Predicate::Eq(Value::Categorical(s)) => s.hash(state),
            Predicate::Gt(t) | Predicate::Lt(t) => t.to_bits().hash(state),
            Predicate::InRange(lo, hi) => {
                lo.to_bits().hash(state);
                hi.to_bits().hash(state);
            }
        }
    }
}

/// A (possibly negated) test on one attribute.
///
/// Ordering is signature position, then predicate form and threshold, then
/// polarity (positive first); this is the deterministic tie-break order used
/// by the learner.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Literal {
    attribute: usize,
    predicate: Predicate,
    negated: bool,
}

impl Literal {
    pub fn new(attribute: usize, predicate: Predicate, negated: bool) -> Result<Self, RuleError> {
        predicate.validate()?;
        Ok(Self {
            attribute,
            predicate,
            negated,
        })
    }

    /// `attribute = 1` on a binary attribute.
    pub fn flag(attribute: usize) -> Self {
        Self {
            attribute,
            predicate: Predicate::Eq(Value::Binary(true)),
            negated: false,
        }
    }

    pub fn equals(attribute: usize, value: impl Into<String>) -> Self {
        Self {
            attribute,
            predicate: Predicate::Eq(Value::Categorical(value.into())),
            negated: false,
        }
    }

    pub fn gt(attribute: usize, threshold: f64) -> Result<Self, RuleError> {
        Self::new(attribute, Predicate::Gt(threshold), false)
    }

    pub fn lt(attribute: usize, threshold: f64) -> Result<Self, RuleError> {
        Self::new(attribute, Predicate::Lt(threshold), false)
    }

    pub fn in_range(attribute: usize, lo: f64, hi: f64) -> Result<Self, RuleError> {
        Self::new(attribute, Predicate::InRange(lo, hi), false)
    }

    pub fn attribute(&self) -> usize {
        self.attribute
    }

    pub fn predicate(&self) -> &Predicate {
        &self.predicate
    }

    pub fn is_negated(&self) -> bool {
        self.negated
    }

    /// Flips the polarity. An involution.
    pub fn negate(&self) -> Literal {
        Literal {
            negated: !self.negated,
            ..self.clone()
        }
    }

    pub fn is_complement_of(&self, other: &Literal) -> bool {
        self.attribute == other.attribute
            && self.predicate == other.predicate
            && self.negated != other.negated
    }

    /// Checks the literal against the signature it will be evaluated under.
    pub fn check(&self, signature: &AttributeSignature) -> Result<(), RuleError> {
        let attr = signature
            .get(self.attribute)
            .ok_or(RuleError::UnknownAttribute(self.attribute))?;
        if !self.predicate.accepts(&attr.kind) {
            return Err(RuleError::TypeMismatch {
                attribute: attr.name.clone(),
                detail: format!("predicate {:?} does not apply to {:?}", self.predicate, attr.kind),
            });
        }
        Ok(())
    }

    pub fn satisfied(&self, case: &Case, signature: &AttributeSignature) -> Result<bool, RuleError> {
        let value = case
            .value(self.attribute)
            .ok_or(RuleError::UnknownAttribute(self.attribute))?;
        match self.predicate.holds(value) {
            Some(b) => Ok(b != self.negated),
            None => Err(RuleError::TypeMismatch {
                attribute: signature.name(self.attribute).to_string(),
                detail: format!("predicate {:?} applied to value `{value}`", self.predicate),
            }),
        }
    }

    /// Human-readable form using attribute names, e.g. `VOL>5`, `10<NUM<20`,
    /// `¬(DEN=moderate)`.
    pub fn render(&self, signature: &AttributeSignature) -> String {
        let name = signature.name(self.attribute);
        let body = match &self.predicate {
            Predicate::Eq(Value::Binary(true)) => name.to_string(),
            Predicate::Eq(v) => format!("{name}={v}"),
            Predicate::Gt(t) => format!("{name}>{t}"),
            Predicate::Lt(t) => format!("{name}<{t}"),
            Predicate::InRange(lo, hi) => format!("{lo}<{name}<{hi}"),
        };
        if !self.negated {
            body
        } else if matches!(self.predicate, Predicate::Eq(Value::Binary(true))) {
            format!("¬{body}")
        } else {
            format!("¬({body})")
        }
    }

    /// Parses the forms produced by [`Literal::render`] (also accepting `!`
    /// for negation) against a signature.
    pub fn parse(text: &str, signature: &AttributeSignature) -> Result<Literal, RuleError> {
        let text = text.trim();
        let bad = || RuleError::InvalidLiteral(format!("cannot parse literal `{text}`"));
        let (negated, body) = if let Some(rest) = text.strip_prefix('¬').or(text.strip_prefix('!')) {
            let rest = rest.trim();
            let rest = rest
                .strip_prefix('(')
                .and_then(|r| r.strip_suffix(')'))
                .unwrap_or(rest);
            (true, rest.trim())
        } else {
            (false, text)
        };
        let lookup = |name: &str| {
            signature
                .index_of(name.trim())
                .ok_or_else(|| RuleError::InvalidLiteral(format!("unknown attribute `{}`", name.trim())))
        };
        let number = |s: &str| s.trim().parse::<f64>().map_err(|_| bad());

        let literal = if let Some((name, value)) = body.split_once('=') {
            let attribute = lookup(name)?;
            let predicate = match &signature.attributes()[attribute].kind {
                AttributeKind::Binary => match value.trim() {
                    "1" | "true" => Predicate::Eq(Value::Binary(true)),
                    "0" | "false" => Predicate::Eq(Value::Binary(false)),
                    _ => return Err(bad()),
                },
                AttributeKind::Categorical(_) => {
                    Predicate::Eq(Value::Categorical(value.trim().to_string()))
                }
                AttributeKind::Numeric => return Err(bad()),
            };
            Literal::new(attribute, predicate, negated)?
        } else if let Some((name, t)) = body.split_once('>') {
            Literal::new(lookup(name)?, Predicate::Gt(number(t)?), negated)?
        } else if body.matches('<').count() == 2 {
            let mut parts = body.split('<');
            let lo = number(parts.next().ok_or_else(bad)?)?;
            let attribute = lookup(parts.next().ok_or_else(bad)?)?;
            let hi = number(parts.next().ok_or_else(bad)?)?;
            Literal::new(attribute, Predicate::InRange(lo, hi), negated)?
        } else if let Some((name, t)) = body.split_once('<') {
            Literal::new(lookup(name)?, Predicate::Lt(number(t)?), negated)?
        } else {
            Literal::new(lookup(body)?, Predicate::Eq(Value::Binary(true)), negated)?
        };
        literal.check(signature)?;
        Ok(literal)
    }
}

impl<'de> Deserialize<'de> for Literal {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw {
            attribute: usize,
            predicate: Predicate,
            negated: bool,
        }
        let raw = Raw::deserialize(deserializer)?;
        Literal::new(raw.attribute, raw.predicate, raw.negated).map_err(serde::de::Error::custom)
    }
}

/// A consistent set of literals, read conjunctively. The empty conjunction
/// is `true`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(transparent)]
pub struct Conjunction {
    literals: BTreeSet<Literal>,
}

impl Conjunction {
    pub fn empty() -> Self {
        Self::default()
    }

    pub fn new(literals: impl IntoIterator<Item = Literal>) -> Result<Self, RuleError> {
        let mut conj = Self::empty();
        for l in literals {
            conj.insert(l)?;
        }
        Ok(conj)
    }

    pub fn single(literal: Literal) -> Self {
        Self {
            literals: BTreeSet::from([literal]),
        }
    }

    /// Adds a literal; rejects it when its complement is already present.
    pub fn insert(&mut self, literal: Literal) -> Result<(), RuleError> {
        if self.literals.contains(&literal.negate()) {
            return Err(RuleError::InconsistentConjunction(format!("{literal:?}")));
        }
        self.literals.insert(literal);
        Ok(())
    }

    /// A copy extended by one literal.
    pub fn with(&self, literal: Literal) -> Result<Self, RuleError> {
        let mut next = self.clone();
        next.insert(literal)?;
        Ok(next)
    }

    pub fn literals(&self) -> &BTreeSet<Literal> {
        &self.literals
    }

    pub fn iter(&self) -> impl Iterator<Item = &Literal> {
        self.literals.iter()
    }

    pub fn len(&self) -> usize {
        self.literals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.literals.is_empty()
    }

    pub fn contains(&self, literal: &Literal) -> bool {
        self.literals.contains(literal)
    }

    /// Whether adding `literal` would make the conjunction inconsistent.
    pub fn contradicts(&self, literal: &Literal) -> bool {
        self.literals.contains(&literal.negate())
    }

    pub fn is_subset(&self, other: &Conjunction) -> bool {
        self.literals.is_subset(&other.literals)
    }

    pub fn attributes(&self) -> BTreeSet<usize> {
        self.literals.iter().map(Literal::attribute).collect()
    }

    pub fn satisfied(&self, case: &Case, signature: &AttributeSignature) -> Result<bool, RuleError> {
        for l in &self.literals {
            if !l.satisfied(case, signature)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    pub fn render(&self, signature: &AttributeSignature) -> String {
        if self.literals.is_empty() {
            return "⊤".into();
        }
        self.literals
            .iter()
            .map(|l| l.render(signature))
            .collect::<Vec<_>>()
            .join(" ∧ ")
    }
}

impl<'de> Deserialize<'de> for Conjunction {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let literals = Vec::<Literal>::deserialize(deserializer)?;
        Conjunction::new(literals).map_err(serde::de::Error::custom)
    }
}

impl fmt::Display for Conjunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.literals)
    }
}

/// A propositional production `conclusion ⇐ premise`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Rule {
    premise: Conjunction,
    conclusion: Conjunction,
}

impl Rule {
    pub fn new(premise: Conjunction, conclusion: Conjunction) -> Result<Self, RuleError> {
        if conclusion.is_empty() {
            return Err(RuleError::EmptyConclusion);
        }
        let shared: Vec<_> = premise
            .attributes()
            .intersection(&conclusion.attributes())
            .copied()
            .collect();
        if let Some(&attribute) = shared.first() {
            return Err(RuleError::SharedAttribute(attribute));
        }
        Ok(Self {
            premise,
            conclusion,
        })
    }

    pub fn premise(&self) -> &Conjunction {
        &self.premise
    }

    pub fn conclusion(&self) -> &Conjunction {
        &self.conclusion
    }

    pub fn render(&self, signature: &AttributeSignature) -> String {
        format!(
            "{} ⇐ {}",
            self.conclusion.render(signature),
            self.premise.render(signature)
        )
    }
}

impl<'de> Deserialize<'de> for Rule {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw {
            premise: Conjunction,
            conclusion: Conjunction,
        }
        let raw = Raw::deserialize(deserializer)?;
        Rule::new(raw.premise, raw.conclusion).map_err(serde::de::Error::custom)
    }
}
