use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::bitvec::{check_width, BitVector};
use super::MonotoneError;

/// A disjunction of positive conjunctions over variables `1..=width`.
///
/// Terms are kept as variable masks (bit `i-1` for variable `i`); iteration
/// follows the numeric order of the masks.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Dnf {
    width: usize,
    terms: BTreeSet<u32>,
}

impl Dnf {
    /// The constant-false function.
    pub fn falsum(width: usize) -> Result<Self, MonotoneError> {
        check_width(width)?;
        Ok(Self {
            width,
            terms: BTreeSet::new(),
        })
    }

    /// Terms given as lists of 1-based variable indices.
    pub fn from_terms<T: AsRef<[usize]>>(
        width: usize,
        terms: impl IntoIterator<Item = T>,
    ) -> Result<Self, MonotoneError> {
        let mut dnf = Self::falsum(width)?;
        for term in terms {
            let mut mask = 0u32;
            for &var in term.as_ref() {
                if var == 0 || var > width {
                    return Err(MonotoneError::InvalidDnf(format!(
                        "variable {var} outside 1..={width}"
                    )));
                }
                mask |= 1 << (var - 1);
            }
            dnf.terms.insert(mask);
        }
        Ok(dnf)
    }

    pub(crate) fn from_masks(width: usize, terms: impl IntoIterator<Item = u32>) -> Self {
        Self {
            width,
            terms: terms.into_iter().collect(),
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn masks(&self) -> impl Iterator<Item = u32> + '_ {
        self.terms.iter().copied()
    }

    /// Each term as ascending 1-based variable indices.
    pub fn terms(&self) -> Vec<Vec<usize>> {
        self.terms.iter().map(|&m| vars_of(m)).collect()
    }

    pub fn eval(&self, v: &BitVector) -> Result<bool, MonotoneError> {
        if v.width() != self.width {
            return Err(MonotoneError::WidthMismatch {
                expected: self.width,
                found: v.width(),
            });
        }
        Ok(self.eval_bits(v.bits()))
    }

    /// Evaluates on a raw assignment: bit `i - 1` holds variable `i`.
    pub fn eval_bits(&self, bits: u32) -> bool {
        self.terms.iter().any(|&t| t & !bits == 0)
    }

    /// Drops every term that contains another term.
    pub fn minimize_absorption(&self) -> Dnf {
        let terms = self
            .terms
            .iter()
            .copied()
            .filter(|&t| !self.terms.iter().any(|&u| u != t && u & !t == 0))
            .collect();
        Dnf {
            width: self.width,
            terms,
        }
    }

    pub fn is_minimal(&self) -> bool {
        self.minimize_absorption() == *self
    }

    /// Renders terms with one name per variable, e.g. `x1x2 ∨ x3`. Names
    /// other than letters followed by digits are joined with `·`.
    pub fn render_with<S: AsRef<str>>(&self, names: &[S]) -> String {
        if self.terms.is_empty() {
            return "⊥".into();
        }
        let joiner = if names.iter().all(|n| is_indexed_name(n.as_ref())) { "" } else { "·" };
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|&t| {
                if t == 0 {
                    return "⊤".into();
                }
                vars_of(t)
                    .into_iter()
                    .map(|v| names.get(v - 1).map_or_else(|| format!("v{v}"), |n| n.as_ref().to_string()))
                    .collect::<Vec<_>>()
                    .join(joiner)
            })
            .collect();
        parts.join(" ∨ ")
    }

    /// Renders with variables named `{prefix}1 … {prefix}n`.
    pub fn render(&self, prefix: &str) -> String {
        self.render_with(&variable_names(prefix, self.width))
    }

    /// Parses the rendered form, e.g. `x1x2 ∨ x3 ∨ x4x5`. `|` and `+` also
    /// separate terms; any non-digit characters inside a term are ignored, so
    /// `w1·w3` and `w1*w3` work too. `⊥` (or an empty string) is false.
    pub fn parse(text: &str, width: usize) -> Result<Self, MonotoneError> {
        let text = text.trim();
        if text.is_empty() || text == "⊥" || text == "0" {
            return Self::falsum(width);
        }
        let mut terms = Vec::new();
        for raw in text.split(['∨', '|', '+']) {
            let raw = raw.trim();
            if raw == "⊤" || raw == "1" {
                terms.push(Vec::new());
                continue;
            }
            let mut vars = Vec::new();
            let mut digits = String::new();
            let mut saw_name = false;
            for c in raw.chars().chain(std::iter::once(' ')) {
                if c.is_ascii_digit() {
                    digits.push(c);
                } else {
                    if !digits.is_empty() {
                        vars.push(digits.parse::<usize>().expect("ascii digits"));
                        digits.clear();
                    }
                    saw_name |= c.is_alphabetic();
                }
            }
            if vars.is_empty() || !saw_name {
                return Err(MonotoneError::InvalidDnf(format!("cannot read term `{raw}`")));
            }
            terms.push(vars);
        }
        Self::from_terms(width, terms)
    }
}

fn is_indexed_name(name: &str) -> bool {
    let letters = name.trim_end_matches(|c: char| c.is_ascii_digit());
    letters.len() < name.len() && !letters.is_empty() && letters.chars().all(|c| c.is_alphabetic())
}

fn vars_of(mask: u32) -> Vec<usize> {
    (0..32).filter(|i| mask & (1 << i) != 0).map(|i| i + 1).collect()
}

pub fn variable_names(prefix: &str, width: usize) -> Vec<String> {
    (1..=width).map(|i| format!("{prefix}{i}")).collect()
}

impl fmt::Display for Dnf {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render("x"))
    }
}

/// One term per unit: the positions holding 1.
pub fn dnf_of_units(width: usize, units: &[BitVector]) -> Result<Dnf, MonotoneError> {
    check_width(width)?;
    for u in units {
        if u.width() != width {
            return Err(MonotoneError::WidthMismatch {
                expected: width,
                found: u.width(),
            });
        }
    }
    Ok(Dnf::from_masks(width, units.iter().map(BitVector::bits)))
}

#[derive(Serialize, Deserialize)]
struct DnfDoc {
    n: usize,
    terms: Vec<Vec<usize>>,
}

impl Serialize for Dnf {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        DnfDoc {
            n: self.width,
            terms: self.terms(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Dnf {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let doc = DnfDoc::deserialize(d)?;
        Dnf::from_terms(doc.n, doc.terms).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bv(s: &str) -> BitVector {
        s.parse().unwrap()
    }

    #[test]
    fn units_to_terms() {
        let d = dnf_of_units(5, &[bv("01100")]).unwrap();
        assert_eq!(d.render("x"), "x2x3");
        assert_eq!(dnf_of_units(5, &[]).unwrap().render("x"), "⊥");
        assert_eq!(dnf_of_units(5, &[bv("11111")]).unwrap().render("x"), "x1x2x3x4x5");
        assert!(dnf_of_units(4, &[bv("11111")]).is_err());
    }

    #[test]
    fn absorption() {
        let d = Dnf::parse("x1 ∨ x1x2 ∨ x2x3 ∨ x1x2x3", 3).unwrap();
        let m = d.minimize_absorption();
        assert_eq!(m.render("x"), "x1 ∨ x2x3");
        assert_eq!(m.render_with(&["TOT>30", "VOL>5", "DEN"]), "TOT>30 ∨ VOL>5·DEN");
        assert_eq!(m.minimize_absorption(), m);
        assert!(m.is_minimal());
        assert!(!d.is_minimal());
    }

    #[test]
    fn evaluation() {
        let g = Dnf::parse("w2 ∨ w1w3", 3).unwrap();
        assert!(g.eval(&bv("010")).unwrap());
        assert!(g.eval(&bv("101")).unwrap());
        assert!(!g.eval(&bv("100")).unwrap());
        assert!(!g.eval(&bv("000")).unwrap());
        assert!(g.eval(&bv("0101")).is_err());
    }

    #[test]
    fn parse_forms() {
        let a = Dnf::parse("x1·x2 | x3", 3).unwrap();
        let b = Dnf::parse("x1*x2 + x3", 3).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.terms(), vec![vec![1, 2], vec![3]]);
        assert!(Dnf::parse("x4", 3).is_err());
        assert!(Dnf::parse("x1 ∨ ", 3).is_err());
        assert_eq!(Dnf::parse("⊤", 2).unwrap().render("x"), "⊤");
    }

    #[test]
    fn json_round_trip() {
        let d = Dnf::parse("y1 ∨ y2 ∨ y3y4y5", 5).unwrap();
        let json = serde_json::to_string(&d).unwrap();
        assert_eq!(json, r#"{"n":5,"terms":[[1],[2],[3,4,5]]}"#);
        assert_eq!(serde_json::from_str::<Dnf>(&json).unwrap(), d);
    }
}
