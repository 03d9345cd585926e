use serde::{Deserialize, Deserializer, Serialize};

use super::bitvec::{check_width, BitVector};
use super::dnf::{variable_names, Dnf};
use super::MonotoneError;

/// A two-level model `f(g(w), h(y), x3, …, xn)`: the first two inputs of `f`
/// are the outputs of `g` and `h`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct HierarchySpec {
    pub f: Dnf,
    pub g: Dnf,
    pub h: Dnf,
}

#[derive(Deserialize)]
struct HierarchyDoc {
    f: Dnf,
    g: Dnf,
    h: Dnf,
}

impl<'de> Deserialize<'de> for HierarchySpec {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let doc = HierarchyDoc::deserialize(d)?;
        HierarchySpec::new(doc.f, doc.g, doc.h).map_err(serde::de::Error::custom)
    }
}

impl HierarchySpec {
    pub fn new(f: Dnf, g: Dnf, h: Dnf) -> Result<Self, MonotoneError> {
        if f.width() < 2 {
            return Err(MonotoneError::InvalidDnf(
                "f needs at least the two inputs fed by g and h".into(),
            ));
        }
        let spec = Self { f, g, h };
        check_width(spec.input_width())?;
        Ok(spec)
    }

    /// Inputs not fed by a sub-function: `x3 … xn`.
    pub fn direct_width(&self) -> usize {
        self.f.width() - 2
    }

    /// Total raw inputs: `w`, then `y`, then `x3 …`.
    pub fn input_width(&self) -> usize {
        self.g.width() + self.h.width() + self.direct_width()
    }

    pub fn input_names(&self) -> Vec<String> {
        let mut names = variable_names("w", self.g.width());
        names.extend(variable_names("y", self.h.width()));
        names.extend((3..=self.f.width()).map(|i| format!("x{i}")));
        names
    }

    /// Questions needed to tabulate the flattened function directly.
    pub fn unassisted_question_count(&self) -> u64 {
        1u64 << self.input_width()
    }

    /// `x1 := g(w)`, `x2 := h(y)`, then `f(x1, x2, x3, …)`.
    pub fn compose(&self, w: &BitVector, y: &BitVector, direct: &BitVector) -> Result<bool, MonotoneError> {
        let x1 = self.g.eval(w)?;
        let x2 = self.h.eval(y)?;
        if direct.width() != self.direct_width() {
            return Err(MonotoneError::WidthMismatch {
                expected: self.direct_width(),
                found: direct.width(),
            });
        }
        let x = u32::from(x1) | u32::from(x2) << 1 | direct.bits() << 2;
        Ok(self.f.eval_bits(x))
    }

    /// Evaluates on the concatenated inputs `w y x3…`.
    pub fn eval_flat(&self, inputs: &BitVector) -> Result<bool, MonotoneError> {
        if inputs.width() != self.input_width() {
            return Err(MonotoneError::WidthMismatch {
                expected: self.input_width(),
                found: inputs.width(),
            });
        }
        let (gw, hw) = (self.g.width(), self.h.width());
        let bits = inputs.bits();
        let w = BitVector::from_raw(gw, bits & mask(gw));
        let y = BitVector::from_raw(hw, bits >> gw & mask(hw));
        let x = BitVector::from_raw(self.direct_width(), bits >> (gw + hw));
        self.compose(&w, &y, &x)
    }

    /// The composed function as a minimal DNF over `w y x3…`, obtained by
    /// substituting the sub-function terms into `f`.
    pub fn flatten(&self) -> Dnf {
        let (gw, hw) = (self.g.width(), self.h.width());
        let mut terms = Vec::new();
        for t in self.f.masks() {
            let direct = (t >> 2) << (gw + hw);
            let g_choices: Vec<u32> = if t & 1 != 0 { self.g.masks().collect() } else { vec![0] };
            let h_choices: Vec<u32> = if t & 2 != 0 {
                self.h.masks().map(|m| m << gw).collect()
            } else {
                vec![0]
            };
            for &a in &g_choices {
                for &b in &h_choices {
                    terms.push(direct | a | b);
                }
            }
        }
        Dnf::from_masks(self.input_width(), terms).minimize_absorption()
    }
}

fn mask(width: usize) -> u32 {
    (1u32 << width) - 1
}
