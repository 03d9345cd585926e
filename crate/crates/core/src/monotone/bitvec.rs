use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::MonotoneError;

pub const MAX_WIDTH: usize = 24;

/// A point of the Boolean cube `{0,1}^n`.
///
/// Variable `i` (1-based) is stored at bit `i-1`; written as a bitstring the
/// leftmost character is variable 1.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BitVector {
    width: u8,
    bits: u32,
}

impl BitVector {
    pub fn new(width: usize, bits: u32) -> Result<Self, MonotoneError> {
        check_width(width)?;
        if width < 32 && bits >> width != 0 {
            return Err(MonotoneError::InvalidBitString(format!(
                "{bits:#b} does not fit in {width} bits"
            )));
        }
        Ok(Self {
            width: width as u8,
            bits,
        })
    }

    pub(crate) fn from_raw(width: usize, bits: u32) -> Self {
        Self {
            width: width as u8,
            bits,
        }
    }

    pub fn zero(width: usize) -> Result<Self, MonotoneError> {
        Self::new(width, 0)
    }

    pub fn ones(width: usize) -> Result<Self, MonotoneError> {
        check_width(width)?;
        Ok(Self::from_raw(width, full_mask(width)))
    }

    pub fn from_bools(values: &[bool]) -> Result<Self, MonotoneError> {
        check_width(values.len())?;
        let bits = values
            .iter()
            .enumerate()
            .filter(|(_, &b)| b)
            .fold(0u32, |acc, (i, _)| acc | 1 << i);
        Ok(Self::from_raw(values.len(), bits))
    }

    pub fn width(&self) -> usize {
        self.width as usize
    }

    /// Variables as a mask: bit `i-1` is variable `i`.
    pub fn bits(&self) -> u32 {
        self.bits
    }

    /// Value of variable `var` (1-based).
    pub fn get(&self, var: usize) -> bool {
        var >= 1 && var <= self.width() && self.bits & (1 << (var - 1)) != 0
    }

    pub fn count_ones(&self) -> u32 {
        self.bits.count_ones()
    }

    /// Componentwise order.
    pub fn le(&self, other: &BitVector) -> bool {
        self.width == other.width && self.bits & !other.bits == 0
    }

    /// Positions holding 1, 1-based and ascending.
    pub fn ones_positions(&self) -> Vec<usize> {
        (1..=self.width()).filter(|&v| self.get(v)).collect()
    }

    pub fn to_bools(&self) -> Vec<bool> {
        (1..=self.width()).map(|v| self.get(v)).collect()
    }
}

pub(crate) fn check_width(width: usize) -> Result<(), MonotoneError> {
    if (1..=MAX_WIDTH).contains(&width) {
        Ok(())
    } else {
        Err(MonotoneError::WidthOutOfRange(width))
    }
}

pub(crate) fn full_mask(width: usize) -> u32 {
    if width >= 32 {
        u32::MAX
    } else {
        (1u32 << width) - 1
    }
}

impl fmt::Display for BitVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for v in 1..=self.width() {
            f.write_str(if self.get(v) { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for BitVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitVector({self})")
    }
}

impl FromStr for BitVector {
    type Err = MonotoneError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let values = s
            .chars()
            .filter(|c| !c.is_whitespace())
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                _ => Err(MonotoneError::InvalidBitString(s.to_string())),
            })
            .collect::<Result<Vec<_>, _>>()?;
        if values.is_empty() {
            return Err(MonotoneError::InvalidBitString(s.to_string()));
        }
        Self::from_bools(&values)
    }
}

impl Serialize for BitVector {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for BitVector {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}
