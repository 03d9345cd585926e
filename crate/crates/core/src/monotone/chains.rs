use std::collections::HashSet;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::bitvec::{check_width, BitVector};
use super::{binomial, MonotoneError};

/// A saturated chain of the cube: each vector adds exactly one 1-bit to its
/// predecessor.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct HanselChain {
    vectors: Vec<BitVector>,
}

impl HanselChain {
    pub fn new(vectors: Vec<BitVector>) -> Result<Self, MonotoneError> {
        let Some(first) = vectors.first() else {
            return Err(MonotoneError::InvalidPlan("empty chain".into()));
        };
        let width = first.width();
        for pair in vectors.windows(2) {
            let (a, b) = (pair[0], pair[1]);
            if b.width() != width || !a.le(&b) || (b.bits() ^ a.bits()).count_ones() != 1 {
                return Err(MonotoneError::InvalidPlan(format!(
                    "{a} -> {b} is not a one-bit step"
                )));
            }
        }
        Ok(Self { vectors })
    }

    pub fn vectors(&self) -> &[BitVector] {
        &self.vectors
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn render(&self) -> String {
        let parts: Vec<String> = self.vectors.iter().map(|v| v.to_string()).collect();
        parts.join(" < ")
    }
}

/// An ordered partition of `{0,1}^n` into Hansel chains; the order is the
/// order questions are asked in.
#[derive(Clone, Debug)]
pub struct ChainPlan {
    width: usize,
    chains: Vec<HanselChain>,
    /// `chain << 5 | position` per vector, indexed by its bits. Sorting by
    /// this key is sorting by plan order.
    locate: Vec<u32>,
}

impl PartialEq for ChainPlan {
    fn eq(&self, other: &Self) -> bool {
        self.width == other.width && self.chains == other.chains
    }
}

impl Eq for ChainPlan {}

impl ChainPlan {
    /// Accepts chains that partition the cube, number `C(n, ⌊n/2⌋)` and come
    /// in non-decreasing length order.
    pub fn from_chains(width: usize, chains: Vec<HanselChain>) -> Result<Self, MonotoneError> {
        check_width(width)?;
        let expected = binomial(width as u64, width as u64 / 2);
        if chains.len() as u64 != expected {
            return Err(MonotoneError::InvalidPlan(format!(
                "{} chains, a symmetric decomposition of the {width}-cube has {expected}",
                chains.len()
            )));
        }
        if chains.windows(2).any(|w| w[0].len() > w[1].len()) {
            return Err(MonotoneError::InvalidPlan(
                "chains must be ordered by non-decreasing length".into(),
            ));
        }
        let mut locate = vec![u32::MAX; 1 << width];
        for (c, chain) in chains.iter().enumerate() {
            for (p, v) in chain.vectors().iter().enumerate() {
                if v.width() != width {
                    return Err(MonotoneError::WidthMismatch {
                        expected: width,
                        found: v.width(),
                    });
                }
                let slot = &mut locate[v.bits() as usize];
                if *slot != u32::MAX {
                    return Err(MonotoneError::InvalidPlan(format!("{v} appears twice")));
                }
                *slot = (c as u32) << 5 | p as u32;
            }
        }
        if let Some(missing) = locate.iter().position(|&s| s == u32::MAX) {
            return Err(MonotoneError::InvalidPlan(format!(
                "{} is not covered",
                BitVector::from_raw(width, missing as u32)
            )));
        }
        Ok(Self {
            width,
            chains,
            locate,
        })
    }

    /// Parses chains given as bitstrings.
    pub fn from_strings<S: AsRef<str>>(width: usize, chains: &[Vec<S>]) -> Result<Self, MonotoneError> {
        let chains = chains
            .iter()
            .map(|c| {
                let vectors = c
                    .iter()
                    .map(|s| s.as_ref().parse())
                    .collect::<Result<Vec<BitVector>, _>>()?;
                HanselChain::new(vectors)
            })
            .collect::<Result<Vec<_>, _>>()?;
        Self::from_chains(width, chains)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn chains(&self) -> &[HanselChain] {
        &self.chains
    }

    /// All vectors in plan order.
    pub fn iter(&self) -> impl Iterator<Item = BitVector> + '_ {
        self.chains.iter().flat_map(|c| c.vectors().iter().copied())
    }

    /// 1-based `(chain, position)` of a vector, as in labels like `6.3`.
    pub fn label(&self, v: &BitVector) -> Option<(usize, usize)> {
        if v.width() != self.width {
            return None;
        }
        let key = self.locate[v.bits() as usize];
        Some(((key >> 5) as usize + 1, (key & 31) as usize + 1))
    }

    pub(crate) fn order_key(&self, bits: u32) -> u32 {
        self.locate[bits as usize]
    }

    pub fn to_strings(&self) -> Vec<Vec<String>> {
        self.chains
            .iter()
            .map(|c| c.vectors().iter().map(|v| v.to_string()).collect())
            .collect()
    }
}

#[derive(Serialize, Deserialize)]
struct PlanDoc {
    n: usize,
    chain_order: Vec<Vec<String>>,
}

impl Serialize for ChainPlan {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        PlanDoc {
            n: self.width,
            chain_order: self.to_strings(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for ChainPlan {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let doc = PlanDoc::deserialize(d)?;
        ChainPlan::from_strings(doc.n, &doc.chain_order).map_err(serde::de::Error::custom)
    }
}

/// The symmetric chain decomposition of `{0,1}^n`, built recursively with the
/// new variable prepended on the left, then stably sorted by chain length.
pub fn hansel_chains(n: usize) -> Result<ChainPlan, MonotoneError> {
    check_width(n)?;
    let mut chains: Vec<Vec<u32>> = vec![vec![0, 1]];
    for _ in 2..=n {
        let mut next = Vec::with_capacity(chains.len() * 2);
        for chain in &chains {
            // shift old variables right, new variable 1 lands in bit 0
            let zero: Vec<u32> = chain.iter().map(|&b| b << 1).collect();
            let one: Vec<u32> = zero.iter().map(|&b| b | 1).collect();
            let mut a = zero;
            a.push(*one.last().expect("chains are non-empty"));
            next.push(a);
            if one.len() >= 2 {
                next.push(one[..one.len() - 1].to_vec());
            }
        }
        chains = next;
    }
    chains.sort_by_key(Vec::len);
    let chains = chains
        .into_iter()
        .map(|c| HanselChain {
            vectors: c.into_iter().map(|b| BitVector::from_raw(n, b)).collect(),
        })
        .collect();
    ChainPlan::from_chains(n, chains)
}

/// Checks a chain set against the cube, ignoring order.
pub fn same_chain_set(a: &ChainPlan, b: &ChainPlan) -> bool {
    let set = |p: &ChainPlan| p.chains().iter().cloned().collect::<HashSet<_>>();
    a.width() == b.width() && set(a) == set(b)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_cubes() {
        let one = hansel_chains(1).unwrap();
        assert_eq!(one.to_strings(), [["0", "1"]]);
        let three = hansel_chains(3).unwrap();
        assert_eq!(
            three.to_strings(),
            vec![vec!["100", "101"], vec!["010", "110"], vec!["000", "001", "011", "111"]]
        );
    }

    #[test]
    fn five_cube_longest_chain() {
        let plan = hansel_chains(5).unwrap();
        assert_eq!(plan.chains().len(), 10);
        assert_eq!(
            plan.chains().last().unwrap().render(),
            "00000 < 00001 < 00011 < 00111 < 01111 < 11111"
        );
    }

    #[test]
    fn rejects_bad_plans() {
        assert!(hansel_chains(0).is_err());
        assert!(hansel_chains(25).is_err());
        assert!(HanselChain::new(vec!["00".parse().unwrap(), "11".parse().unwrap()]).is_err());
        // a partition of the 2-cube into one chain too many
        let r = ChainPlan::from_strings(2, &[vec!["00"], vec!["01"], vec!["10", "11"]]);
        assert!(r.is_err());
        let unsorted = ChainPlan::from_strings(2, &[vec!["00", "01", "11"], vec!["10"]]);
        assert!(unsorted.is_err());
        let dup = ChainPlan::from_strings(2, &[vec!["10"], vec!["00", "10", "11"]]);
        assert!(dup.is_err());
    }

    #[test]
    fn labels_and_json() {
        let plan = hansel_chains(3).unwrap();
        assert_eq!(plan.label(&"110".parse().unwrap()), Some((2, 2)));
        assert_eq!(plan.label(&"111".parse().unwrap()), Some((3, 4)));
        let json = serde_json::to_string(&plan).unwrap();
        assert_eq!(serde_json::from_str::<ChainPlan>(&json).unwrap(), plan);
    }
}
