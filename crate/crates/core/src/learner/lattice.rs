use std::collections::BTreeSet;

use fixedbitset::FixedBitSet;
use rustc_hash::FxHashMap;

use super::{LearnError, TargetSpec};
use crate::rule_core::{Conjunction, Dataset, Probability, Rule, RuleError};

/// Which cases satisfy each pool literal and the goal, as bitsets over the
/// dataset rows. Leaving a case out only clears one bit everywhere.
#[derive(Clone, Debug)]
pub struct Coverage {
    universe: FixedBitSet,
    literals: Vec<FixedBitSet>,
    goal: FixedBitSet,
    goal_literals: Vec<FixedBitSet>,
}

impl Coverage {
    pub fn new(d: &Dataset, target: &TargetSpec) -> Result<Self, LearnError> {
        let n = d.len();
        let sig = d.signature();
        for l in target.pool().iter().chain(target.goal().iter()) {
            l.check(sig)?;
        }
        let cover_of = |pred: &dyn Fn(&crate::rule_core::Case) -> Result<bool, RuleError>| {
            let mut bits = FixedBitSet::with_capacity(n);
            for (i, case) in d.cases().iter().enumerate() {
                if pred(case)? {
                    bits.insert(i);
                }
            }
            Ok::<_, RuleError>(bits)
        };
        let literals = target
            .pool()
            .iter()
            .map(|l| cover_of(&|c| l.satisfied(c, sig)))
            .collect::<Result<Vec<_>, _>>()?;
        let goal_literals = target
            .goal()
            .iter()
            .map(|l| cover_of(&|c| l.satisfied(c, sig)))
            .collect::<Result<Vec<_>, _>>()?;
        let goal = cover_of(&|c| target.goal().satisfied(c, sig))?;
        let mut universe = FixedBitSet::with_capacity(n);
        universe.insert_range(..);
        Ok(Self {
            universe,
            literals,
            goal,
            goal_literals,
        })
    }

    /// The coverage with one case removed from the sample.
    pub fn without_case(&self, index: usize) -> Coverage {
        let mut next = self.clone();
        next.universe.set(index, false);
        for bits in next
            .literals
            .iter_mut()
            .chain(next.goal_literals.iter_mut())
            .chain(std::iter::once(&mut next.goal))
        {
            bits.set(index, false);
        }
        next
    }

    pub fn cases(&self) -> usize {
        self.universe.count_ones(..)
    }

    pub fn goal_count(&self) -> usize {
        self.goal.count_ones(..)
    }
}

/// Longest premise the lattice can hold.
pub const MAX_PREMISE_LEN: usize = 8;

/// A premise as ascending pool indices, stored inline. Ordered by length,
/// then lexicographically.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PremiseKey {
    len: u8,
    items: [u16; MAX_PREMISE_LEN],
}

impl PremiseKey {
    pub fn as_slice(&self) -> &[u16] {
        &self.items[..self.len as usize]
    }

    pub fn len(&self) -> usize {
        self.len as usize
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    fn contains(&self, i: u16) -> bool {
        self.as_slice().contains(&i)
    }

    fn push(&mut self, i: u16) {
        self.items[self.len as usize] = i;
        self.len += 1;
    }

    fn pop(&mut self) {
        self.len -= 1;
        self.items[self.len as usize] = 0;
    }

    fn from_sorted(items: &[u16]) -> Self {
        let mut k = Self::default();
        for &i in items {
            k.push(i);
        }
        k
    }
}

type Key = PremiseKey;

#[derive(Clone, Copy, Debug)]
struct Node {
    support: u64,
    hits: u64,
    in_pi: bool,
}

impl Node {
    fn probability(&self) -> Probability {
        Probability {
            num: self.hits,
            den: self.support,
        }
    }
}

/// The bounded refinement lattice for one target and sample.
///
/// Nodes are premises (sorted pool indices) of length at most the bound
/// with non-zero support. Minimal followers are memoized per premise.
pub struct FixpointEngine<'t> {
    target: &'t TargetSpec,
    max_len: usize,
    total: u64,
    goal_count: u64,
    complement: Vec<u16>,
    nodes: FxHashMap<Key, Node>,
    followers: FxHashMap<Key, Vec<Key>>,
}

impl<'t> FixpointEngine<'t> {
    pub fn new(coverage: &Coverage, target: &'t TargetSpec, max_len: usize) -> Self {
        let pool = target.pool();
        let complement = pool
            .iter()
            .map(|l| {
                pool.binary_search(&l.negate())
                    .expect("pool closed under negation") as u16
            })
            .collect();
        let total = coverage.cases() as u64;
        let goal_count = coverage.goal_count() as u64;
        let mut engine = Self {
            target,
            max_len,
            total,
            goal_count,
            complement,
            nodes: FxHashMap::default(),
            followers: FxHashMap::default(),
        };
        if total > 0 {
            let priors: Vec<u64> = coverage
                .goal_literals
                .iter()
                .map(|b| b.count_ones(..) as u64)
                .collect();
            engine.insert_node(coverage, Key::default(), &coverage.universe, &priors);
            let mut premise = Key::default();
            engine.grow(coverage, &mut premise, &coverage.universe, 0, &priors);
        }
        engine
    }

    fn insert_node(&mut self, cov: &Coverage, key: Key, cover: &FixedBitSet, priors: &[u64]) {
        let support = cover.count_ones(..) as u64;
        let hits = cover.intersection_count(&cov.goal) as u64;
        // the goal, and every goal literal, is strictly more frequent
        // under the premise than in the whole sample
        let raises = |hits: u64, prior: u64| hits as u128 * self.total as u128 > prior as u128 * support as u128;
        let in_pi = raises(hits, self.goal_count)
            && cov
                .goal_literals
                .iter()
                .zip(priors)
                .all(|(bits, &prior)| raises(cover.intersection_count(bits) as u64, prior));
        self.nodes.insert(key, Node { support, hits, in_pi });
    }

    fn grow(&mut self, cov: &Coverage, premise: &mut Key, cover: &FixedBitSet, start: usize, priors: &[u64]) {
        for j in start..self.target.pool().len() {
            if premise.contains(self.complement[j]) {
                continue;
            }
            let mut next = cover.clone();
            next.intersect_with(&cov.literals[j]);
            if next.is_clear() {
                continue;
            }
            premise.push(j as u16);
            self.insert_node(cov, *premise, &next, priors);
            if premise.len() < self.max_len {
                self.grow(cov, premise, &next, j + 1, priors);
            }
            premise.pop();
        }
    }

    pub fn target(&self) -> &TargetSpec {
        self.target
    }

    pub fn sample_size(&self) -> u64 {
        self.total
    }

    /// Number of premises in the lattice (including the empty premise).
    pub fn lattice_size(&self) -> usize {
        self.nodes.len()
    }

    fn node(&self, key: &Key) -> Option<&Node> {
        self.nodes.get(key)
    }

    /// Maps a rule onto the lattice. The rule must conclude exactly the goal,
    /// draw its premise from the pool within the bound, and have support.
    pub fn key_of(&self, rule: &Rule) -> Result<Key, LearnError> {
        if rule.conclusion() != self.target.goal() {
            return Err(LearnError::OutsideLattice(
                "conclusion differs from the goal".into(),
            ));
        }
        if rule.premise().len() > self.max_len {
            return Err(LearnError::OutsideLattice(format!(
                "premise longer than {}",
                self.max_len
            )));
        }
        let mut indices = rule
            .premise()
            .iter()
            .map(|l| {
                self.target
                    .pool()
                    .binary_search(l)
                    .map(|i| i as u16)
                    .map_err(|_| LearnError::OutsideLattice(format!("{l:?} not in the pool")))
            })
            .collect::<Result<Vec<u16>, _>>()?;
        indices.sort_unstable();
        let key = Key::from_sorted(&indices);
        if self.node(&key).is_none() {
            return Err(RuleError::UndefinedMeasure.into());
        }
        Ok(key)
    }

    pub fn rule_of(&self, key: &Key) -> Rule {
        let pool = self.target.pool();
        let premise = Conjunction::new(key.as_slice().iter().map(|&i| pool[i as usize].clone()))
            .expect("lattice premises are consistent");
        Rule::new(premise, self.target.goal().clone()).expect("pool is disjoint from the goal")
    }

    pub fn probability(&self, key: &Key) -> Option<Probability> {
        self.node(key).map(Node::probability)
    }

    pub fn support(&self, key: &Key) -> Option<u64> {
        self.node(key).map(|n| n.support)
    }

    pub fn in_pi(&self, key: &Key) -> bool {
        self.node(key).is_some_and(|n| n.in_pi)
    }

    /// The 2×2 table `[[premise∧goal, premise∧¬goal], [¬premise∧goal, ¬premise∧¬goal]]`.
    pub fn contingency(&self, key: &Key) -> Option<[[u64; 2]; 2]> {
        self.node(key).map(|n| {
            let c = self.goal_count - n.hits;
            [[n.hits, n.support - n.hits], [c, self.total - n.support - c]]
        })
    }

    /// Visits every strict superset of `key` in the lattice as
    /// `(added indices, merged key, node)`.
    fn for_each_superset(&self, key: &Key, mut visit: impl FnMut(&Key, &Key, &Node)) {
        let mut added = Key::default();
        self.superset_rec(key, &mut added, 0, &mut visit);
    }

    fn superset_rec(&self, key: &Key, added: &mut Key, start: usize, visit: &mut impl FnMut(&Key, &Key, &Node)) {
        for j in start..self.target.pool().len() {
            let j16 = j as u16;
            let c = self.complement[j];
            if key.contains(j16) || key.contains(c) || added.contains(c) {
                continue;
            }
            if key.len() + added.len() >= self.max_len {
                return;
            }
            added.push(j16);
            let merged = merge(key, added);
            if let Some(node) = self.node(&merged) {
                visit(added, &merged, node);
                if merged.len() < self.max_len {
                    self.superset_rec(key, added, j + 1, visit);
                }
            }
            added.pop();
        }
    }

    /// Premises `r'` in Π with `r ⊏ r'` and no Π-premise strictly between.
    pub fn minimal_followers_of(&mut self, key: &Key) -> Vec<Key> {
        if let Some(cached) = self.followers.get(key) {
            return cached.clone();
        }
        let result = self.compute_followers(key);
        self.followers.insert(*key, result.clone());
        result
    }

    fn compute_followers(&self, key: &Key) -> Vec<Key> {
        let Some(base) = self.probability(key) else {
            return Vec::new();
        };
        let mut out = Vec::new();
        self.for_each_superset(key, |added, merged, node| {
            if !node.in_pi || node.probability() <= base {
                return;
            }
            let top = node.probability();
            let added = added.as_slice();
            let k = added.len();
            let intermediate = (1u32..(1 << k) - 1).any(|mask| {
                let mut subset = Key::default();
                for (b, &i) in added.iter().enumerate() {
                    if mask & (1 << b) != 0 {
                        subset.push(i);
                    }
                }
                let mid = merge(key, &subset);
                let n = self.node(&mid).expect("subsets of a supported premise are supported");
                n.in_pi && n.probability() > base && n.probability() < top
            });
            if !intermediate {
                out.push(*merged);
            }
        });
        out.sort();
        out
    }

    /// One application of the operator to a set of premises.
    pub fn apply(&mut self, s: &BTreeSet<Key>) -> BTreeSet<Key> {
        let mut out = BTreeSet::new();
        for key in s {
            let followers = self.minimal_followers_of(key);
            if followers.is_empty() {
                if self.in_pi(key) {
                    out.insert(*key);
                }
            } else {
                out.extend(followers);
            }
        }
        out
    }

    /// Iterates the operator from the empty premise until it stops changing.
    pub fn fixpoint(&mut self) -> BTreeSet<Key> {
        let mut s: BTreeSet<Key> = BTreeSet::new();
        if self.total == 0 {
            return s;
        }
        s.insert(Key::default());
        loop {
            let next = self.apply(&s);
            if next == s {
                return s;
            }
            s = next;
        }
    }

    /// Points 1–3: in Π and no refinement within the bound is in Π with a
    /// strictly higher conditional probability.
    pub fn is_ums_key(&self, key: &Key) -> bool {
        let Some(node) = self.node(key) else {
            return false;
        };
        if !node.in_pi {
            return false;
        }
        let base = node.probability();
        let mut improvable = false;
        self.for_each_superset(key, |_, _, n| {
            if n.in_pi && n.probability() > base {
                improvable = true;
            }
        });
        !improvable
    }
}

fn merge(a: &Key, b: &Key) -> Key {
    let (a, b) = (a.as_slice(), b.as_slice());
    let mut out = Key::default();
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        if j == b.len() || (i < a.len() && a[i] < b[j]) {
            out.push(a[i]);
            i += 1;
        } else {
            out.push(b[j]);
            j += 1;
        }
    }
    out
}
