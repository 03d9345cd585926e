use std::collections::BTreeMap;
use std::sync::Arc;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::bitvec::{check_width, full_mask, BitVector};
use super::chains::ChainPlan;
use super::MonotoneError;

/// A total Boolean function on `{0,1}^n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TruthTable {
    width: usize,
    values: Vec<bool>,
}

impl TruthTable {
    pub fn from_fn(width: usize, mut f: impl FnMut(BitVector) -> bool) -> Result<Self, MonotoneError> {
        check_width(width)?;
        let values = (0..1u32 << width)
            .map(|b| f(BitVector::from_raw(width, b)))
            .collect();
        Ok(Self { width, values })
    }

    pub fn constant(width: usize, value: bool) -> Result<Self, MonotoneError> {
        Self::from_fn(width, |_| value)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn get(&self, v: &BitVector) -> Result<bool, MonotoneError> {
        if v.width() != self.width {
            return Err(MonotoneError::WidthMismatch {
                expected: self.width,
                found: v.width(),
            });
        }
        Ok(self.values[v.bits() as usize])
    }

    pub(crate) fn at(&self, bits: u32) -> bool {
        self.values[bits as usize]
    }

    pub fn iter(&self) -> impl Iterator<Item = (BitVector, bool)> + '_ {
        self.values
            .iter()
            .enumerate()
            .map(|(b, &v)| (BitVector::from_raw(self.width, b as u32), v))
    }

    /// The first cover pair `v < w` (one bit apart) with `f(v)=1, f(w)=0`.
    pub fn monotonicity_violation(&self) -> Option<(BitVector, BitVector)> {
        for b in 0..1u32 << self.width {
            if !self.values[b as usize] {
                continue;
            }
            for i in 0..self.width {
                let up = b | 1 << i;
                if up != b && !self.values[up as usize] {
                    return Some((
                        BitVector::from_raw(self.width, b),
                        BitVector::from_raw(self.width, up),
                    ));
                }
            }
        }
        None
    }
}

/// No pair `v ≤ w` with `f(v)=1` and `f(w)=0`; checking one-bit covers is
/// enough since the order is their transitive closure.
pub fn is_monotone(table: &TruthTable) -> bool {
    table.monotonicity_violation().is_none()
}

#[derive(Serialize, Deserialize)]
struct TableDoc {
    n: usize,
    values: BTreeMap<String, u8>,
}

impl Serialize for TruthTable {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        TableDoc {
            n: self.width,
            values: self.iter().map(|(v, x)| (v.to_string(), u8::from(x))).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for TruthTable {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        use serde::de::Error;
        let doc = TableDoc::deserialize(d)?;
        check_width(doc.n).map_err(D::Error::custom)?;
        let mut values: Vec<Option<bool>> = vec![None; 1 << doc.n];
        for (key, value) in &doc.values {
            let v: BitVector = key.parse().map_err(D::Error::custom)?;
            if v.width() != doc.n {
                return Err(D::Error::custom(format!("{key} is not {} bits wide", doc.n)));
            }
            let value = match value {
                0 => false,
                1 => true,
                other => return Err(D::Error::custom(format!("{key}: value {other} is not 0 or 1"))),
            };
            values[v.bits() as usize] = Some(value);
        }
        let values = values
            .iter()
            .enumerate()
            .map(|(b, v)| {
                v.ok_or_else(|| {
                    D::Error::custom(format!(
                        "missing value for {}",
                        BitVector::from_raw(doc.n, b as u32)
                    ))
                })
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(TruthTable {
            width: doc.n,
            values,
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    Asked,
    Propagated,
}

/// How unanswered vectors are filled in.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    /// Every answer is extended to all comparable vectors by monotonicity.
    #[default]
    Hansel,
    /// Every vector is asked; answers are still checked for monotonicity.
    Exhaustive,
}

type Cell = Option<(bool, Provenance)>;

/// What is known about the function being elicited.
#[derive(Clone, Debug)]
pub struct ElicitationState {
    plan: Arc<ChainPlan>,
    mode: Mode,
    cells: Vec<Cell>,
    asked: Vec<(BitVector, bool)>,
    known: usize,
    // (chain, position) of the first vector that may still be unknown
    cursor: (usize, usize),
}

impl PartialEq for ElicitationState {
    fn eq(&self, other: &Self) -> bool {
        self.plan == other.plan && self.mode == other.mode && self.cells == other.cells && self.asked == other.asked
    }
}

impl ElicitationState {
    pub fn new(plan: impl Into<Arc<ChainPlan>>) -> Self {
        Self::with_mode(plan, Mode::Hansel)
    }

    pub fn with_mode(plan: impl Into<Arc<ChainPlan>>, mode: Mode) -> Self {
        let plan = plan.into();
        let cells = vec![None; 1 << plan.width()];
        Self {
            plan,
            mode,
            cells,
            asked: Vec::new(),
            known: 0,
            cursor: (0, 0),
        }
    }

    /// Rebuilds a state by applying recorded answers in order.
    pub fn replay(
        plan: impl Into<Arc<ChainPlan>>,
        mode: Mode,
        answers: &[(BitVector, bool)],
    ) -> Result<Self, MonotoneError> {
        let mut state = Self::with_mode(plan, mode);
        for &(v, value) in answers {
            state.submit_answer(v, value)?;
        }
        Ok(state)
    }

    pub fn plan(&self) -> &ChainPlan {
        &self.plan
    }

    pub fn shared_plan(&self) -> Arc<ChainPlan> {
        Arc::clone(&self.plan)
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn width(&self) -> usize {
        self.plan.width()
    }

    pub fn asked(&self) -> &[(BitVector, bool)] {
        &self.asked
    }

    pub fn question_count(&self) -> usize {
        self.asked.len()
    }

    pub fn known_count(&self) -> usize {
        self.known
    }

    pub fn is_complete(&self) -> bool {
        self.known == self.cells.len()
    }

    pub fn value(&self, v: &BitVector) -> Option<bool> {
        self.cell(v).map(|(x, _)| x)
    }

    pub fn provenance(&self, v: &BitVector) -> Option<Provenance> {
        self.cell(v).map(|(_, p)| p)
    }

    fn cell(&self, v: &BitVector) -> Cell {
        if v.width() != self.width() {
            return None;
        }
        self.cells[v.bits() as usize]
    }

    /// Known vectors in plan order.
    pub fn known(&self) -> impl Iterator<Item = (BitVector, bool, Provenance)> + '_ {
        self.plan.iter().filter_map(|v| self.cells[v.bits() as usize].map(|(x, p)| (v, x, p)))
    }

    /// Vectors currently known to be 1, in plan order.
    pub fn ones(&self) -> Vec<BitVector> {
        self.known().filter(|&(_, x, _)| x).map(|(v, _, _)| v).collect()
    }

    /// The first unknown vector scanning chains in plan order, each chain
    /// bottom-up; `None` once everything is known.
    pub fn next_question(&self) -> Option<BitVector> {
        let (c, p) = self.cursor;
        self.plan.chains().get(c).map(|chain| chain.vectors()[p])
    }

    fn advance_cursor(&mut self) {
        let chains = self.plan.chains();
        let (mut c, mut p) = self.cursor;
        while c < chains.len() {
            let v = chains[c].vectors()[p];
            if self.cells[v.bits() as usize].is_none() {
                break;
            }
            p += 1;
            if p == chains[c].len() {
                c += 1;
                p = 0;
            }
        }
        self.cursor = (c, p);
    }

    fn check_width(&self, v: &BitVector) -> Result<(), MonotoneError> {
        if v.width() != self.width() {
            return Err(MonotoneError::WidthMismatch {
                expected: self.width(),
                found: v.width(),
            });
        }
        Ok(())
    }

    /// The earliest asked answer that forces `v` to `value`.
    fn implied_by(&self, v: &BitVector, value: bool) -> Option<(BitVector, bool)> {
        self.asked.iter().copied().find(|(a, x)| {
            *x == value && if value { a.le(v) } else { v.le(a) }
        })
    }

    fn inconsistency(&self, v: BitVector, value: bool, known: BitVector, known_value: bool) -> MonotoneError {
        let (source, source_value) = self.implied_by(&known, known_value).unwrap_or((known, known_value));
        MonotoneError::Inconsistent {
            vector: v,
            value,
            conflicting: source,
            conflicting_value: source_value,
        }
    }

    /// Records `v = value`, logs it as asked and, in Hansel mode, extends it
    /// to every comparable vector. Returns the vectors that became known
    /// besides `v`, in plan order.
    pub fn propagate(&mut self, v: BitVector, value: bool) -> Result<Vec<BitVector>, MonotoneError> {
        self.check_width(&v)?;
        let width = self.width();
        if let Some((known, _)) = self.cells[v.bits() as usize] {
            if known == value {
                return Ok(Vec::new());
            }
            return Err(self.inconsistency(v, value, v, known));
        }
        // 1 spreads to supersets, 0 to subsets
        let free = if value { full_mask(width) & !v.bits() } else { v.bits() };
        let region = |sub: u32| if value { v.bits() | sub } else { sub };
        for sub in submasks(free) {
            let w = region(sub);
            if let Some((x, _)) = self.cells[w as usize] {
                if x != value {
                    return Err(self.inconsistency(v, value, BitVector::from_raw(width, w), x));
                }
            }
        }
        self.cells[v.bits() as usize] = Some((value, Provenance::Asked));
        self.known += 1;
        self.asked.push((v, value));
        let mut spread = Vec::new();
        if self.mode == Mode::Hansel {
            for sub in submasks(free) {
                let w = region(sub);
                if self.cells[w as usize].is_none() {
                    self.cells[w as usize] = Some((value, Provenance::Propagated));
                    self.known += 1;
                    spread.push(w);
                }
            }
        }
        spread.sort_by_key(|&w| self.plan.order_key(w));
        self.advance_cursor();
        Ok(spread.into_iter().map(|w| BitVector::from_raw(width, w)).collect())
    }

    /// Answers the pending question.
    ///
    /// A value contradicting what is already known is an inconsistency
    /// naming the earlier answer responsible; any other vector than the
    /// pending one is out of order.
    pub fn submit_answer(&mut self, v: BitVector, value: bool) -> Result<Vec<BitVector>, MonotoneError> {
        self.check_width(&v)?;
        if let Some((known, _)) = self.cells[v.bits() as usize] {
            if known != value {
                return Err(self.inconsistency(v, value, v, known));
            }
        }
        let pending = self.next_question();
        if pending != Some(v) {
            return Err(MonotoneError::OutOfOrder {
                expected: pending,
                found: v,
            });
        }
        self.propagate(v, value)
    }

    /// Withdraws the last answer together with everything it implied.
    /// Returns the vectors that became unknown, in plan order.
    pub fn undo(&mut self) -> Result<Vec<BitVector>, MonotoneError> {
        let Some((last, _)) = self.asked.last().copied() else {
            return Err(MonotoneError::NothingToUndo);
        };
        let before = self.cells.clone();
        let answers = self.asked[..self.asked.len() - 1].to_vec();
        let mut fresh = Self::with_mode(Arc::clone(&self.plan), self.mode);
        for (v, value) in answers {
            fresh.propagate(v, value)?;
        }
        *self = fresh;
        let mut reverted: Vec<u32> = (0..before.len() as u32)
            .filter(|&b| before[b as usize].is_some() && self.cells[b as usize].is_none())
            .collect();
        reverted.sort_by_key(|&w| self.plan.order_key(w));
        debug_assert!(reverted.contains(&last.bits()));
        Ok(reverted
            .into_iter()
            .map(|b| BitVector::from_raw(self.width(), b))
            .collect())
    }

    /// The elicited function, once every vector is known.
    pub fn table(&self) -> Option<TruthTable> {
        if !self.is_complete() {
            return None;
        }
        Some(TruthTable {
            width: self.width(),
            values: self.cells.iter().map(|c| c.expect("complete").0).collect(),
        })
    }

    /// The known 1-region closed upward: a monotone under-approximation of
    /// the function while the interview is running.
    pub fn lower_approximation(&self) -> TruthTable {
        let width = self.width();
        let ones: Vec<u32> = self
            .cells
            .iter()
            .enumerate()
            .filter(|(_, c)| matches!(c, Some((true, _))))
            .map(|(b, _)| b as u32)
            .collect();
        TruthTable::from_fn(width, |v| ones.iter().any(|&o| o & !v.bits() == 0))
            .expect("width already checked")
    }
}

fn submasks(mask: u32) -> impl Iterator<Item = u32> {
    let mut next = Some(mask);
    std::iter::from_fn(move || {
        let cur = next?;
        next = if cur == 0 { None } else { Some((cur - 1) & mask) };
        Some(cur)
    })
}

/// The expert-facing form of a question, one clause per feature, e.g.
/// `If x1 = 0, x2 = 1 and x3 = 1, is the case suspicious of cancer or not?`.
pub fn phrase_question<S: AsRef<str>>(v: &BitVector, names: &[S]) -> String {
    let clauses: Vec<String> = (1..=v.width())
        .map(|i| {
            let name = names.get(i - 1).map_or_else(|| format!("feature {i}"), |n| n.as_ref().to_string());
            format!("{name} = {}", u8::from(v.get(i)))
        })
        .collect();
    let listed = match clauses.split_last() {
        Some((last, rest)) if !rest.is_empty() => format!("{} and {last}", rest.join(", ")),
        Some((last, _)) => last.clone(),
        None => String::new(),
    };
    format!("If {listed}, is the case suspicious of cancer or not?")
}

/// A finished interview.
#[derive(Clone, Debug, PartialEq)]
pub struct InterviewOutcome {
    pub table: TruthTable,
    pub asked: Vec<(BitVector, bool)>,
    pub state: ElicitationState,
}

/// Drives an interview against a scripted oracle. Every inferred value is
/// checked against the oracle as soon as it is inferred, so a non-monotone
/// oracle fails at its first contradiction.
pub fn run_interview(
    plan: impl Into<Arc<ChainPlan>>,
    mode: Mode,
    mut oracle: impl FnMut(BitVector) -> bool,
) -> Result<InterviewOutcome, MonotoneError> {
    let mut state = ElicitationState::with_mode(plan, mode);
    while let Some(q) = state.next_question() {
        let answer = oracle(q);
        let spread = state.submit_answer(q, answer)?;
        for w in spread {
            let expected = oracle(w);
            if expected != answer {
                return Err(MonotoneError::Inconsistent {
                    vector: w,
                    value: expected,
                    conflicting: q,
                    conflicting_value: answer,
                });
            }
        }
    }
    Ok(InterviewOutcome {
        table: state.table().expect("interview ran to completion"),
        asked: state.asked().to_vec(),
        state,
    })
}

/// The least vector of each chain where the function is 1, in plan order.
pub fn lower_units(table: &TruthTable, plan: &ChainPlan) -> Result<Vec<BitVector>, MonotoneError> {
    if table.width() != plan.width() {
        return Err(MonotoneError::WidthMismatch {
            expected: plan.width(),
            found: table.width(),
        });
    }
    if let Some((lower, upper)) = table.monotonicity_violation() {
        return Err(MonotoneError::NotMonotone { lower, upper });
    }
    Ok(plan
        .chains()
        .iter()
        .filter_map(|c| c.vectors().iter().copied().find(|v| table.at(v.bits())))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::monotone::hansel_chains;

    #[test]
    fn question_phrasing() {
        let v: BitVector = "011".parse().unwrap();
        assert_eq!(
            phrase_question(&v, &["w1", "w2", "w3"]),
            "If w1 = 0, w2 = 1 and w3 = 1, is the case suspicious of cancer or not?"
        );
        let one: BitVector = "1".parse().unwrap();
        assert_eq!(
            phrase_question::<&str>(&one, &[]),
            "If feature 1 = 1, is the case suspicious of cancer or not?"
        );
    }

    fn bv(s: &str) -> BitVector {
        s.parse().unwrap()
    }

    #[test]
    fn propagation_up_and_down() {
        let mut s = ElicitationState::new(hansel_chains(5).unwrap());
        let spread = s.propagate(bv("10100"), true).unwrap();
        assert!(spread.contains(&bv("10110")));
        assert_eq!(spread.len(), 7);
        let mut s = ElicitationState::new(hansel_chains(5).unwrap());
        assert!(s.propagate(bv("00000"), false).unwrap().is_empty());
        assert_eq!(s.known_count(), 1);
    }

    #[test]
    fn submit_sequencing() {
        let mut s = ElicitationState::new(hansel_chains(2).unwrap());
        // plan: [10], [00, 01, 11]
        assert_eq!(s.next_question(), Some(bv("10")));
        let err = s.submit_answer(bv("00"), false).unwrap_err();
        assert!(matches!(err, MonotoneError::OutOfOrder { .. }));
        s.submit_answer(bv("10"), true).unwrap();
        assert_eq!(s.value(&bv("11")), Some(true));
        assert_eq!(s.provenance(&bv("11")), Some(Provenance::Propagated));
        // 11 is already 1; answering it again is out of order, contradicting it
        // names the answer that implied it
        assert!(matches!(
            s.submit_answer(bv("11"), true),
            Err(MonotoneError::OutOfOrder { .. })
        ));
        assert_eq!(
            s.submit_answer(bv("11"), false),
            Err(MonotoneError::Inconsistent {
                vector: bv("11"),
                value: false,
                conflicting: bv("10"),
                conflicting_value: true,
            })
        );
        assert_eq!(s.asked().len(), 1);
    }

    #[test]
    fn undo_restores_state() {
        let mut s = ElicitationState::new(hansel_chains(3).unwrap());
        let fresh = s.clone();
        assert_eq!(s.undo(), Err(MonotoneError::NothingToUndo));
        let q = s.next_question().unwrap();
        let spread = s.submit_answer(q, true).unwrap();
        let after_one = s.clone();
        let q2 = s.next_question().unwrap();
        s.submit_answer(q2, false).unwrap();
        s.undo().unwrap();
        assert_eq!(s, after_one);
        assert_eq!(s.asked().len(), 1);
        let reverted = s.undo().unwrap();
        assert_eq!(reverted.len(), spread.len() + 1);
        assert_eq!(s, fresh);
        assert_eq!(s.next_question(), Some(q));
    }

    #[test]
    fn exhaustive_mode_asks_everything_and_checks_consistency() {
        let g = |v: BitVector| v.get(2) || (v.get(1) && v.get(3));
        let out = run_interview(hansel_chains(3).unwrap(), Mode::Exhaustive, g).unwrap();
        assert_eq!(out.asked.len(), 8);
        // plan: [100, 101], [010, 110], [000, 001, 011, 111]
        let mut s = ElicitationState::with_mode(hansel_chains(3).unwrap(), Mode::Exhaustive);
        for (v, x) in [("100", true), ("101", true), ("010", true), ("110", true), ("000", false), ("001", false)] {
            assert!(s.submit_answer(bv(v), x).unwrap().is_empty());
        }
        assert_eq!(
            s.submit_answer(bv("011"), false),
            Err(MonotoneError::Inconsistent {
                vector: bv("011"),
                value: false,
                conflicting: bv("010"),
                conflicting_value: true,
            })
        );
    }

    #[test]
    fn non_monotone_oracle_fails() {
        let bad = |v: BitVector| v == bv("001");
        let err = run_interview(hansel_chains(3).unwrap(), Mode::Hansel, bad).unwrap_err();
        assert!(matches!(err, MonotoneError::Inconsistent { .. }));
    }

    #[test]
    fn single_variable() {
        let out = run_interview(hansel_chains(1).unwrap(), Mode::Hansel, |v| v.get(1)).unwrap();
        assert_eq!(out.asked.len(), 2);
    }

    #[test]
    fn monotonicity_check() {
        let mut t = TruthTable::from_fn(5, |v| v.get(3)).unwrap();
        assert!(is_monotone(&t));
        t.values[bv("00110").bits() as usize] = false;
        assert!(!is_monotone(&t));
        assert!(is_monotone(&TruthTable::constant(4, true).unwrap()));
        assert!(is_monotone(&TruthTable::constant(4, false).unwrap()));
    }

    #[test]
    fn lower_units_of_constants() {
        let plan = hansel_chains(4).unwrap();
        let zero = TruthTable::constant(4, false).unwrap();
        assert!(lower_units(&zero, &plan).unwrap().is_empty());
        let one = TruthTable::constant(4, true).unwrap();
        let bottoms: Vec<BitVector> = plan.chains().iter().map(|c| c.vectors()[0]).collect();
        assert_eq!(lower_units(&one, &plan).unwrap(), bottoms);
    }

    #[test]
    fn table_json() {
        let t = TruthTable::from_fn(2, |v| v.get(1)).unwrap();
        let json = serde_json::to_string(&t).unwrap();
        assert_eq!(json, r#"{"n":2,"values":{"00":0,"01":0,"10":1,"11":1}}"#);
        assert_eq!(serde_json::from_str::<TruthTable>(&json).unwrap(), t);
        assert!(serde_json::from_str::<TruthTable>(r#"{"n":2,"values":{"00":0}}"#).is_err());
    }
}
