//! One interview session, flat or hierarchical, independent of HTTP.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use spi_discovery::io::SessionDoc;
use spi_discovery::monotone::{
    dnf_of_units, fixtures, hansel_chains, phrase_question, variable_names, BitVector, ChainPlan, Dnf,
    ElicitationState, HierarchySpec, Mode, Provenance,
};

use crate::error::ApiError;

/// A chain order given by name (`"reference"`, `"default"`) or spelled out.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ChainOrder {
    Named(String),
    Explicit(Vec<Vec<String>>),
}

impl ChainOrder {
    fn plan(&self, n: usize) -> Result<ChainPlan, ApiError> {
        match self {
            ChainOrder::Named(name) if name == "default" => Ok(hansel_chains(n)?),
            ChainOrder::Named(name) if name == "reference" => {
                if n != 5 {
                    return Err(ApiError::BadRequest("the reference chain order has width 5".into()));
                }
                Ok(fixtures::reference_plan())
            }
            ChainOrder::Named(other) => Err(ApiError::BadRequest(format!("unknown chain order `{other}`"))),
            ChainOrder::Explicit(chains) => Ok(ChainPlan::from_strings(n, chains)?),
        }
    }
}

fn plan_for(n: usize, order: Option<&ChainOrder>) -> Result<ChainPlan, ApiError> {
    match order {
        Some(o) => o.plan(n),
        None => Ok(hansel_chains(n)?),
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct HierarchyNames {
    pub g: Option<Vec<String>>,
    pub h: Option<Vec<String>>,
    pub f: Option<Vec<String>>,
}

/// Body of `POST /sessions`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SessionRequest {
    Flat {
        n: usize,
        #[serde(default)]
        names: Option<Vec<String>>,
        #[serde(default)]
        chain_order: Option<ChainOrder>,
        #[serde(default)]
        mode: Mode,
    },
    /// `g` over three inputs, then `h` over five, then `f` over five, where
    /// `x1` and `x2` of `f` stand for `g` and `h`. The chain order applies to
    /// the five-input interviews.
    Hierarchical {
        #[serde(default)]
        names: HierarchyNames,
        #[serde(default)]
        chain_order: Option<ChainOrder>,
        #[serde(default)]
        g_mode: Mode,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SessionKind {
    Flat,
    Hierarchical,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SubInterview {
    pub label: String,
    pub names: Vec<String>,
    pub state: ElicitationState,
}

impl SubInterview {
    fn new(label: &str, names: Option<Vec<String>>, prefix: &str, plan: ChainPlan, mode: Mode) -> Result<Self, ApiError> {
        let n = plan.width();
        let names = names.unwrap_or_else(|| variable_names(prefix, n));
        if names.len() != n {
            return Err(ApiError::BadRequest(format!(
                "{label}: {} names for {n} variables",
                names.len()
            )));
        }
        Ok(Self {
            label: label.into(),
            names,
            state: ElicitationState::with_mode(plan, mode),
        })
    }

    /// Minimal DNF of the vectors known to be 1. Exact once complete, an
    /// under-approximation before.
    pub fn dnf(&self) -> Dnf {
        dnf_of_units(self.state.width(), &self.state.ones())
            .expect("state vectors share its width")
            .minimize_absorption()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Question {
    pub stage: String,
    pub vector: String,
    pub text: String,
    /// 1-based chain and position within the chain.
    pub chain: usize,
    pub position: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Progress {
    pub asked: usize,
    pub known: usize,
    pub total: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AnswerOutcome {
    pub stage: String,
    /// Vectors inferred from this answer, with the inferred value.
    pub propagated: Vec<(String, u8)>,
    pub next_question: Option<Question>,
    /// Set when the answer finished a sub-interview and another begins.
    pub transition: Option<String>,
    pub completed: bool,
    pub progress: Progress,
    pub model: Option<ModelView>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct UndoOutcome {
    pub stage: String,
    pub reverted: Vec<String>,
    pub question: Option<Question>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CellView {
    pub vector: String,
    pub value: Option<u8>,
    pub provenance: Option<Provenance>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SubInterviewView {
    pub label: String,
    pub n: usize,
    pub mode: Mode,
    pub names: Vec<String>,
    pub chain_order: Vec<Vec<String>>,
    /// One row per chain, in plan order.
    pub board: Vec<Vec<CellView>>,
    pub asked: Vec<(String, u8)>,
    pub question_count: usize,
    pub known: usize,
    pub complete: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SessionView {
    pub id: String,
    pub kind: SessionKind,
    pub stage: Option<String>,
    pub completed: bool,
    pub question: Option<Question>,
    pub created: u64,
    pub updated: u64,
    pub subinterviews: Vec<SubInterviewView>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DnfView {
    pub label: String,
    pub n: usize,
    pub dnf: String,
    pub terms: Vec<Vec<usize>>,
    pub questions: usize,
    pub complete: bool,
}

/// The flattened two-level model over all raw inputs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComposedView {
    pub names: Vec<String>,
    pub dnf: String,
    pub terms: Vec<Vec<usize>>,
    /// Inputs (of `2^names.len()`) on which the model is 1.
    pub positives: u64,
    /// Questions a direct tabulation would need.
    pub unassisted_questions: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelView {
    pub partial: bool,
    pub models: Vec<DnfView>,
    pub question_counts: BTreeMap<String, usize>,
    pub total_questions: usize,
    pub composed: Option<ComposedView>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Session {
    pub id: String,
    pub kind: SessionKind,
    pub subs: Vec<SubInterview>,
    /// Index of the running sub-interview; `subs.len()` once all are done.
    pub active: usize,
    pub created: u64,
    pub updated: u64,
}

fn parse_vector(text: &str, width: usize) -> Result<BitVector, ApiError> {
    let v: BitVector = text.parse().map_err(|e| ApiError::BadRequest(format!("vector `{text}`: {e}")))?;
    if v.width() != width {
        return Err(ApiError::BadRequest(format!(
            "vector `{text}` has width {}, expected {width}",
            v.width()
        )));
    }
    Ok(v)
}

impl Session {
    pub fn create(id: String, request: &SessionRequest, now: u64) -> Result<Self, ApiError> {
        let (kind, subs) = match request {
            SessionRequest::Flat {
                n,
                names,
                chain_order,
                mode,
            } => {
                let plan = plan_for(*n, chain_order.as_ref())?;
                let sub = SubInterview::new("f", names.clone(), "x", plan, *mode)?;
                (SessionKind::Flat, vec![sub])
            }
            SessionRequest::Hierarchical {
                names,
                chain_order,
                g_mode,
            } => {
                let g = SubInterview::new("g", names.g.clone(), "w", hansel_chains(3)?, *g_mode)?;
                let h = SubInterview::new("h", names.h.clone(), "y", plan_for(5, chain_order.as_ref())?, Mode::Hansel)?;
                let f = SubInterview::new("f", names.f.clone(), "x", plan_for(5, chain_order.as_ref())?, Mode::Hansel)?;
                (SessionKind::Hierarchical, vec![g, h, f])
            }
        };
        Ok(Self {
            id,
            kind,
            subs,
            active: 0,
            created: now,
            updated: now,
        })
    }

    pub fn is_complete(&self) -> bool {
        self.active >= self.subs.len()
    }

    pub fn stage(&self) -> Option<&str> {
        self.subs.get(self.active).map(|s| s.label.as_str())
    }

    pub fn question(&self) -> Option<Question> {
        let sub = self.subs.get(self.active)?;
        let v = sub.state.next_question()?;
        let (chain, position) = sub.state.plan().label(&v).expect("plan covers the cube");
        Some(Question {
            stage: sub.label.clone(),
            vector: v.to_string(),
            text: phrase_question(&v, &sub.names),
            chain,
            position,
        })
    }

    pub fn progress(&self) -> Progress {
        Progress {
            asked: self.subs.iter().map(|s| s.state.question_count()).sum(),
            known: self.subs.iter().map(|s| s.state.known_count()).sum(),
            total: self.subs.iter().map(|s| 1usize << s.state.width()).sum(),
        }
    }

    /// Answers the pending question of the running sub-interview.
    ///
    /// Re-answering a vector that was already asked is a sequencing error
    /// whatever the value, so of two racing answers to one question the
    /// loser always sees a conflict. Contradicting an inferred value is an
    /// inconsistency.
    pub fn answer(&mut self, vector: &str, value: bool, now: u64) -> Result<AnswerOutcome, ApiError> {
        let active = self.active;
        let Some(sub) = self.subs.get_mut(active) else {
            return Err(ApiError::OutOfOrder {
                expected: None,
                found: vector.to_string(),
            });
        };
        let v = parse_vector(vector, sub.state.width())?;
        if sub.state.provenance(&v) == Some(Provenance::Asked) {
            return Err(ApiError::OutOfOrder {
                expected: sub.state.next_question().map(|q| q.to_string()),
                found: v.to_string(),
            });
        }
        let spread = sub.state.submit_answer(v, value)?;
        let stage = sub.label.clone();
        let finished = sub.state.is_complete();
        self.updated = now;
        let mut transition = None;
        if finished {
            self.active += 1;
            transition = self.stage().map(str::to_owned);
        }
        let completed = self.is_complete();
        Ok(AnswerOutcome {
            stage,
            propagated: spread.iter().map(|w| (w.to_string(), u8::from(value))).collect(),
            next_question: self.question(),
            transition,
            completed,
            progress: self.progress(),
            model: completed.then(|| self.model()),
        })
    }

    /// Withdraws the last answer. When the running sub-interview has no
    /// answers yet (or the session is complete), the last answer of the
    /// previous one is withdrawn and that sub-interview resumes.
    pub fn undo(&mut self, now: u64) -> Result<UndoOutcome, ApiError> {
        let mut target = self.active.min(self.subs.len() - 1);
        if self.subs[target].state.question_count() == 0 || self.is_complete() {
            target = (0..=target)
                .rev()
                .find(|&i| self.subs[i].state.question_count() > 0)
                .ok_or(ApiError::NothingToUndo)?;
        }
        let sub = &mut self.subs[target];
        let reverted = sub.state.undo()?;
        let stage = sub.label.clone();
        self.active = target;
        self.updated = now;
        Ok(UndoOutcome {
            stage,
            reverted: reverted.iter().map(BitVector::to_string).collect(),
            question: self.question(),
        })
    }

    pub fn view(&self) -> SessionView {
        let subinterviews = self
            .subs
            .iter()
            .map(|s| {
                let board = s
                    .state
                    .plan()
                    .chains()
                    .iter()
                    .map(|c| {
                        c.vectors()
                            .iter()
                            .map(|v| CellView {
                                vector: v.to_string(),
                                value: s.state.value(v).map(u8::from),
                                provenance: s.state.provenance(v),
                            })
                            .collect()
                    })
                    .collect();
                SubInterviewView {
                    label: s.label.clone(),
                    n: s.state.width(),
                    mode: s.state.mode(),
                    names: s.names.clone(),
                    chain_order: s.state.plan().to_strings(),
                    board,
                    asked: s.state.asked().iter().map(|(v, x)| (v.to_string(), u8::from(*x))).collect(),
                    question_count: s.state.question_count(),
                    known: s.state.known_count(),
                    complete: s.state.is_complete(),
                }
            })
            .collect();
        SessionView {
            id: self.id.clone(),
            kind: self.kind,
            stage: self.stage().map(str::to_owned),
            completed: self.is_complete(),
            question: self.question(),
            created: self.created,
            updated: self.updated,
            subinterviews,
        }
    }

    pub fn model(&self) -> ModelView {
        let models: Vec<DnfView> = self
            .subs
            .iter()
            .map(|s| {
                let dnf = s.dnf();
                DnfView {
                    label: s.label.clone(),
                    n: s.state.width(),
                    dnf: dnf.render_with(&s.names),
                    terms: dnf.terms(),
                    questions: s.state.question_count(),
                    complete: s.state.is_complete(),
                }
            })
            .collect();
        let composed = match (self.kind, self.is_complete()) {
            (SessionKind::Hierarchical, true) => Some(self.composed()),
            _ => None,
        };
        ModelView {
            partial: !self.is_complete(),
            question_counts: models.iter().map(|m| (m.label.clone(), m.questions)).collect(),
            total_questions: models.iter().map(|m| m.questions).sum(),
            models,
            composed,
        }
    }

    /// The elicited `g`, `h` and `f` as one model.
    pub fn hierarchy(&self) -> Option<HierarchySpec> {
        if self.kind != SessionKind::Hierarchical {
            return None;
        }
        let [g, h, f] = [0, 1, 2].map(|i| self.subs[i].dnf());
        HierarchySpec::new(f, g, h).ok()
    }

    fn composed(&self) -> ComposedView {
        let spec = self.hierarchy().expect("hierarchical session");
        let mut names = self.subs[0].names.clone();
        names.extend(self.subs[1].names.iter().cloned());
        names.extend(self.subs[2].names.iter().skip(2).cloned());
        let flat = spec.flatten();
        let width = spec.input_width();
        let positives = (0..1u32 << width).filter(|&b| flat.eval_bits(b)).count() as u64;
        ComposedView {
            dnf: flat.render_with(&names),
            terms: flat.terms(),
            names,
            positives,
            unassisted_questions: spec.unassisted_question_count(),
        }
    }
}

/// Persisted form of a session.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SessionSnapshot {
    pub schema_version: u32,
    pub id: String,
    pub kind: SessionKind,
    pub active: usize,
    pub created: u64,
    pub updated: u64,
    pub subinterviews: Vec<SubSnapshot>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SubSnapshot {
    pub label: String,
    pub names: Vec<String>,
    pub session: SessionDoc,
}

impl SessionSnapshot {
    pub fn of(s: &Session) -> Self {
        Self {
            schema_version: spi_discovery::io::SCHEMA_VERSION,
            id: s.id.clone(),
            kind: s.kind,
            active: s.active,
            created: s.created,
            updated: s.updated,
            subinterviews: s
                .subs
                .iter()
                .map(|sub| SubSnapshot {
                    label: sub.label.clone(),
                    names: sub.names.clone(),
                    session: SessionDoc::from_state(&sub.state),
                })
                .collect(),
        }
    }

    pub fn restore(self) -> Result<Session, String> {
        if self.schema_version != spi_discovery::io::SCHEMA_VERSION {
            return Err(format!("unsupported schema_version {}", self.schema_version));
        }
        let subs = self
            .subinterviews
            .into_iter()
            .map(|s| {
                Ok(SubInterview {
                    label: s.label,
                    names: s.names,
                    state: s.session.into_state().map_err(|e| e.to_string())?,
                })
            })
            .collect::<Result<Vec<_>, String>>()?;
        if subs.is_empty() || self.active > subs.len() {
            return Err("inconsistent sub-interview pointer".into());
        }
        Ok(Session {
            id: self.id,
            kind: self.kind,
            subs,
            active: self.active,
            created: self.created,
            updated: self.updated,
        })
    }
}
