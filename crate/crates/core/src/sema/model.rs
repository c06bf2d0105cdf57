//! Resolved form of a semantically valid document.
//!
//! Events and measures are referred to by index into [`Model::events`] and
//! [`Model::measures`]; deadlines are folded to seconds.

use serde::Serialize;

use crate::semantics::{to_seconds, MeasureValue};
use crate::syntax::{self, CompareOp, Document, Polarity};

use super::symbols::{Symbol, SymbolTable};

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub enum MeasureKind {
    Boolean,
    Numeric,
    Scale(Vec<String>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MeasureDecl {
    pub name: String,
    pub kind: MeasureKind,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Term {
    Measure(usize),
    Value(MeasureValue),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Cond {
    And(Box<Cond>, Box<Cond>),
    Or(Box<Cond>, Box<Cond>),
    Not(Box<Cond>),
    Compare { op: CompareOp, lhs: Term, rhs: Term },
    Atom(Term),
}

impl Cond {
    pub fn for_each_measure(&self, f: &mut impl FnMut(usize)) {
        let mut term = |t: &Term| {
            if let Term::Measure(m) = t {
                f(*m)
            }
        };
        match self {
            Cond::And(a, b) | Cond::Or(a, b) => {
                a.for_each_measure(f);
                b.for_each_measure(f);
            }
            Cond::Not(c) => c.for_each_measure(f),
            Cond::Compare { lhs, rhs, .. } => {
                term(lhs);
                term(rhs);
            }
            Cond::Atom(t) => term(t),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TriggerModel {
    pub event: usize,
    pub condition: Option<Cond>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResponseModel {
    pub polarity: Polarity,
    pub event: usize,
    /// Deadline in seconds; 0 when the response is immediate.
    pub deadline: u64,
    pub otherwise: Option<Box<ResponseModel>>,
}

impl ResponseModel {
    pub fn chain(&self) -> impl Iterator<Item = &ResponseModel> {
        std::iter::successors(Some(self), |r| r.otherwise.as_deref())
    }

    /// Offset of the end of the last window in the chain, relative to the
    /// trigger time.
    pub fn horizon_offset(&self) -> u64 {
        self.chain().map(|r| r.deadline).sum()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DefeaterModel {
    pub condition: Cond,
    pub response: Option<ResponseModel>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RuleModel {
    pub id: String,
    pub trigger: TriggerModel,
    pub response: ResponseModel,
    pub defeaters: Vec<DefeaterModel>,
}

impl RuleModel {
    pub fn responses(&self) -> impl Iterator<Item = &ResponseModel> {
        std::iter::once(&self.response).chain(self.defeaters.iter().filter_map(|d| d.response.as_ref()))
    }

    pub fn condition_measures(&self) -> Vec<usize> {
        let mut out = Vec::new();
        let mut push = |m| {
            if !out.contains(&m) {
                out.push(m)
            }
        };
        if let Some(c) = &self.trigger.condition {
            c.for_each_measure(&mut push);
        }
        for d in &self.defeaters {
            d.condition.for_each_measure(&mut push);
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum PatternKind {
    Concern,
    Purpose,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PatternModel {
    pub id: String,
    pub kind: PatternKind,
    pub trigger: TriggerModel,
    pub response: ResponseModel,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Model {
    pub events: Vec<String>,
    pub measures: Vec<MeasureDecl>,
    pub constants: Vec<(String, i64)>,
    pub rules: Vec<RuleModel>,
    pub concerns: Vec<PatternModel>,
    pub purposes: Vec<PatternModel>,
}

impl Model {
    pub fn event_index(&self, name: &str) -> Option<usize> {
        self.events.iter().position(|e| e == name)
    }

    pub fn measure_index(&self, name: &str) -> Option<usize> {
        self.measures.iter().position(|m| m.name == name)
    }

    pub fn rule_index(&self, id: &str) -> Option<usize> {
        self.rules.iter().position(|r| r.id == id)
    }

    pub fn rule(&self, id: &str) -> Option<&RuleModel> {
        self.rules.iter().find(|r| r.id == id)
    }

    pub fn concern(&self, id: &str) -> Option<&PatternModel> {
        self.concerns.iter().find(|p| p.id == id)
    }

    pub fn purpose(&self, id: &str) -> Option<&PatternModel> {
        self.purposes.iter().find(|p| p.id == id)
    }

    /// Largest window end offset over all rules, concerns and purposes.
    pub fn max_deadline(&self) -> u64 {
        self.rules
            .iter()
            .flat_map(|r| r.responses())
            .chain(self.concerns.iter().chain(&self.purposes).map(|p| &p.response))
            .map(ResponseModel::horizon_offset)
            .max()
            .unwrap_or(0)
    }

    /// Value used for a measure nobody constrains.
    pub fn default_value(&self, measure: usize) -> MeasureValue {
        match self.measures[measure].kind {
            MeasureKind::Boolean => MeasureValue::Bool(false),
            MeasureKind::Numeric => MeasureValue::Num(0),
            MeasureKind::Scale(_) => MeasureValue::Scale(0),
        }
    }

    pub fn format_value(&self, measure: usize, value: &MeasureValue) -> String {
        match (value, &self.measures[measure].kind) {
            (MeasureValue::Scale(o), MeasureKind::Scale(labels)) => {
                labels.get(*o as usize).cloned().unwrap_or_else(|| o.to_string())
            }
            (v, _) => v.to_string(),
        }
    }
}

/// Lowers a document that has no error diagnostics. Names that fail to
/// resolve are a caller bug and yield `None`.
pub(crate) fn lower(doc: &Document, table: &SymbolTable) -> Option<Model> {
    let mut model = Model {
        events: table.events_in_order().into_iter().map(String::from).collect(),
        measures: table
            .measures_in_order()
            .into_iter()
            .map(|(n, m)| MeasureDecl {
                name: n.to_string(),
                kind: m.kind.clone(),
            })
            .collect(),
        constants: table.constants.iter().map(|(n, c)| (n.clone(), c.value)).collect(),
        ..Model::default()
    };
    let l = Lowerer { table };
    for r in &doc.rules {
        let rule = RuleModel {
            id: r.id.name.clone(),
            trigger: l.trigger(&r.trigger)?,
            response: l.response(&r.response)?,
            defeaters: r
                .defeaters
                .iter()
                .map(|d| {
                    Some(DefeaterModel {
                        condition: l.cond(&d.condition)?,
                        response: match &d.response {
                            Some(resp) => Some(l.response(resp)?),
                            None => None,
                        },
                    })
                })
                .collect::<Option<_>>()?,
        };
        model.rules.push(rule);
    }
    for (src, kind, dst) in [
        (&doc.concerns, PatternKind::Concern, &mut model.concerns),
        (&doc.purposes, PatternKind::Purpose, &mut model.purposes),
    ] {
        for p in src {
            dst.push(PatternModel {
                id: p.id.name.clone(),
                kind,
                trigger: l.trigger(&p.trigger)?,
                response: l.response(&p.response)?,
            });
        }
    }
    Some(model)
}

struct Lowerer<'a> {
    table: &'a SymbolTable,
}

impl Lowerer<'_> {
    fn event(&self, name: &str) -> Option<usize> {
        self.table.events.get(name).map(|e| e.index)
    }

    fn trigger(&self, t: &syntax::Trigger) -> Option<TriggerModel> {
        Some(TriggerModel {
            event: self.event(&t.event.name)?,
            condition: match &t.condition {
                Some(c) => Some(self.cond(c)?),
                None => None,
            },
        })
    }

    fn response(&self, r: &syntax::Response) -> Option<ResponseModel> {
        let deadline = match &r.deadline {
            None => 0,
            Some(d) => {
                let amount = match &d.amount {
                    syntax::Amount::Int(v) => *v,
                    syntax::Amount::Constant(c) => self.table.constants.get(&c.name)?.value,
                };
                to_seconds(u64::try_from(amount).ok()?, d.unit).ok()?.seconds()
            }
        };
        Some(ResponseModel {
            polarity: r.polarity,
            event: self.event(&r.event.name)?,
            deadline,
            otherwise: match &r.otherwise {
                Some(o) => Some(Box::new(self.response(o)?)),
                None => None,
            },
        })
    }

    fn term(&self, o: &syntax::Operand) -> Option<Term> {
        Some(match &o.kind {
            syntax::OperandKind::Int(v) => Term::Value(MeasureValue::Num(*v)),
            syntax::OperandKind::Bool(b) => Term::Value(MeasureValue::Bool(*b)),
            syntax::OperandKind::Name(n) => match self.table.lookup(n)? {
                Symbol::Measure(m) => Term::Measure(m.index),
                Symbol::Constant(c) => Term::Value(MeasureValue::Num(c.value)),
                Symbol::Label(l) => Term::Value(MeasureValue::Scale(l.ordinal)),
                Symbol::Event(_) => return None,
            },
        })
    }

    fn cond(&self, e: &syntax::Expr) -> Option<Cond> {
        use syntax::ExprKind;
        Some(match &e.kind {
            ExprKind::And(a, b) => Cond::And(Box::new(self.cond(a)?), Box::new(self.cond(b)?)),
            ExprKind::Or(a, b) => Cond::Or(Box::new(self.cond(a)?), Box::new(self.cond(b)?)),
            ExprKind::Not(c) => Cond::Not(Box::new(self.cond(c)?)),
            ExprKind::Compare { op, lhs, rhs } => Cond::Compare {
                op: *op,
                lhs: self.term(lhs)?,
                rhs: self.term(rhs)?,
            },
            ExprKind::Atom(o) => Cond::Atom(self.term(o)?),
        })
    }
}
