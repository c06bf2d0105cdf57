//! Finite abstraction of measure values.

use std::collections::{BTreeMap, BTreeSet};

use crate::sema::{Cond, MeasureKind, Model, Term};
use crate::semantics::{eval_cond, Activation, MeasureValue};

/// Candidate values per measure. Numeric measures get values around every
/// constant they are compared with, enough to realise each ordering among
/// the measures compared in the same condition.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AbstractDomain {
    pub values: Vec<Vec<MeasureValue>>,
}

impl AbstractDomain {
    pub fn new(model: &Model) -> Self {
        let n = model.measures.len();
        let mut consts: Vec<BTreeSet<i64>> = vec![BTreeSet::new(); n];
        let mut peers: Vec<BTreeSet<usize>> = (0..n).map(|m| BTreeSet::from([m])).collect();
        let mut visit = |c: &Cond| scan(c, &mut consts, &mut peers);
        for r in &model.rules {
            if let Some(c) = &r.trigger.condition {
                visit(c);
            }
            for d in &r.defeaters {
                visit(&d.condition);
            }
        }
        for p in model.concerns.iter().chain(&model.purposes) {
            if let Some(c) = &p.trigger.condition {
                visit(c);
            }
        }
        // Measures compared with each other share constants.
        let mut changed = true;
        while changed {
            changed = false;
            for m in 0..n {
                for p in peers[m].clone() {
                    let extra: Vec<i64> = consts[p].difference(&consts[m]).copied().collect();
                    let extra_peers: Vec<usize> = peers[p].difference(&peers[m]).copied().collect();
                    if !extra.is_empty() || !extra_peers.is_empty() {
                        changed = true;
                        consts[m].extend(extra);
                        peers[m].extend(extra_peers);
                    }
                }
            }
        }
        let values = (0..n)
            .map(|m| match &model.measures[m].kind {
                MeasureKind::Boolean => vec![MeasureValue::Bool(false), MeasureValue::Bool(true)],
                MeasureKind::Scale(labels) => (0..labels.len() as u32).map(MeasureValue::Scale).collect(),
                MeasureKind::Numeric => {
                    let r = peers[m].len() as i64;
                    let mut vals = BTreeSet::new();
                    if consts[m].is_empty() {
                        vals.extend(0..r);
                    }
                    for &k in &consts[m] {
                        vals.extend(k.saturating_sub(r)..=k.saturating_add(r));
                    }
                    vals.into_iter().map(MeasureValue::Num).collect()
                }
            })
            .collect();
        AbstractDomain { values }
    }

    /// Every assignment to `measures`, others at their defaults.
    pub fn valuations(&self, model: &Model, measures: &[usize]) -> Vec<Vec<MeasureValue>> {
        let base: Vec<MeasureValue> = (0..model.measures.len()).map(|m| model.default_value(m)).collect();
        let mut out = vec![base];
        for &m in measures {
            out = out
                .into_iter()
                .flat_map(|v| {
                    self.values[m].iter().map(move |x| {
                        let mut w = v.clone();
                        w[m] = *x;
                        w
                    })
                })
                .collect();
        }
        out
    }
}

fn scan(c: &Cond, consts: &mut [BTreeSet<i64>], peers: &mut [BTreeSet<usize>]) {
    match c {
        Cond::And(a, b) | Cond::Or(a, b) => {
            scan(a, consts, peers);
            scan(b, consts, peers);
        }
        Cond::Not(a) => scan(a, consts, peers),
        Cond::Compare { lhs, rhs, .. } => match (lhs, rhs) {
            (Term::Measure(m), Term::Value(MeasureValue::Num(k)))
            | (Term::Value(MeasureValue::Num(k)), Term::Measure(m)) => {
                consts[*m].insert(*k);
            }
            (Term::Measure(a), Term::Measure(b)) => {
                peers[*a].insert(*b);
                peers[*b].insert(*a);
            }
            _ => {}
        },
        Cond::Atom(_) => {}
    }
}

/// What a valuation decides at one point, used to drop valuations that
/// behave identically.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub(crate) enum Outcome {
    NotTriggered,
    Suspended(usize),
    Activated(Option<usize>),
    Holds(bool),
}

pub(crate) fn rule_outcome(a: Activation<'_>) -> Outcome {
    match a {
        Activation::NotTriggered => Outcome::NotTriggered,
        Activation::Suspended { defeater } => Outcome::Suspended(defeater),
        Activation::Activated { defeater, .. } => Outcome::Activated(defeater),
    }
}

/// Valuations of `measures` with distinct signatures under `signature`.
pub(crate) fn distinct_valuations<K: Ord>(
    domain: &AbstractDomain,
    model: &Model,
    measures: &[usize],
    mut signature: impl FnMut(&[MeasureValue]) -> K,
) -> Vec<Vec<MeasureValue>> {
    let mut seen = BTreeMap::new();
    for v in domain.valuations(model, measures) {
        let key = signature(&v);
        seen.entry(key).or_insert(v);
    }
    let mut out: Vec<_> = seen.into_values().collect();
    out.sort();
    out
}

pub(crate) fn cond_holds(c: Option<&Cond>, v: &[MeasureValue]) -> bool {
    c.is_none_or(|c| eval_cond(c, v))
}
