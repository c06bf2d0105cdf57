use serde::Serialize;

use crate::sema::{Cond, Model, PatternModel, ResponseModel, RuleModel, Term, TriggerModel};
use crate::syntax::Polarity;

use super::trace::{Trace, TracePoint};

fn term_value(term: &Term, valuation: &[super::MeasureValue]) -> super::MeasureValue {
    match term {
        Term::Measure(m) => valuation[*m],
        Term::Value(v) => *v,
    }
}

pub fn eval_cond(cond: &Cond, valuation: &[super::MeasureValue]) -> bool {
    match cond {
        Cond::And(a, b) => eval_cond(a, valuation) && eval_cond(b, valuation),
        Cond::Or(a, b) => eval_cond(a, valuation) || eval_cond(b, valuation),
        Cond::Not(c) => !eval_cond(c, valuation),
        Cond::Compare { op, lhs, rhs } => op.apply(term_value(lhs, valuation), term_value(rhs, valuation)),
        Cond::Atom(t) => matches!(term_value(t, valuation), super::MeasureValue::Bool(true)),
    }
}

/// Trigger event present and trigger condition true.
pub fn trigger_holds(trigger: &TriggerModel, point: &TracePoint) -> bool {
    point.events.contains(trigger.event)
        && trigger
            .condition
            .as_ref()
            .is_none_or(|c| eval_cond(c, &point.valuation))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Activation<'a> {
    NotTriggered,
    Suspended {
        defeater: usize,
    },
    Activated {
        response: &'a ResponseModel,
        defeater: Option<usize>,
    },
}

pub fn activation<'a>(rule: &'a RuleModel, point: &TracePoint) -> Activation<'a> {
    if !trigger_holds(&rule.trigger, point) {
        return Activation::NotTriggered;
    }
    for (i, d) in rule.defeaters.iter().enumerate().rev() {
        if eval_cond(&d.condition, &point.valuation) {
            return match &d.response {
                Some(response) => Activation::Activated {
                    response,
                    defeater: Some(i),
                },
                None => Activation::Suspended { defeater: i },
            };
        }
    }
    Activation::Activated {
        response: &rule.response,
        defeater: None,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct Window {
    pub start: u64,
    pub end: u64,
}

impl Window {
    pub fn contains(&self, t: u64) -> bool {
        self.start <= t && t <= self.end
    }
}

/// One response of an obligation chain with its absolute window.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Demand {
    pub polarity: Polarity,
    pub event: usize,
    pub window: Window,
}

/// Windows of a response chain triggered at `t`. Each alternative starts
/// where the previous window ends.
pub fn demands(response: &ResponseModel, t: u64) -> Vec<Demand> {
    let mut out = Vec::new();
    let mut start = t;
    for r in response.chain() {
        let end = start.saturating_add(r.deadline);
        out.push(Demand {
            polarity: r.polarity,
            event: r.event,
            window: Window { start, end },
        });
        start = end;
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Obligation {
    pub rule: usize,
    /// Index of the triggering point.
    pub point: usize,
    pub defeater: Option<usize>,
    /// Primary demand first, then the `otherwise` alternatives.
    pub demands: Vec<Demand>,
}

impl Obligation {
    pub fn kind(&self) -> Polarity {
        self.demands[0].polarity
    }

    pub fn event(&self) -> usize {
        self.demands[0].event
    }

    pub fn window(&self) -> Window {
        self.demands[0].window
    }

    pub fn describe(&self, model: &Model) -> String {
        let parts: Vec<String> = self
            .demands
            .iter()
            .map(|d| {
                let verb = match d.polarity {
                    Polarity::Require => "Require",
                    Polarity::Forbid => "Forbid",
                };
                format!("{verb} {} [{},{}]", model.events[d.event], d.window.start, d.window.end)
            })
            .collect();
        format!("{} ({})", parts.join(" otherwise "), model.rules[self.rule].id)
    }
}

pub fn occurs_in(trace: &Trace, event: usize, window: Window) -> bool {
    trace
        .points
        .iter()
        .skip_while(|p| p.timestamp < window.start)
        .take_while(|p| p.timestamp <= window.end)
        .any(|p| p.events.contains(event))
}

pub fn demand_fulfilled(trace: &Trace, d: &Demand) -> bool {
    let seen = occurs_in(trace, d.event, d.window);
    match d.polarity {
        Polarity::Require => seen,
        Polarity::Forbid => !seen,
    }
}

pub fn fulfilled(trace: &Trace, obligation: &Obligation) -> bool {
    obligation.demands.iter().any(|d| demand_fulfilled(trace, d))
}

/// Obligations of the given rules, ordered by point then rule.
pub fn obligations(model: &Model, rules: &[usize], trace: &Trace) -> Vec<Obligation> {
    let mut out = Vec::new();
    for (i, p) in trace.points.iter().enumerate() {
        for &r in rules {
            if let Activation::Activated { response, defeater } = activation(&model.rules[r], p) {
                out.push(Obligation {
                    rule: r,
                    point: i,
                    defeater,
                    demands: demands(response, p.timestamp),
                });
            }
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub obligation: Obligation,
    pub explanation: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Satisfaction {
    pub ok: bool,
    pub first_violation: Option<Violation>,
}

pub fn satisfies(model: &Model, rules: &[usize], trace: &Trace) -> Satisfaction {
    for o in obligations(model, rules, trace) {
        if !fulfilled(trace, &o) {
            let explanation = match o.kind() {
                Polarity::Require => format!("{}: required event never occurs in its window", o.describe(model)),
                Polarity::Forbid => format!("{}: forbidden event occurs in its window", o.describe(model)),
            };
            return Satisfaction {
                ok: false,
                first_violation: Some(Violation {
                    obligation: o,
                    explanation,
                }),
            };
        }
    }
    Satisfaction {
        ok: true,
        first_violation: None,
    }
}

/// Fast boolean form of [`satisfies`].
pub fn satisfies_all(model: &Model, rules: &[usize], trace: &Trace) -> bool {
    trace.points.iter().all(|p| {
        rules.iter().all(|&r| match activation(&model.rules[r], p) {
            Activation::Activated { response, .. } => demands(response, p.timestamp)
                .iter()
                .any(|d| demand_fulfilled(trace, d)),
            _ => true,
        })
    })
}

pub fn violates(model: &Model, rule: usize, trace: &Trace) -> bool {
    !satisfies_all(model, &[rule], trace)
}

/// Whether the pattern is observed at some point: a required event seen in
/// its window, or a forbidden event absent from a window that closes by the
/// horizon.
pub fn raises(pattern: &PatternModel, trace: &Trace) -> bool {
    trace.points.iter().any(|p| {
        trigger_holds(&pattern.trigger, p)
            && demands(&pattern.response, p.timestamp).iter().any(|d| {
                let seen = occurs_in(trace, d.event, d.window);
                match d.polarity {
                    Polarity::Require => seen,
                    Polarity::Forbid => !seen && d.window.end <= trace.horizon,
                }
            })
    })
}

/// A demand that no extension of the trace can fulfil.
pub fn demand_failed(trace: &Trace, d: &Demand) -> bool {
    match d.polarity {
        Polarity::Forbid => occurs_in(trace, d.event, d.window),
        Polarity::Require => {
            trace.last_time().is_some_and(|t| d.window.end <= t) && !occurs_in(trace, d.event, d.window)
        }
    }
}

/// A prefix is feasible when no obligation is already irrecoverably
/// violated: no forbidden event has occurred and every unfulfilled required
/// window is still open after the last point.
pub fn prefix_feasible(model: &Model, rules: &[usize], trace: &Trace) -> bool {
    obligations(model, rules, trace)
        .iter()
        .all(|o| !o.demands.iter().all(|d| demand_failed(trace, d)))
}

/// Whether the rule's trigger holds at some point.
pub fn triggers(model: &Model, rule: usize, trace: &Trace) -> bool {
    trace
        .points
        .iter()
        .any(|p| trigger_holds(&model.rules[rule].trigger, p))
}
