//! Brute-force decision of the five properties on tiny instances.
//!
//! Every trace within the bounds is enumerated literally: each increasing
//! tuple of timestamps, each event subset and each valuation at every
//! point. Only boolean measures are allowed, so valuations are finite.

use std::ops::ControlFlow;

use thiserror::Error;

use crate::engine::{Bounds, Property, Status, Verdict};
use crate::sema::{MeasureKind, Model, ResponseModel};
use crate::semantics::{
    prefix_feasible, raises, satisfies_all, trigger_holds, violates, EventSet, MeasureValue, Trace, TracePoint,
};

/// Size limits of instances the oracle accepts.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OracleClass {
    pub max_rules: usize,
    pub max_events: usize,
    pub max_measures: usize,
    pub deadlines: [u64; 2],
    pub max_points: usize,
    pub max_horizon: u64,
    pub max_traces: u64,
}

impl Default for OracleClass {
    fn default() -> Self {
        OracleClass {
            max_rules: 4,
            max_events: 4,
            max_measures: 3,
            deadlines: [1, 2],
            max_points: 3,
            max_horizon: 4,
            max_traces: 10_000_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("instance outside the oracle class: {0}")]
    InstanceTooLarge(String),
    #[error("target '{0}' is not in the rule set")]
    TargetNotInRuleSet(String),
    #[error("no {kind} named '{id}'")]
    UnknownTarget { kind: &'static str, id: String },
}

fn too_large(msg: impl Into<String>) -> OracleError {
    OracleError::InstanceTooLarge(msg.into())
}

fn binomial(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    (0..k).fold(1u64, |acc, i| acc * (n - i) / (i + 1))
}

/// Number of traces with at most `points` points whose timestamps are
/// drawn from `slots` values, with `choices` event/valuation options per
/// point.
pub fn trace_count(slots: u64, points: usize, choices: u64) -> u64 {
    (0..=points as u64)
        .map(|n| binomial(slots, n).saturating_mul(choices.saturating_pow(n as u32)))
        .fold(0u64, u64::saturating_add)
}

pub struct Oracle<'m> {
    model: &'m Model,
    rules: Vec<usize>,
    bounds: Bounds,
    choices: Vec<(EventSet, Vec<MeasureValue>)>,
}

impl<'m> Oracle<'m> {
    pub fn new(model: &'m Model, rules: &[usize], max_points: usize, horizon: u64) -> Result<Self, OracleError> {
        Self::with_class(model, rules, max_points, horizon, OracleClass::default())
    }

    pub fn with_class(
        model: &'m Model,
        rules: &[usize],
        max_points: usize,
        horizon: u64,
        class: OracleClass,
    ) -> Result<Self, OracleError> {
        if rules.len() > class.max_rules {
            return Err(too_large(format!("{} rules", rules.len())));
        }
        if model.events.len() > class.max_events {
            return Err(too_large(format!("{} events", model.events.len())));
        }
        if model.measures.len() > class.max_measures {
            return Err(too_large(format!("{} measures", model.measures.len())));
        }
        if let Some(m) = model.measures.iter().find(|m| m.kind != MeasureKind::Boolean) {
            return Err(too_large(format!("measure '{}' is not boolean", m.name)));
        }
        let responses = rules
            .iter()
            .flat_map(|&r| model.rules[r].responses())
            .chain(model.concerns.iter().chain(&model.purposes).map(|p| &p.response))
            .flat_map(ResponseModel::chain);
        for r in responses {
            if !class.deadlines.contains(&r.deadline) {
                return Err(too_large(format!("deadline of {} seconds", r.deadline)));
            }
        }
        if max_points > class.max_points {
            return Err(too_large(format!("{max_points} points")));
        }
        if horizon > class.max_horizon {
            return Err(too_large(format!("horizon {horizon}")));
        }
        let choices = 1u64 << (model.events.len() + model.measures.len());
        let count = trace_count(horizon + 1, max_points, choices);
        if count >= class.max_traces {
            return Err(too_large(format!("{count} traces")));
        }

        let (ne, nm) = (model.events.len(), model.measures.len());
        let choices = (0..1u64 << ne)
            .flat_map(|em| {
                (0..1u64 << nm).map(move |vm| {
                    let events: EventSet = (0..ne).filter(|e| em & (1 << e) != 0).collect();
                    let valuation = (0..nm).map(|m| MeasureValue::Bool(vm & (1 << m) != 0)).collect();
                    (events, valuation)
                })
            })
            .collect();
        Ok(Oracle {
            model,
            rules: rules.to_vec(),
            bounds: Bounds {
                max_points,
                horizon,
                node_budget: u64::MAX,
            },
            choices,
        })
    }

    /// Visits `base` and every extension of it by up to `extra` points with
    /// timestamps after its last point and at most `until`. Returns the
    /// number of traces visited.
    fn enumerate(
        &self,
        base: &Trace,
        extra: usize,
        until: u64,
        f: &mut impl FnMut(&Trace) -> ControlFlow<()>,
    ) -> (u64, ControlFlow<()>) {
        let mut trace = base.clone();
        let mut visited = 0;
        let flow = self.walk(&mut trace, extra, until, &mut visited, f);
        if flow.is_continue() {
            let first = base.last_time().map_or(0, |t| t + 1);
            let slots = (until + 1).saturating_sub(first);
            let expected = trace_count(slots, extra, self.choices.len() as u64);
            assert_eq!(visited, expected, "enumeration is not exhaustive");
        }
        (visited, flow)
    }

    fn walk(
        &self,
        trace: &mut Trace,
        extra: usize,
        until: u64,
        visited: &mut u64,
        f: &mut impl FnMut(&Trace) -> ControlFlow<()>,
    ) -> ControlFlow<()> {
        *visited += 1;
        f(trace)?;
        if extra == 0 {
            return ControlFlow::Continue(());
        }
        let first = trace.last_time().map_or(0, |t| t + 1);
        for t in first..=until {
            for (events, valuation) in &self.choices {
                trace.points.push(TracePoint {
                    timestamp: t,
                    events: events.clone(),
                    valuation: valuation.clone(),
                });
                let flow = self.walk(trace, extra - 1, until, visited, f);
                trace.points.pop();
                flow?;
            }
        }
        ControlFlow::Continue(())
    }

    /// First trace within the bounds that satisfies `pred`.
    fn exists(&self, mut pred: impl FnMut(&Trace) -> bool) -> (Option<Trace>, u64) {
        let mut found = None;
        let (visited, _) = self.enumerate(
            &Trace::empty(self.bounds.horizon),
            self.bounds.max_points,
            self.bounds.horizon,
            &mut |t| {
                if pred(t) {
                    found = Some(t.clone());
                    ControlFlow::Break(())
                } else {
                    ControlFlow::Continue(())
                }
            },
        );
        (found, visited)
    }

    fn max_deadline(&self, rules: &[usize]) -> u64 {
        rules
            .iter()
            .flat_map(|&r| self.model.rules[r].responses())
            .map(|r| r.horizon_offset())
            .max()
            .unwrap_or(0)
    }

    /// Whether some extension of `situation` satisfies `rules`.
    fn extendable(&self, rules: &[usize], situation: &Trace, visited: &mut u64) -> bool {
        let until = self.bounds.extension_horizon(self.max_deadline(&self.rules));
        let mut ok = false;
        let (n, _) = self.enumerate(situation, self.bounds.max_points, until, &mut |t| {
            if satisfies_all(self.model, rules, t) {
                ok = true;
                ControlFlow::Break(())
            } else {
                ControlFlow::Continue(())
            }
        });
        *visited += n;
        ok
    }

    fn rule_target(&self, id: &str) -> Result<usize, OracleError> {
        let r = self.model.rule_index(id).ok_or_else(|| OracleError::UnknownTarget {
            kind: "rule",
            id: id.to_string(),
        })?;
        if !self.rules.contains(&r) {
            return Err(OracleError::TargetNotInRuleSet(id.to_string()));
        }
        Ok(r)
    }

    pub fn check(&self, property: Property, target: &str) -> Result<Verdict, OracleError> {
        let model = self.model;
        let rules = &self.rules;
        let mut v = Verdict {
            property,
            target: target.to_string(),
            status: Status::NoIssueWithinBounds,
            bounds: self.bounds,
            witness: None,
            situation: None,
            conflict_set: None,
            budget_exhausted: false,
            nodes: 0,
        };
        match property {
            Property::Vacuous => {
                let r = self.rule_target(target)?;
                let (w, n) = self.exists(|t| {
                    satisfies_all(model, rules, t) && t.points.iter().any(|p| trigger_holds(&model.rules[r].trigger, p))
                });
                v.nodes = n;
                match w {
                    Some(w) => v.witness = Some(w),
                    None => v.status = Status::IssueFound,
                }
            }
            Property::Redundant => {
                let r = self.rule_target(target)?;
                let rest: Vec<usize> = rules.iter().copied().filter(|&x| x != r).collect();
                let (w, n) = self.exists(|t| satisfies_all(model, &rest, t) && violates(model, r, t));
                v.nodes = n;
                match w {
                    Some(w) => v.witness = Some(w),
                    None => v.status = Status::IssueFound,
                }
            }
            Property::Restrictive => {
                let p = model.purpose(target).ok_or_else(|| OracleError::UnknownTarget {
                    kind: "purpose",
                    id: target.to_string(),
                })?;
                let (w, n) = self.exists(|t| satisfies_all(model, rules, t) && raises(p, t));
                v.nodes = n;
                match w {
                    Some(w) => v.witness = Some(w),
                    None => v.status = Status::IssueFound,
                }
            }
            Property::Insufficient => {
                let c = model.concern(target).ok_or_else(|| OracleError::UnknownTarget {
                    kind: "concern",
                    id: target.to_string(),
                })?;
                let (w, n) = self.exists(|t| satisfies_all(model, rules, t) && raises(c, t));
                v.nodes = n;
                if let Some(w) = w {
                    v.status = Status::IssueFound;
                    v.witness = Some(w);
                }
            }
            Property::Situational => {
                let r = self.rule_target(target)?;
                let mut ext_visited = 0;
                let (s, n) = self.exists(|t| {
                    t.points.iter().any(|p| trigger_holds(&model.rules[r].trigger, p))
                        && prefix_feasible(model, rules, t)
                        && !self.extendable(rules, t, &mut ext_visited)
                });
                v.nodes = n + ext_visited;
                if let Some(s) = s {
                    let mut set = rules.clone();
                    for &x in rules {
                        let rest: Vec<usize> = set.iter().copied().filter(|&y| y != x).collect();
                        if !self.extendable(&rest, &s, &mut v.nodes) {
                            set = rest;
                        }
                    }
                    v.status = Status::IssueFound;
                    v.conflict_set = Some(set.into_iter().map(|x| model.rules[x].id.clone()).collect());
                    v.situation = Some(s);
                }
            }
        }
        Ok(v)
    }
}

/// Decides `property` for `target` against `rules` by enumeration.
pub fn oracle_check(
    model: &Model,
    property: Property,
    rules: &[usize],
    target: &str,
    max_points: usize,
    horizon: u64,
) -> Result<Verdict, OracleError> {
    Oracle::new(model, rules, max_points, horizon)?.check(property, target)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sema::analyze;

    fn model(src: &str) -> Model {
        analyze(src).model().expect("valid source")
    }

    #[test]
    fn closed_form_counts() {
        assert_eq!(trace_count(3, 2, 2), 1 + 3 * 2 + 3 * 4);
        assert_eq!(binomial(5, 3), 10);
        assert_eq!(binomial(2, 3), 0);
    }

    #[test]
    fn scaled_floor_and_alarm_conflict() {
        let m = model(
            "def_start\n event Floor\n event Call\n event Alarm\n measure assents: boolean\ndef_end\n\
             rule_start\n r1 when Floor and (not assents) then not Call within 2 seconds\n \
             r3 when Alarm then Call within 1 seconds\nrule_end\n",
        );
        let v = oracle_check(&m, Property::Situational, &[0, 1], "r1", 2, 3).unwrap();
        assert_eq!(v.status, Status::IssueFound);
        assert_eq!(v.conflict_set.unwrap(), ["r1", "r3"]);
    }

    #[test]
    fn target_outside_rule_set() {
        let m = model("def_start\n event E\ndef_end\nrule_start\n r when E then E within 1 seconds\nrule_end\n");
        assert_eq!(
            oracle_check(&m, Property::Vacuous, &[], "r", 2, 3),
            Err(OracleError::TargetNotInRuleSet("r".into()))
        );
    }

    #[test]
    fn duplicate_rule_is_redundant() {
        let m = model(
            "def_start\n event E\n event F\n event G\n event H\n measure a: boolean\n measure b: boolean\n measure c: boolean\ndef_end\n\
             rule_start\n r when E then F within 2 seconds\n q when E then F within 2 seconds\nrule_end\n",
        );
        let v = oracle_check(&m, Property::Redundant, &[0, 1], "q", 2, 4).unwrap();
        assert_eq!(v.status, Status::IssueFound);
    }

    #[test]
    fn rejects_large_instances() {
        let m = model("def_start\n event E\n measure n: numeric\ndef_end\nrule_start\n r when E then E within 1 seconds\nrule_end\n");
        assert!(matches!(
            oracle_check(&m, Property::Vacuous, &[0], "r", 2, 3),
            Err(OracleError::InstanceTooLarge(_))
        ));
        let m = model("def_start\n event E\ndef_end\nrule_start\n r when E then E within 3 seconds\nrule_end\n");
        assert!(matches!(
            oracle_check(&m, Property::Vacuous, &[0], "r", 2, 3),
            Err(OracleError::InstanceTooLarge(_))
        ));
        let m = model("def_start\n event E\ndef_end\nrule_start\n r when E then E within 1 seconds\nrule_end\n");
        assert!(matches!(
            oracle_check(&m, Property::Vacuous, &[0], "r", 4, 3),
            Err(OracleError::InstanceTooLarge(_))
        ));
    }
}
