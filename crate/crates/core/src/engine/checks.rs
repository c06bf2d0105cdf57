use std::collections::BTreeSet;

use thiserror::Error;

use crate::sema::{Model, PatternKind};
use crate::semantics::{activation, prefix_feasible, trigger_holds, EventSet, MeasureValue, Trace, TracePoint};

use super::bounds::Bounds;
use super::domain::{distinct_valuations, rule_outcome, AbstractDomain, Outcome};
use super::search::{find_extension, find_trace, Budget, BudgetExhausted, Constraint};
use super::verdict::{Property, Status, Verdict};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CheckError {
    #[error("no {kind} named '{id}'")]
    UnknownTarget { kind: &'static str, id: String },
}

/// Runs one property against the whole rule set of the model.
pub fn check(model: &Model, property: Property, target: &str, bounds: Bounds) -> Result<Verdict, CheckError> {
    let rules: Vec<usize> = (0..model.rules.len()).collect();
    let unknown = |kind| CheckError::UnknownTarget {
        kind,
        id: target.to_string(),
    };
    let rule = || model.rule_index(target).ok_or_else(|| unknown("rule"));
    Ok(match property {
        Property::Vacuous => check_vacuous(model, &rules, rule()?, bounds),
        Property::Situational => check_situational(model, &rules, rule()?, bounds),
        Property::Redundant => check_redundant(model, &rules, rule()?, bounds),
        Property::Restrictive => {
            let p = model
                .purposes
                .iter()
                .position(|p| p.id == target)
                .ok_or_else(|| unknown("purpose"))?;
            check_restrictive(model, &rules, p, bounds)
        }
        Property::Insufficient => {
            let c = model
                .concerns
                .iter()
                .position(|p| p.id == target)
                .ok_or_else(|| unknown("concern"))?;
            check_insufficient(model, &rules, c, bounds)
        }
    })
}

fn verdict(property: Property, target: &str, bounds: Bounds) -> Verdict {
    Verdict {
        property,
        target: target.to_string(),
        status: Status::NoIssueWithinBounds,
        bounds,
        witness: None,
        situation: None,
        conflict_set: None,
        budget_exhausted: false,
        nodes: 0,
    }
}

fn run(model: &Model, constraint: &Constraint, bounds: Bounds) -> (Result<Option<Trace>, BudgetExhausted>, u64) {
    let mut budget = Budget::new(bounds.node_budget);
    let r = find_trace(model, constraint, bounds.max_points, bounds.horizon, &mut budget);
    (r, budget.used.min(budget.limit))
}

/// Issue when no trace satisfying `rules` triggers the target.
pub fn check_vacuous(model: &Model, rules: &[usize], target: usize, bounds: Bounds) -> Verdict {
    let mut v = verdict(Property::Vacuous, &model.rules[target].id, bounds);
    let (r, nodes) = run(
        model,
        &Constraint {
            must_satisfy: rules.to_vec(),
            must_trigger: vec![target],
            ..Constraint::default()
        },
        bounds,
    );
    v.nodes = nodes;
    match r {
        Ok(Some(t)) => v.witness = Some(t),
        Ok(None) => v.status = Status::IssueFound,
        Err(_) => v.budget_exhausted = true,
    }
    v
}

/// Issue when no trace satisfies the other rules while violating the target.
pub fn check_redundant(model: &Model, rules: &[usize], target: usize, bounds: Bounds) -> Verdict {
    let mut v = verdict(Property::Redundant, &model.rules[target].id, bounds);
    let (r, nodes) = run(
        model,
        &Constraint {
            must_satisfy: rules.iter().copied().filter(|&r| r != target).collect(),
            must_violate: Some(target),
            ..Constraint::default()
        },
        bounds,
    );
    v.nodes = nodes;
    match r {
        Ok(Some(t)) => v.witness = Some(t),
        Ok(None) => v.status = Status::IssueFound,
        Err(_) => v.budget_exhausted = true,
    }
    v
}

/// Issue when no trace satisfying the rules raises the purpose.
pub fn check_restrictive(model: &Model, rules: &[usize], purpose: usize, bounds: Bounds) -> Verdict {
    let mut v = verdict(Property::Restrictive, &model.purposes[purpose].id, bounds);
    let (r, nodes) = run(
        model,
        &Constraint {
            must_satisfy: rules.to_vec(),
            must_raise: Some((PatternKind::Purpose, purpose)),
            ..Constraint::default()
        },
        bounds,
    );
    v.nodes = nodes;
    match r {
        Ok(Some(t)) => v.witness = Some(t),
        Ok(None) => v.status = Status::IssueFound,
        Err(_) => v.budget_exhausted = true,
    }
    v
}

/// Issue when some trace satisfying the rules raises the concern.
pub fn check_insufficient(model: &Model, rules: &[usize], concern: usize, bounds: Bounds) -> Verdict {
    let mut v = verdict(Property::Insufficient, &model.concerns[concern].id, bounds);
    let (r, nodes) = run(
        model,
        &Constraint {
            must_satisfy: rules.to_vec(),
            must_raise: Some((PatternKind::Concern, concern)),
            ..Constraint::default()
        },
        bounds,
    );
    v.nodes = nodes;
    match r {
        Ok(Some(t)) => {
            v.status = Status::IssueFound;
            v.witness = Some(t);
        }
        Ok(None) => {}
        Err(_) => v.budget_exhausted = true,
    }
    v
}

/// Issue when some feasible situation triggering the target has no
/// extension satisfying the rules.
pub fn check_situational(model: &Model, rules: &[usize], target: usize, bounds: Bounds) -> Verdict {
    let mut v = verdict(Property::Situational, &model.rules[target].id, bounds);
    let mut budget = Budget::new(bounds.node_budget);
    let found = Situations::new(model, rules, target, bounds).find(&mut budget);
    v.nodes = budget.used.min(budget.limit);
    match found {
        Ok(Some(s)) => {
            let conflict = minimize_conflict(model, rules, &s, &bounds, &mut budget);
            v.nodes = budget.used.min(budget.limit);
            v.status = Status::IssueFound;
            v.conflict_set = Some(conflict.into_iter().map(|r| model.rules[r].id.clone()).collect());
            v.situation = Some(s);
        }
        Ok(None) => {}
        Err(_) => v.budget_exhausted = true,
    }
    v
}

/// Window length bound for the rules.
fn rules_max_deadline(model: &Model, rules: &[usize]) -> u64 {
    rules
        .iter()
        .flat_map(|&r| model.rules[r].responses())
        .map(|r| r.horizon_offset())
        .max()
        .unwrap_or(0)
}

/// Deletion-minimal subset of `rules` that still has no extension of the
/// situation.
fn minimize_conflict(
    model: &Model,
    rules: &[usize],
    situation: &Trace,
    bounds: &Bounds,
    budget: &mut Budget,
) -> Vec<usize> {
    let h_ext = bounds.extension_horizon(rules_max_deadline(model, rules));
    let mut set = rules.to_vec();
    for &r in rules {
        let rest: Vec<usize> = set.iter().copied().filter(|&x| x != r).collect();
        let mut scratch = Budget::new(budget.limit);
        if let Ok(None) = find_extension(model, &rest, situation, bounds.max_points, h_ext, &mut scratch) {
            set = rest;
        }
        budget.used += scratch.used;
    }
    set
}

/// Canonical enumeration of situations: first point at 0, later gaps in
/// `1..=D+1`, any subset of the events the rules mention.
struct Situations<'m> {
    model: &'m Model,
    rules: Vec<usize>,
    target: usize,
    bounds: Bounds,
    max_deadline: u64,
    h_ext: u64,
    events: Vec<usize>,
    domain: AbstractDomain,
    offsets: Vec<u64>,
}

impl<'m> Situations<'m> {
    fn new(model: &'m Model, rules: &[usize], target: usize, bounds: Bounds) -> Self {
        let mut events = BTreeSet::new();
        let mut offsets = BTreeSet::from([0u64]);
        for &r in rules.iter().chain([&target]) {
            let rule = &model.rules[r];
            events.insert(rule.trigger.event);
            for resp in rule.responses() {
                let mut lo = 0;
                for link in resp.chain() {
                    events.insert(link.event);
                    lo += link.deadline;
                    offsets.insert(lo);
                }
            }
        }
        let max_deadline = rules_max_deadline(model, rules);
        Situations {
            model,
            rules: rules.to_vec(),
            target,
            bounds,
            max_deadline,
            h_ext: bounds.extension_horizon(max_deadline),
            events: events.into_iter().collect(),
            domain: AbstractDomain::new(model),
            offsets: offsets.into_iter().collect(),
        }
    }

    /// Shortest situations first; each prefix is tested at its own depth.
    fn find(&self, budget: &mut Budget) -> Result<Option<Trace>, BudgetExhausted> {
        for depth in 1..=self.bounds.max_points {
            let mut prefix = Trace::empty(self.bounds.horizon);
            if let Some(s) = self.dfs(&mut prefix, depth, false, budget)? {
                return Ok(Some(s));
            }
        }
        Ok(None)
    }

    fn dfs(
        &self,
        prefix: &mut Trace,
        depth: usize,
        triggered: bool,
        budget: &mut Budget,
    ) -> Result<Option<Trace>, BudgetExhausted> {
        let times: Vec<u64> = match prefix.last_time() {
            None => vec![0],
            Some(_) => self.gaps(prefix),
        };
        let n = self.events.len();
        let mut subsets: Vec<u64> = (0..1u64 << n).collect();
        subsets.sort_by_key(|m| m.count_ones());
        for t in times {
            for &mask in &subsets {
                let events: EventSet = (0..n)
                    .filter(|b| mask & (1 << b) != 0)
                    .map(|b| self.events[b])
                    .collect();
                for valuation in self.valuations(&events) {
                    budget.tick()?;
                    let point = TracePoint {
                        timestamp: t,
                        events: events.clone(),
                        valuation,
                    };
                    let now = triggered || trigger_holds(&self.model.rules[self.target].trigger, &point);
                    prefix.points.push(point);
                    if prefix_feasible(self.model, &self.rules, prefix) {
                        if prefix.points.len() < depth {
                            if let Some(s) = self.dfs(prefix, depth, now, budget)? {
                                return Ok(Some(s));
                            }
                        } else if now {
                            let ext = find_extension(
                                self.model,
                                &self.rules,
                                prefix,
                                self.bounds.max_points,
                                self.h_ext,
                                budget,
                            )?;
                            if ext.is_none() {
                                return Ok(Some(prefix.clone()));
                            }
                        }
                    }
                    prefix.points.pop();
                }
            }
        }
        Ok(None)
    }

    /// Next timestamps, window boundaries first.
    fn gaps(&self, prefix: &Trace) -> Vec<u64> {
        let last = prefix.last_time().unwrap_or(0);
        let cap = (last + self.max_deadline + 1).min(self.bounds.horizon);
        let mut critical = BTreeSet::new();
        for p in &prefix.points {
            for &c in &self.offsets {
                for t in [p.timestamp + c, p.timestamp + c + 1] {
                    if t > last && t <= cap {
                        critical.insert(t);
                    }
                }
            }
        }
        let mut out: Vec<u64> = critical.iter().copied().collect();
        if last < cap {
            for t in [last + 1, cap] {
                if !critical.contains(&t) {
                    out.push(t);
                    critical.insert(t);
                }
            }
        }
        out.extend((last + 1..=cap).filter(|t| !critical.contains(t)));
        out
    }

    fn valuations(&self, events: &EventSet) -> Vec<Vec<MeasureValue>> {
        let model = self.model;
        let mut rules: Vec<usize> = self
            .rules
            .iter()
            .chain([&self.target])
            .copied()
            .filter(|&r| events.contains(model.rules[r].trigger.event))
            .collect();
        rules.sort_unstable();
        rules.dedup();
        let mut measures: Vec<usize> = rules
            .iter()
            .flat_map(|&r| model.rules[r].condition_measures())
            .collect();
        measures.sort_unstable();
        measures.dedup();
        distinct_valuations(&self.domain, model, &measures, |v| {
            let point = TracePoint {
                timestamp: 0,
                events: events.clone(),
                valuation: v.to_vec(),
            };
            rules
                .iter()
                .map(|&r| rule_outcome(activation(&model.rules[r], &point)))
                .collect::<Vec<Outcome>>()
        })
    }
}
