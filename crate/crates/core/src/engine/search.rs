//! Bounded trace search.
//!
//! Traces are built point by point. Timestamps stay symbolic: each point is
//! a variable in a difference-bound matrix, and every time a point carries
//! the event of an open window the search branches on whether the point
//! falls inside that window. A goal node is concretised with the earliest
//! timestamps the matrix allows and re-checked with the trace semantics.

use thiserror::Error;

use crate::sema::{Model, PatternKind, PatternModel, ResponseModel};
use crate::semantics::{
    activation, raises, satisfies_all, trigger_holds, violates, Activation, EventSet, MeasureValue, Trace, TracePoint,
};
use crate::syntax::Polarity;

use super::dbm::Dbm;
use super::domain::{cond_holds, distinct_valuations, rule_outcome, AbstractDomain, Outcome};

/// What a searched trace must do.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Constraint {
    /// Rules the trace must satisfy.
    pub must_satisfy: Vec<usize>,
    /// Rules whose triggers must all hold at one common point.
    pub must_trigger: Vec<usize>,
    pub must_raise: Option<(PatternKind, usize)>,
    /// Rule the trace must violate.
    pub must_violate: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
#[error("search budget of {limit} nodes exhausted")]
pub struct BudgetExhausted {
    pub limit: u64,
}

/// Node counter shared by the searches of one check.
#[derive(Debug, Clone, Copy)]
pub struct Budget {
    pub limit: u64,
    pub used: u64,
}

impl Budget {
    pub fn new(limit: u64) -> Self {
        Budget { limit, used: 0 }
    }

    pub fn tick(&mut self) -> Result<(), BudgetExhausted> {
        self.used += 1;
        if self.used > self.limit {
            Err(BudgetExhausted { limit: self.limit })
        } else {
            Ok(())
        }
    }
}

#[derive(Debug, Clone)]
struct Win {
    point: usize,
    lo: u64,
    hi: u64,
    event: usize,
    occurred: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Role {
    Satisfy,
    Violate,
}

#[derive(Debug, Clone)]
struct Ob {
    role: Role,
    demands: Vec<(Polarity, usize)>,
}

#[derive(Debug, Clone)]
struct Instance {
    /// Polarity, window, and whether the window closes by the horizon.
    demands: Vec<(Polarity, usize, bool)>,
}

#[derive(Debug, Clone)]
struct State {
    zone: Dbm,
    points: Vec<(EventSet, Vec<MeasureValue>)>,
    wins: Vec<Win>,
    obs: Vec<Ob>,
    instances: Vec<Instance>,
    triggered: bool,
}

impl State {
    fn new() -> Self {
        State {
            zone: Dbm::new(),
            points: Vec::new(),
            wins: Vec::new(),
            obs: Vec::new(),
            instances: Vec::new(),
            triggered: false,
        }
    }

    fn var(point: usize) -> usize {
        point + 1
    }

    fn last_var(&self) -> usize {
        self.points.len()
    }

    fn closed(&self, w: &Win) -> bool {
        !self.points.is_empty() && self.zone.bound(self.last_var(), Self::var(w.point)) <= -(w.hi as i64)
    }

    fn win_id(&mut self, point: usize, lo: u64, hi: u64, event: usize, present: bool) -> usize {
        if let Some(i) = self
            .wins
            .iter()
            .position(|w| w.point == point && w.lo == lo && w.hi == hi && w.event == event)
        {
            return i;
        }
        self.wins.push(Win {
            point,
            lo,
            hi,
            event,
            occurred: lo == 0 && present,
        });
        self.wins.len() - 1
    }
}

fn chain_windows(response: &ResponseModel) -> Vec<(Polarity, usize, u64, u64)> {
    let mut out = Vec::new();
    let mut lo = 0u64;
    for r in response.chain() {
        let hi = lo.saturating_add(r.deadline);
        out.push((r.polarity, r.event, lo, hi));
        lo = hi;
    }
    out
}

pub(crate) struct Searcher<'m> {
    model: &'m Model,
    domain: AbstractDomain,
    constraint: Constraint,
    pattern: Option<&'m PatternModel>,
    horizon: u64,
    /// Timestamps of a fixed prefix, replayed before searching.
    prefix: Vec<u64>,
    /// Events that the constraint may need at any point.
    static_pool: Vec<usize>,
}

impl<'m> Searcher<'m> {
    pub fn new(model: &'m Model, constraint: Constraint, horizon: u64) -> Self {
        let pattern = constraint.must_raise.map(|(kind, i)| match kind {
            PatternKind::Concern => &model.concerns[i],
            PatternKind::Purpose => &model.purposes[i],
        });
        let mut pool = Vec::new();
        for &r in &constraint.must_trigger {
            pool.push(model.rules[r].trigger.event);
        }
        if let Some(p) = pattern {
            pool.push(p.trigger.event);
            pool.extend(
                p.response
                    .chain()
                    .filter(|r| r.polarity == Polarity::Require)
                    .map(|r| r.event),
            );
        }
        if let Some(r) = constraint.must_violate {
            let rule = &model.rules[r];
            pool.push(rule.trigger.event);
            pool.extend(
                rule.responses()
                    .flat_map(|r| r.chain())
                    .filter(|r| r.polarity == Polarity::Forbid)
                    .map(|r| r.event),
            );
        }
        pool.sort_unstable();
        pool.dedup();
        Searcher {
            model,
            domain: AbstractDomain::new(model),
            constraint,
            pattern,
            horizon,
            prefix: Vec::new(),
            static_pool: pool,
        }
    }

    /// Searches for at most `max_points` points.
    pub fn find(&self, max_points: usize, budget: &mut Budget) -> Result<Option<Trace>, BudgetExhausted> {
        for limit in 1..=max_points {
            if let Some(t) = self.dfs(State::new(), limit, budget)? {
                return Ok(Some(t));
            }
        }
        Ok(None)
    }

    /// Searches for an extension of `prefix` by at most `extra` points that
    /// satisfies the rules of the constraint.
    pub fn extend(
        mut self,
        prefix: &Trace,
        extra: usize,
        budget: &mut Budget,
    ) -> Result<Option<Trace>, BudgetExhausted> {
        self.prefix = prefix.points.iter().map(|p| p.timestamp).collect();
        let mut states = vec![State::new()];
        for p in &prefix.points {
            states = states
                .into_iter()
                .flat_map(|s| self.add_point(&s, &p.events, &p.valuation))
                .collect();
        }
        debug_assert!(states.len() <= 1);
        let Some(root) = states.pop() else {
            return Ok(None);
        };
        if self.pruned(&root) {
            return Ok(None);
        }
        for limit in prefix.points.len()..=prefix.points.len() + extra {
            if let Some(t) = self.dfs(root.clone(), limit, budget)? {
                return Ok(Some(t));
            }
        }
        Ok(None)
    }

    fn dfs(&self, state: State, limit: usize, budget: &mut Budget) -> Result<Option<Trace>, BudgetExhausted> {
        if let Some(t) = self.goal(&state) {
            return Ok(Some(t));
        }
        if state.points.len() >= limit {
            return Ok(None);
        }
        for (events, valuation) in self.candidates(&state) {
            budget.tick()?;
            for next in self.add_point(&state, &events, &valuation) {
                if self.pruned(&next) {
                    continue;
                }
                if let Some(t) = self.dfs(next, limit, budget)? {
                    return Ok(Some(t));
                }
            }
        }
        Ok(None)
    }

    fn candidates(&self, state: &State) -> Vec<(EventSet, Vec<MeasureValue>)> {
        let model = self.model;
        let mut pool = self.static_pool.clone();
        for ob in state.obs.iter().filter(|o| o.role == Role::Satisfy) {
            let settled = ob
                .demands
                .iter()
                .any(|(p, w)| *p == Polarity::Require && state.wins[*w].occurred);
            if settled {
                continue;
            }
            for (p, w) in &ob.demands {
                let win = &state.wins[*w];
                if *p == Polarity::Require && !state.closed(win) {
                    pool.push(win.event);
                }
            }
        }
        // Immediate responses of rules the pool may trigger.
        let mut i = 0;
        pool.sort_unstable();
        pool.dedup();
        while i < pool.len() {
            let e = pool[i];
            for &r in &self.constraint.must_satisfy {
                let rule = &model.rules[r];
                if rule.trigger.event != e {
                    continue;
                }
                for resp in rule.responses() {
                    for (p, ev, lo, _) in chain_windows(resp) {
                        if lo == 0 && p == Polarity::Require && !pool.contains(&ev) {
                            pool.push(ev);
                        }
                    }
                }
            }
            i += 1;
        }
        pool.sort_unstable();

        let mut subsets: Vec<Vec<usize>> = (1u64..(1 << pool.len()))
            .map(|mask| {
                (0..pool.len())
                    .filter(|b| mask & (1 << b) != 0)
                    .map(|b| pool[b])
                    .collect()
            })
            .collect();
        subsets.sort_by_key(Vec::len);
        let mut out = Vec::new();
        for s in subsets {
            let events: EventSet = s.iter().copied().collect();
            for v in self.valuations(&events) {
                out.push((events.clone(), v));
            }
        }
        out
    }

    fn watched_rules(&self) -> impl Iterator<Item = usize> + '_ {
        self.constraint
            .must_satisfy
            .iter()
            .chain(&self.constraint.must_trigger)
            .chain(&self.constraint.must_violate)
            .copied()
    }

    fn valuations(&self, events: &EventSet) -> Vec<Vec<MeasureValue>> {
        let model = self.model;
        let mut measures = Vec::new();
        let mut rules: Vec<usize> = self
            .watched_rules()
            .filter(|&r| events.contains(model.rules[r].trigger.event))
            .collect();
        rules.sort_unstable();
        rules.dedup();
        for &r in &rules {
            measures.extend(model.rules[r].condition_measures());
        }
        let pattern = self.pattern.filter(|p| events.contains(p.trigger.event));
        if let Some(c) = pattern.and_then(|p| p.trigger.condition.as_ref()) {
            c.for_each_measure(&mut |m| measures.push(m));
        }
        measures.sort_unstable();
        measures.dedup();
        distinct_valuations(&self.domain, model, &measures, |v| {
            let point = TracePoint {
                timestamp: 0,
                events: events.clone(),
                valuation: v.to_vec(),
            };
            let mut sig: Vec<Outcome> = rules
                .iter()
                .map(|&r| rule_outcome(activation(&model.rules[r], &point)))
                .collect();
            if let Some(p) = pattern {
                sig.push(Outcome::Holds(cond_holds(p.trigger.condition.as_ref(), v)));
            }
            sig
        })
    }

    /// All consistent ways to append a point.
    fn add_point(&self, state: &State, events: &EventSet, valuation: &[MeasureValue]) -> Vec<State> {
        let model = self.model;
        let k = state.points.len();
        let mut base = state.clone();
        let v = base.zone.add_var();
        let ok = match self.prefix.get(k) {
            Some(&t) => base.zone.constrain_range(0, v, t as i64, t as i64),
            None if k == 0 => base.zone.constrain_range(0, v, 0, 0),
            None => base.zone.constrain(v, v - 1, -1) && base.zone.constrain(0, v, self.horizon as i64),
        };
        if !ok {
            return Vec::new();
        }
        base.points.push((events.clone(), valuation.to_vec()));

        // Branch on the open windows this point may fall into.
        let open: Vec<usize> = (0..base.wins.len())
            .filter(|&i| {
                let w = &base.wins[i];
                !w.occurred && events.contains(w.event)
            })
            .collect();
        let mut states = vec![base];
        for wi in open {
            let mut next = Vec::new();
            for s in states {
                let w = s.wins[wi].clone();
                let b = State::var(w.point);
                let mut inside = s.clone();
                if inside.zone.constrain_range(b, v, w.lo as i64, w.hi as i64) {
                    inside.wins[wi].occurred = true;
                    next.push(inside);
                }
                if w.lo > 0 {
                    let mut before = s.clone();
                    if before.zone.constrain(b, v, w.lo as i64 - 1) {
                        next.push(before);
                    }
                }
                let mut after = s;
                if after.zone.constrain(v, b, -(w.hi as i64) - 1) {
                    next.push(after);
                }
            }
            states = next;
        }

        let point = TracePoint {
            timestamp: 0,
            events: events.clone(),
            valuation: valuation.to_vec(),
        };
        let mut roles: Vec<(Role, usize)> = self
            .constraint
            .must_satisfy
            .iter()
            .map(|&r| (Role::Satisfy, r))
            .collect();
        if let Some(r) = self.constraint.must_violate {
            roles.push((Role::Violate, r));
        }
        let triggered = !self.constraint.must_trigger.is_empty()
            && self
                .constraint
                .must_trigger
                .iter()
                .all(|&r| trigger_holds(&model.rules[r].trigger, &point));
        for s in &mut states {
            for &(role, r) in &roles {
                if let Activation::Activated { response, .. } = activation(&model.rules[r], &point) {
                    let demands = chain_windows(response)
                        .into_iter()
                        .map(|(p, ev, lo, hi)| (p, s.win_id(k, lo, hi, ev, events.contains(ev))))
                        .collect();
                    s.obs.push(Ob { role, demands });
                }
            }
            s.triggered |= triggered;
        }

        let Some(p) = self.pattern.filter(|p| trigger_holds(&p.trigger, &point)) else {
            return states;
        };
        let mut out = Vec::new();
        for s in states {
            let mut partial = vec![(s, Vec::new())];
            for (pol, ev, lo, hi) in chain_windows(&p.response) {
                let mut next = Vec::new();
                for (mut s, mut demands) in partial {
                    let w = s.win_id(k, lo, hi, ev, events.contains(ev));
                    if pol == Polarity::Require || hi > self.horizon {
                        demands.push((pol, w, false));
                        next.push((s, demands));
                        continue;
                    }
                    let slack = (self.horizon - hi) as i64;
                    let mut closes = s.clone();
                    if closes.zone.constrain(0, v, slack) {
                        let mut d = demands.clone();
                        d.push((pol, w, true));
                        next.push((closes, d));
                    }
                    if s.zone.constrain(v, 0, -slack - 1) {
                        demands.push((pol, w, false));
                        next.push((s, demands));
                    }
                }
                partial = next;
            }
            for (mut s, demands) in partial {
                s.instances.push(Instance { demands });
                out.push(s);
            }
        }
        out
    }

    /// Sound dead-end detection.
    fn pruned(&self, s: &State) -> bool {
        let failed = |pol: Polarity, w: usize| {
            let win = &s.wins[w];
            match pol {
                Polarity::Forbid => win.occurred,
                Polarity::Require => !win.occurred && s.closed(win),
            }
        };
        let satisfy = || s.obs.iter().filter(|o| o.role == Role::Satisfy);
        if satisfy().any(|o| o.demands.iter().all(|&(p, w)| failed(p, w))) {
            return true;
        }
        // A pending requirement whose remaining times are all forbidden.
        let last = s.last_var();
        for r in satisfy().filter(|o| o.demands.len() == 1 && o.demands[0].0 == Polarity::Require) {
            let rw = &s.wins[r.demands[0].1];
            if rw.occurred {
                continue;
            }
            let rv = State::var(rw.point);
            for f in satisfy().filter(|o| o.demands.len() == 1 && o.demands[0].0 == Polarity::Forbid) {
                let fw = &s.wins[f.demands[0].1];
                if fw.event != rw.event {
                    continue;
                }
                let fv = State::var(fw.point);
                let starts_early =
                    s.zone.bound(last, fv) <= 1 - fw.lo as i64 || s.zone.bound(rv, fv) <= rw.lo as i64 - fw.lo as i64;
                let ends_late = s.zone.bound(fv, rv) <= fw.hi as i64 - rw.hi as i64;
                if starts_early && ends_late {
                    return true;
                }
            }
        }
        false
    }

    fn goal(&self, s: &State) -> Option<Trace> {
        let c = &self.constraint;
        let fulfilled = |pol: Polarity, w: usize| match pol {
            Polarity::Require => s.wins[w].occurred,
            Polarity::Forbid => !s.wins[w].occurred,
        };
        let ok = s
            .obs
            .iter()
            .filter(|o| o.role == Role::Satisfy)
            .all(|o| o.demands.iter().any(|&(p, w)| fulfilled(p, w)))
            && (c.must_trigger.is_empty() || s.triggered)
            && (self.pattern.is_none()
                || s.instances.iter().any(|i| {
                    i.demands.iter().any(|&(p, w, closes)| match p {
                        Polarity::Require => s.wins[w].occurred,
                        Polarity::Forbid => closes && !s.wins[w].occurred,
                    })
                }))
            && (c.must_violate.is_none()
                || s.obs
                    .iter()
                    .filter(|o| o.role == Role::Violate)
                    .any(|o| o.demands.iter().all(|&(p, w)| !fulfilled(p, w))));
        if !ok {
            return None;
        }
        let times = s.zone.earliest();
        let trace = Trace {
            points: s
                .points
                .iter()
                .enumerate()
                .map(|(k, (events, valuation))| TracePoint {
                    timestamp: times[State::var(k)] as u64,
                    events: events.clone(),
                    valuation: valuation.clone(),
                })
                .collect(),
            horizon: self.horizon,
        };
        if self.validate(&trace) {
            Some(trace)
        } else {
            debug_assert!(false, "symbolic goal failed to re-validate: {trace:?}");
            None
        }
    }

    fn validate(&self, trace: &Trace) -> bool {
        let model = self.model;
        let c = &self.constraint;
        satisfies_all(model, &c.must_satisfy, trace)
            && (c.must_trigger.is_empty()
                || trace.points.iter().any(|p| {
                    c.must_trigger
                        .iter()
                        .all(|&r| trigger_holds(&model.rules[r].trigger, p))
                }))
            && self.pattern.is_none_or(|p| raises(p, trace))
            && c.must_violate.is_none_or(|r| violates(model, r, trace))
    }
}

/// Searches for a trace meeting `constraint` with at most `max_points`
/// points and timestamps up to `horizon`.
pub fn find_trace(
    model: &Model,
    constraint: &Constraint,
    max_points: usize,
    horizon: u64,
    budget: &mut Budget,
) -> Result<Option<Trace>, BudgetExhausted> {
    Searcher::new(model, constraint.clone(), horizon).find(max_points, budget)
}

/// Searches for an extension of `prefix` that satisfies `rules`, adding at
/// most `extra` points with timestamps up to `horizon`.
pub fn find_extension(
    model: &Model,
    rules: &[usize],
    prefix: &Trace,
    extra: usize,
    horizon: u64,
    budget: &mut Budget,
) -> Result<Option<Trace>, BudgetExhausted> {
    let constraint = Constraint {
        must_satisfy: rules.to_vec(),
        ..Constraint::default()
    };
    Searcher::new(model, constraint, horizon).extend(prefix, extra, budget)
}
