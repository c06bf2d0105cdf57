use std::fmt;

use serde_json::{json, Map, Value};
use thiserror::Error;

use crate::sema::{MeasureKind, Model};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum MeasureValue {
    Bool(bool),
    Num(i64),
    /// Ordinal of a scale label, in declaration order.
    Scale(u32),
}

impl fmt::Display for MeasureValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MeasureValue::Bool(b) => write!(f, "{b}"),
            MeasureValue::Num(n) => write!(f, "{n}"),
            MeasureValue::Scale(o) => write!(f, "#{o}"),
        }
    }
}

/// Set of event indices.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default, PartialOrd, Ord)]
pub struct EventSet {
    words: Vec<u64>,
}

impl EventSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, event: usize) {
        let (w, b) = (event / 64, event % 64);
        if self.words.len() <= w {
            self.words.resize(w + 1, 0);
        }
        self.words[w] |= 1 << b;
    }

    pub fn contains(&self, event: usize) -> bool {
        self.words.get(event / 64).is_some_and(|w| w & (1 << (event % 64)) != 0)
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|w| *w == 0)
    }

    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.words
            .iter()
            .enumerate()
            .flat_map(|(i, w)| (0..64).filter(move |b| w & (1 << b) != 0).map(move |b| i * 64 + b))
    }
}

impl FromIterator<usize> for EventSet {
    fn from_iter<T: IntoIterator<Item = usize>>(iter: T) -> Self {
        let mut s = EventSet::new();
        for e in iter {
            s.insert(e);
        }
        s
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TracePoint {
    pub timestamp: u64,
    pub events: EventSet,
    /// One value per declared measure, indexed like [`Model::measures`].
    pub valuation: Vec<MeasureValue>,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Trace {
    pub points: Vec<TracePoint>,
    pub horizon: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TraceError {
    #[error("timestamps must be strictly increasing (point {0})")]
    NotIncreasing(usize),
    #[error("timestamp {timestamp} exceeds the horizon {horizon}")]
    BeyondHorizon { timestamp: u64, horizon: u64 },
    #[error("point {point} has {found} measure values, expected {expected}")]
    Valuation {
        point: usize,
        found: usize,
        expected: usize,
    },
    #[error("unknown event '{0}'")]
    UnknownEvent(String),
    #[error("unknown measure '{0}'")]
    UnknownMeasure(String),
    #[error("bad value for measure '{0}'")]
    BadValue(String),
    #[error("malformed trace JSON: {0}")]
    Malformed(&'static str),
}

impl Trace {
    pub fn empty(horizon: u64) -> Self {
        Trace {
            points: Vec::new(),
            horizon,
        }
    }

    pub fn last_time(&self) -> Option<u64> {
        self.points.last().map(|p| p.timestamp)
    }

    /// Checks the structural invariants against a model.
    pub fn validate(&self, model: &Model) -> Result<(), TraceError> {
        for (i, p) in self.points.iter().enumerate() {
            if i > 0 && p.timestamp <= self.points[i - 1].timestamp {
                return Err(TraceError::NotIncreasing(i));
            }
            if p.valuation.len() != model.measures.len() {
                return Err(TraceError::Valuation {
                    point: i,
                    found: p.valuation.len(),
                    expected: model.measures.len(),
                });
            }
            if let Some(e) = p.events.iter().find(|e| *e >= model.events.len()) {
                return Err(TraceError::UnknownEvent(format!("#{e}")));
            }
        }
        match self.last_time() {
            Some(t) if t > self.horizon => Err(TraceError::BeyondHorizon {
                timestamp: t,
                horizon: self.horizon,
            }),
            _ => Ok(()),
        }
    }

    /// Table-shaped JSON: one row per point with its events and measures.
    pub fn to_json(&self, model: &Model) -> Value {
        self.to_json_filtered(model, None)
    }

    /// Like [`Trace::to_json`], keeping only the listed measures when
    /// `shown` is given.
    pub fn to_json_filtered(&self, model: &Model, shown: Option<&[usize]>) -> Value {
        let rows: Vec<Value> = self
            .points
            .iter()
            .map(|p| {
                let events: Vec<&str> = p.events.iter().map(|e| model.events[e].as_str()).collect();
                let mut measures = Map::new();
                for (m, v) in p.valuation.iter().enumerate() {
                    if shown.is_some_and(|s| !s.contains(&m)) {
                        continue;
                    }
                    let value = match (v, &model.measures[m].kind) {
                        (MeasureValue::Bool(b), _) => json!(b),
                        (MeasureValue::Num(n), _) => json!(n),
                        (MeasureValue::Scale(_), _) => json!(model.format_value(m, v)),
                    };
                    measures.insert(model.measures[m].name.clone(), value);
                }
                json!({"t": p.timestamp, "events": events, "measures": measures})
            })
            .collect();
        Value::Array(rows)
    }

    pub fn from_json(model: &Model, rows: &Value, horizon: u64) -> Result<Trace, TraceError> {
        let rows = rows
            .as_array()
            .ok_or(TraceError::Malformed("expected an array of points"))?;
        let mut points = Vec::with_capacity(rows.len());
        for row in rows {
            let timestamp = row["t"].as_u64().ok_or(TraceError::Malformed("missing 't'"))?;
            let mut events = EventSet::new();
            for e in row["events"].as_array().map(Vec::as_slice).unwrap_or_default() {
                let name = e.as_str().ok_or(TraceError::Malformed("event names must be strings"))?;
                let idx = model
                    .event_index(name)
                    .ok_or_else(|| TraceError::UnknownEvent(name.to_string()))?;
                events.insert(idx);
            }
            let mut valuation: Vec<MeasureValue> = (0..model.measures.len()).map(|m| model.default_value(m)).collect();
            if let Some(obj) = row["measures"].as_object() {
                for (name, v) in obj {
                    let m = model
                        .measure_index(name)
                        .ok_or_else(|| TraceError::UnknownMeasure(name.clone()))?;
                    let bad = || TraceError::BadValue(name.clone());
                    valuation[m] = match &model.measures[m].kind {
                        MeasureKind::Boolean => MeasureValue::Bool(v.as_bool().ok_or_else(bad)?),
                        MeasureKind::Numeric => MeasureValue::Num(v.as_i64().ok_or_else(bad)?),
                        MeasureKind::Scale(labels) => {
                            let label = v.as_str().ok_or_else(bad)?;
                            let o = labels.iter().position(|l| l == label).ok_or_else(bad)?;
                            MeasureValue::Scale(o as u32)
                        }
                    };
                }
            }
            points.push(TracePoint {
                timestamp,
                events,
                valuation,
            });
        }
        let trace = Trace { points, horizon };
        trace.validate(model)?;
        Ok(trace)
    }

    /// Plain-text table, one line per point.
    pub fn to_table(&self, model: &Model, shown: Option<&[usize]>) -> String {
        let mut out = String::new();
        for p in &self.points {
            out.push_str(&format_point(model, p, shown));
            out.push('\n');
        }
        out
    }
}

pub fn format_point(model: &Model, p: &TracePoint, shown: Option<&[usize]>) -> String {
    let events: Vec<&str> = p.events.iter().map(|e| model.events[e].as_str()).collect();
    let mut line = format!("t={}: events={{{}}}", p.timestamp, events.join(", "));
    let measures: Vec<String> = p
        .valuation
        .iter()
        .enumerate()
        .filter(|(m, _)| shown.is_none_or(|s| s.contains(m)))
        .map(|(m, v)| format!("{}={}", model.measures[m].name, model.format_value(m, v)))
        .collect();
    if !measures.is_empty() {
        line.push_str("; ");
        line.push_str(&measures.join(", "));
    }
    line
}
