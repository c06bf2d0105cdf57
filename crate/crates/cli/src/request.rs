//! Check requests shared by the command line and the HTTP service.

use std::time::Instant;

use serde::Deserialize;
use serde_json::{json, Value};
use sleec_core::diagnostics::{build_conflict_diagnosis, build_insufficiency_diagnosis, Diagnosis, RenderMode};
use sleec_core::engine::{check, Bounds, Property, Verdict};
use sleec_core::sema::{analyze, Analysis, Model};

/// Property selector; `All` runs every property.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Selector {
    One(Property),
    All,
}

impl Selector {
    pub fn parse(s: &str) -> Option<Selector> {
        if s == "all" {
            Some(Selector::All)
        } else {
            Property::parse(s).map(Selector::One)
        }
    }

    fn properties(self) -> Vec<Property> {
        match self {
            Selector::One(p) => vec![p],
            Selector::All => Property::ALL.to_vec(),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoundsOverride {
    pub max_points: Option<usize>,
    pub horizon: Option<u64>,
    pub budget: Option<u64>,
}

impl BoundsOverride {
    pub fn apply(&self, model: &Model) -> Bounds {
        let mut b = Bounds::default_for(model);
        if let Some(n) = self.max_points {
            b.max_points = n;
        }
        if let Some(h) = self.horizon {
            b.horizon = h;
        }
        if let Some(n) = self.budget {
            b.node_budget = n;
        }
        b
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CheckRequest {
    pub text: String,
    pub property: Selector,
    /// `None` or `"all"` checks every applicable target.
    pub target: Option<String>,
    pub bounds: BoundsOverride,
    pub mode: RenderMode,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RequestError {
    UnknownTarget(String),
}

impl std::fmt::Display for RequestError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            RequestError::UnknownTarget(t) => write!(f, "target '{t}' does not name a rule, concern or purpose"),
        }
    }
}

pub struct Outcome {
    pub analysis: Analysis,
    pub model: Option<Model>,
    pub results: Vec<(Verdict, Option<Diagnosis>)>,
    pub mode: RenderMode,
    pub elapsed_ms: f64,
}

impl Outcome {
    pub fn has_errors(&self) -> bool {
        self.analysis.has_errors()
    }

    pub fn has_issues(&self) -> bool {
        self.results.iter().any(|(v, _)| v.is_issue())
    }

    pub fn to_json(&self) -> Value {
        let mode = self.mode;
        let verdicts: Vec<Value> = match &self.model {
            Some(m) => self
                .results
                .iter()
                .map(|(v, d)| {
                    let mut j = v.to_json(m);
                    j["diagnosis"] = d.as_ref().map_or(Value::Null, |d| d.to_json(m, mode));
                    j
                })
                .collect(),
            None => Vec::new(),
        };
        json!({
            "diagnostics": self.analysis.diagnostics(),
            "verdicts": verdicts,
            "timing": {"elapsed_ms": self.elapsed_ms},
        })
    }
}

fn targets(model: &Model, property: Property) -> Vec<String> {
    match property {
        Property::Restrictive => model.purposes.iter().map(|p| p.id.clone()).collect(),
        Property::Insufficient => model.concerns.iter().map(|c| c.id.clone()).collect(),
        _ => model.rules.iter().map(|r| r.id.clone()).collect(),
    }
}

/// Attaches a diagnosis to issue verdicts that have one.
pub fn diagnose(analysis: &Analysis, model: &Model, v: &Verdict) -> Option<Diagnosis> {
    if !v.is_issue() {
        return None;
    }
    match v.property {
        Property::Situational => build_conflict_diagnosis(v, &analysis.document, model)
            .ok()
            .map(Diagnosis::Conflict),
        Property::Insufficient => build_insufficiency_diagnosis(v, model)
            .ok()
            .map(Diagnosis::Insufficiency),
        _ => None,
    }
}

pub fn run(req: &CheckRequest) -> Result<Outcome, RequestError> {
    let start = Instant::now();
    let analysis = analyze(&req.text);
    let model = analysis.model();
    let mut results = Vec::new();
    if let Some(m) = &model {
        let bounds = req.bounds.apply(m);
        let specific = req.target.as_deref().filter(|t| *t != "all");
        let mut matched = specific.is_none();
        for property in req.property.properties() {
            let ids = match specific {
                Some(t) if targets(m, property).iter().any(|id| id == t) => vec![t.to_string()],
                Some(_) => continue,
                None => targets(m, property),
            };
            matched = true;
            for id in ids {
                let v = check(m, property, &id, bounds).expect("target taken from the model");
                let d = diagnose(&analysis, m, &v);
                results.push((v, d));
            }
        }
        if !matched {
            return Err(RequestError::UnknownTarget(specific.unwrap_or_default().to_string()));
        }
    }
    Ok(Outcome {
        analysis,
        model,
        results,
        mode: req.mode,
        elapsed_ms: start.elapsed().as_secs_f64() * 1000.0,
    })
}
