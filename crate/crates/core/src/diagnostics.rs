//! Stakeholder-facing diagnoses built from verdicts.
//!
//! A situational conflict shows only the measures that occur in the
//! triggers or defeaters of the conflicting rules. An insufficiency lists
//! the rules sharing events with the concern and shows only the concern's
//! measures.

use serde::Serialize;
use serde_json::{json, Value};
use thiserror::Error;

use crate::engine::{Property, Status, Verdict};
use crate::sema::Model;
use crate::semantics::{
    activation, format_point, prefix_feasible, raises, satisfies_all, trigger_holds, Activation, Trace,
};
use crate::syntax::{printer, Document, Span};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DiagnosisError {
    #[error("malformed verdict: {0}")]
    MalformedVerdict(String),
}

fn malformed(msg: impl Into<String>) -> DiagnosisError {
    DiagnosisError::MalformedVerdict(msg.into())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Highlight {
    pub rule: String,
    pub span: Span,
    pub clause: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConflictDiagnosis {
    pub target: String,
    pub conflicting_rules: Vec<String>,
    pub highlighted_clauses: Vec<Highlight>,
    pub situation: Trace,
    /// Measure indices, in declaration order.
    pub shown_measures: Vec<usize>,
    pub raw_measure_count: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RelatedRule {
    pub rule: String,
    pub events: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InsufficiencyDiagnosis {
    pub concern: String,
    pub witness: Trace,
    pub related_rules: Vec<RelatedRule>,
    pub shown_measures: Vec<usize>,
    pub raw_measure_count: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Diagnosis {
    Conflict(ConflictDiagnosis),
    Insufficiency(InsufficiencyDiagnosis),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RenderMode {
    Raw,
    Filtered,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Format {
    Text,
    Json,
}

pub fn build_conflict_diagnosis(
    verdict: &Verdict,
    document: &Document,
    model: &Model,
) -> Result<ConflictDiagnosis, DiagnosisError> {
    if verdict.property != Property::Situational || verdict.status != Status::IssueFound {
        return Err(malformed("expected a situational conflict"));
    }
    let situation = verdict
        .situation
        .clone()
        .ok_or_else(|| malformed("missing situation"))?;
    let conflict = verdict
        .conflict_set
        .clone()
        .ok_or_else(|| malformed("missing conflict set"))?;
    let target = model
        .rule(&verdict.target)
        .ok_or_else(|| malformed(format!("unknown rule '{}'", verdict.target)))?;
    situation.validate(model).map_err(|e| malformed(e.to_string()))?;
    if !situation.points.iter().any(|p| trigger_holds(&target.trigger, p)) {
        return Err(malformed(format!("situation does not trigger {}", target.id)));
    }
    let all: Vec<usize> = (0..model.rules.len()).collect();
    if !prefix_feasible(model, &all, &situation) {
        return Err(malformed("situation already violates the rules"));
    }

    let mut shown = Vec::new();
    let mut highlights = Vec::new();
    for id in &conflict {
        let r = model
            .rule_index(id)
            .ok_or_else(|| malformed(format!("unknown rule '{id}'")))?;
        let rule = &model.rules[r];
        shown.extend(rule.condition_measures());
        let syntax = document
            .rules
            .iter()
            .find(|x| &x.id.name == id)
            .ok_or_else(|| malformed(format!("rule '{id}' missing from document")))?;
        highlights.push(Highlight {
            rule: id.clone(),
            span: syntax.response.span,
            clause: printer::response(&syntax.response),
        });
        let mut defeaters: Vec<usize> = situation
            .points
            .iter()
            .filter_map(|p| match activation(rule, p) {
                Activation::Activated { defeater: Some(d), .. } => Some(d),
                _ => None,
            })
            .collect();
        defeaters.sort_unstable();
        defeaters.dedup();
        for d in defeaters {
            let def = &syntax.defeaters[d];
            highlights.push(Highlight {
                rule: id.clone(),
                span: def.span,
                clause: def.response.as_ref().map(printer::response).unwrap_or_default(),
            });
        }
    }
    shown.sort_unstable();
    shown.dedup();
    Ok(ConflictDiagnosis {
        target: verdict.target.clone(),
        conflicting_rules: conflict,
        highlighted_clauses: highlights,
        situation,
        shown_measures: shown,
        raw_measure_count: model.measures.len(),
    })
}

/// Rules whose trigger or response events meet the concern's trigger and
/// pattern events, each with the shared event names.
pub fn related_rules(model: &Model, concern: usize) -> Vec<RelatedRule> {
    let c = &model.concerns[concern];
    let mut concern_events = vec![c.trigger.event];
    concern_events.extend(c.response.chain().map(|r| r.event));
    model
        .rules
        .iter()
        .filter_map(|r| {
            let mut events = vec![r.trigger.event];
            events.extend(r.responses().flat_map(|x| x.chain()).map(|x| x.event));
            let mut shared: Vec<usize> = events.into_iter().filter(|e| concern_events.contains(e)).collect();
            shared.sort_unstable();
            shared.dedup();
            (!shared.is_empty()).then(|| RelatedRule {
                rule: r.id.clone(),
                events: shared.into_iter().map(|e| model.events[e].clone()).collect(),
            })
        })
        .collect()
}

pub fn build_insufficiency_diagnosis(
    verdict: &Verdict,
    model: &Model,
) -> Result<InsufficiencyDiagnosis, DiagnosisError> {
    if verdict.property != Property::Insufficient || verdict.status != Status::IssueFound {
        return Err(malformed("expected an insufficiency"));
    }
    let witness = verdict.witness.clone().ok_or_else(|| malformed("missing witness"))?;
    let concern = model
        .concerns
        .iter()
        .position(|c| c.id == verdict.target)
        .ok_or_else(|| malformed(format!("unknown concern '{}'", verdict.target)))?;
    witness.validate(model).map_err(|e| malformed(e.to_string()))?;
    let all: Vec<usize> = (0..model.rules.len()).collect();
    if !satisfies_all(model, &all, &witness) || !raises(&model.concerns[concern], &witness) {
        return Err(malformed("witness does not raise the concern under the rules"));
    }
    let mut shown = Vec::new();
    if let Some(c) = &model.concerns[concern].trigger.condition {
        c.for_each_measure(&mut |m| shown.push(m));
    }
    shown.sort_unstable();
    shown.dedup();
    Ok(InsufficiencyDiagnosis {
        concern: verdict.target.clone(),
        witness,
        related_rules: related_rules(model, concern),
        shown_measures: shown,
        raw_measure_count: model.measures.len(),
    })
}

impl Diagnosis {
    fn trace(&self) -> &Trace {
        match self {
            Diagnosis::Conflict(c) => &c.situation,
            Diagnosis::Insufficiency(i) => &i.witness,
        }
    }

    fn shown(&self, mode: RenderMode) -> Option<&[usize]> {
        match (mode, self) {
            (RenderMode::Raw, _) => None,
            (RenderMode::Filtered, Diagnosis::Conflict(c)) => Some(&c.shown_measures),
            (RenderMode::Filtered, Diagnosis::Insufficiency(i)) => Some(&i.shown_measures),
        }
    }

    /// Measures shown and measures declared.
    pub fn counts(&self, model: &Model, mode: RenderMode) -> (usize, usize) {
        let total = model.measures.len();
        (self.shown(mode).map_or(total, <[usize]>::len), total)
    }

    pub fn to_json(&self, model: &Model, mode: RenderMode) -> Value {
        let (shown, total) = self.counts(model, mode);
        let trace = self.trace().to_json_filtered(model, self.shown(mode));
        match self {
            Diagnosis::Conflict(c) => json!({
                "type": "conflict",
                "target": c.target,
                "rules": c.conflicting_rules,
                "trace": trace,
                "highlights": c.highlighted_clauses.iter().map(|h| json!({
                    "rule": h.rule,
                    "start": h.span.start,
                    "end": h.span.end,
                    "clause": h.clause,
                })).collect::<Vec<_>>(),
                "related_rules": [],
                "counts": {"shown": shown, "total": total},
            }),
            Diagnosis::Insufficiency(i) => json!({
                "type": "insufficiency",
                "target": i.concern,
                "rules": i.related_rules.iter().map(|r| &r.rule).collect::<Vec<_>>(),
                "trace": trace,
                "highlights": [],
                "related_rules": i.related_rules,
                "counts": {"shown": shown, "total": total},
            }),
        }
    }

    pub fn to_text(&self, model: &Model, mode: RenderMode) -> String {
        let (shown, total) = self.counts(model, mode);
        let mut out = String::new();
        match self {
            Diagnosis::Conflict(c) => {
                out.push_str(&format!(
                    "situational conflict for {}: rules {}\n",
                    c.target,
                    c.conflicting_rules.join(", ")
                ));
                for h in &c.highlighted_clauses {
                    out.push_str(&format!(
                        "  {} at {}:{}: {}\n",
                        h.rule, h.span.start_pos.line, h.span.start_pos.column, h.clause
                    ));
                }
            }
            Diagnosis::Insufficiency(i) => {
                out.push_str(&format!("concern {} can be raised while all rules hold\n", i.concern));
                if i.related_rules.is_empty() {
                    out.push_str("  no rule shares an event with the concern\n");
                }
                for r in &i.related_rules {
                    out.push_str(&format!("  related rule {}: {}\n", r.rule, r.events.join(", ")));
                }
            }
        }
        out.push_str(&format!("measures shown: {shown} of {total}\n"));
        for p in &self.trace().points {
            out.push_str(&format_point(model, p, self.shown(mode)));
            out.push('\n');
        }
        out
    }
}

pub fn render(diagnosis: &Diagnosis, model: &Model, mode: RenderMode, format: Format) -> String {
    match format {
        Format::Text => diagnosis.to_text(model, mode),
        Format::Json => serde_json::to_string_pretty(&diagnosis.to_json(model, mode)).expect("JSON value"),
    }
}
