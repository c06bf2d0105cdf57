use std::fmt;

use serde::Serialize;
use serde_json::{json, Value};

use crate::sema::Model;
use crate::semantics::Trace;

use super::bounds::Bounds;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Property {
    Vacuous,
    Situational,
    Redundant,
    Restrictive,
    Insufficient,
}

impl Property {
    pub const ALL: [Property; 5] = [
        Property::Vacuous,
        Property::Situational,
        Property::Redundant,
        Property::Restrictive,
        Property::Insufficient,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Property::Vacuous => "vacuous",
            Property::Situational => "situational",
            Property::Redundant => "redundant",
            Property::Restrictive => "restrictive",
            Property::Insufficient => "insufficient",
        }
    }

    pub fn parse(s: &str) -> Option<Property> {
        Property::ALL.into_iter().find(|p| p.as_str() == s)
    }

    /// Whether the target is a rule, as opposed to a concern or purpose.
    pub fn targets_rule(self) -> bool {
        !matches!(self, Property::Restrictive | Property::Insufficient)
    }
}

impl fmt::Display for Property {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    IssueFound,
    NoIssueWithinBounds,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Verdict {
    pub property: Property,
    pub target: String,
    pub status: Status,
    pub bounds: Bounds,
    pub witness: Option<Trace>,
    pub situation: Option<Trace>,
    pub conflict_set: Option<Vec<String>>,
    /// The search stopped at the node budget, so a `NoIssueWithinBounds`
    /// status is not exhaustive.
    pub budget_exhausted: bool,
    pub nodes: u64,
}

impl Verdict {
    pub fn is_issue(&self) -> bool {
        self.status == Status::IssueFound
    }

    pub fn to_json(&self, model: &Model) -> Value {
        json!({
            "property": self.property,
            "target": self.target,
            "status": self.status,
            "bounds": self.bounds,
            "witness": self.witness.as_ref().map(|t| t.to_json(model)),
            "situation": self.situation.as_ref().map(|t| t.to_json(model)),
            "conflict_set": self.conflict_set,
            "budget_exhausted": self.budget_exhausted,
            "nodes": self.nodes,
        })
    }
}
