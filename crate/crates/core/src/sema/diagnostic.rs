use serde::Serialize;

use crate::syntax::{ParseDiagnostic, Severity, Span};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum SemanticKind {
    UndeclaredIdentifier,
    TypeMismatch,
    DuplicateDefinition,
    NonPositiveDeadline,
    UnknownScaleLabel,
    CaseConventionViolation,
}

impl SemanticKind {
    pub fn code(self) -> &'static str {
        match self {
            SemanticKind::UndeclaredIdentifier => "SLEEC-E001",
            SemanticKind::TypeMismatch => "SLEEC-E002",
            SemanticKind::DuplicateDefinition => "SLEEC-E003",
            SemanticKind::NonPositiveDeadline => "SLEEC-E004",
            SemanticKind::UnknownScaleLabel => "SLEEC-E005",
            SemanticKind::CaseConventionViolation => "SLEEC-W001",
        }
    }

    pub fn severity(self) -> Severity {
        match self {
            SemanticKind::CaseConventionViolation => Severity::Warning,
            _ => Severity::Error,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SemanticDiagnostic {
    pub kind: SemanticKind,
    pub severity: Severity,
    pub code: &'static str,
    pub message: String,
    pub span: Span,
    /// Second location, e.g. the first definition of a duplicate.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub related: Option<Span>,
}

impl SemanticDiagnostic {
    pub fn new(kind: SemanticKind, message: impl Into<String>, span: Span) -> Self {
        SemanticDiagnostic {
            kind,
            severity: kind.severity(),
            code: kind.code(),
            message: message.into(),
            span,
            related: None,
        }
    }

    pub fn with_related(mut self, span: Span) -> Self {
        self.related = Some(span);
        self
    }
}

/// Parse and semantic diagnostics in one list, as shown to users.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Diagnostic {
    pub severity: Severity,
    pub code: &'static str,
    pub message: String,
    pub span: Span,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kind: Option<SemanticKind>,
}

impl From<ParseDiagnostic> for Diagnostic {
    fn from(d: ParseDiagnostic) -> Self {
        Diagnostic {
            severity: d.severity,
            code: d.code,
            message: d.message,
            span: d.span,
            kind: None,
        }
    }
}

impl From<SemanticDiagnostic> for Diagnostic {
    fn from(d: SemanticDiagnostic) -> Self {
        Diagnostic {
            severity: d.severity,
            code: d.code,
            message: d.message,
            span: d.span,
            kind: Some(d.kind),
        }
    }
}
