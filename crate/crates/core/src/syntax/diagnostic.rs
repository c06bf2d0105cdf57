use serde::Serialize;

use super::span::Span;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Severity {
    Error,
    Warning,
}

/// Stable diagnostic codes emitted by the parser.
pub mod codes {
    pub const UNEXPECTED_TOKEN: &str = "SLEEC-P001";
    pub const INVALID_CHARACTER: &str = "SLEEC-P002";
    pub const INTEGER_OUT_OF_RANGE: &str = "SLEEC-P003";
    pub const DEFEATER_IN_PATTERN: &str = "SLEEC-P004";
    pub const BLOCK_STRUCTURE: &str = "SLEEC-P005";
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ParseDiagnostic {
    pub severity: Severity,
    pub code: &'static str,
    pub message: String,
    pub span: Span,
}

impl ParseDiagnostic {
    pub fn error(code: &'static str, message: impl Into<String>, span: Span) -> Self {
        ParseDiagnostic {
            severity: Severity::Error,
            code,
            message: message.into(),
            span,
        }
    }
}
