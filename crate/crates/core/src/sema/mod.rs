//! Name resolution, type checking, completions, and lowering to [`Model`].

mod complete;
mod diagnostic;
mod model;
mod symbols;
mod typeck;

pub use complete::{completions, CompletionItem, CompletionKind};
pub use diagnostic::{Diagnostic, SemanticDiagnostic, SemanticKind};
pub use model::{
    Cond, DefeaterModel, MeasureDecl, MeasureKind, Model, PatternKind, PatternModel, ResponseModel, RuleModel, Term,
    TriggerModel,
};
pub use symbols::{build_symbols, ConstantSymbol, EventSymbol, LabelSymbol, MeasureSymbol, Symbol, SymbolTable};
pub use typeck::typecheck;

use crate::syntax::{parse, Document, ParseDiagnostic, Severity};

/// Everything the front end knows about one source text.
#[derive(Debug, Clone)]
pub struct Analysis {
    pub document: Document,
    pub table: SymbolTable,
    pub parse_diagnostics: Vec<ParseDiagnostic>,
    pub semantic_diagnostics: Vec<SemanticDiagnostic>,
}

impl Analysis {
    /// Parse and semantic diagnostics merged, ordered by span start.
    pub fn diagnostics(&self) -> Vec<Diagnostic> {
        let mut all: Vec<Diagnostic> = self
            .parse_diagnostics
            .iter()
            .cloned()
            .map(Diagnostic::from)
            .chain(self.semantic_diagnostics.iter().cloned().map(Diagnostic::from))
            .collect();
        all.sort_by_key(|d| (d.span.start, d.span.end));
        all
    }

    pub fn has_errors(&self) -> bool {
        self.parse_diagnostics.iter().any(|d| d.severity == Severity::Error)
            || self.semantic_diagnostics.iter().any(|d| d.severity == Severity::Error)
    }

    /// The resolved model, when the document has no errors.
    pub fn model(&self) -> Option<Model> {
        if self.has_errors() {
            return None;
        }
        model::lower(&self.document, &self.table)
    }
}

pub fn analyze(source: &str) -> Analysis {
    let parsed = parse(source);
    let (table, mut semantic) = build_symbols(&parsed.document);
    semantic.extend(typecheck(&parsed.document, &table));
    semantic.sort_by_key(|d| (d.span.start, d.span.end));
    Analysis {
        document: parsed.document,
        table,
        parse_diagnostics: parsed.diagnostics,
        semantic_diagnostics: semantic,
    }
}
