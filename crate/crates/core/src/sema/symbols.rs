use std::collections::BTreeMap;

use crate::syntax::*;

use super::diagnostic::{SemanticDiagnostic, SemanticKind};
use super::model::MeasureKind;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EventSymbol {
    pub index: usize,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MeasureSymbol {
    pub index: usize,
    pub kind: MeasureKind,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConstantSymbol {
    pub value: i64,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabelSymbol {
    pub measure: String,
    pub ordinal: u32,
    pub span: Span,
}

/// Declared names of a document. Indices follow declaration order among
/// well-formed definitions of the same category.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SymbolTable {
    pub events: BTreeMap<String, EventSymbol>,
    pub measures: BTreeMap<String, MeasureSymbol>,
    pub constants: BTreeMap<String, ConstantSymbol>,
    pub scale_labels: BTreeMap<String, LabelSymbol>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Symbol<'a> {
    Event(&'a EventSymbol),
    Measure(&'a MeasureSymbol),
    Constant(&'a ConstantSymbol),
    Label(&'a LabelSymbol),
}

impl SymbolTable {
    pub fn lookup(&self, name: &str) -> Option<Symbol<'_>> {
        if let Some(e) = self.events.get(name) {
            return Some(Symbol::Event(e));
        }
        if let Some(m) = self.measures.get(name) {
            return Some(Symbol::Measure(m));
        }
        if let Some(c) = self.constants.get(name) {
            return Some(Symbol::Constant(c));
        }
        self.scale_labels.get(name).map(Symbol::Label)
    }

    fn span_of(&self, name: &str) -> Option<Span> {
        self.lookup(name).map(|s| match s {
            Symbol::Event(e) => e.span,
            Symbol::Measure(m) => m.span,
            Symbol::Constant(c) => c.span,
            Symbol::Label(l) => l.span,
        })
    }

    /// Events sorted by declaration order.
    pub fn events_in_order(&self) -> Vec<&str> {
        let mut v: Vec<_> = self.events.iter().collect();
        v.sort_by_key(|(_, e)| e.index);
        v.into_iter().map(|(n, _)| n.as_str()).collect()
    }

    pub fn measures_in_order(&self) -> Vec<(&str, &MeasureSymbol)> {
        let mut v: Vec<_> = self.measures.iter().map(|(n, m)| (n.as_str(), m)).collect();
        v.sort_by_key(|(_, m)| m.index);
        v
    }
}

fn starts_upper(name: &str) -> bool {
    name.chars().next().is_some_and(|c| c.is_ascii_uppercase())
}

pub fn build_symbols(doc: &Document) -> (SymbolTable, Vec<SemanticDiagnostic>) {
    let mut table = SymbolTable::default();
    let mut diags = Vec::new();

    let duplicate = |table: &SymbolTable, diags: &mut Vec<SemanticDiagnostic>, name: &Ident| {
        if let Some(first) = table.span_of(&name.name) {
            diags.push(
                SemanticDiagnostic::new(
                    SemanticKind::DuplicateDefinition,
                    format!("'{}' is already defined", name.name),
                    name.span,
                )
                .with_related(first),
            );
            true
        } else {
            false
        }
    };

    for def in &doc.definitions {
        match &def.kind {
            DefinitionKind::Event { name } => {
                if duplicate(&table, &mut diags, name) {
                    continue;
                }
                if !starts_upper(&name.name) {
                    diags.push(SemanticDiagnostic::new(
                        SemanticKind::CaseConventionViolation,
                        format!("event '{}' should start with an uppercase letter", name.name),
                        name.span,
                    ));
                }
                let index = table.events.len();
                table
                    .events
                    .insert(name.name.clone(), EventSymbol { index, span: name.span });
            }
            DefinitionKind::Measure { name, mtype } => {
                if duplicate(&table, &mut diags, name) {
                    continue;
                }
                if starts_upper(&name.name) {
                    diags.push(SemanticDiagnostic::new(
                        SemanticKind::CaseConventionViolation,
                        format!("measure '{}' should start with a lowercase letter", name.name),
                        name.span,
                    ));
                }
                let kind = match mtype {
                    MeasureType::Boolean => MeasureKind::Boolean,
                    MeasureType::Numeric => MeasureKind::Numeric,
                    MeasureType::Scale(labels) => {
                        let mut kept: Vec<String> = Vec::new();
                        for label in labels {
                            if duplicate(&table, &mut diags, label) || label.name == name.name {
                                continue;
                            }
                            if kept.contains(&label.name) {
                                diags.push(SemanticDiagnostic::new(
                                    SemanticKind::DuplicateDefinition,
                                    format!("scale label '{}' is repeated", label.name),
                                    label.span,
                                ));
                                continue;
                            }
                            if starts_upper(&label.name) {
                                diags.push(SemanticDiagnostic::new(
                                    SemanticKind::CaseConventionViolation,
                                    format!("scale label '{}' should start with a lowercase letter", label.name),
                                    label.span,
                                ));
                            }
                            table.scale_labels.insert(
                                label.name.clone(),
                                LabelSymbol {
                                    measure: name.name.clone(),
                                    ordinal: kept.len() as u32,
                                    span: label.span,
                                },
                            );
                            kept.push(label.name.clone());
                        }
                        if kept.len() < 2 {
                            diags.push(SemanticDiagnostic::new(
                                SemanticKind::TypeMismatch,
                                format!("scale '{}' needs at least two distinct labels", name.name),
                                def.span,
                            ));
                        }
                        MeasureKind::Scale(kept)
                    }
                };
                let index = table.measures.len();
                table.measures.insert(
                    name.name.clone(),
                    MeasureSymbol {
                        index,
                        kind,
                        span: name.span,
                    },
                );
            }
            DefinitionKind::Constant { name, value } => {
                if duplicate(&table, &mut diags, name) {
                    continue;
                }
                table.constants.insert(
                    name.name.clone(),
                    ConstantSymbol {
                        value: *value,
                        span: name.span,
                    },
                );
            }
        }
    }

    let mut ids: BTreeMap<&str, Span> = BTreeMap::new();
    let items = doc
        .rules
        .iter()
        .map(|r| &r.id)
        .chain(doc.concerns.iter().map(|p| &p.id))
        .chain(doc.purposes.iter().map(|p| &p.id));
    for id in items {
        if let Some(first) = ids.get(id.name.as_str()) {
            diags.push(
                SemanticDiagnostic::new(
                    SemanticKind::DuplicateDefinition,
                    format!("identifier '{}' is used by another rule, concern or purpose", id.name),
                    id.span,
                )
                .with_related(*first),
            );
        } else {
            ids.insert(&id.name, id.span);
        }
    }

    let mut refs = RefChecker {
        table: &table,
        diags: &mut diags,
    };
    for rule in &doc.rules {
        refs.trigger(&rule.trigger);
        refs.response(&rule.response);
        for d in &rule.defeaters {
            refs.expr(&d.condition);
            if let Some(r) = &d.response {
                refs.response(r);
            }
        }
    }
    for p in doc.concerns.iter().chain(&doc.purposes) {
        refs.trigger(&p.trigger);
        refs.response(&p.response);
    }

    diags.sort_by_key(|d| (d.span.start, d.span.end));
    (table, diags)
}

struct RefChecker<'a> {
    table: &'a SymbolTable,
    diags: &'a mut Vec<SemanticDiagnostic>,
}

impl RefChecker<'_> {
    fn undeclared(&mut self, what: &str, name: &str, span: Span) {
        self.diags.push(SemanticDiagnostic::new(
            SemanticKind::UndeclaredIdentifier,
            format!("{what} '{name}' is not declared"),
            span,
        ));
    }

    fn event(&mut self, ident: &Ident) {
        if self.table.lookup(&ident.name).is_none() {
            self.undeclared("event", &ident.name, ident.span);
        }
    }

    fn trigger(&mut self, t: &Trigger) {
        self.event(&t.event);
        if let Some(c) = &t.condition {
            self.expr(c);
        }
    }

    fn response(&mut self, r: &Response) {
        for r in r.chain() {
            self.event(&r.event);
            if let Some(Deadline {
                amount: Amount::Constant(c),
                ..
            }) = &r.deadline
            {
                if self.table.lookup(&c.name).is_none() {
                    self.undeclared("constant", &c.name, c.span);
                }
            }
        }
    }

    fn scale_owner<'o>(&self, o: &'o Operand) -> Option<&'o str> {
        match &o.kind {
            OperandKind::Name(n) => match self.table.lookup(n) {
                Some(Symbol::Measure(m)) if matches!(m.kind, MeasureKind::Scale(_)) => Some(n),
                _ => None,
            },
            _ => None,
        }
    }

    fn operand(&mut self, o: &Operand, opposite: Option<&Operand>) {
        if let OperandKind::Name(n) = &o.kind {
            if self.table.lookup(n).is_some() {
                return;
            }
            if let Some(owner) = opposite.and_then(|p| self.scale_owner(p)) {
                let msg = format!("'{n}' is not a label of scale measure '{owner}'");
                self.diags
                    .push(SemanticDiagnostic::new(SemanticKind::UnknownScaleLabel, msg, o.span));
            } else {
                let what = if starts_upper(n) { "identifier" } else { "measure" };
                self.undeclared(what, n, o.span);
            }
        }
    }

    fn expr(&mut self, e: &Expr) {
        match &e.kind {
            ExprKind::And(a, b) | ExprKind::Or(a, b) => {
                self.expr(a);
                self.expr(b);
            }
            ExprKind::Not(inner) => self.expr(inner),
            ExprKind::Compare { lhs, rhs, .. } => {
                self.operand(lhs, Some(rhs));
                self.operand(rhs, Some(lhs));
            }
            ExprKind::Atom(o) => self.operand(o, None),
        }
    }
}
