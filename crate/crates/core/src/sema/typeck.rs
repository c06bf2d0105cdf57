use crate::semantics::to_seconds;
use crate::syntax::*;

use super::diagnostic::{SemanticDiagnostic, SemanticKind};
use super::model::MeasureKind;
use super::symbols::{Symbol, SymbolTable};

#[derive(Debug, Clone, PartialEq, Eq)]
enum Ty {
    Bool,
    Num,
    Scale(String),
    Event,
    /// Undeclared name; already reported by symbol resolution.
    Unknown,
}

impl Ty {
    fn describe(&self) -> String {
        match self {
            Ty::Bool => "boolean".into(),
            Ty::Num => "numeric".into(),
            Ty::Scale(m) => format!("scale of '{m}'"),
            Ty::Event => "event".into(),
            Ty::Unknown => "unknown".into(),
        }
    }
}

pub fn typecheck(doc: &Document, table: &SymbolTable) -> Vec<SemanticDiagnostic> {
    let mut checker = Checker {
        table,
        diags: Vec::new(),
    };
    for rule in &doc.rules {
        checker.trigger(&rule.trigger);
        checker.response(&rule.response);
        for d in &rule.defeaters {
            checker.condition(&d.condition);
            if let Some(r) = &d.response {
                checker.response(r);
            }
        }
    }
    for p in doc.concerns.iter().chain(&doc.purposes) {
        checker.trigger(&p.trigger);
        checker.response(&p.response);
    }
    let mut diags = checker.diags;
    diags.sort_by_key(|d| (d.span.start, d.span.end));
    diags
}

struct Checker<'a> {
    table: &'a SymbolTable,
    diags: Vec<SemanticDiagnostic>,
}

impl Checker<'_> {
    fn mismatch(&mut self, message: String, span: Span) {
        self.diags
            .push(SemanticDiagnostic::new(SemanticKind::TypeMismatch, message, span));
    }

    fn event_ref(&mut self, ident: &Ident) {
        match self.table.lookup(&ident.name) {
            None | Some(Symbol::Event(_)) => {}
            Some(_) => self.mismatch(format!("'{}' is not an event", ident.name), ident.span),
        }
    }

    fn trigger(&mut self, t: &Trigger) {
        self.event_ref(&t.event);
        if let Some(c) = &t.condition {
            self.condition(c);
        }
    }

    fn response(&mut self, r: &Response) {
        for r in r.chain() {
            self.event_ref(&r.event);
            let Some(d) = &r.deadline else { continue };
            let amount = match &d.amount {
                Amount::Int(v) => Some(*v),
                Amount::Constant(c) => match self.table.lookup(&c.name) {
                    Some(Symbol::Constant(k)) => Some(k.value),
                    None => None,
                    Some(_) => {
                        self.mismatch(format!("deadline amount '{}' is not a constant", c.name), c.span);
                        None
                    }
                },
            };
            match amount {
                Some(v) if v <= 0 => self.diags.push(SemanticDiagnostic::new(
                    SemanticKind::NonPositiveDeadline,
                    format!("deadline must be positive, found {v}"),
                    d.span,
                )),
                Some(v) if to_seconds(v as u64, d.unit).is_err() => self.diags.push(SemanticDiagnostic::new(
                    SemanticKind::NonPositiveDeadline,
                    "deadline is out of range",
                    d.span,
                )),
                _ => {}
            }
        }
    }

    fn operand_ty(&self, o: &Operand) -> Ty {
        match &o.kind {
            OperandKind::Int(_) => Ty::Num,
            OperandKind::Bool(_) => Ty::Bool,
            OperandKind::Name(n) => match self.table.lookup(n) {
                None => Ty::Unknown,
                Some(Symbol::Event(_)) => Ty::Event,
                Some(Symbol::Constant(_)) => Ty::Num,
                Some(Symbol::Label(l)) => Ty::Scale(l.measure.clone()),
                Some(Symbol::Measure(m)) => match m.kind {
                    MeasureKind::Boolean => Ty::Bool,
                    MeasureKind::Numeric => Ty::Num,
                    MeasureKind::Scale(_) => Ty::Scale(n.clone()),
                },
            },
        }
    }

    fn condition(&mut self, e: &Expr) {
        match &e.kind {
            ExprKind::And(a, b) | ExprKind::Or(a, b) => {
                self.condition(a);
                self.condition(b);
            }
            ExprKind::Not(inner) => self.condition(inner),
            ExprKind::Atom(o) => match self.operand_ty(o) {
                Ty::Bool | Ty::Unknown => {}
                ty => self.mismatch(
                    format!(
                        "'{}' is {}; a condition needs a boolean",
                        printer::operand(o),
                        ty.describe()
                    ),
                    o.span,
                ),
            },
            ExprKind::Compare { op, lhs, rhs } => {
                let (l, r) = (self.operand_ty(lhs), self.operand_ty(rhs));
                if l == Ty::Unknown || r == Ty::Unknown {
                    return;
                }
                let ok = if l == Ty::Event || r == Ty::Event {
                    false
                } else if op.is_ordering() {
                    l == r && l != Ty::Bool
                } else {
                    l == r
                };
                if !ok {
                    self.mismatch(
                        format!(
                            "cannot compare {} with {} using '{}'",
                            l.describe(),
                            r.describe(),
                            op.symbol()
                        ),
                        e.span,
                    );
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::super::build_symbols;
    use super::*;

    const DEFS: &str = "def_start event E event F measure humanAssents: boolean measure roomTemperature: numeric measure userDistressed: scale(low, medium, high) constant MIN_TEMP = 16 def_end";

    fn check(cond: &str) -> Vec<SemanticDiagnostic> {
        let src = format!("{DEFS} rule_start r when E and {cond} then F rule_end");
        let res = parse(&src);
        assert!(!res.has_errors(), "{:?}", res.diagnostics);
        let (table, mut diags) = build_symbols(&res.document);
        diags.extend(typecheck(&res.document, &table));
        diags
    }

    #[test]
    fn numeric_against_constant_is_fine() {
        assert!(check("roomTemperature < MIN_TEMP").is_empty());
    }

    #[test]
    fn boolean_ordering_is_a_mismatch() {
        let d = check("humanAssents < 3");
        assert_eq!(d.len(), 1);
        assert_eq!(d[0].kind, SemanticKind::TypeMismatch);
    }

    #[test]
    fn scale_compares_with_its_labels_only() {
        assert!(check("userDistressed > low").is_empty());
        let d = check("userDistressed > 3");
        assert_eq!(d.len(), 1);
        assert_eq!(d[0].kind, SemanticKind::TypeMismatch);
    }

    #[test]
    fn unknown_scale_label() {
        let d = check("userDistressed = extreme");
        assert_eq!(d.len(), 1);
        assert_eq!(d[0].kind, SemanticKind::UnknownScaleLabel);
    }

    #[test]
    fn standalone_numeric_is_a_mismatch() {
        let d = check("roomTemperature");
        assert_eq!(d.len(), 1);
        assert_eq!(d[0].kind, SemanticKind::TypeMismatch);
    }

    #[test]
    fn zero_deadline_is_rejected() {
        let src = format!("{DEFS} rule_start r when E then F within 0 seconds rule_end");
        let doc = parse(&src).document;
        let (table, _) = build_symbols(&doc);
        let d = typecheck(&doc, &table);
        assert_eq!(d.len(), 1);
        assert_eq!(d[0].kind, SemanticKind::NonPositiveDeadline);
        assert_eq!(d[0].span.text(&src), "within 0 seconds");
    }

    #[test]
    fn measure_used_as_event() {
        let src = format!("{DEFS} rule_start r when humanAssents then F rule_end");
        let res = parse(&src);
        // `humanAssents` is lowercase, so the parser rejects it before typing.
        assert!(res.has_errors());
        let src = format!("{DEFS} rule_start r when E then F within MIN_TEMP seconds unless E then F rule_end");
        let doc = parse(&src).document;
        let (table, _) = build_symbols(&doc);
        let d = typecheck(&doc, &table);
        assert_eq!(d.len(), 1, "{d:?}");
        assert_eq!(d[0].kind, SemanticKind::TypeMismatch);
    }
}
