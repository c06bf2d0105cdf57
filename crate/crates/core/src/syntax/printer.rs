//! Canonical text rendering of a [`Document`].

use std::fmt::Write;

use super::ast::*;

pub fn pretty_print(doc: &Document) -> String {
    let mut out = String::new();
    out.push_str("def_start\n");
    for d in &doc.definitions {
        let _ = writeln!(out, "  {}", definition(d));
    }
    out.push_str("def_end\n\nrule_start\n");
    for r in &doc.rules {
        let _ = writeln!(out, "  {}", rule(r));
    }
    out.push_str("rule_end\n");
    if !doc.concerns.is_empty() {
        out.push_str("\nconcern_start\n");
        for p in &doc.concerns {
            let _ = writeln!(out, "  {}", pattern(p));
        }
        out.push_str("concern_end\n");
    }
    if !doc.purposes.is_empty() {
        out.push_str("\npurpose_start\n");
        for p in &doc.purposes {
            let _ = writeln!(out, "  {}", pattern(p));
        }
        out.push_str("purpose_end\n");
    }
    out
}

pub fn definition(d: &Definition) -> String {
    match &d.kind {
        DefinitionKind::Event { name } => format!("event {}", name.name),
        DefinitionKind::Measure { name, mtype } => {
            let ty = match mtype {
                MeasureType::Boolean => "boolean".to_string(),
                MeasureType::Numeric => "numeric".to_string(),
                MeasureType::Scale(labels) => format!(
                    "scale({})",
                    labels.iter().map(|l| l.name.as_str()).collect::<Vec<_>>().join(", ")
                ),
            };
            format!("measure {}: {}", name.name, ty)
        }
        DefinitionKind::Constant { name, value } => format!("constant {} = {}", name.name, value),
    }
}

pub fn rule(r: &Rule) -> String {
    let mut s = format!("{} {} then {}", r.id.name, trigger(&r.trigger), response(&r.response));
    for d in &r.defeaters {
        let _ = write!(s, " unless {}", expr(&d.condition));
        if let Some(resp) = &d.response {
            let _ = write!(s, " then {}", response(resp));
        }
    }
    s
}

pub fn pattern(p: &Pattern) -> String {
    format!("{} {} then {}", p.id.name, trigger(&p.trigger), response(&p.response))
}

pub fn trigger(t: &Trigger) -> String {
    match &t.condition {
        Some(c) => format!("when {} and {}", t.event.name, expr_in(c, Prec::Conj)),
        None => format!("when {}", t.event.name),
    }
}

pub fn response(r: &Response) -> String {
    let mut s = String::new();
    if r.polarity == Polarity::Forbid {
        s.push_str("not ");
    }
    s.push_str(&r.event.name);
    if let Some(d) = &r.deadline {
        let amount = match &d.amount {
            Amount::Int(v) => v.to_string(),
            Amount::Constant(c) => c.name.clone(),
        };
        let _ = write!(s, " within {} {}", amount, d.unit.keyword());
    }
    if let Some(o) = &r.otherwise {
        let _ = write!(s, " otherwise {}", response(o));
    }
    s
}

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Prec {
    Disj,
    Conj,
    Unary,
}

pub fn expr(e: &Expr) -> String {
    expr_in(e, Prec::Disj)
}

/// Renders `e` in a context that binds at least as tightly as `ctx`.
/// Binary operators parse left-associatively, so right operands of the same
/// operator are parenthesized.
fn expr_in(e: &Expr, ctx: Prec) -> String {
    let (own, text) = match &e.kind {
        ExprKind::Or(a, b) => (
            Prec::Disj,
            format!("{} or {}", expr_in(a, Prec::Disj), expr_in(b, Prec::Conj)),
        ),
        ExprKind::And(a, b) => (
            Prec::Conj,
            format!("{} and {}", expr_in(a, Prec::Conj), expr_in(b, Prec::Unary)),
        ),
        ExprKind::Not(inner) => (Prec::Unary, format!("not {}", expr_in(inner, Prec::Unary))),
        ExprKind::Compare { op, lhs, rhs } => (
            Prec::Unary,
            format!("{} {} {}", operand(lhs), op.symbol(), operand(rhs)),
        ),
        ExprKind::Atom(o) => (Prec::Unary, operand(o)),
    };
    if own < ctx {
        format!("({text})")
    } else {
        text
    }
}

pub fn operand(o: &Operand) -> String {
    match &o.kind {
        OperandKind::Name(n) => n.clone(),
        OperandKind::Int(v) => v.to_string(),
        OperandKind::Bool(b) => b.to_string(),
    }
}

#[cfg(test)]
mod tests {
    use super::super::parse;
    use super::*;

    #[test]
    fn prints_rule_on_one_line() {
        let src = "def_start def_end rule_start r3 when SmokeDetectorAlarm then CallEmergencyServices within 300 seconds rule_end";
        let doc = parse(src).document;
        assert_eq!(
            rule(&doc.rules[0]),
            "r3 when SmokeDetectorAlarm then CallEmergencyServices within 300 seconds"
        );
    }

    #[test]
    fn empty_document_has_empty_blocks() {
        let text = pretty_print(&Document::default());
        assert_eq!(text, "def_start\ndef_end\n\nrule_start\nrule_end\n");
        let res = parse(&text);
        assert!(res.diagnostics.is_empty());
        assert_eq!(res.document, Document::default());
    }

    #[test]
    fn nested_conditions_keep_their_shape() {
        let src = "def_start def_end rule_start r when E and a and (b and c) or not (d or e) then F rule_end";
        let doc = parse(src).document;
        let printed = pretty_print(&doc);
        let again = parse(&printed);
        assert!(again.diagnostics.is_empty(), "{printed}");
        assert_eq!(again.document.without_spans(), doc.without_spans());
    }
}
