use proptest::prelude::*;
use sleec_core::syntax::*;

fn ident(prefix: &'static str) -> impl Strategy<Value = Ident> {
    (0u8..6).prop_map(move |n| Ident::new(format!("{prefix}{n}")))
}

fn operand() -> impl Strategy<Value = Operand> {
    prop_oneof![
        ident("m").prop_map(|i| OperandKind::Name(i.name)),
        ident("K").prop_map(|i| OperandKind::Name(i.name)),
        (0i64..1000).prop_map(OperandKind::Int),
        any::<bool>().prop_map(OperandKind::Bool),
    ]
    .prop_map(|kind| Operand {
        kind,
        span: Span::default(),
    })
}

fn op() -> impl Strategy<Value = CompareOp> {
    prop_oneof![
        Just(CompareOp::Eq),
        Just(CompareOp::Neq),
        Just(CompareOp::Lt),
        Just(CompareOp::Le),
        Just(CompareOp::Gt),
        Just(CompareOp::Ge),
    ]
}

fn expr() -> impl Strategy<Value = Expr> {
    let leaf = prop_oneof![
        operand().prop_map(ExprKind::Atom),
        (op(), operand(), operand()).prop_map(|(op, lhs, rhs)| ExprKind::Compare { op, lhs, rhs }),
    ]
    .prop_map(|kind| Expr {
        kind,
        span: Span::default(),
    });
    leaf.prop_recursive(4, 16, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| ExprKind::And(Box::new(a), Box::new(b))),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| ExprKind::Or(Box::new(a), Box::new(b))),
            inner.prop_map(|a| ExprKind::Not(Box::new(a))),
        ]
        .prop_map(|kind| Expr {
            kind,
            span: Span::default(),
        })
    })
}

fn unit() -> impl Strategy<Value = TimeUnit> {
    proptest::sample::select(TimeUnit::ALL.to_vec())
}

fn deadline() -> impl Strategy<Value = Option<Deadline>> {
    proptest::option::of(
        (
            prop_oneof![
                (1i64..10_000).prop_map(Amount::Int),
                ident("K").prop_map(Amount::Constant)
            ],
            unit(),
        )
            .prop_map(|(amount, unit)| Deadline {
                amount,
                unit,
                span: Span::default(),
            }),
    )
}

fn simple_response() -> impl Strategy<Value = Response> {
    (any::<bool>(), ident("E"), deadline()).prop_map(|(neg, event, deadline)| Response {
        polarity: if neg { Polarity::Forbid } else { Polarity::Require },
        event,
        deadline,
        otherwise: None,
        span: Span::default(),
    })
}

fn response() -> impl Strategy<Value = Response> {
    (simple_response(), proptest::option::of(simple_response())).prop_map(|(mut r, alt)| {
        r.otherwise = alt.map(Box::new);
        r
    })
}

fn trigger() -> impl Strategy<Value = Trigger> {
    (ident("E"), proptest::option::of(expr())).prop_map(|(event, condition)| Trigger {
        event,
        condition,
        span: Span::default(),
    })
}

fn definition() -> impl Strategy<Value = Definition> {
    prop_oneof![
        ident("E").prop_map(|name| DefinitionKind::Event { name }),
        (ident("m"), 0u8..3, proptest::collection::vec(ident("l"), 2..4)).prop_map(|(name, k, labels)| {
            let mtype = match k {
                0 => MeasureType::Boolean,
                1 => MeasureType::Numeric,
                _ => MeasureType::Scale(labels),
            };
            DefinitionKind::Measure { name, mtype }
        }),
        (ident("K"), 0i64..100).prop_map(|(name, value)| DefinitionKind::Constant { name, value }),
    ]
    .prop_map(|kind| Definition {
        kind,
        span: Span::default(),
    })
}

fn rule() -> impl Strategy<Value = Rule> {
    (
        ident("r"),
        trigger(),
        response(),
        proptest::collection::vec((expr(), proptest::option::of(response())), 0..3),
    )
        .prop_map(|(id, trigger, response, defeaters)| Rule {
            id,
            trigger,
            response,
            defeaters: defeaters
                .into_iter()
                .map(|(condition, response)| Defeater {
                    condition,
                    response,
                    span: Span::default(),
                })
                .collect(),
            span: Span::default(),
        })
}

fn pattern() -> impl Strategy<Value = Pattern> {
    (ident("c"), trigger(), response()).prop_map(|(id, trigger, response)| Pattern {
        id,
        trigger,
        response,
        span: Span::default(),
    })
}

pub fn document() -> impl Strategy<Value = Document> {
    (
        proptest::collection::vec(definition(), 0..6),
        proptest::collection::vec(rule(), 0..4),
        proptest::collection::vec(pattern(), 0..2),
        proptest::collection::vec(pattern(), 0..2),
    )
        .prop_map(|(definitions, rules, concerns, purposes)| Document {
            definitions,
            rules,
            concerns,
            purposes,
        })
}
