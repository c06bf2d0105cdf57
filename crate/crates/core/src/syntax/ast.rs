//! Syntax tree for `.sleec` documents.
//!
//! Every node carries the [`Span`] it was parsed from. Names inside
//! conditions are kept unresolved ([`OperandKind::Name`]); whether a name is
//! a measure, a constant or a scale label is decided by semantic analysis.

use super::lexer::TimeUnit;
use super::span::Span;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Ident {
    pub name: String,
    pub span: Span,
}

impl Ident {
    pub fn new(name: impl Into<String>) -> Self {
        Ident {
            name: name.into(),
            span: Span::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Document {
    pub definitions: Vec<Definition>,
    pub rules: Vec<Rule>,
    pub concerns: Vec<Pattern>,
    pub purposes: Vec<Pattern>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Definition {
    pub kind: DefinitionKind,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DefinitionKind {
    Event { name: Ident },
    Measure { name: Ident, mtype: MeasureType },
    Constant { name: Ident, value: i64 },
}

impl DefinitionKind {
    pub fn name(&self) -> &Ident {
        match self {
            DefinitionKind::Event { name }
            | DefinitionKind::Measure { name, .. }
            | DefinitionKind::Constant { name, .. } => name,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MeasureType {
    Boolean,
    Numeric,
    Scale(Vec<Ident>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rule {
    pub id: Ident,
    pub trigger: Trigger,
    pub response: Response,
    pub defeaters: Vec<Defeater>,
    pub span: Span,
}

/// A concern or a purpose: a trigger plus an observed response pattern.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Pattern {
    pub id: Ident,
    pub trigger: Trigger,
    pub response: Response,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Trigger {
    pub event: Ident,
    pub condition: Option<Expr>,
    pub span: Span,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Polarity {
    Require,
    Forbid,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Response {
    pub polarity: Polarity,
    pub event: Ident,
    pub deadline: Option<Deadline>,
    pub otherwise: Option<Box<Response>>,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Deadline {
    pub amount: Amount,
    pub unit: TimeUnit,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Amount {
    Int(i64),
    Constant(Ident),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Defeater {
    pub condition: Expr,
    pub response: Option<Response>,
    pub span: Span,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CompareOp {
    Eq,
    Neq,
    Lt,
    Le,
    Gt,
    Ge,
}

impl CompareOp {
    pub fn symbol(self) -> &'static str {
        match self {
            CompareOp::Eq => "=",
            CompareOp::Neq => "<>",
            CompareOp::Lt => "<",
            CompareOp::Le => "<=",
            CompareOp::Gt => ">",
            CompareOp::Ge => ">=",
        }
    }

    pub fn is_ordering(self) -> bool {
        !matches!(self, CompareOp::Eq | CompareOp::Neq)
    }

    pub fn apply<T: Ord>(self, lhs: T, rhs: T) -> bool {
        match self {
            CompareOp::Eq => lhs == rhs,
            CompareOp::Neq => lhs != rhs,
            CompareOp::Lt => lhs < rhs,
            CompareOp::Le => lhs <= rhs,
            CompareOp::Gt => lhs > rhs,
            CompareOp::Ge => lhs >= rhs,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Expr {
    pub kind: ExprKind,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ExprKind {
    And(Box<Expr>, Box<Expr>),
    Or(Box<Expr>, Box<Expr>),
    Not(Box<Expr>),
    Compare {
        op: CompareOp,
        lhs: Operand,
        rhs: Operand,
    },
    /// A standalone operand, e.g. a boolean measure.
    Atom(Operand),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Operand {
    pub kind: OperandKind,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum OperandKind {
    Name(String),
    Int(i64),
    Bool(bool),
}

impl Expr {
    /// Calls `f` on every operand in the tree, left to right.
    pub fn for_each_operand<'a>(&'a self, f: &mut impl FnMut(&'a Operand)) {
        match &self.kind {
            ExprKind::And(a, b) | ExprKind::Or(a, b) => {
                a.for_each_operand(f);
                b.for_each_operand(f);
            }
            ExprKind::Not(e) => e.for_each_operand(f),
            ExprKind::Compare { lhs, rhs, .. } => {
                f(lhs);
                f(rhs);
            }
            ExprKind::Atom(o) => f(o),
        }
    }
}

impl Response {
    /// This response followed by its `otherwise` chain.
    pub fn chain(&self) -> impl Iterator<Item = &Response> {
        std::iter::successors(Some(self), |r| r.otherwise.as_deref())
    }
}

impl Rule {
    /// Every response the rule can produce: the main one and those of its
    /// defeaters.
    pub fn responses(&self) -> impl Iterator<Item = &Response> {
        std::iter::once(&self.response).chain(self.defeaters.iter().filter_map(|d| d.response.as_ref()))
    }
}

/// Resets every span in the tree, so that documents parsed from differently
/// formatted sources compare equal when they are structurally equal.
pub trait StripSpans {
    fn strip_spans(&mut self);

    fn without_spans(&self) -> Self
    where
        Self: Clone,
    {
        let mut c = self.clone();
        c.strip_spans();
        c
    }
}

impl StripSpans for Ident {
    fn strip_spans(&mut self) {
        self.span = Span::default();
    }
}

impl StripSpans for Document {
    fn strip_spans(&mut self) {
        self.definitions.iter_mut().for_each(StripSpans::strip_spans);
        self.rules.iter_mut().for_each(StripSpans::strip_spans);
        self.concerns.iter_mut().for_each(StripSpans::strip_spans);
        self.purposes.iter_mut().for_each(StripSpans::strip_spans);
    }
}

impl StripSpans for Definition {
    fn strip_spans(&mut self) {
        self.span = Span::default();
        match &mut self.kind {
            DefinitionKind::Event { name } | DefinitionKind::Constant { name, .. } => name.strip_spans(),
            DefinitionKind::Measure { name, mtype } => {
                name.strip_spans();
                if let MeasureType::Scale(labels) = mtype {
                    labels.iter_mut().for_each(StripSpans::strip_spans);
                }
            }
        }
    }
}

impl StripSpans for Rule {
    fn strip_spans(&mut self) {
        self.span = Span::default();
        self.id.strip_spans();
        self.trigger.strip_spans();
        self.response.strip_spans();
        for d in &mut self.defeaters {
            d.span = Span::default();
            d.condition.strip_spans();
            if let Some(r) = &mut d.response {
                r.strip_spans();
            }
        }
    }
}

impl StripSpans for Pattern {
    fn strip_spans(&mut self) {
        self.span = Span::default();
        self.id.strip_spans();
        self.trigger.strip_spans();
        self.response.strip_spans();
    }
}

impl StripSpans for Trigger {
    fn strip_spans(&mut self) {
        self.span = Span::default();
        self.event.strip_spans();
        if let Some(c) = &mut self.condition {
            c.strip_spans();
        }
    }
}

impl StripSpans for Response {
    fn strip_spans(&mut self) {
        self.span = Span::default();
        self.event.strip_spans();
        if let Some(d) = &mut self.deadline {
            d.span = Span::default();
            if let Amount::Constant(c) = &mut d.amount {
                c.strip_spans();
            }
        }
        if let Some(o) = &mut self.otherwise {
            o.strip_spans();
        }
    }
}

impl StripSpans for Expr {
    fn strip_spans(&mut self) {
        self.span = Span::default();
        match &mut self.kind {
            ExprKind::And(a, b) | ExprKind::Or(a, b) => {
                a.strip_spans();
                b.strip_spans();
            }
            ExprKind::Not(e) => e.strip_spans(),
            ExprKind::Compare { lhs, rhs, .. } => {
                lhs.span = Span::default();
                rhs.span = Span::default();
            }
            ExprKind::Atom(o) => o.span = Span::default(),
        }
    }
}
