//! Recursive-descent parser with recovery at definition and rule boundaries.

use super::ast::*;
use super::diagnostic::{codes, ParseDiagnostic, Severity};
use super::lexer::{tokenize, Keyword, Token, TokenKind};
use super::span::{LineIndex, Span};

#[derive(Debug, Clone)]
pub struct ParseResult {
    pub document: Document,
    pub diagnostics: Vec<ParseDiagnostic>,
}

impl ParseResult {
    pub fn has_errors(&self) -> bool {
        self.diagnostics.iter().any(|d| d.severity == Severity::Error)
    }
}

pub fn parse(source: &str) -> ParseResult {
    let index = LineIndex::new(source);
    let eof = index.span(source, source.len(), source.len());
    let mut tokens = Vec::new();
    let mut diagnostics = Vec::new();
    for tok in tokenize(source) {
        match tok.kind {
            TokenKind::Error => diagnostics.push(ParseDiagnostic::error(
                codes::INVALID_CHARACTER,
                format!("invalid character '{}'", tok.lexeme),
                tok.span,
            )),
            _ => tokens.push(tok),
        }
    }
    let mut parser = Parser {
        tokens,
        pos: 0,
        eof,
        diagnostics,
    };
    let document = parser.document();
    let mut diagnostics = parser.diagnostics;
    diagnostics.sort_by_key(|d| (d.span.start, d.span.end));
    ParseResult { document, diagnostics }
}

/// Marker for a construct that failed to parse; the diagnostic is already
/// recorded.
struct Failed;

type PResult<T> = Result<T, Failed>;

#[derive(Clone, Copy, PartialEq, Eq)]
enum Block {
    Defs,
    Rules,
    Concerns,
    Purposes,
}

impl Block {
    fn end_keyword(self) -> Keyword {
        match self {
            Block::Defs => Keyword::DefEnd,
            Block::Rules => Keyword::RuleEnd,
            Block::Concerns => Keyword::ConcernEnd,
            Block::Purposes => Keyword::PurposeEnd,
        }
    }

    fn start_keyword(self) -> Keyword {
        match self {
            Block::Defs => Keyword::DefStart,
            Block::Rules => Keyword::RuleStart,
            Block::Concerns => Keyword::ConcernStart,
            Block::Purposes => Keyword::PurposeStart,
        }
    }

    fn from_start(kw: Keyword) -> Option<Block> {
        Some(match kw {
            Keyword::DefStart => Block::Defs,
            Keyword::RuleStart => Block::Rules,
            Keyword::ConcernStart => Block::Concerns,
            Keyword::PurposeStart => Block::Purposes,
            _ => return None,
        })
    }

    fn from_end(kw: Keyword) -> Option<Block> {
        Some(match kw {
            Keyword::DefEnd => Block::Defs,
            Keyword::RuleEnd => Block::Rules,
            Keyword::ConcernEnd => Block::Concerns,
            Keyword::PurposeEnd => Block::Purposes,
            _ => return None,
        })
    }
}

fn is_block_keyword(kind: &TokenKind) -> bool {
    match kind {
        TokenKind::Keyword(kw) => Block::from_start(*kw).is_some() || Block::from_end(*kw).is_some(),
        _ => false,
    }
}

fn is_ident(kind: &TokenKind) -> bool {
    matches!(kind, TokenKind::CapIdent | TokenKind::LowIdent)
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
    eof: Span,
    diagnostics: Vec<ParseDiagnostic>,
}

impl Parser {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn peek_kind(&self) -> Option<&TokenKind> {
        self.peek().map(|t| &t.kind)
    }

    fn peek_kind_at(&self, offset: usize) -> Option<&TokenKind> {
        self.tokens.get(self.pos + offset).map(|t| &t.kind)
    }

    fn at_keyword(&self, kw: Keyword) -> bool {
        self.peek_kind() == Some(&TokenKind::Keyword(kw))
    }

    fn current_span(&self) -> Span {
        self.peek().map(|t| t.span).unwrap_or(self.eof)
    }

    fn prev_span(&self) -> Span {
        if self.pos == 0 {
            self.eof
        } else {
            self.tokens[self.pos - 1].span
        }
    }

    fn bump(&mut self) -> Token {
        let tok = self.tokens[self.pos].clone();
        self.pos += 1;
        tok
    }

    fn eat_keyword(&mut self, kw: Keyword) -> Option<Token> {
        if self.at_keyword(kw) {
            Some(self.bump())
        } else {
            None
        }
    }

    fn error_here(&mut self, expected: &str) -> Failed {
        let (span, found) = match self.peek() {
            Some(t) => (t.span, format!("'{}'", t.lexeme)),
            None => (self.eof, "end of input".to_string()),
        };
        self.diagnostics.push(ParseDiagnostic::error(
            codes::UNEXPECTED_TOKEN,
            format!("expected {expected}, found {found}"),
            span,
        ));
        Failed
    }

    fn expect_keyword(&mut self, kw: Keyword) -> PResult<Token> {
        match self.eat_keyword(kw) {
            Some(t) => Ok(t),
            None => Err(self.error_here(&format!("'{}'", kw.as_str()))),
        }
    }

    fn expect_cap_ident(&mut self, what: &str) -> PResult<Ident> {
        match self.peek_kind() {
            Some(TokenKind::CapIdent) => {
                let t = self.bump();
                Ok(Ident {
                    name: t.lexeme,
                    span: t.span,
                })
            }
            _ => Err(self.error_here(what)),
        }
    }

    fn expect_ident(&mut self, what: &str) -> PResult<Ident> {
        match self.peek_kind() {
            Some(k) if is_ident(k) => {
                let t = self.bump();
                Ok(Ident {
                    name: t.lexeme,
                    span: t.span,
                })
            }
            _ => Err(self.error_here(what)),
        }
    }

    fn expect_int(&mut self) -> PResult<(i64, Span)> {
        match self.peek_kind() {
            Some(TokenKind::Int(v)) => {
                let v = *v;
                let t = self.bump();
                match v {
                    Some(v) => Ok((v, t.span)),
                    None => {
                        self.diagnostics.push(ParseDiagnostic::error(
                            codes::INTEGER_OUT_OF_RANGE,
                            format!("integer literal '{}' is out of range", t.lexeme),
                            t.span,
                        ));
                        Err(Failed)
                    }
                }
            }
            _ => Err(self.error_here("integer")),
        }
    }

    fn at_rule_start(&self) -> bool {
        matches!(self.peek_kind(), Some(k) if is_ident(k))
            && matches!(
                self.peek_kind_at(1),
                Some(TokenKind::Keyword(Keyword::When)) | Some(TokenKind::Define)
            )
    }

    fn at_definition_start(&self) -> bool {
        matches!(
            self.peek_kind(),
            Some(TokenKind::Keyword(Keyword::Event))
                | Some(TokenKind::Keyword(Keyword::Measure))
                | Some(TokenKind::Keyword(Keyword::Constant))
        )
    }

    /// Skips tokens until something that can start a new item or block.
    fn recover(&mut self) {
        // Always make progress past the offending token.
        if self.peek().is_some() && !self.at_item_boundary() {
            self.pos += 1;
        }
        while self.peek().is_some() && !self.at_item_boundary() {
            self.pos += 1;
        }
    }

    fn at_item_boundary(&self) -> bool {
        match self.peek_kind() {
            None => true,
            Some(k) if is_block_keyword(k) => true,
            _ => self.at_rule_start() || self.at_definition_start(),
        }
    }

    fn document(&mut self) -> Document {
        let mut doc = Document::default();
        let mut current: Option<(Block, Span)> = None;
        let mut seen: Vec<Block> = Vec::new();

        while let Some(tok) = self.peek().cloned() {
            if let TokenKind::Keyword(kw) = tok.kind {
                if let Some(block) = Block::from_start(kw) {
                    self.pos += 1;
                    if let Some((open, _)) = current {
                        self.block_error(
                            format!(
                                "'{}' opened before '{}' was closed",
                                kw.as_str(),
                                open.end_keyword().as_str()
                            ),
                            tok.span,
                        );
                    }
                    if seen.contains(&block) {
                        self.block_error(format!("duplicate '{}' block", kw.as_str()), tok.span);
                    } else if seen.iter().any(|b| (*b as u8) > (block as u8)) {
                        self.block_error(format!("'{}' block is out of order", kw.as_str()), tok.span);
                    }
                    seen.push(block);
                    current = Some((block, tok.span));
                    continue;
                }
                if let Some(block) = Block::from_end(kw) {
                    self.pos += 1;
                    match current {
                        Some((open, _)) if open == block => current = None,
                        _ => self.block_error(
                            format!(
                                "'{}' without matching '{}'",
                                kw.as_str(),
                                block.start_keyword().as_str()
                            ),
                            tok.span,
                        ),
                    }
                    continue;
                }
            }

            let block = current.map(|(b, _)| b);
            if self.at_definition_start() {
                if block != Some(Block::Defs) {
                    self.block_error("definition outside 'def_start' ... 'def_end'", tok.span);
                }
                match self.definition() {
                    Ok(d) => doc.definitions.push(d),
                    Err(Failed) => self.recover(),
                }
            } else if self.at_rule_start() {
                match block {
                    Some(Block::Concerns) => match self.pattern() {
                        Ok(p) => doc.concerns.push(p),
                        Err(Failed) => self.recover(),
                    },
                    Some(Block::Purposes) => match self.pattern() {
                        Ok(p) => doc.purposes.push(p),
                        Err(Failed) => self.recover(),
                    },
                    other => {
                        if other != Some(Block::Rules) {
                            self.block_error("rule outside 'rule_start' ... 'rule_end'", tok.span);
                        }
                        match self.rule() {
                            Ok(r) => doc.rules.push(r),
                            Err(Failed) => self.recover(),
                        }
                    }
                }
            } else {
                let expected = match block {
                    Some(Block::Defs) => "definition or 'def_end'",
                    Some(Block::Rules) => "rule or 'rule_end'",
                    Some(Block::Concerns) => "concern or 'concern_end'",
                    Some(Block::Purposes) => "purpose or 'purpose_end'",
                    None => "block start",
                };
                self.error_here(expected);
                self.recover();
            }
        }

        if let Some((open, span)) = current {
            self.block_error(
                format!(
                    "'{}' is never closed; expected '{}'",
                    open.start_keyword().as_str(),
                    open.end_keyword().as_str()
                ),
                span,
            );
        }
        for required in [Block::Defs, Block::Rules] {
            if !seen.contains(&required) {
                let eof = self.eof;
                self.block_error(format!("missing '{}' block", required.start_keyword().as_str()), eof);
            }
        }
        doc
    }

    fn block_error(&mut self, message: impl Into<String>, span: Span) {
        self.diagnostics
            .push(ParseDiagnostic::error(codes::BLOCK_STRUCTURE, message, span));
    }

    fn definition(&mut self) -> PResult<Definition> {
        let kw = self.bump();
        let kind = match kw.kind {
            TokenKind::Keyword(Keyword::Event) => DefinitionKind::Event {
                name: self.expect_ident("event name")?,
            },
            TokenKind::Keyword(Keyword::Measure) => {
                let name = self.expect_ident("measure name")?;
                if self.peek_kind() == Some(&TokenKind::Colon) {
                    self.pos += 1;
                } else {
                    return Err(self.error_here("':'"));
                }
                let mtype = self.measure_type()?;
                DefinitionKind::Measure { name, mtype }
            }
            _ => {
                let name = self.expect_ident("constant name")?;
                if self.peek_kind() == Some(&TokenKind::Eq) {
                    self.pos += 1;
                } else {
                    return Err(self.error_here("'='"));
                }
                let (value, _) = self.expect_int()?;
                DefinitionKind::Constant { name, value }
            }
        };
        Ok(Definition {
            kind,
            span: kw.span.cover(self.prev_span()),
        })
    }

    fn measure_type(&mut self) -> PResult<MeasureType> {
        if self.eat_keyword(Keyword::Boolean).is_some() {
            return Ok(MeasureType::Boolean);
        }
        if self.eat_keyword(Keyword::Numeric).is_some() {
            return Ok(MeasureType::Numeric);
        }
        if self.eat_keyword(Keyword::Scale).is_some() {
            if self.peek_kind() != Some(&TokenKind::LParen) {
                return Err(self.error_here("'('"));
            }
            self.pos += 1;
            let mut labels = vec![self.expect_ident("scale label")?];
            while self.peek_kind() == Some(&TokenKind::Comma) {
                self.pos += 1;
                labels.push(self.expect_ident("scale label")?);
            }
            if self.peek_kind() != Some(&TokenKind::RParen) {
                return Err(self.error_here("',' or ')'"));
            }
            self.pos += 1;
            return Ok(MeasureType::Scale(labels));
        }
        Err(self.error_here("'boolean', 'numeric' or 'scale'"))
    }

    fn rule_head(&mut self) -> PResult<(Ident, Trigger)> {
        let id = self.expect_ident("rule identifier")?;
        if self.peek_kind() == Some(&TokenKind::Define) {
            self.pos += 1;
        }
        let when = self.expect_keyword(Keyword::When)?;
        let event = self.expect_cap_ident("event identifier")?;
        let condition = if self.eat_keyword(Keyword::And).is_some() {
            Some(self.condition()?)
        } else {
            None
        };
        let span = when.span.cover(self.prev_span());
        Ok((id, Trigger { event, condition, span }))
    }

    fn rule(&mut self) -> PResult<Rule> {
        let (id, trigger) = self.rule_head()?;
        self.expect_keyword(Keyword::Then)?;
        let response = self.response()?;
        let mut defeaters = Vec::new();
        while let Some(unless) = self.eat_keyword(Keyword::Unless) {
            let condition = self.condition()?;
            let response = if self.eat_keyword(Keyword::Then).is_some() {
                Some(self.response()?)
            } else {
                None
            };
            defeaters.push(Defeater {
                condition,
                response,
                span: unless.span.cover(self.prev_span()),
            });
        }
        Ok(Rule {
            span: id.span.cover(self.prev_span()),
            id,
            trigger,
            response,
            defeaters,
        })
    }

    fn pattern(&mut self) -> PResult<Pattern> {
        let (id, trigger) = self.rule_head()?;
        self.expect_keyword(Keyword::Then)?;
        let response = self.response()?;
        if let Some(unless) = self.peek().filter(|t| t.kind == TokenKind::Keyword(Keyword::Unless)) {
            self.diagnostics.push(ParseDiagnostic::error(
                codes::DEFEATER_IN_PATTERN,
                "concerns and purposes cannot have 'unless' clauses",
                unless.span,
            ));
            return Err(Failed);
        }
        Ok(Pattern {
            span: id.span.cover(self.prev_span()),
            id,
            trigger,
            response,
        })
    }

    fn response(&mut self) -> PResult<Response> {
        let start = self.current_span();
        let polarity = if self.eat_keyword(Keyword::Not).is_some() {
            Polarity::Forbid
        } else {
            Polarity::Require
        };
        let event = self.expect_cap_ident("event identifier")?;
        let deadline = match self.eat_keyword(Keyword::Within) {
            Some(within) => {
                let amount = match self.peek_kind() {
                    Some(TokenKind::Int(_)) => Amount::Int(self.expect_int()?.0),
                    Some(k) if is_ident(k) => Amount::Constant(self.expect_ident("constant")?),
                    _ => return Err(self.error_here("deadline amount")),
                };
                let unit = match self.peek_kind() {
                    Some(TokenKind::Unit(u)) => {
                        let u = *u;
                        self.pos += 1;
                        u
                    }
                    _ => return Err(self.error_here("time unit")),
                };
                Some(Deadline {
                    amount,
                    unit,
                    span: within.span.cover(self.prev_span()),
                })
            }
            None => None,
        };
        let otherwise = if self.eat_keyword(Keyword::Otherwise).is_some() {
            Some(Box::new(self.response()?))
        } else {
            None
        };
        Ok(Response {
            polarity,
            event,
            deadline,
            otherwise,
            span: start.cover(self.prev_span()),
        })
    }

    fn condition(&mut self) -> PResult<Expr> {
        let mut lhs = self.conjunction()?;
        while self.eat_keyword(Keyword::Or).is_some() {
            let rhs = self.conjunction()?;
            let span = lhs.span.cover(rhs.span);
            lhs = Expr {
                kind: ExprKind::Or(Box::new(lhs), Box::new(rhs)),
                span,
            };
        }
        Ok(lhs)
    }

    fn conjunction(&mut self) -> PResult<Expr> {
        let mut lhs = self.unary()?;
        while self.eat_keyword(Keyword::And).is_some() {
            let rhs = self.unary()?;
            let span = lhs.span.cover(rhs.span);
            lhs = Expr {
                kind: ExprKind::And(Box::new(lhs), Box::new(rhs)),
                span,
            };
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> PResult<Expr> {
        if let Some(not) = self.eat_keyword(Keyword::Not) {
            let inner = self.unary()?;
            let span = not.span.cover(inner.span);
            return Ok(Expr {
                kind: ExprKind::Not(Box::new(inner)),
                span,
            });
        }
        if self.peek_kind() == Some(&TokenKind::LParen) {
            let open = self.bump();
            let mut inner = self.condition()?;
            if self.peek_kind() != Some(&TokenKind::RParen) {
                return Err(self.error_here("')'"));
            }
            let close = self.bump();
            inner.span = open.span.cover(close.span);
            return Ok(inner);
        }
        let lhs = self.operand()?;
        let op = match self.peek_kind() {
            Some(TokenKind::Eq) => CompareOp::Eq,
            Some(TokenKind::Neq) => CompareOp::Neq,
            Some(TokenKind::Lt) => CompareOp::Lt,
            Some(TokenKind::Le) => CompareOp::Le,
            Some(TokenKind::Gt) => CompareOp::Gt,
            Some(TokenKind::Ge) => CompareOp::Ge,
            _ => {
                return Ok(Expr {
                    span: lhs.span,
                    kind: ExprKind::Atom(lhs),
                })
            }
        };
        self.pos += 1;
        let rhs = self.operand()?;
        Ok(Expr {
            span: lhs.span.cover(rhs.span),
            kind: ExprKind::Compare { op, lhs, rhs },
        })
    }

    fn operand(&mut self) -> PResult<Operand> {
        let kind = match self.peek_kind() {
            Some(TokenKind::CapIdent) | Some(TokenKind::LowIdent) => {
                OperandKind::Name(self.peek().unwrap().lexeme.clone())
            }
            Some(TokenKind::Int(_)) => {
                let (v, span) = self.expect_int()?;
                return Ok(Operand {
                    kind: OperandKind::Int(v),
                    span,
                });
            }
            Some(TokenKind::Keyword(Keyword::True)) => OperandKind::Bool(true),
            Some(TokenKind::Keyword(Keyword::False)) => OperandKind::Bool(false),
            _ => return Err(self.error_here("measure, constant or literal")),
        };
        let t = self.bump();
        Ok(Operand { kind, span: t.span })
    }
}
