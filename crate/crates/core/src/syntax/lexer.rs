//! Tokenizer for `.sleec` sources.
//!
//! The lexer is total: characters it does not understand become
//! [`TokenKind::Error`] tokens and lexing continues. Whitespace and `//`
//! comments are skipped, so the gaps between consecutive token spans are
//! exactly the trivia of the source.

use std::fmt;

use super::span::{LineIndex, Span};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TimeUnit {
    Seconds,
    Minutes,
    Hours,
    Days,
}

impl TimeUnit {
    pub fn factor(self) -> u64 {
        match self {
            TimeUnit::Seconds => 1,
            TimeUnit::Minutes => 60,
            TimeUnit::Hours => 3_600,
            TimeUnit::Days => 86_400,
        }
    }

    pub fn keyword(self) -> &'static str {
        match self {
            TimeUnit::Seconds => "seconds",
            TimeUnit::Minutes => "minutes",
            TimeUnit::Hours => "hours",
            TimeUnit::Days => "days",
        }
    }

    pub const ALL: [TimeUnit; 4] = [TimeUnit::Seconds, TimeUnit::Minutes, TimeUnit::Hours, TimeUnit::Days];
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Keyword {
    DefStart,
    DefEnd,
    RuleStart,
    RuleEnd,
    ConcernStart,
    ConcernEnd,
    PurposeStart,
    PurposeEnd,
    Event,
    Measure,
    Constant,
    Boolean,
    Numeric,
    Scale,
    When,
    And,
    Or,
    Not,
    Then,
    Unless,
    Within,
    Otherwise,
    True,
    False,
}

impl Keyword {
    pub fn from_word(word: &str) -> Option<Keyword> {
        use Keyword::*;
        Some(match word {
            "def_start" => DefStart,
            "def_end" => DefEnd,
            "rule_start" => RuleStart,
            "rule_end" => RuleEnd,
            "concern_start" => ConcernStart,
            "concern_end" => ConcernEnd,
            "purpose_start" => PurposeStart,
            "purpose_end" => PurposeEnd,
            "event" => Event,
            "measure" => Measure,
            "constant" => Constant,
            "boolean" => Boolean,
            "numeric" => Numeric,
            "scale" => Scale,
            "when" => When,
            "and" => And,
            "or" => Or,
            "not" => Not,
            "then" => Then,
            "unless" => Unless,
            "within" => Within,
            "otherwise" => Otherwise,
            "true" => True,
            "false" => False,
            _ => return None,
        })
    }

    pub fn as_str(self) -> &'static str {
        use Keyword::*;
        match self {
            DefStart => "def_start",
            DefEnd => "def_end",
            RuleStart => "rule_start",
            RuleEnd => "rule_end",
            ConcernStart => "concern_start",
            ConcernEnd => "concern_end",
            PurposeStart => "purpose_start",
            PurposeEnd => "purpose_end",
            Event => "event",
            Measure => "measure",
            Constant => "constant",
            Boolean => "boolean",
            Numeric => "numeric",
            Scale => "scale",
            When => "when",
            And => "and",
            Or => "or",
            Not => "not",
            Then => "then",
            Unless => "unless",
            Within => "within",
            Otherwise => "otherwise",
            True => "true",
            False => "false",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum TokenKind {
    Keyword(Keyword),
    Unit(TimeUnit),
    /// Identifier starting with an uppercase letter.
    CapIdent,
    /// Identifier starting with a lowercase letter or underscore.
    LowIdent,
    /// Unsigned integer literal; `None` if it does not fit in an `i64`.
    Int(Option<i64>),
    LParen,
    RParen,
    Comma,
    Colon,
    Define,
    Eq,
    Neq,
    Lt,
    Le,
    Gt,
    Ge,
    Error,
}

impl fmt::Display for TokenKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TokenKind::Keyword(k) => write!(f, "'{}'", k.as_str()),
            TokenKind::Unit(u) => write!(f, "'{}'", u.keyword()),
            TokenKind::CapIdent => f.write_str("capitalized identifier"),
            TokenKind::LowIdent => f.write_str("identifier"),
            TokenKind::Int(_) => f.write_str("integer"),
            TokenKind::LParen => f.write_str("'('"),
            TokenKind::RParen => f.write_str("')'"),
            TokenKind::Comma => f.write_str("','"),
            TokenKind::Colon => f.write_str("':'"),
            TokenKind::Define => f.write_str("':='"),
            TokenKind::Eq => f.write_str("'='"),
            TokenKind::Neq => f.write_str("'<>'"),
            TokenKind::Lt => f.write_str("'<'"),
            TokenKind::Le => f.write_str("'<='"),
            TokenKind::Gt => f.write_str("'>'"),
            TokenKind::Ge => f.write_str("'>='"),
            TokenKind::Error => f.write_str("invalid character"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub kind: TokenKind,
    pub lexeme: String,
    pub span: Span,
}

fn unit_from_word(word: &str) -> Option<TimeUnit> {
    Some(match word {
        "second" | "seconds" => TimeUnit::Seconds,
        "minute" | "minutes" => TimeUnit::Minutes,
        "hour" | "hours" => TimeUnit::Hours,
        "day" | "days" => TimeUnit::Days,
        _ => return None,
    })
}

fn is_ident_start(c: char) -> bool {
    c.is_ascii_alphabetic() || c == '_'
}

fn is_ident_continue(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_'
}

pub fn tokenize(source: &str) -> Vec<Token> {
    let index = LineIndex::new(source);
    let mut tokens = Vec::new();
    let mut chars = source.char_indices().peekable();

    while let Some(&(start, c)) = chars.peek() {
        if c.is_whitespace() {
            chars.next();
            continue;
        }
        if c == '/' && source[start..].starts_with("//") {
            while let Some(&(_, c)) = chars.peek() {
                if c == '\n' {
                    break;
                }
                chars.next();
            }
            continue;
        }

        chars.next();
        let mut end = start + c.len_utf8();
        let kind = if is_ident_start(c) {
            while let Some(&(i, c)) = chars.peek() {
                if !is_ident_continue(c) {
                    break;
                }
                chars.next();
                end = i + c.len_utf8();
            }
            let word = &source[start..end];
            if let Some(kw) = Keyword::from_word(word) {
                TokenKind::Keyword(kw)
            } else if let Some(unit) = unit_from_word(word) {
                TokenKind::Unit(unit)
            } else if c.is_ascii_uppercase() {
                TokenKind::CapIdent
            } else {
                TokenKind::LowIdent
            }
        } else if c.is_ascii_digit() {
            while let Some(&(i, c)) = chars.peek() {
                if !c.is_ascii_digit() {
                    break;
                }
                chars.next();
                end = i + 1;
            }
            TokenKind::Int(source[start..end].parse().ok())
        } else {
            let next = chars.peek().map(|&(_, c)| c);
            let two = |chars: &mut std::iter::Peekable<std::str::CharIndices<'_>>, end: &mut usize| {
                chars.next();
                *end += 1;
            };
            match (c, next) {
                ('(', _) => TokenKind::LParen,
                (')', _) => TokenKind::RParen,
                (',', _) => TokenKind::Comma,
                (':', Some('=')) => {
                    two(&mut chars, &mut end);
                    TokenKind::Define
                }
                (':', _) => TokenKind::Colon,
                ('=', _) => TokenKind::Eq,
                ('<', Some('>')) => {
                    two(&mut chars, &mut end);
                    TokenKind::Neq
                }
                ('<', Some('=')) => {
                    two(&mut chars, &mut end);
                    TokenKind::Le
                }
                ('<', _) => TokenKind::Lt,
                ('>', Some('=')) => {
                    two(&mut chars, &mut end);
                    TokenKind::Ge
                }
                ('>', _) => TokenKind::Gt,
                _ => TokenKind::Error,
            }
        };
        tokens.push(Token {
            kind,
            lexeme: source[start..end].to_string(),
            span: index.span(source, start, end),
        });
    }
    tokens
}
