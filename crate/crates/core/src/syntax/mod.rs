//! Front end for the SLEEC rule language: tokens, syntax tree, parser and
//! printer.

pub mod ast;
mod diagnostic;
pub mod lexer;
mod parser;
pub mod printer;
mod span;

pub use ast::*;
pub use diagnostic::{codes, ParseDiagnostic, Severity};
pub use lexer::{tokenize, Keyword, TimeUnit, Token, TokenKind};
pub use parser::{parse, ParseResult};
pub use printer::pretty_print;
pub use span::{LineCol, LineIndex, Span};
