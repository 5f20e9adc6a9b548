//! Scenario files: lexer, parser, syntax tree and canonical serializer.
//!
//! ```text
//! scenario  := decl*
//! decl      := system | structure | config | bridge | statement
//! system    := "system" IDENT "dim" INT ("=" IDENT ("x" IDENT)+)?
//! structure := "structure" IDENT "over" IDENT
//!              ("builtin" IDENT ("(" args ")")? | vector | matrix)
//! config    := "config" IDENT "over" IDENT
//!              ("builtin" IDENT "(" args ")" | ("projective"|"povm")? "{" (outcome ":" matrix)+ "}")
//! bridge    := "bridge" IDENT ("physical"|"epistemic") "via" IDENT
//!              "{" ("(" pattern ("," pattern)* ")" "->" outcome)* "}"
//! statement := "statement" IDENT "{" claim "}"
//! claim     := "yields" "(" subject ("," IDENT)? ")" "=" outcome
//!            | "compose" "{" claim claim+ "}" ("using" IDENT)?
//!            | "joint" "(" subject "," IDENT "," IDENT ")"
//! subject   := IDENT ("." IDENT)?
//! outcome   := IDENT | "(" outcome ("," outcome)* ")"
//! pattern   := "_" | outcome
//! ```
//!
//! Complex literals are `re`, `re + imi`, `re - imi` or `imi`. Comments run
//! from `#` or `//` to the end of the line.
//!
//! The configuration-free form `yields(S) = O` is accepted here. Judging it
//! is the checker's job.

pub mod ast;
mod lexer;
mod parser;
mod serialize;
mod span;

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

pub use ast::*;
pub use parser::{parse, KEYWORDS};
pub use serialize::serialize;
pub use span::Span;

/// Inputs larger than this are rejected without being tokenized.
pub const MAX_INPUT_BYTES: usize = 1 << 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ParseErrorKind {
    Syntax,
    DuplicateIdentifier,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ParseError {
    pub kind: ParseErrorKind,
    pub message: String,
    pub span: Span,
    /// What the parser would have accepted at `span`.
    pub expected: Vec<String>,
}

impl ParseError {
    pub(crate) fn syntax(message: String, span: Span, expected: Vec<String>) -> Self {
        ParseError { kind: ParseErrorKind::Syntax, message, span, expected }
    }

    pub(crate) fn duplicate(message: String, span: Span) -> Self {
        ParseError { kind: ParseErrorKind::DuplicateIdentifier, message, span, expected: Vec::new() }
    }
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}: {}", self.span.line, self.span.col, self.message)
    }
}

impl core::error::Error for ParseError {}
