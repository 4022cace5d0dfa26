//! Textual procedure language and preference-spec documents.
//!
//! Grammar (pipeline order is application order, leftmost stage first):
//!
//! ```text
//! procedure  := stage ( "|>" stage )* [ "|>" "first" ]  |  "first"
//! stage      := "filter" orexpr | "sort" dir IDENT
//! dir        := "asc" | "desc"
//! orexpr     := andexpr ( "or" andexpr )*
//! andexpr    := atom ( "and" atom )*
//! atom       := IDENT (">=" | "<=") VALUE | "(" orexpr ")"
//! VALUE      := decimal literal | quoted label
//! ```
//!
//! Keywords are contextual, so an attribute may be called `first` or `and`.
//! A bare `first` is the identity procedure followed by the `first`
//! projection.

mod lexer;
mod parser;
mod printer;
mod spec_doc;

use std::fmt;

use serde::Serialize;

pub use parser::{parse_atom, parse_filter_expr, parse_procedure};
pub use printer::{print_filter_expr, print_procedure};
pub use spec_doc::{parse_preference_spec, print_preference_spec};

/// Byte offsets into the parsed text, `start <= end`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct SourceSpan {
    pub start: usize,
    pub end: usize,
}

impl SourceSpan {
    pub fn new(start: usize, end: usize) -> Self {
        debug_assert!(start <= end);
        SourceSpan { start, end }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    pub span: SourceSpan,
    pub message: String,
    /// What the parser would have accepted at `span`.
    pub expected: Vec<String>,
}

impl ParseError {
    pub(crate) fn new(span: SourceSpan, message: String, expected: Vec<String>) -> Self {
        ParseError {
            span,
            message,
            expected,
        }
    }
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} at {}..{}",
            self.message, self.span.start, self.span.end
        )?;
        if !self.expected.is_empty() {
            write!(f, " (expected {})", self.expected.join(" or "))?;
        }
        Ok(())
    }
}

impl std::error::Error for ParseError {}
