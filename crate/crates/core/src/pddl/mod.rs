//! PDDL front end: tokenizer, parser, printer, and normalization into the
//! lifted task representation.

mod ast;
mod lexer;
mod normalize;
mod parser;
mod printer;

pub use ast::{
    ActionSchema, Atom, DomainAst, Literal, PredicateDecl, ProblemAst, Requirement, Term,
    TypedName,
};
pub use lexer::{tokenize, LexError, Token, TokenKind};
pub use normalize::normalize;
pub use parser::{parse_domain, parse_problem};

use thiserror::Error;

/// Source position, 1-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Pos {
    pub line: u32,
    pub column: u32,
}

impl std::fmt::Display for Pos {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}:{}", self.line, self.column)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PddlError {
    #[error("{pos}: {source}")]
    Lex {
        pos: Pos,
        #[source]
        source: LexError,
    },
    #[error("{pos}: parse error: {message}")]
    Parse { pos: Pos, message: String },
    #[error("{pos}: unsupported requirement {flag}")]
    UnsupportedRequirement { pos: Pos, flag: String },
    #[error("{pos}: problem is for domain '{found}', expected '{expected}'")]
    DomainMismatch {
        pos: Pos,
        expected: String,
        found: String,
    },
    #[error("{pos}: type error: {message}")]
    Type { pos: Pos, message: String },
}

impl PddlError {
    pub fn pos(&self) -> Pos {
        match self {
            PddlError::Lex { pos, .. }
            | PddlError::Parse { pos, .. }
            | PddlError::UnsupportedRequirement { pos, .. }
            | PddlError::DomainMismatch { pos, .. }
            | PddlError::Type { pos, .. } => *pos,
        }
    }

    /// Renders the diagnostic as `file:line:column: message`.
    pub fn with_file(&self, file: &str) -> String {
        let text = self.to_string();
        let pos = self.pos().to_string();
        let rest = text.strip_prefix(&pos).unwrap_or(&text);
        format!("{file}:{pos}{rest}")
    }
}

impl From<LexError> for PddlError {
    fn from(e: LexError) -> Self {
        PddlError::Lex {
            pos: Pos {
                line: e.line,
                column: e.column,
            },
            source: e,
        }
    }
}

/// Tokenizes and parses a domain file.
pub fn domain_from_str(src: &str) -> Result<DomainAst, PddlError> {
    parse_domain(&tokenize(src)?)
}

/// Tokenizes and parses a problem file against an already parsed domain.
pub fn problem_from_str(src: &str, domain: &DomainAst) -> Result<ProblemAst, PddlError> {
    parse_problem(&tokenize(src)?, domain)
}
