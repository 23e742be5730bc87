//! The guarded-command language: syntax, checking, rendering and encoding.

pub mod ast;
pub mod canonical;
mod check;
pub mod code;
mod lexer;
mod parser;
pub mod pretty;

use thiserror::Error;

pub use ast::{BinOp, Decl, DeclKind, Expr, ModuleAst, Stmt};
pub use check::{check, intrinsic_arity, is_reserved, scopes, Scopes};
pub use code::{decode, encode, DecodeError, ProgramCode};
pub use lexer::Kw;
pub use parser::parse_unchecked;
pub use pretty::{pretty, pretty_decl, pretty_inline};

/// Table-backed halt test, available when a candidate model is supplied.
pub const HALT_TABLE_INTRINSIC: &str = "H";
/// The amended halt test that reports through the error channel.
pub const H1_INTRINSIC: &str = "H1";
/// Reports whether the caller runs inside `S1`.
pub const IN_S1_INTRINSIC: &str = "InS1";
/// Statement form `Error("...")`.
pub const ERROR_INTRINSIC: &str = "Error";

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParseError {
    #[error("syntax error at {line}:{col}: expected {}, found {found}", expected.join(" or "))]
    Syntax {
        line: usize,
        col: usize,
        expected: Vec<String>,
        found: String,
    },
    #[error("unresolved name `{name}` in {context}")]
    Name { name: String, context: String },
    #[error("`{name}` is a {found} but is used as a {expected} in {context}")]
    Kind {
        name: String,
        expected: String,
        found: String,
        context: String,
    },
    #[error("`{name}` takes {expected} argument(s), {found} given in {context}")]
    Arity {
        name: String,
        expected: usize,
        found: usize,
        context: String,
    },
    #[error("duplicate name `{name}` in {context}")]
    Duplicate { name: String, context: String },
    #[error("`{0}` is reserved for a runtime intrinsic")]
    Reserved(String),
    #[error("enquiry `{enquiry}` is not side-effect free: {detail}")]
    Purity { enquiry: String, detail: String },
    #[error("`return` outside an enquiry in `{0}`")]
    ReturnOutsideEnquiry(String),
    #[error("enquiry `{0}` can finish without returning a value")]
    MissingReturn(String),
    #[error("non-boolean guard `{guard}` in `{context}`")]
    Guard { guard: String, context: String },
}

/// Parses and checks a module: syntax, name resolution, kinds, arities,
/// enquiry purity and return discipline.
pub fn parse(src: &str) -> Result<ModuleAst, ParseError> {
    let m = parse_unchecked(src)?;
    check(&m)?;
    Ok(m)
}
