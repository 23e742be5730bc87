//! The fixed reference programs every halt test in this crate is keyed on.

use super::ast::{Decl, Expr, Stmt};

pub const SKIP: &str = "Skip";
pub const LOOP: &str = "Loop";

/// `procedure Skip skip end`
pub fn skip() -> Decl {
    Decl::procedure(SKIP, vec![], vec![Stmt::Skip])
}

/// `procedure Loop while true do skip end end`
pub fn loop_() -> Decl {
    Decl::procedure(
        LOOP,
        vec![],
        vec![Stmt::While(Expr::Bool(true), vec![Stmt::Skip])],
    )
}
