//! Wrappers turning a one-argument halting question into a parameterless
//! one and back.

use crate::lang::{Decl, DeclKind, Expr, Stmt};

use super::AnalysisError;

pub const WRAP_DATA_NAME: &str = "T";
pub const WRAP_IGNORE_NAME: &str = "U";

/// `procedure T P1(d) end`: halts iff `P1` applied to `d` halts.
pub fn wrap_data(p1: &Decl, d: u64) -> Result<Decl, AnalysisError> {
    if p1.params.len() != 1 || p1.kind != DeclKind::Procedure {
        return Err(AnalysisError::ArityError {
            name: p1.name.clone(),
            expected: 1,
            found: p1.params.len(),
        });
    }
    if p1.name == WRAP_DATA_NAME {
        return Err(AnalysisError::NameCapture(WRAP_DATA_NAME.into()));
    }
    Ok(Decl::procedure(
        WRAP_DATA_NAME,
        vec![],
        vec![Stmt::Call(p1.name.clone(), vec![Expr::Int(d)])],
    ))
}

/// `procedure U(fresh) P0() end`: ignores its argument.
pub fn wrap_ignore(p0: &Decl, fresh: &str) -> Result<Decl, AnalysisError> {
    if !p0.params.is_empty() || p0.kind != DeclKind::Procedure {
        return Err(AnalysisError::ArityError {
            name: p0.name.clone(),
            expected: 0,
            found: p0.params.len(),
        });
    }
    if p0.name == WRAP_IGNORE_NAME || fresh == WRAP_IGNORE_NAME {
        return Err(AnalysisError::NameCapture(WRAP_IGNORE_NAME.into()));
    }
    if fresh == p0.name || p0.identifiers().contains(&fresh) {
        return Err(AnalysisError::NameCapture(fresh.into()));
    }
    Ok(Decl::procedure(
        WRAP_IGNORE_NAME,
        vec![fresh.into()],
        vec![Stmt::Call(p0.name.clone(), vec![])],
    ))
}
