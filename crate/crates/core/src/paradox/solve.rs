//! Exhaustive solver for small systems of boolean equivalences.

use thiserror::Error;

use super::rules::DerivationStep;
use super::term::{TrmEquation, TrmTerm};

pub const MAX_UNKNOWNS: usize = 16;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TrmVerdict {
    /// Every satisfying assignment gives the queried unknown this value.
    Determined(bool),
    /// No assignment satisfies the system. Carries the derivation that
    /// produced it, when there is one.
    NoSolution(Vec<DerivationStep>),
    Underdetermined,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SolveError {
    #[error("{0} unknowns exceed the limit of {MAX_UNKNOWNS}")]
    TooManyUnknowns(usize),
    #[error("queried term {0} does not occur in the system")]
    QueryNotPresent(String),
}

/// Solves a single equation for `query` (default: its first unknown).
pub fn solve_iff(e: &TrmEquation, query: Option<&TrmTerm>) -> Result<TrmVerdict, SolveError> {
    solve_system(std::slice::from_ref(e), query)
}

/// Tries every assignment of the system's unknowns.
pub fn solve_system(
    eqs: &[TrmEquation],
    query: Option<&TrmTerm>,
) -> Result<TrmVerdict, SolveError> {
    let mut atoms = Vec::new();
    for e in eqs {
        e.left.collect_atoms(&mut atoms);
        e.right.collect_atoms(&mut atoms);
    }
    if atoms.len() > MAX_UNKNOWNS {
        return Err(SolveError::TooManyUnknowns(atoms.len()));
    }
    let q = match query {
        Some(q) => Some(
            atoms
                .iter()
                .position(|a| a == q)
                .ok_or_else(|| SolveError::QueryNotPresent(q.to_string()))?,
        ),
        None => (!atoms.is_empty()).then_some(0),
    };

    let mut seen = [false; 2];
    let mut any = false;
    for bits in 0u32..(1u32 << atoms.len()) {
        let value_of = |t: &TrmTerm| {
            let i = atoms.iter().position(|a| a == t).expect("atom collected");
            bits >> i & 1 == 1
        };
        if eqs.iter().all(|e| e.holds(&value_of)) {
            any = true;
            if let Some(q) = q {
                seen[(bits >> q & 1) as usize] = true;
            }
        }
    }
    Ok(match (any, q, seen) {
        (false, _, _) => TrmVerdict::NoSolution(Vec::new()),
        (true, Some(_), [true, false]) => TrmVerdict::Determined(false),
        (true, Some(_), [false, true]) => TrmVerdict::Determined(true),
        _ => TrmVerdict::Underdetermined,
    })
}
