//! Guarded-command programs, a step interpreter with a halt-table oracle,
//! decision procedures for finite-state halting, and the self-referential
//! programs that defeat any total halting test.

pub mod analyzer;
pub mod corpus;
pub mod diagonal;
pub mod halt_map;
pub mod interp;
pub mod lang;
pub mod paradox;
pub mod search;
