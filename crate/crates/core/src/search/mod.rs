//! Exhaustive counterexample searches, run natively over bounded ranges.

mod fermat;
mod goldbach;

use std::fmt;
use std::time::Duration;

use thiserror::Error;

pub use fermat::{fermat_candidates, fermat_search};
pub use goldbach::{goldbach_search, sieve, GoldbachOptions, GOLDBACH_MAX_EVEN, SCALE_NOTE};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SearchError {
    #[error("{base}^{exp} does not fit in 64 bits")]
    Overflow { base: u64, exp: u32 },
    #[error("invalid bound: {0}")]
    InvalidBound(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Witness {
    /// `a^n + b^n = c^n`
    Fermat { a: u64, b: u64, c: u64, n: u32 },
    /// An even number with no decomposition into two primes.
    Goldbach { m: u64 },
}

impl fmt::Display for Witness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Witness::Fermat { a, b, c, n } => write!(f, "({a},{b},{c},{n})"),
            Witness::Goldbach { m } => write!(f, "{m}"),
        }
    }
}

#[derive(Debug, Clone)]
pub struct SearchReport {
    pub range: String,
    pub counterexample: Option<Witness>,
    /// Every candidate in range was examined without finding one.
    pub exhausted: bool,
    pub examined: u64,
    /// Caveats printed with the report.
    pub notes: Vec<String>,
    /// Wall-clock time; not part of equality or rendered output.
    pub elapsed: Duration,
}

impl PartialEq for SearchReport {
    fn eq(&self, other: &Self) -> bool {
        self.range == other.range
            && self.counterexample == other.counterexample
            && self.exhausted == other.exhausted
            && self.examined == other.examined
            && self.notes == other.notes
    }
}

impl Eq for SearchReport {}

impl SearchReport {
    pub fn halted(&self) -> bool {
        self.counterexample.is_some() || self.exhausted
    }

    pub fn to_records(&self) -> String {
        let mut out = format!(
            "range={:?} halted={} exhausted={} examined={}",
            self.range,
            self.halted(),
            self.exhausted,
            self.examined
        );
        if let Some(w) = &self.counterexample {
            out.push_str(&format!(" counterexample={w}"));
        }
        out.push('\n');
        for n in &self.notes {
            out.push_str(&format!("note={n:?}\n"));
        }
        out
    }
}

impl fmt::Display for SearchReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for n in &self.notes {
            writeln!(f, "note: {n}")?;
        }
        writeln!(f, "range: {}", self.range)?;
        writeln!(f, "examined: {}", self.examined)?;
        match &self.counterexample {
            Some(w) => write!(f, "counterexample: {w}"),
            None if self.exhausted => f.write_str("exhausted: no counterexample"),
            None => f.write_str("incomplete"),
        }
    }
}
