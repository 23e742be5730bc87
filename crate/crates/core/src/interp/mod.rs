//! Deterministic small-step interpreter.
//!
//! One step executes one statement, or enters an enquiry from inside an
//! expression. Loop heads and guards count as statements. Returning from a
//! call finishes inside the same step as the callee's last statement.

mod compile;
mod machine;
mod report;
mod value;

use std::fmt;

use thiserror::Error;

use crate::halt_map::HaltMap;
use crate::lang::{ModuleAst, ParseError};

pub use compile::{CompiledDecl, Instr, Intrinsic, Program, Slot};
pub use machine::{
    fingerprint_of, invoked_within, purity_checks_performed, Configuration, Frame, Machine,
    MachineOptions, Step, CANNOT_TERMINATE, INVALID_PROGRAM,
};
pub(crate) use machine::StepEvent;
pub use report::{ErrorReport, SourceLocation};
pub use value::{Value, Width};

/// Interpreter misuse, as opposed to the language-level `Error` channel.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RuntimeError {
    #[error("module rejected: {0}")]
    Invalid(ParseError),
    #[error("no declaration named `{0}`")]
    UnknownEntry(String),
    #[error("`{name}` takes {expected} argument(s), {found} supplied")]
    EntryArity {
        name: String,
        expected: usize,
        found: usize,
    },
    #[error("step budget must be at least 1")]
    ZeroBudget,
    #[error("type error in {context}: {detail}")]
    Type { context: String, detail: String },
    #[error("call depth exceeds {0} frames")]
    StackOverflow(usize),
    #[error("operand stack underflow")]
    StackUnderflow,
    #[error("H called but no halt table is bound")]
    NoHaltTable,
    #[error("halt table has no entry for code {0}")]
    MissingHaltEntry(String),
    #[error("enquiry `{0}` finished without returning")]
    FellOffEnquiry(String),
    #[error("enquiry `{0}` changed the global store")]
    PurityViolation(String),
    #[error("step on a halted configuration")]
    AlreadyHalted,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Outcome {
    Halted { steps: u64, value: Option<Value> },
    /// Stopped through `Error`; counts as non-termination for halting purposes.
    ErrorStop { steps: u64, report: ErrorReport },
    BudgetExhausted { steps: u64 },
}

impl Outcome {
    pub fn steps(&self) -> u64 {
        match self {
            Outcome::Halted { steps, .. }
            | Outcome::ErrorStop { steps, .. }
            | Outcome::BudgetExhausted { steps } => *steps,
        }
    }

    /// Whether the run terminated normally; `ErrorStop` does not.
    pub fn is_halted(&self) -> bool {
        matches!(self, Outcome::Halted { .. })
    }
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Outcome::Halted { steps, value: None } => write!(f, "Halted({steps})"),
            Outcome::Halted {
                steps,
                value: Some(v),
            } => write!(f, "Halted({steps}, {v})"),
            Outcome::ErrorStop { steps, report } => {
                write!(f, "ErrorStop({steps}, {:?})", report.message)
            }
            Outcome::BudgetExhausted { steps } => write!(f, "BudgetExhausted({steps})"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TraceMode {
    #[default]
    Off,
    Fingerprints,
    /// Fingerprints plus full serializations.
    Full,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceEntry {
    pub step: u64,
    pub fingerprint: String,
    /// Innermost declaration, `None` once halted.
    pub decl: Option<String>,
    pub serialized: Option<Vec<u8>>,
}

/// Configurations visited by a run; with tracing on, `entries.len() == steps + 1`.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Trace {
    pub steps: u64,
    pub entries: Vec<TraceEntry>,
}

impl Trace {
    /// One line per configuration: step index, fingerprint, declaration.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for e in &self.entries {
            out.push_str(&format!(
                "{} {} {}\n",
                e.step,
                e.fingerprint,
                e.decl.as_deref().unwrap_or("-")
            ));
        }
        out
    }
}

#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    pub machine: MachineOptions,
    pub trace: TraceMode,
}

impl RunOptions {
    pub fn with_halt_table(mut self, table: HaltMap) -> Self {
        self.machine.halt_table = Some(table);
        self
    }
}

/// Runs the parameterless declaration `entry` for at most `budget` steps.
pub fn run(
    m: &ModuleAst,
    entry: &str,
    budget: u64,
    options: &RunOptions,
) -> Result<(Outcome, Trace), RuntimeError> {
    let machine = Machine::new(m, options.machine.clone())?;
    machine.run(entry, &[], budget, options.trace)
}

impl Machine {
    pub fn run(
        &self,
        entry: &str,
        args: &[Value],
        budget: u64,
        trace_mode: TraceMode,
    ) -> Result<(Outcome, Trace), RuntimeError> {
        if budget == 0 {
            return Err(RuntimeError::ZeroBudget);
        }
        let mut c = self.initial(entry, args)?;
        let mut trace = Trace::default();
        self.record(&mut trace, trace_mode, 0, &c);
        for step in 1..=budget {
            let event = self.step_in_place(&mut c)?;
            trace.steps = step;
            self.record(&mut trace, trace_mode, step, &c);
            match event {
                StepEvent::Running => {}
                StepEvent::Halted(value) => return Ok((Outcome::Halted { steps: step, value }, trace)),
                StepEvent::Error(report) => {
                    return Ok((Outcome::ErrorStop { steps: step, report }, trace))
                }
            }
        }
        Ok((Outcome::BudgetExhausted { steps: budget }, trace))
    }

    fn record(&self, trace: &mut Trace, mode: TraceMode, step: u64, c: &Configuration) {
        if mode == TraceMode::Off {
            return;
        }
        let serialized = c.serialize();
        trace.entries.push(TraceEntry {
            step,
            fingerprint: fingerprint_of(&serialized),
            decl: c.frames.last().map(|f| self.decl_name(f.decl).to_string()),
            serialized: (mode == TraceMode::Full).then_some(serialized),
        });
    }
}
