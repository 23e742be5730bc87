//! Halting decisions for finite-state programs.
//!
//! Two independent procedures: [`Analyzer::decide`] remembers every
//! configuration and stops at the first revisit; [`Analyzer::counter`] keeps
//! no memory at all and simply runs past the number of configurations the
//! program could possibly occupy.

mod models;
mod reduction;

use std::collections::HashMap;
use std::fmt;

use thiserror::Error;

use crate::interp::{
    fingerprint_of, ErrorReport, Machine, MachineOptions, RuntimeError, StepEvent, Value,
};
use crate::lang::ModuleAst;

pub use models::{
    check_model, check_model_with, enumerate_models, enumerate_models_with, ConsistencyEntry,
    ConsistencyReport, ModelSearch, MAX_MODEL_PROGRAMS,
};
pub use reduction::{wrap_data, wrap_ignore, WRAP_DATA_NAME, WRAP_IGNORE_NAME};

/// Default ceiling on the counter bound.
pub const DEFAULT_MAX_BOUND: u128 = 1 << 32;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AnalysisError {
    #[error(transparent)]
    Runtime(#[from] RuntimeError),
    #[error("`{0}` is recursive; its configuration space has no static bound")]
    Unbounded(String),
    #[error("counter bound {bound} exceeds the maximum {max}")]
    BudgetOverflow { bound: String, max: u128 },
    #[error("`{0}` left its computed configuration space; the bound is wrong")]
    BoundViolated(String),
    #[error("{count} programs exceed the model-enumeration cap of {max}")]
    TooManyPrograms { count: usize, max: usize },
    #[error("candidate halt map has no entry for `{0}`")]
    MissingKey(String),
    #[error("`{name}` must take exactly {expected} parameter(s), it takes {found}")]
    ArityError {
        name: String,
        expected: usize,
        found: usize,
    },
    #[error("identifier `{0}` already occurs in the wrapped program")]
    NameCapture(String),
}

/// Two step indices at which execution sat in the same configuration.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CycleEvidence {
    pub first: u64,
    pub second: u64,
    pub fingerprint: String,
}

impl CycleEvidence {
    pub fn cycle_length(&self) -> u64 {
        self.second - self.first
    }

    /// Re-executes from scratch and compares the full serializations at the
    /// two indices.
    pub fn replay(&self, machine: &Machine, entry: &str, args: &[Value]) -> Result<bool, RuntimeError> {
        let mut c = machine.initial(entry, args)?;
        let mut at_first = None;
        for step in 0..=self.second {
            if step == self.first {
                at_first = Some(c.serialize());
            }
            if step == self.second {
                let s = c.serialize();
                return Ok(at_first.as_deref() == Some(&s[..]) && fingerprint_of(&s) == self.fingerprint);
            }
            match machine.step_in_place(&mut c)? {
                StepEvent::Running => {}
                _ => return Ok(false),
            }
        }
        Ok(false)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    Halts(u64),
    Diverges(CycleEvidence),
    /// The `Error` channel fired; classified as non-termination.
    ErrorNontermination(ErrorReport),
    /// The explicit step cap ran out first.
    Undecided(u64),
}

impl Verdict {
    /// `Some(true)` for halting, `Some(false)` for either kind of
    /// non-termination, `None` when undecided.
    pub fn halts(&self) -> Option<bool> {
        match self {
            Verdict::Halts(_) => Some(true),
            Verdict::Diverges(_) | Verdict::ErrorNontermination(_) => Some(false),
            Verdict::Undecided(_) => None,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Verdict::Halts(_) => "halts",
            Verdict::Diverges(_) => "diverges",
            Verdict::ErrorNontermination(_) => "error",
            Verdict::Undecided(_) => "undecided",
        }
    }

    /// `key=value` fields for the records format.
    pub fn record_fields(&self) -> String {
        match self {
            Verdict::Halts(k) => format!("verdict=halts steps={k}"),
            Verdict::Diverges(e) => format!(
                "verdict=diverges first={} second={} fingerprint={}",
                e.first, e.second, e.fingerprint
            ),
            Verdict::ErrorNontermination(r) => {
                format!("verdict=error message={:?} site={}", r.message, r.site)
            }
            Verdict::Undecided(cap) => format!("verdict=undecided cap={cap}"),
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::Halts(1) => f.write_str("Halts in 1 step"),
            Verdict::Halts(k) => write!(f, "Halts in {k} steps"),
            Verdict::Diverges(e) => write!(
                f,
                "Diverges: state at step {} revisited at step {}",
                e.first, e.second
            ),
            Verdict::ErrorNontermination(r) => {
                write!(f, "Does not terminate: Error {:?} at {}", r.message, r.site)
            }
            Verdict::Undecided(cap) => write!(f, "Undecided after {cap} steps"),
        }
    }
}

/// Size of the configuration space reachable from an entry point.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StateBudget {
    /// Bits needed for the store: globals plus every frame's slots.
    pub store_bits: u32,
    /// Program points: statement boundaries plus call sites, plus one for
    /// "no frame here".
    pub points: u64,
    /// Deepest call chain.
    pub depth: u32,
    /// Distinct control stacks. Never more than `points^depth`.
    pub control: u128,
}

impl StateBudget {
    /// `control × 2^store_bits`, or `None` when that overflows 128 bits.
    pub fn bound(&self) -> Option<u128> {
        1u128
            .checked_shl(self.store_bits)
            .filter(|_| self.store_bits < 128)
            .and_then(|s| s.checked_mul(self.control))
    }

    /// The textbook `L^d × 2^n`, which `bound` never exceeds.
    pub fn coarse_bound(&self) -> Option<u128> {
        let l = (self.points as u128).checked_pow(self.depth)?;
        1u128
            .checked_shl(self.store_bits)
            .filter(|_| self.store_bits < 128)
            .and_then(|s| s.checked_mul(l))
    }

    fn bound_text(&self) -> String {
        match self.bound() {
            Some(b) => b.to_string(),
            None => format!("{} * 2^{}", self.control, self.store_bits),
        }
    }
}

/// A compiled module plus the analyses over it.
#[derive(Debug, Clone)]
pub struct Analyzer {
    pub machine: Machine,
}

impl Analyzer {
    pub fn new(m: &ModuleAst, options: MachineOptions) -> Result<Analyzer, AnalysisError> {
        Ok(Analyzer {
            machine: Machine::new(m, options)?,
        })
    }

    /// Visited-set decision. `cap` bounds the number of steps.
    pub fn decide(&self, entry: &str, args: &[Value], cap: Option<u64>) -> Result<Verdict, AnalysisError> {
        let mut c = self.machine.initial(entry, args)?;
        let mut seen: HashMap<Vec<u8>, u64> = HashMap::new();
        let mut step = 0u64;
        loop {
            let s = c.serialize();
            if let Some(&first) = seen.get(&s) {
                return Ok(Verdict::Diverges(CycleEvidence {
                    first,
                    second: step,
                    fingerprint: fingerprint_of(&s),
                }));
            }
            seen.insert(s, step);
            if cap.is_some_and(|cap| step >= cap) {
                return Ok(Verdict::Undecided(step));
            }
            step += 1;
            match self.machine.step_in_place(&mut c)? {
                StepEvent::Running => {}
                StepEvent::Halted(_) => return Ok(Verdict::Halts(step)),
                StepEvent::Error(r) => return Ok(Verdict::ErrorNontermination(r)),
            }
        }
    }

    /// Configuration-space size for runs starting at `entry`.
    pub fn state_budget(&self, entry: &str) -> Result<StateBudget, AnalysisError> {
        let p = &self.machine.program;
        let root = p
            .decl_index(entry)
            .ok_or_else(|| RuntimeError::UnknownEntry(entry.into()))?;
        let depth = p
            .max_call_depth(root)
            .ok_or_else(|| AnalysisError::Unbounded(entry.into()))?;

        let reachable = reachable_from(p, root);
        let points: u64 = reachable
            .iter()
            .map(|&d| (p.decls[d].boundaries() + p.decls[d].call_sites()) as u64)
            .sum::<u64>()
            + 1;
        let frame_slots = reachable
            .iter()
            .map(|&d| p.decls[d].locals.len() + p.decls[d].max_suspended)
            .max()
            .unwrap_or(0);

        let w = self.machine.width().bits();
        let bits_per_value = if !p.untyped_globals && frame_slots == 0 {
            w
        } else {
            // integers, two booleans, every code literal, and "absent" for
            // operand slots not in use
            let alphabet = (1u128 << w) + 3 + p.codes.len() as u128;
            128 - (alphabet - 1).leading_zeros()
        };
        let slots = p.globals.len() + depth * frame_slots;
        let store_bits = u32::try_from(slots)
            .ok()
            .and_then(|s| s.checked_mul(bits_per_value))
            .unwrap_or(u32::MAX);

        let mut memo = vec![None; p.decls.len()];
        let control = control_states(p, root, &mut memo);
        Ok(StateBudget {
            store_bits,
            points,
            depth: depth as u32,
            control,
        })
    }

    /// Pigeonhole decision: runs `bound + 1` steps with no memory of past
    /// configurations. Divergence evidence is then located by cycle
    /// detection in constant memory.
    pub fn counter(&self, entry: &str, args: &[Value], max_bound: u128) -> Result<Verdict, AnalysisError> {
        let budget = self.state_budget(entry)?;
        let bound = match budget.bound() {
            Some(b) if b <= max_bound => b,
            _ => {
                return Err(AnalysisError::BudgetOverflow {
                    bound: budget.bound_text(),
                    max: max_bound,
                })
            }
        };
        let mut c = self.machine.initial(entry, args)?;
        let mut step = 0u64;
        while (step as u128) <= bound {
            step += 1;
            match self.machine.step_in_place(&mut c)? {
                StepEvent::Running => {}
                StepEvent::Halted(_) => return Ok(Verdict::Halts(step)),
                StepEvent::Error(r) => return Ok(Verdict::ErrorNontermination(r)),
            }
        }
        // bound + 1 configurations after the start, none halted: some
        // configuration repeats. Locate the cycle in constant memory.
        let evidence = self.floyd(entry, args, 3 * (bound + 1))?;
        Ok(Verdict::Diverges(evidence))
    }

    /// Tortoise and hare over configurations known to cycle. Returns the
    /// first configuration on the cycle and its next occurrence, the same
    /// pair a visited set finds.
    fn floyd(&self, entry: &str, args: &[Value], limit: u128) -> Result<CycleEvidence, AnalysisError> {
        let mut spent = 0u128;
        let mut advance = |c: &mut crate::interp::Configuration| -> Result<(), AnalysisError> {
            spent += 1;
            if spent > limit {
                return Err(AnalysisError::BoundViolated(entry.into()));
            }
            match self.machine.step_in_place(c)? {
                StepEvent::Running => Ok(()),
                _ => Err(AnalysisError::BoundViolated(entry.into())),
            }
        };
        let start = self.machine.initial(entry, args)?;
        let mut tortoise = start.clone();
        let mut hare = start.clone();
        loop {
            advance(&mut tortoise)?;
            advance(&mut hare)?;
            advance(&mut hare)?;
            if tortoise == hare {
                break;
            }
        }
        let mut first = 0u64;
        tortoise = start;
        while tortoise != hare {
            advance(&mut tortoise)?;
            advance(&mut hare)?;
            first += 1;
        }
        let mut length = 1u64;
        hare = tortoise.clone();
        advance(&mut hare)?;
        while tortoise != hare {
            advance(&mut hare)?;
            length += 1;
        }
        Ok(CycleEvidence {
            first,
            second: first + length,
            fingerprint: tortoise.fingerprint(),
        })
    }
}

/// Number of control stacks rooted at `d`: its own boundaries, plus for every
/// call site the control stacks of the callee stacked on top.
fn control_states(p: &crate::interp::Program, d: usize, memo: &mut Vec<Option<u128>>) -> u128 {
    if let Some(v) = memo[d] {
        return v;
    }
    let decl = &p.decls[d];
    let mut total = decl.boundaries() as u128;
    for instr in &decl.code {
        if let crate::interp::Instr::Call { decl: callee, .. } = instr {
            total = total.saturating_add(control_states(p, *callee, memo));
        }
    }
    memo[d] = Some(total);
    total
}

fn reachable_from(p: &crate::interp::Program, root: usize) -> Vec<usize> {
    let mut seen = vec![false; p.decls.len()];
    let mut stack = vec![root];
    while let Some(d) = stack.pop() {
        if !std::mem::replace(&mut seen[d], true) {
            stack.extend(p.decls[d].callees.iter().copied());
        }
    }
    (0..p.decls.len()).filter(|&d| seen[d]).collect()
}

/// Visited-set decision for a parameterless entry at default width.
pub fn decide_halting(m: &ModuleAst, entry: &str, cap: Option<u64>) -> Result<Verdict, AnalysisError> {
    Analyzer::new(m, MachineOptions::default())?.decide(entry, &[], cap)
}

/// Two-argument view: does `entry` applied to `args` halt?
pub fn decide_applied(
    m: &ModuleAst,
    entry: &str,
    args: &[Value],
    options: MachineOptions,
) -> Result<Verdict, AnalysisError> {
    Analyzer::new(m, options)?.decide(entry, args, None)
}

/// Counter-method decision with the default bound ceiling.
pub fn counter_oracle(m: &ModuleAst, entry: &str) -> Result<Verdict, AnalysisError> {
    Analyzer::new(m, MachineOptions::default())?.counter(entry, &[], DEFAULT_MAX_BOUND)
}
