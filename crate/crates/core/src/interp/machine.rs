use std::sync::atomic::{AtomicU64, Ordering};

use sha2::{Digest, Sha256};

use crate::halt_map::HaltMap;
use crate::lang::{canonical, encode, BinOp, DeclKind, ModuleAst, ProgramCode, H1_INTRINSIC};
use crate::paradox;

use super::compile::{Instr, Intrinsic, Program, Slot};
use super::report::{ErrorReport, SourceLocation};
use super::value::{Value, Width};
use super::RuntimeError;

/// Message raised by H1 when it is asked about S1 from inside S1.
pub const CANNOT_TERMINATE: &str = "Cannot terminate";
/// Message raised by H1 for a program outside its set.
pub const INVALID_PROGRAM: &str = "Invalid program";

static PURITY_CHECKS: AtomicU64 = AtomicU64::new(0);

/// Number of enquiry returns whose global store was compared against the
/// store at entry, across the whole process.
pub fn purity_checks_performed() -> u64 {
    PURITY_CHECKS.load(Ordering::Relaxed)
}

#[derive(Debug, Clone)]
pub struct Frame {
    pub decl: usize,
    pub pc: usize,
    pub locals: Vec<Value>,
    pub stack: Vec<Value>,
    /// Global store when an enquiry frame was entered. Not part of the
    /// configuration proper: purity makes it equal to the current store.
    entry_globals: Option<Vec<Value>>,
}

impl PartialEq for Frame {
    fn eq(&self, other: &Self) -> bool {
        self.decl == other.decl
            && self.pc == other.pc
            && self.locals == other.locals
            && self.stack == other.stack
    }
}

impl Eq for Frame {}

/// Global store plus control stack.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Configuration {
    pub globals: Vec<Value>,
    pub frames: Vec<Frame>,
}

impl Configuration {
    /// Canonical serialization. Globals come in name order (the program
    /// sorts them), then each frame from the outermost.
    pub fn serialize(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(16 + 10 * self.globals.len());
        for v in &self.globals {
            v.write_canonical(&mut out);
        }
        out.extend_from_slice(&(self.frames.len() as u32).to_be_bytes());
        for f in &self.frames {
            out.extend_from_slice(&(f.decl as u32).to_be_bytes());
            out.extend_from_slice(&(f.pc as u32).to_be_bytes());
            for v in &f.locals {
                v.write_canonical(&mut out);
            }
            out.extend_from_slice(&(f.stack.len() as u32).to_be_bytes());
            for v in &f.stack {
                v.write_canonical(&mut out);
            }
        }
        out
    }

    /// Short hex digest of the serialization, for traces.
    pub fn fingerprint(&self) -> String {
        fingerprint_of(&self.serialize())
    }

    pub fn is_halted(&self) -> bool {
        self.frames.is_empty()
    }
}

pub fn fingerprint_of(serialized: &[u8]) -> String {
    let digest = Sha256::digest(serialized);
    hex::encode(&digest[..8])
}

/// True iff some frame below the innermost entry of `chain` is `target`.
///
/// `chain` lists the dynamic call chain outermost first and ends with the
/// asking intrinsic itself, e.g. `[S1, H1, InS1]`.
pub fn invoked_within(chain: &[&str], target: &str) -> bool {
    match chain.split_last() {
        Some((_, below)) => below.contains(&target),
        None => false,
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Step {
    Next(Configuration),
    Halted(Option<Value>),
    Error(ErrorReport),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum StepEvent {
    Running,
    Halted(Option<Value>),
    Error(ErrorReport),
}

#[derive(Debug, Clone)]
pub struct MachineOptions {
    pub width: Width,
    pub max_frames: usize,
    pub halt_table: Option<HaltMap>,
    /// File name shown in error reports.
    pub source_name: String,
}

impl Default for MachineOptions {
    fn default() -> Self {
        MachineOptions {
            width: Width::DEFAULT,
            max_frames: 64,
            halt_table: None,
            source_name: "<input>".into(),
        }
    }
}

/// A compiled module ready to execute.
#[derive(Debug, Clone)]
pub struct Machine {
    pub program: Program,
    pub options: MachineOptions,
    skip_code: ProgramCode,
    loop_code: ProgramCode,
    s1_code: ProgramCode,
}

impl Machine {
    pub fn new(m: &ModuleAst, options: MachineOptions) -> Result<Machine, RuntimeError> {
        Ok(Machine {
            program: Program::compile(m, options.width)?,
            options,
            skip_code: encode(&canonical::skip()),
            loop_code: encode(&canonical::loop_()),
            s1_code: encode(&paradox::build_s1()),
        })
    }

    pub fn width(&self) -> Width {
        self.options.width
    }

    pub fn decl_name(&self, decl: usize) -> &str {
        &self.program.decls[decl].name
    }

    /// Declaration names of the frames in `c`, outermost first.
    pub fn call_chain<'a>(&'a self, c: &Configuration) -> Vec<&'a str> {
        c.frames.iter().map(|f| self.decl_name(f.decl)).collect()
    }

    /// The configuration about to run `entry` applied to `args`.
    pub fn initial(&self, entry: &str, args: &[Value]) -> Result<Configuration, RuntimeError> {
        let decl = self
            .program
            .decl_index(entry)
            .ok_or_else(|| RuntimeError::UnknownEntry(entry.into()))?;
        let d = &self.program.decls[decl];
        if d.params != args.len() {
            return Err(RuntimeError::EntryArity {
                name: entry.into(),
                expected: d.params,
                found: args.len(),
            });
        }
        let globals = vec![Value::Int(0); self.program.globals.len()];
        let frame = self.new_frame(decl, args.to_vec(), &globals);
        Ok(Configuration {
            globals,
            frames: vec![frame],
        })
    }

    fn new_frame(&self, decl: usize, mut args: Vec<Value>, globals: &[Value]) -> Frame {
        let d = &self.program.decls[decl];
        args.resize(d.locals.len(), Value::Int(0));
        Frame {
            decl,
            pc: 0,
            locals: args,
            stack: Vec::new(),
            entry_globals: (d.kind == DeclKind::Enquiry).then(|| globals.to_vec()),
        }
    }

    /// True iff a frame of `target` lies anywhere in the dynamic call chain
    /// of `c`, i.e. below an intrinsic executing on top of `c`.
    pub fn intrinsic_in_s1(&self, c: &Configuration, target: &str) -> bool {
        let mut chain = self.call_chain(c);
        chain.push(crate::lang::IN_S1_INTRINSIC);
        invoked_within(&chain, target)
    }

    /// One interpreter step from `c`.
    pub fn step(&self, c: &Configuration) -> Result<Step, RuntimeError> {
        let mut next = c.clone();
        Ok(match self.step_in_place(&mut next)? {
            StepEvent::Running => Step::Next(next),
            StepEvent::Halted(v) => Step::Halted(v),
            StepEvent::Error(r) => Step::Error(r),
        })
    }

    pub(crate) fn step_in_place(&self, c: &mut Configuration) -> Result<StepEvent, RuntimeError> {
        if c.frames.is_empty() {
            return Err(RuntimeError::AlreadyHalted);
        }
        loop {
            let top = c.frames.len() - 1;
            let decl = c.frames[top].decl;
            let pc = c.frames[top].pc;
            let instr = &self.program.decls[decl].code[pc];
            c.frames[top].pc += 1;

            match instr {
                Instr::PushInt(n) => c.frames[top].stack.push(Value::Int(*n)),
                Instr::PushBool(b) => c.frames[top].stack.push(Value::Bool(*b)),
                Instr::PushCode(i) => c.frames[top]
                    .stack
                    .push(Value::Code(self.program.codes[*i].clone())),
                Instr::Load(slot) => {
                    let v = match slot {
                        Slot::Local(i) => c.frames[top].locals[*i].clone(),
                        Slot::Global(i) => c.globals[*i].clone(),
                    };
                    c.frames[top].stack.push(v);
                }
                Instr::Store(slot) => {
                    let v = pop(&mut c.frames[top])?;
                    match slot {
                        Slot::Local(i) => c.frames[top].locals[*i] = v,
                        Slot::Global(i) => c.globals[*i] = v,
                    }
                }
                Instr::Bin(op) => {
                    let r = pop(&mut c.frames[top])?;
                    let l = pop(&mut c.frames[top])?;
                    let v = self.binary(*op, l, r)?;
                    c.frames[top].stack.push(v);
                }
                Instr::Not => {
                    let v = pop(&mut c.frames[top])?;
                    let b = expect_bool(v, "not")?;
                    c.frames[top].stack.push(Value::Bool(!b));
                }
                Instr::Jump(t) => c.frames[top].pc = *t,
                Instr::JumpIfFalse(t) => {
                    let v = pop(&mut c.frames[top])?;
                    if !expect_bool(v, "guard")? {
                        c.frames[top].pc = *t;
                    }
                }
                Instr::Call { decl: callee, argc } => {
                    if c.frames.len() >= self.options.max_frames {
                        return Err(RuntimeError::StackOverflow(self.options.max_frames));
                    }
                    let stack = &mut c.frames[top].stack;
                    let args = stack.split_off(stack.len() - argc);
                    let frame = self.new_frame(*callee, args, &c.globals);
                    c.frames.push(frame);
                }
                Instr::Intrinsic(which) => {
                    let arg = match which.arity() {
                        0 => None,
                        _ => Some(pop(&mut c.frames[top])?),
                    };
                    match self.intrinsic(*which, arg, c)? {
                        Ok(b) => c.frames[top].stack.push(Value::Bool(b)),
                        Err(report) => return Ok(StepEvent::Error(report)),
                    }
                }
                Instr::Return => {
                    let v = pop(&mut c.frames[top])?;
                    let frame = c.frames.pop().expect("non-empty");
                    self.check_purity(&frame, &c.globals)?;
                    match c.frames.last_mut() {
                        Some(caller) => caller.stack.push(v),
                        None => return Ok(StepEvent::Halted(Some(v))),
                    }
                }
                Instr::End => {
                    if self.program.decls[decl].kind == DeclKind::Enquiry {
                        return Err(RuntimeError::FellOffEnquiry(self.decl_name(decl).into()));
                    }
                    c.frames.pop();
                    if c.frames.is_empty() {
                        return Ok(StepEvent::Halted(None));
                    }
                }
                Instr::Error(msg) => {
                    // undo the pc advance so the report points at the statement
                    c.frames[top].pc = pc;
                    let name = self.decl_name(decl).to_string();
                    return Ok(StepEvent::Error(self.report(
                        c,
                        name,
                        self.program.messages[*msg].clone(),
                    )));
                }
            }

            let top = c.frames.last().expect("frames remain");
            if self.program.decls[top.decl].boundary[top.pc] {
                return Ok(StepEvent::Running);
            }
        }
    }

    fn check_purity(&self, frame: &Frame, globals: &[Value]) -> Result<(), RuntimeError> {
        if let Some(before) = &frame.entry_globals {
            PURITY_CHECKS.fetch_add(1, Ordering::Relaxed);
            if before.as_slice() != globals {
                return Err(RuntimeError::PurityViolation(
                    self.decl_name(frame.decl).into(),
                ));
            }
        }
        Ok(())
    }

    fn report(&self, c: &Configuration, reporter: String, message: String) -> ErrorReport {
        let top = c.frames.last().expect("error raised inside a frame");
        let site = self.decl_name(top.decl).to_string();
        ErrorReport {
            location: SourceLocation {
                file: self.options.source_name.clone(),
                decl: site.clone(),
                pc: top.pc,
            },
            site,
            message,
            reporter,
        }
    }

    /// Runs an intrinsic on top of `c`. The inner `Err` is the language-level
    /// error channel, the outer one interpreter misuse.
    fn intrinsic(
        &self,
        which: Intrinsic,
        arg: Option<Value>,
        c: &Configuration,
    ) -> Result<Result<bool, ErrorReport>, RuntimeError> {
        match which {
            Intrinsic::HaltTable => {
                let code = expect_code(arg.expect("arity 1"), which.name())?;
                let table = self
                    .options
                    .halt_table
                    .as_ref()
                    .ok_or(RuntimeError::NoHaltTable)?;
                table
                    .get(&code)
                    .map(Ok)
                    .ok_or_else(|| RuntimeError::MissingHaltEntry(code.to_hex()))
            }
            Intrinsic::H1 => {
                let p = expect_code(arg.expect("arity 1"), which.name())?;
                let raise = |msg: &str| Ok(Err(self.report(c, H1_INTRINSIC.into(), msg.into())));
                if p == self.skip_code {
                    Ok(Ok(true))
                } else if p == self.loop_code {
                    Ok(Ok(false))
                } else if p == self.s1_code {
                    let mut chain = self.call_chain(c);
                    chain.push(H1_INTRINSIC);
                    chain.push(crate::lang::IN_S1_INTRINSIC);
                    if invoked_within(&chain, paradox::S1) {
                        raise(CANNOT_TERMINATE)
                    } else {
                        Ok(Ok(false))
                    }
                } else {
                    raise(INVALID_PROGRAM)
                }
            }
            Intrinsic::InS1 => Ok(Ok(self.intrinsic_in_s1(c, paradox::S1))),
        }
    }

    fn binary(&self, op: BinOp, l: Value, r: Value) -> Result<Value, RuntimeError> {
        let w = self.width();
        Ok(match (op, l, r) {
            (BinOp::Add, Value::Int(a), Value::Int(b)) => Value::Int(w.wrap(a.wrapping_add(b))),
            (BinOp::Sub, Value::Int(a), Value::Int(b)) => Value::Int(w.wrap(a.wrapping_sub(b))),
            (BinOp::Mul, Value::Int(a), Value::Int(b)) => Value::Int(w.wrap(a.wrapping_mul(b))),
            // total: x mod 0 = x
            (BinOp::Mod, Value::Int(a), Value::Int(b)) => Value::Int(if b == 0 { a } else { a % b }),
            (BinOp::Lt, Value::Int(a), Value::Int(b)) => Value::Bool(a < b),
            (BinOp::Le, Value::Int(a), Value::Int(b)) => Value::Bool(a <= b),
            (BinOp::And, Value::Bool(a), Value::Bool(b)) => Value::Bool(a && b),
            (BinOp::Or, Value::Bool(a), Value::Bool(b)) => Value::Bool(a || b),
            (BinOp::Eq | BinOp::Ne, l, r) => {
                if std::mem::discriminant(&l) != std::mem::discriminant(&r) {
                    return Err(RuntimeError::Type {
                        context: op.symbol().into(),
                        detail: format!("cannot compare {} with {}", l.type_name(), r.type_name()),
                    });
                }
                Value::Bool((l == r) == (op == BinOp::Eq))
            }
            (op, l, r) => {
                return Err(RuntimeError::Type {
                    context: op.symbol().into(),
                    detail: format!("operands {} and {}", l.type_name(), r.type_name()),
                })
            }
        })
    }
}

fn pop(f: &mut Frame) -> Result<Value, RuntimeError> {
    f.stack.pop().ok_or(RuntimeError::StackUnderflow)
}

fn expect_bool(v: Value, context: &str) -> Result<bool, RuntimeError> {
    match v {
        Value::Bool(b) => Ok(b),
        other => Err(RuntimeError::Type {
            context: context.into(),
            detail: format!("expected boolean, found {}", other.type_name()),
        }),
    }
}

fn expect_code(v: Value, context: &str) -> Result<ProgramCode, RuntimeError> {
    match v {
        Value::Code(c) => Ok(c),
        other => Err(RuntimeError::Type {
            context: context.into(),
            detail: format!("expected program code, found {}", other.type_name()),
        }),
    }
}
