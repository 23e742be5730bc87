//! Lowers a checked module to per-declaration instruction lists.
//!
//! Each declaration becomes a flat list of stack-machine instructions. The
//! `boundary` table marks where one interpreter step ends: the entry point
//! of every declaration and the first instruction of every statement.

use std::collections::{BTreeMap, HashMap};

use crate::lang::{
    self, encode, BinOp, DeclKind, Expr, ModuleAst, ProgramCode, Stmt, H1_INTRINSIC,
    HALT_TABLE_INTRINSIC, IN_S1_INTRINSIC,
};

use super::value::Width;
use super::RuntimeError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Slot {
    Local(usize),
    Global(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Intrinsic {
    HaltTable,
    H1,
    InS1,
}

impl Intrinsic {
    pub fn name(self) -> &'static str {
        match self {
            Intrinsic::HaltTable => HALT_TABLE_INTRINSIC,
            Intrinsic::H1 => H1_INTRINSIC,
            Intrinsic::InS1 => IN_S1_INTRINSIC,
        }
    }

    pub fn arity(self) -> usize {
        match self {
            Intrinsic::HaltTable | Intrinsic::H1 => 1,
            Intrinsic::InS1 => 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Instr {
    PushInt(u64),
    PushBool(bool),
    PushCode(usize),
    Load(Slot),
    Store(Slot),
    Bin(BinOp),
    Not,
    Jump(usize),
    /// Pops a boolean; jumps when it is false.
    JumpIfFalse(usize),
    Call { decl: usize, argc: usize },
    Intrinsic(Intrinsic),
    /// Enquiry `return`: pops the result.
    Return,
    /// End of a declaration body.
    End,
    Error(usize),
}

#[derive(Debug, Clone)]
pub struct CompiledDecl {
    pub name: String,
    pub kind: DeclKind,
    pub params: usize,
    pub locals: Vec<String>,
    pub code: Vec<Instr>,
    pub boundary: Vec<bool>,
    /// Largest operand stack left beneath any call made from this body.
    pub max_suspended: usize,
    /// Declarations called from this body (procedures and enquiries).
    pub callees: Vec<usize>,
}

impl CompiledDecl {
    pub fn call_sites(&self) -> usize {
        self.code
            .iter()
            .filter(|i| matches!(i, Instr::Call { .. }))
            .count()
    }

    pub fn boundaries(&self) -> usize {
        self.boundary.iter().filter(|b| **b).count()
    }
}

#[derive(Debug, Clone)]
pub struct Program {
    pub decls: Vec<CompiledDecl>,
    pub by_name: HashMap<String, usize>,
    /// Sorted by name.
    pub globals: Vec<String>,
    pub codes: Vec<ProgramCode>,
    pub messages: Vec<String>,
    /// True when some global may hold a non-integer value.
    pub untyped_globals: bool,
}

impl Program {
    pub fn compile(m: &ModuleAst, width: Width) -> Result<Program, RuntimeError> {
        lang::check(m).map_err(RuntimeError::Invalid)?;
        let scopes = lang::scopes(m);
        let globals: Vec<String> = scopes.globals.iter().cloned().collect();
        let global_index: HashMap<&str, usize> = globals
            .iter()
            .enumerate()
            .map(|(i, g)| (g.as_str(), i))
            .collect();
        let by_name: HashMap<String, usize> = m
            .decls
            .iter()
            .enumerate()
            .map(|(i, d)| (d.name.clone(), i))
            .collect();
        let decl_codes: HashMap<&str, ProgramCode> =
            m.decls.iter().map(|d| (d.name.as_str(), encode(d))).collect();

        let mut pools = Pools::default();
        let mut decls = Vec::with_capacity(m.decls.len());
        for d in &m.decls {
            let locals = scopes.locals[&d.name].clone();
            let local_index: HashMap<&str, usize> = locals
                .iter()
                .enumerate()
                .map(|(i, l)| (l.as_str(), i))
                .collect();
            let mut cx = DeclCompiler {
                width,
                by_name: &by_name,
                decl_codes: &decl_codes,
                locals: &local_index,
                globals: &global_index,
                pools: &mut pools,
                code: Vec::new(),
                boundary_at: vec![0],
                depth: 0,
                max_suspended: 0,
                callees: Vec::new(),
            };
            cx.block(&d.body);
            cx.emit(Instr::End);
            let mut boundary = vec![false; cx.code.len()];
            for pc in cx.boundary_at {
                boundary[pc] = true;
            }
            let mut callees = cx.callees;
            callees.sort_unstable();
            callees.dedup();
            let code = cx.code;
            decls.push(CompiledDecl {
                name: d.name.clone(),
                kind: d.kind,
                params: d.params.len(),
                locals: locals.clone(),
                code,
                boundary,
                max_suspended: cx.max_suspended,
                callees,
            });
        }
        let untyped_globals = !globals_are_integers(m, &scopes.globals);
        Ok(Program {
            decls,
            by_name,
            globals,
            codes: pools.codes,
            messages: pools.messages,
            untyped_globals,
        })
    }

    pub fn decl_index(&self, name: &str) -> Option<usize> {
        self.by_name.get(name).copied()
    }

    /// Longest call chain from `entry`, or `None` when recursion makes it unbounded.
    pub fn max_call_depth(&self, entry: usize) -> Option<usize> {
        fn visit(p: &Program, d: usize, on_path: &mut Vec<bool>, memo: &mut Vec<Option<usize>>) -> Option<usize> {
            if let Some(v) = memo[d] {
                return Some(v);
            }
            if on_path[d] {
                return None;
            }
            on_path[d] = true;
            let mut deepest = 0;
            for &c in &p.decls[d].callees {
                deepest = deepest.max(visit(p, c, on_path, memo)?);
            }
            on_path[d] = false;
            memo[d] = Some(deepest + 1);
            Some(deepest + 1)
        }
        let n = self.decls.len();
        visit(self, entry, &mut vec![false; n], &mut vec![None; n])
    }
}

/// Whether every global can only ever hold an integer: each assignment to a
/// global is an integer-shaped expression, reading only integer globals.
fn globals_are_integers(m: &ModuleAst, globals: &std::collections::BTreeSet<String>) -> bool {
    let mut assigns: BTreeMap<&str, Vec<&Expr>> = BTreeMap::new();
    fn collect<'a>(body: &'a [Stmt], out: &mut BTreeMap<&'a str, Vec<&'a Expr>>) {
        for s in body {
            match s {
                Stmt::Assign(v, e) => out.entry(v.as_str()).or_default().push(e),
                Stmt::If {
                    branches,
                    otherwise,
                } => {
                    for (_, b) in branches {
                        collect(b, out);
                    }
                    if let Some(b) = otherwise {
                        collect(b, out);
                    }
                }
                Stmt::While(_, b) => collect(b, out),
                _ => {}
            }
        }
    }
    for d in m.decls.iter().filter(|d| d.kind == DeclKind::Procedure) {
        let mut local = BTreeMap::new();
        collect(&d.body, &mut local);
        for (v, es) in local {
            if !d.params.iter().any(|p| p == v) && globals.contains(v) {
                assigns.entry(v).or_default().extend(es);
            }
        }
    }
    fn int_shaped(e: &Expr, globals: &std::collections::BTreeSet<String>) -> bool {
        match e {
            Expr::Int(_) => true,
            Expr::Var(v) => globals.contains(v),
            Expr::Binary(op, l, r) => {
                op.is_arithmetic() && int_shaped(l, globals) && int_shaped(r, globals)
            }
            _ => false,
        }
    }
    // no procedure parameters or enquiry results may flow into a global
    assigns
        .values()
        .flatten()
        .all(|e| int_shaped(e, globals) && !reads_param(e, m))
}

fn reads_param(e: &Expr, m: &ModuleAst) -> bool {
    match e {
        Expr::Var(v) => m.decls.iter().any(|d| d.params.iter().any(|p| p == v)),
        Expr::Binary(_, l, r) => reads_param(l, m) || reads_param(r, m),
        _ => false,
    }
}

#[derive(Default)]
struct Pools {
    codes: Vec<ProgramCode>,
    messages: Vec<String>,
}

struct DeclCompiler<'a> {
    width: Width,
    by_name: &'a HashMap<String, usize>,
    decl_codes: &'a HashMap<&'a str, ProgramCode>,
    locals: &'a HashMap<&'a str, usize>,
    globals: &'a HashMap<&'a str, usize>,
    pools: &'a mut Pools,
    code: Vec<Instr>,
    boundary_at: Vec<usize>,
    depth: usize,
    max_suspended: usize,
    callees: Vec<usize>,
}

impl DeclCompiler<'_> {
    fn emit(&mut self, i: Instr) -> usize {
        self.code.push(i);
        self.code.len() - 1
    }

    fn here(&self) -> usize {
        self.code.len()
    }

    fn patch(&mut self, at: usize, target: usize) {
        match &mut self.code[at] {
            Instr::Jump(t) | Instr::JumpIfFalse(t) => *t = target,
            other => unreachable!("patching {other:?}"),
        }
    }

    fn slot(&self, v: &str) -> Slot {
        match self.locals.get(v) {
            Some(&i) => Slot::Local(i),
            None => Slot::Global(self.globals[v]),
        }
    }

    fn block(&mut self, body: &[Stmt]) {
        for s in body {
            self.stmt(s);
        }
    }

    fn stmt(&mut self, s: &Stmt) {
        self.boundary_at.push(self.here());
        debug_assert_eq!(self.depth, 0);
        match s {
            Stmt::Skip => {}
            Stmt::Assign(v, e) => {
                self.expr(e);
                let slot = self.slot(v);
                self.emit(Instr::Store(slot));
                self.depth -= 1;
            }
            Stmt::If {
                branches,
                otherwise,
            } => {
                let mut exits = Vec::new();
                for (g, body) in branches {
                    self.expr(g);
                    let skip = self.emit(Instr::JumpIfFalse(0));
                    self.depth -= 1;
                    self.block(body);
                    exits.push(self.emit(Instr::Jump(0)));
                    let next = self.here();
                    self.patch(skip, next);
                }
                if let Some(body) = otherwise {
                    self.block(body);
                }
                let end = self.here();
                for j in exits {
                    self.patch(j, end);
                }
            }
            Stmt::While(g, body) => {
                let head = self.here();
                self.expr(g);
                let exit = self.emit(Instr::JumpIfFalse(0));
                self.depth -= 1;
                self.block(body);
                self.emit(Instr::Jump(head));
                let end = self.here();
                self.patch(exit, end);
            }
            Stmt::Call(name, args) => {
                for a in args {
                    self.expr(a);
                }
                self.call(name, args.len());
            }
            Stmt::Return(e) => {
                self.expr(e);
                self.emit(Instr::Return);
                self.depth -= 1;
            }
            Stmt::Error(msg) => {
                self.pools.messages.push(msg.clone());
                let idx = self.pools.messages.len() - 1;
                self.emit(Instr::Error(idx));
            }
        }
    }

    fn call(&mut self, name: &str, argc: usize) {
        self.depth -= argc;
        match self.by_name.get(name) {
            Some(&decl) => {
                self.max_suspended = self.max_suspended.max(self.depth);
                self.callees.push(decl);
                self.emit(Instr::Call { decl, argc });
            }
            None => {
                let intrinsic = match name {
                    HALT_TABLE_INTRINSIC => Intrinsic::HaltTable,
                    H1_INTRINSIC => Intrinsic::H1,
                    IN_S1_INTRINSIC => Intrinsic::InS1,
                    _ => unreachable!("checked module has unresolved `{name}`"),
                };
                self.emit(Instr::Intrinsic(intrinsic));
            }
        }
    }

    fn push(&mut self, i: Instr) {
        self.emit(i);
        self.depth += 1;
    }

    fn expr(&mut self, e: &Expr) {
        match e {
            Expr::Int(n) => self.push(Instr::PushInt(self.width.wrap(*n))),
            Expr::Bool(b) => self.push(Instr::PushBool(*b)),
            Expr::Var(v) => {
                let slot = self.slot(v);
                self.push(Instr::Load(slot));
            }
            Expr::Code(name) => {
                let code = self.decl_codes[name.as_str()].clone();
                let idx = match self.pools.codes.iter().position(|c| *c == code) {
                    Some(i) => i,
                    None => {
                        self.pools.codes.push(code);
                        self.pools.codes.len() - 1
                    }
                };
                self.push(Instr::PushCode(idx));
            }
            Expr::Binary(op, l, r) => {
                self.expr(l);
                self.expr(r);
                self.emit(Instr::Bin(*op));
                self.depth -= 1;
            }
            Expr::Not(inner) => {
                self.expr(inner);
                self.emit(Instr::Not);
            }
            Expr::Call(name, args) => {
                for a in args {
                    self.expr(a);
                }
                self.call(name, args.len());
                self.depth += 1;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lang::parse;

    #[test]
    fn while_loop_layout() {
        let m = parse("procedure Loop while true do skip end end").unwrap();
        let p = Program::compile(&m, Width::DEFAULT).unwrap();
        let d = &p.decls[0];
        assert_eq!(
            d.code,
            vec![
                Instr::PushBool(true),
                Instr::JumpIfFalse(3),
                Instr::Jump(0),
                Instr::End
            ]
        );
        // the loop head and the `skip` (which compiles to nothing) share pc 0..2
        assert_eq!(d.boundary, vec![true, false, true, false]);
    }

    #[test]
    fn call_depth() {
        let m = parse(
            "enquiry E(a) return a + 1 end procedure P x := E(1) end procedure M P(); P() end",
        )
        .unwrap();
        let p = Program::compile(&m, Width::DEFAULT).unwrap();
        assert_eq!(p.max_call_depth(p.decl_index("M").unwrap()), Some(3));
        let r = parse("procedure R R() end").unwrap();
        let p = Program::compile(&r, Width::DEFAULT).unwrap();
        assert_eq!(p.max_call_depth(0), None);
    }

    #[test]
    fn suspended_operands_counted() {
        let m = parse("enquiry E(a) return a end procedure P x := 1 + 2 * E(3) end").unwrap();
        let p = Program::compile(&m, Width::DEFAULT).unwrap();
        assert_eq!(p.decls[1].max_suspended, 2);
    }

    #[test]
    fn literals_wrap_at_width() {
        let m = parse("procedure P x := 300 end").unwrap();
        let p = Program::compile(&m, Width::DEFAULT).unwrap();
        assert_eq!(p.decls[0].code[0], Instr::PushInt(44));
    }

    #[test]
    fn integer_only_globals_detected() {
        let m = parse("procedure P x := 1; y := x + 2 end").unwrap();
        assert!(!Program::compile(&m, Width::DEFAULT).unwrap().untyped_globals);
        let m = parse("procedure P x := 1 = 1 end").unwrap();
        assert!(Program::compile(&m, Width::DEFAULT).unwrap().untyped_globals);
    }
}
