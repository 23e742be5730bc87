//! Static checks and variable scoping.

use std::collections::{BTreeMap, BTreeSet, HashSet};

use super::ast::{Decl, DeclKind, Expr, ModuleAst, Stmt};
use super::{
    pretty, ParseError, ERROR_INTRINSIC, H1_INTRINSIC, HALT_TABLE_INTRINSIC, IN_S1_INTRINSIC,
};

/// Arity of an intrinsic enquiry, or `None` if `name` is not one.
pub fn intrinsic_arity(name: &str) -> Option<usize> {
    match name {
        HALT_TABLE_INTRINSIC | H1_INTRINSIC => Some(1),
        IN_S1_INTRINSIC => Some(0),
        _ => None,
    }
}

pub fn is_reserved(name: &str) -> bool {
    intrinsic_arity(name).is_some() || name == ERROR_INTRINSIC
}

/// Where each variable lives.
///
/// Procedure parameters and enquiry parameters are frame locals, as is any
/// name an enquiry assigns. Everything else is a module global, initialised
/// to zero when a run starts.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Scopes {
    pub globals: BTreeSet<String>,
    /// Per declaration: parameters in order, then the remaining locals sorted.
    pub locals: BTreeMap<String, Vec<String>>,
}

pub fn scopes(m: &ModuleAst) -> Scopes {
    let mut out = Scopes::default();
    for d in &m.decls {
        let mut used = BTreeSet::new();
        let mut assigned = BTreeSet::new();
        for s in &d.body {
            stmt_vars(s, &mut used, &mut assigned);
        }
        let params: BTreeSet<&String> = d.params.iter().collect();
        let mut locals = d.params.clone();
        match d.kind {
            DeclKind::Procedure => {
                out.globals
                    .extend(used.into_iter().filter(|v| !params.contains(v)));
            }
            DeclKind::Enquiry => {
                let own: Vec<String> = assigned
                    .iter()
                    .filter(|v| !params.contains(v))
                    .cloned()
                    .collect();
                out.globals.extend(
                    used.into_iter()
                        .filter(|v| !params.contains(v) && !assigned.contains(v)),
                );
                locals.extend(own);
            }
        }
        out.locals.insert(d.name.clone(), locals);
    }
    out
}

fn stmt_vars(s: &Stmt, used: &mut BTreeSet<String>, assigned: &mut BTreeSet<String>) {
    match s {
        Stmt::Skip | Stmt::Error(_) => {}
        Stmt::Assign(v, e) => {
            used.insert(v.clone());
            assigned.insert(v.clone());
            expr_vars(e, used);
        }
        Stmt::If {
            branches,
            otherwise,
        } => {
            for (g, body) in branches {
                expr_vars(g, used);
                body.iter().for_each(|s| stmt_vars(s, used, assigned));
            }
            for s in otherwise.iter().flatten() {
                stmt_vars(s, used, assigned);
            }
        }
        Stmt::While(g, body) => {
            expr_vars(g, used);
            body.iter().for_each(|s| stmt_vars(s, used, assigned));
        }
        Stmt::Call(_, args) => args.iter().for_each(|a| expr_vars(a, used)),
        Stmt::Return(e) => expr_vars(e, used),
    }
}

fn expr_vars(e: &Expr, used: &mut BTreeSet<String>) {
    match e {
        Expr::Int(_) | Expr::Bool(_) | Expr::Code(_) => {}
        Expr::Var(v) => {
            used.insert(v.clone());
        }
        Expr::Binary(_, l, r) => {
            expr_vars(l, used);
            expr_vars(r, used);
        }
        Expr::Not(inner) => expr_vars(inner, used),
        Expr::Call(_, args) => args.iter().for_each(|a| expr_vars(a, used)),
    }
}

pub fn check(m: &ModuleAst) -> Result<(), ParseError> {
    let mut kinds: BTreeMap<&str, &Decl> = BTreeMap::new();
    for d in &m.decls {
        if is_reserved(&d.name) {
            return Err(ParseError::Reserved(d.name.clone()));
        }
        if kinds.insert(&d.name, d).is_some() {
            return Err(ParseError::Duplicate {
                name: d.name.clone(),
                context: "module".into(),
            });
        }
    }
    if let Some(entry) = &m.entry {
        if !kinds.contains_key(entry.as_str()) {
            return Err(ParseError::Name {
                name: entry.clone(),
                context: "main directive".into(),
            });
        }
    }

    let sc = scopes(m);
    for d in &m.decls {
        let mut seen = HashSet::new();
        for p in &d.params {
            if !seen.insert(p) {
                return Err(ParseError::Duplicate {
                    name: p.clone(),
                    context: format!("parameters of `{}`", d.name),
                });
            }
        }
        let locals: HashSet<&str> = sc.locals[&d.name].iter().map(String::as_str).collect();
        let cx = Ctx {
            decls: &kinds,
            decl: d,
            locals: &locals,
        };
        for s in &d.body {
            cx.stmt(s)?;
        }

        if d.kind == DeclKind::Enquiry {
            for v in &locals {
                if sc.globals.contains(*v) && !d.params.iter().any(|p| p == v) {
                    return Err(ParseError::Purity {
                        enquiry: d.name.clone(),
                        detail: format!("assigns global variable `{v}`"),
                    });
                }
            }
            if !block_never_falls_through(&d.body) {
                return Err(ParseError::MissingReturn(d.name.clone()));
            }
        }
    }
    Ok(())
}

struct Ctx<'a> {
    decls: &'a BTreeMap<&'a str, &'a Decl>,
    decl: &'a Decl,
    locals: &'a HashSet<&'a str>,
}

impl Ctx<'_> {
    fn context(&self) -> String {
        format!("`{}`", self.decl.name)
    }

    fn stmt(&self, s: &Stmt) -> Result<(), ParseError> {
        match s {
            Stmt::Skip | Stmt::Error(_) => Ok(()),
            Stmt::Assign(_, e) => self.expr(e),
            Stmt::If {
                branches,
                otherwise,
            } => {
                for (g, body) in branches {
                    self.guard(g)?;
                    body.iter().try_for_each(|s| self.stmt(s))?;
                }
                otherwise.iter().flatten().try_for_each(|s| self.stmt(s))
            }
            Stmt::While(g, body) => {
                self.guard(g)?;
                body.iter().try_for_each(|s| self.stmt(s))
            }
            Stmt::Call(name, args) => {
                if self.decl.kind == DeclKind::Enquiry {
                    return Err(ParseError::Purity {
                        enquiry: self.decl.name.clone(),
                        detail: format!("calls procedure `{name}`"),
                    });
                }
                match self.decls.get(name.as_str()) {
                    Some(d) if d.kind == DeclKind::Procedure => {
                        self.arity(name, d.params.len(), args.len())?
                    }
                    Some(_) => return Err(self.kind_error(name, "procedure", "enquiry")),
                    None if intrinsic_arity(name).is_some() => {
                        return Err(self.kind_error(name, "procedure", "intrinsic enquiry"))
                    }
                    None => return Err(self.name_error(name)),
                }
                args.iter().try_for_each(|a| self.expr(a))
            }
            Stmt::Return(e) => {
                if self.decl.kind != DeclKind::Enquiry {
                    return Err(ParseError::ReturnOutsideEnquiry(self.decl.name.clone()));
                }
                self.expr(e)
            }
        }
    }

    fn guard(&self, g: &Expr) -> Result<(), ParseError> {
        let obviously_not_boolean = match g {
            Expr::Int(_) | Expr::Code(_) => true,
            Expr::Binary(op, ..) => op.is_arithmetic(),
            _ => false,
        };
        if obviously_not_boolean {
            return Err(ParseError::Guard {
                guard: pretty::expr(g),
                context: self.decl.name.clone(),
            });
        }
        self.expr(g)
    }

    fn expr(&self, e: &Expr) -> Result<(), ParseError> {
        match e {
            Expr::Int(_) | Expr::Bool(_) => Ok(()),
            Expr::Var(v) => {
                if !self.locals.contains(v.as_str())
                    && (self.decls.contains_key(v.as_str()) || is_reserved(v))
                {
                    return Err(self.kind_error(v, "variable", "declaration"));
                }
                Ok(())
            }
            Expr::Binary(_, l, r) => {
                self.expr(l)?;
                self.expr(r)
            }
            Expr::Not(inner) => self.expr(inner),
            Expr::Code(name) => {
                if self.decls.contains_key(name.as_str()) {
                    Ok(())
                } else {
                    Err(self.name_error(name))
                }
            }
            Expr::Call(name, args) => {
                match self.decls.get(name.as_str()) {
                    Some(d) if d.kind == DeclKind::Enquiry => {
                        self.arity(name, d.params.len(), args.len())?
                    }
                    Some(_) => return Err(self.kind_error(name, "enquiry", "procedure")),
                    None => match intrinsic_arity(name) {
                        Some(n) => self.arity(name, n, args.len())?,
                        None => return Err(self.name_error(name)),
                    },
                }
                args.iter().try_for_each(|a| self.expr(a))
            }
        }
    }

    fn arity(&self, name: &str, expected: usize, found: usize) -> Result<(), ParseError> {
        if expected == found {
            Ok(())
        } else {
            Err(ParseError::Arity {
                name: name.into(),
                expected,
                found,
                context: self.context(),
            })
        }
    }

    fn name_error(&self, name: &str) -> ParseError {
        ParseError::Name {
            name: name.into(),
            context: self.context(),
        }
    }

    fn kind_error(&self, name: &str, expected: &str, found: &str) -> ParseError {
        ParseError::Kind {
            name: name.into(),
            expected: expected.into(),
            found: found.into(),
            context: self.context(),
        }
    }
}

/// True when control can never run off the end of `body` normally.
fn block_never_falls_through(body: &[Stmt]) -> bool {
    body.iter().any(never_falls_through)
}

fn never_falls_through(s: &Stmt) -> bool {
    match s {
        Stmt::Return(_) | Stmt::Error(_) => true,
        Stmt::If {
            branches,
            otherwise: Some(other),
        } => {
            branches.iter().all(|(_, b)| block_never_falls_through(b))
                && block_never_falls_through(other)
        }
        Stmt::While(Expr::Bool(true), _) => true,
        _ => false,
    }
}

#[cfg(test)]
mod tests {
    use super::super::parse;
    use super::*;

    #[test]
    fn kind_errors() {
        let err = parse("enquiry E return 1 end procedure P E() end").unwrap_err();
        assert!(matches!(err, ParseError::Kind { .. }), "{err}");
        let err = parse("procedure Q skip end procedure P x := Q() end").unwrap_err();
        assert!(matches!(err, ParseError::Kind { .. }), "{err}");
    }

    #[test]
    fn enquiry_purity() {
        let err = parse("procedure P g := 1 end enquiry E g := 2; return g end").unwrap_err();
        assert!(matches!(err, ParseError::Purity { .. }), "{err}");
        let err = parse("procedure P skip end enquiry E P(); return 1 end").unwrap_err();
        assert!(matches!(err, ParseError::Purity { .. }), "{err}");
        // locals and reads of globals are fine
        parse("procedure P g := 1 end enquiry E(a) t := a + g; return t end").unwrap();
    }

    #[test]
    fn return_discipline() {
        assert!(matches!(
            parse("procedure P return 1 end"),
            Err(ParseError::ReturnOutsideEnquiry(_))
        ));
        assert!(matches!(
            parse("enquiry E(a) if a = 1 then return 1 end end"),
            Err(ParseError::MissingReturn(_))
        ));
        parse("enquiry E(a) if a = 1 then return 1 else Error(\"no\") end end").unwrap();
    }

    #[test]
    fn scopes_split_globals_and_locals() {
        let m = parse("procedure P(a) x := a end enquiry E(b) t := b + x; return t end").unwrap();
        let sc = scopes(&m);
        assert_eq!(sc.globals.iter().collect::<Vec<_>>(), vec!["x"]);
        assert_eq!(sc.locals["P"], vec!["a"]);
        assert_eq!(sc.locals["E"], vec!["b", "t"]);
    }

    #[test]
    fn reserved_and_duplicates() {
        assert!(matches!(
            parse("procedure H1 skip end"),
            Err(ParseError::Reserved(_))
        ));
        assert!(matches!(
            parse("procedure A skip end procedure A skip end"),
            Err(ParseError::Duplicate { .. })
        ));
    }

    #[test]
    fn arithmetic_guard_rejected() {
        assert!(matches!(
            parse("procedure P while x + 1 do skip end end"),
            Err(ParseError::Guard { .. })
        ));
    }

    #[test]
    fn intrinsic_arity_checked() {
        assert!(matches!(
            parse("procedure P if H1() then skip end end"),
            Err(ParseError::Arity { .. })
        ));
    }
}
