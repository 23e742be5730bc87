//! Abstract syntax of the guarded-command language.

use std::fmt;

/// A parsed source file: an ordered list of declarations and an optional
/// designated entry procedure.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct ModuleAst {
    pub decls: Vec<Decl>,
    pub entry: Option<String>,
}

impl ModuleAst {
    pub fn new(decls: Vec<Decl>) -> Self {
        ModuleAst { decls, entry: None }
    }

    pub fn decl(&self, name: &str) -> Option<&Decl> {
        self.decls.iter().find(|d| d.name == name)
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.decls.iter().map(|d| d.name.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum DeclKind {
    Procedure,
    /// Side-effect free; usable inside expressions and returns a value.
    Enquiry,
}

impl DeclKind {
    pub fn keyword(self) -> &'static str {
        match self {
            DeclKind::Procedure => "procedure",
            DeclKind::Enquiry => "enquiry",
        }
    }
}

impl fmt::Display for DeclKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.keyword())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Decl {
    pub name: String,
    pub kind: DeclKind,
    pub params: Vec<String>,
    pub body: Vec<Stmt>,
}

impl Decl {
    pub fn procedure(name: impl Into<String>, params: Vec<String>, body: Vec<Stmt>) -> Self {
        Decl {
            name: name.into(),
            kind: DeclKind::Procedure,
            params,
            body,
        }
    }

    pub fn enquiry(name: impl Into<String>, params: Vec<String>, body: Vec<Stmt>) -> Self {
        Decl {
            name: name.into(),
            kind: DeclKind::Enquiry,
            params,
            body,
        }
    }

    /// Every identifier occurring anywhere in the declaration, including its
    /// own name, parameters, variables and referenced declarations.
    pub fn identifiers(&self) -> Vec<&str> {
        let mut out = vec![self.name.as_str()];
        out.extend(self.params.iter().map(String::as_str));
        for s in &self.body {
            s.collect_identifiers(&mut out);
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Stmt {
    Skip,
    Assign(String, Expr),
    /// `if g1 then .. elseif g2 then .. else .. end`; at least one branch.
    If {
        branches: Vec<(Expr, Vec<Stmt>)>,
        otherwise: Option<Vec<Stmt>>,
    },
    While(Expr, Vec<Stmt>),
    Call(String, Vec<Expr>),
    Return(Expr),
    /// The `Error("...")` handler: stops the run with a report.
    Error(String),
}

impl Stmt {
    fn collect_identifiers<'a>(&'a self, out: &mut Vec<&'a str>) {
        match self {
            Stmt::Skip | Stmt::Error(_) => {}
            Stmt::Assign(v, e) => {
                out.push(v);
                e.collect_identifiers(out);
            }
            Stmt::If {
                branches,
                otherwise,
            } => {
                for (g, body) in branches {
                    g.collect_identifiers(out);
                    body.iter().for_each(|s| s.collect_identifiers(out));
                }
                if let Some(body) = otherwise {
                    body.iter().for_each(|s| s.collect_identifiers(out));
                }
            }
            Stmt::While(g, body) => {
                g.collect_identifiers(out);
                body.iter().for_each(|s| s.collect_identifiers(out));
            }
            Stmt::Call(name, args) => {
                out.push(name);
                args.iter().for_each(|a| a.collect_identifiers(out));
            }
            Stmt::Return(e) => e.collect_identifiers(out),
        }
    }

    /// Number of statements in this subtree, counting `self`.
    pub fn size(&self) -> usize {
        1 + match self {
            Stmt::If {
                branches,
                otherwise,
            } => {
                branches
                    .iter()
                    .map(|(_, b)| b.iter().map(Stmt::size).sum::<usize>())
                    .sum::<usize>()
                    + otherwise
                        .as_ref()
                        .map_or(0, |b| b.iter().map(Stmt::size).sum())
            }
            Stmt::While(_, body) => body.iter().map(Stmt::size).sum(),
            _ => 0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Mod,
    Eq,
    Ne,
    Lt,
    Le,
    And,
    Or,
}

impl BinOp {
    pub const ALL: [BinOp; 10] = [
        BinOp::Add,
        BinOp::Sub,
        BinOp::Mul,
        BinOp::Mod,
        BinOp::Eq,
        BinOp::Ne,
        BinOp::Lt,
        BinOp::Le,
        BinOp::And,
        BinOp::Or,
    ];

    pub fn symbol(self) -> &'static str {
        match self {
            BinOp::Add => "+",
            BinOp::Sub => "-",
            BinOp::Mul => "*",
            BinOp::Mod => "mod",
            BinOp::Eq => "=",
            BinOp::Ne => "!=",
            BinOp::Lt => "<",
            BinOp::Le => "<=",
            BinOp::And => "and",
            BinOp::Or => "or",
        }
    }

    /// Binding strength; larger binds tighter. `not` sits at 3.
    pub fn precedence(self) -> u8 {
        match self {
            BinOp::Or => 1,
            BinOp::And => 2,
            BinOp::Eq | BinOp::Ne | BinOp::Lt | BinOp::Le => 4,
            BinOp::Add | BinOp::Sub => 5,
            BinOp::Mul | BinOp::Mod => 6,
        }
    }

    pub fn is_comparison(self) -> bool {
        matches!(self, BinOp::Eq | BinOp::Ne | BinOp::Lt | BinOp::Le)
    }

    pub fn is_arithmetic(self) -> bool {
        matches!(self, BinOp::Add | BinOp::Sub | BinOp::Mul | BinOp::Mod)
    }

    pub fn is_logical(self) -> bool {
        matches!(self, BinOp::And | BinOp::Or)
    }
}

pub const NOT_PRECEDENCE: u8 = 3;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Expr {
    Int(u64),
    Bool(bool),
    Var(String),
    Binary(BinOp, Box<Expr>, Box<Expr>),
    Not(Box<Expr>),
    /// Enquiry invocation inside an expression.
    Call(String, Vec<Expr>),
    /// `code(Name)`, the encoding of declaration `Name`.
    Code(String),
}

impl Expr {
    pub fn bin(op: BinOp, l: Expr, r: Expr) -> Expr {
        Expr::Binary(op, Box::new(l), Box::new(r))
    }

    pub fn not(e: Expr) -> Expr {
        Expr::Not(Box::new(e))
    }

    pub fn var(name: impl Into<String>) -> Expr {
        Expr::Var(name.into())
    }

    fn collect_identifiers<'a>(&'a self, out: &mut Vec<&'a str>) {
        match self {
            Expr::Int(_) | Expr::Bool(_) => {}
            Expr::Var(v) | Expr::Code(v) => out.push(v),
            Expr::Binary(_, l, r) => {
                l.collect_identifiers(out);
                r.collect_identifiers(out);
            }
            Expr::Not(e) => e.collect_identifiers(out),
            Expr::Call(name, args) => {
                out.push(name);
                args.iter().for_each(|a| a.collect_identifiers(out));
            }
        }
    }
}
