//! Seeded random programs for cross-checking the analyses and the
//! syntax round trips.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::lang::{is_reserved, BinOp, Decl, DeclKind, Expr, Kw, ModuleAst, Stmt};

/// Shape of the finite-state programs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CorpusShape {
    /// Integer literals stay below `2^width`.
    pub width: u32,
    pub max_vars: usize,
    /// Across all declarations, nested statements included.
    pub max_stmts: usize,
    /// Whether a helper procedure `Q` may be generated and called.
    pub helper: bool,
}

impl Default for CorpusShape {
    fn default() -> Self {
        CorpusShape {
            width: 4,
            max_vars: 3,
            max_stmts: 40,
            helper: true,
        }
    }
}

pub const ENTRY: &str = "P";
pub const HELPER: &str = "Q";
const VARS: [&str; 3] = ["x", "y", "z"];

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

struct FiniteGen<'a, R> {
    rng: &'a mut R,
    vars: Vec<&'static str>,
    lit_max: u64,
    budget: usize,
    can_call: bool,
}

impl<R: Rng> FiniteGen<'_, R> {
    fn int_expr(&mut self, depth: u32) -> Expr {
        let lit = self.rng.gen_range(0..self.lit_max);
        match self.rng.gen_range(0..10) {
            0..=3 => Expr::Int(lit),
            4..=6 => Expr::var(*self.vars.choose(self.rng).unwrap()),
            _ if depth == 0 => Expr::var(*self.vars.choose(self.rng).unwrap()),
            _ => {
                let op = *[BinOp::Add, BinOp::Add, BinOp::Sub, BinOp::Mul, BinOp::Mod]
                    .choose(self.rng)
                    .unwrap();
                Expr::bin(op, self.int_expr(depth - 1), self.int_expr(depth - 1))
            }
        }
    }

    fn guard(&mut self, depth: u32) -> Expr {
        match self.rng.gen_range(0..12) {
            0 => Expr::Bool(self.rng.gen()),
            1 if depth > 0 => Expr::not(self.guard(depth - 1)),
            2 if depth > 0 => {
                let op = if self.rng.gen() { BinOp::And } else { BinOp::Or };
                Expr::bin(op, self.guard(depth - 1), self.guard(depth - 1))
            }
            _ => {
                let op = *[BinOp::Eq, BinOp::Ne, BinOp::Ne, BinOp::Lt, BinOp::Le]
                    .choose(self.rng)
                    .unwrap();
                Expr::bin(op, self.int_expr(1), self.int_expr(1))
            }
        }
    }

    fn block(&mut self, max_len: usize, depth: u32) -> Vec<Stmt> {
        let len = self.rng.gen_range(1..=max_len);
        let mut out = Vec::new();
        for _ in 0..len {
            if self.budget == 0 {
                break;
            }
            out.push(self.stmt(depth));
        }
        out
    }

    fn stmt(&mut self, depth: u32) -> Stmt {
        self.budget = self.budget.saturating_sub(1);
        let nested = depth > 0 && self.budget > 1;
        match self.rng.gen_range(0..40) {
            0..=17 => {
                let v = *self.vars.choose(self.rng).unwrap();
                Stmt::Assign(v.into(), self.int_expr(2))
            }
            18..=20 => Stmt::Skip,
            21..=26 if nested => Stmt::If {
                branches: (0..self.rng.gen_range(1..=2))
                    .map(|_| (self.guard(1), self.block(3, depth - 1)))
                    .collect(),
                otherwise: self.rng.gen_bool(0.5).then(|| self.block(3, depth - 1)),
            },
            27..=34 if nested => Stmt::While(self.guard(1), self.block(4, depth - 1)),
            35..=37 if self.can_call => Stmt::Call(HELPER.into(), vec![]),
            38 if self.rng.gen_bool(0.4) => Stmt::Error("unreachable state".into()),
            _ => {
                let v = *self.vars.choose(self.rng).unwrap();
                let step = Expr::Int(self.rng.gen_range(1..self.lit_max.max(2)));
                Stmt::Assign(v.into(), Expr::bin(BinOp::Add, Expr::var(v), step))
            }
        }
    }
}

/// A recursion-free module with entry [`ENTRY`] over at most
/// `shape.max_vars` integer globals.
pub fn finite_state_program<R: Rng>(rng: &mut R, shape: &CorpusShape) -> ModuleAst {
    let nvars = rng.gen_range(1..=shape.max_vars.clamp(1, VARS.len()));
    let with_helper = shape.helper && shape.max_stmts >= 4 && rng.gen_bool(0.3);
    let mut g = FiniteGen {
        vars: VARS[..nvars].to_vec(),
        lit_max: 1u64 << shape.width.min(16),
        budget: 0,
        can_call: false,
        rng,
    };
    let mut decls = Vec::new();
    let mut total = shape.max_stmts;
    if with_helper {
        g.budget = total / 4;
        let body = g.block(4, 1);
        total -= body.iter().map(Stmt::size).sum::<usize>();
        decls.push(Decl::procedure(HELPER, vec![], body));
        g.can_call = true;
    }
    g.budget = total;
    let body = g.block(8, 3);
    decls.insert(0, Decl::procedure(ENTRY, vec![], body));
    ModuleAst::new(decls)
}

/// A one-parameter procedure `P(n)` reading and writing `n` and up to two
/// globals, for the data-wrapping reduction.
pub fn parameterized_program<R: Rng>(rng: &mut R, shape: &CorpusShape) -> ModuleAst {
    let mut g = FiniteGen {
        vars: vec!["n", "x", "y"],
        lit_max: 1u64 << shape.width.min(16),
        budget: shape.max_stmts,
        can_call: false,
        rng,
    };
    let body = g.block(8, 3);
    ModuleAst::new(vec![Decl::procedure(ENTRY, vec!["n".into()], body)])
}

// Arbitrary syntax trees.

const NAME_CHARS: &[u8] = b"abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ_0123456789";
const MESSAGE_CHARS: &[char] = &[
    'a', 'Z', ' ', '"', '\\', '\n', 'é', '↦', '⌈', '0', '-', '(', ')',
];

fn ident<R: Rng>(rng: &mut R) -> String {
    loop {
        let len = rng.gen_range(1..=6);
        let mut s = String::new();
        for i in 0..len {
            let pool = if i == 0 { &NAME_CHARS[..53] } else { NAME_CHARS };
            s.push(*pool.choose(rng).unwrap() as char);
        }
        if !Kw::is_keyword(&s) && !is_reserved(&s) {
            return s;
        }
    }
}

fn any_expr<R: Rng>(rng: &mut R, names: &[String], depth: u32) -> Expr {
    let leaf = depth == 0 || rng.gen_bool(0.3);
    if leaf {
        return match rng.gen_range(0..5) {
            0 => Expr::Int(if rng.gen_bool(0.1) { rng.gen() } else { rng.gen_range(0..300) }),
            1 => Expr::Bool(rng.gen()),
            2 => Expr::Code(names.choose(rng).unwrap().clone()),
            _ => Expr::Var(ident(rng)),
        };
    }
    match rng.gen_range(0..6) {
        0 => Expr::not(any_expr(rng, names, depth - 1)),
        1 => Expr::Call(
            names.choose(rng).unwrap().clone(),
            (0..rng.gen_range(0..3))
                .map(|_| any_expr(rng, names, depth - 1))
                .collect(),
        ),
        _ => Expr::bin(
            *BinOp::ALL.choose(rng).unwrap(),
            any_expr(rng, names, depth - 1),
            any_expr(rng, names, depth - 1),
        ),
    }
}

fn any_block<R: Rng>(rng: &mut R, names: &[String], depth: u32) -> Vec<Stmt> {
    (0..rng.gen_range(0..4))
        .map(|_| any_stmt(rng, names, depth))
        .collect()
}

fn any_stmt<R: Rng>(rng: &mut R, names: &[String], depth: u32) -> Stmt {
    let nested = depth > 0;
    match rng.gen_range(0..9) {
        0 => Stmt::Skip,
        1 | 2 => Stmt::Assign(ident(rng), any_expr(rng, names, 3)),
        3 if nested => Stmt::If {
            branches: (0..rng.gen_range(1..4))
                .map(|_| (any_expr(rng, names, 2), any_block(rng, names, depth - 1)))
                .collect(),
            otherwise: rng.gen_bool(0.5).then(|| any_block(rng, names, depth - 1)),
        },
        4 if nested => Stmt::While(any_expr(rng, names, 2), any_block(rng, names, depth - 1)),
        5 => Stmt::Call(
            names.choose(rng).unwrap().clone(),
            (0..rng.gen_range(0..3))
                .map(|_| any_expr(rng, names, 2))
                .collect(),
        ),
        6 => Stmt::Return(any_expr(rng, names, 3)),
        7 => Stmt::Error(
            (0..rng.gen_range(0..8))
                .map(|_| *MESSAGE_CHARS.choose(rng).unwrap())
                .collect(),
        ),
        _ => Stmt::Assign(ident(rng), any_expr(rng, names, 1)),
    }
}

/// A syntactically valid module; it need not pass the checker.
pub fn arbitrary_module<R: Rng>(rng: &mut R) -> ModuleAst {
    let names: Vec<String> = (0..rng.gen_range(1..=4)).map(|_| ident(rng)).collect();
    let decls = names
        .iter()
        .map(|name| {
            let kind = if rng.gen() {
                DeclKind::Procedure
            } else {
                DeclKind::Enquiry
            };
            Decl {
                name: name.clone(),
                kind,
                params: (0..rng.gen_range(0..3)).map(|_| ident(rng)).collect(),
                body: any_block(rng, &names, 3),
            }
        })
        .collect();
    ModuleAst {
        decls,
        entry: rng.gen_bool(0.3).then(|| names.choose(rng).unwrap().clone()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lang::{check, parse_unchecked, pretty};

    #[test]
    fn finite_programs_are_valid_and_small() {
        let mut r = rng(7);
        let shape = CorpusShape::default();
        for _ in 0..200 {
            let m = finite_state_program(&mut r, &shape);
            check(&m).unwrap();
            let size: usize = m.decls.iter().flat_map(|d| &d.body).map(Stmt::size).sum();
            assert!(size <= shape.max_stmts, "{size}");
        }
    }

    #[test]
    fn arbitrary_modules_reparse() {
        let mut r = rng(11);
        for _ in 0..100 {
            let m = arbitrary_module(&mut r);
            assert_eq!(parse_unchecked(&pretty(&m)).unwrap(), m);
        }
    }

    #[test]
    fn seeds_are_reproducible() {
        let a = finite_state_program(&mut rng(3), &CorpusShape::default());
        let b = finite_state_program(&mut rng(3), &CorpusShape::default());
        assert_eq!(a, b);
    }
}
