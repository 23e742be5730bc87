//! Recursive-descent parser for `.gcl` source text.

use super::ast::{BinOp, Decl, DeclKind, Expr, ModuleAst, Stmt};
use super::lexer::{tokenize, Kw, Spanned, Tok};
use super::ParseError;

/// Parses source text into a module without resolving names.
pub fn parse_unchecked(src: &str) -> Result<ModuleAst, ParseError> {
    let toks = tokenize(src)?;
    let mut p = Parser { toks, pos: 0 };
    p.module()
}

struct Parser {
    toks: Vec<Spanned>,
    pos: usize,
}

type PResult<T> = Result<T, ParseError>;

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].tok.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn error(&self, expected: &[&str]) -> ParseError {
        let here = &self.toks[self.pos];
        ParseError::Syntax {
            line: here.line,
            col: here.col,
            expected: expected.iter().map(|s| s.to_string()).collect(),
            found: here.tok.to_string(),
        }
    }

    fn eat(&mut self, tok: &Tok) -> bool {
        if self.peek() == tok {
            self.bump();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, tok: Tok) -> PResult<()> {
        if self.eat(&tok) {
            Ok(())
        } else {
            Err(self.error(&[&tok.to_string()]))
        }
    }

    fn ident(&mut self) -> PResult<String> {
        match self.peek() {
            Tok::Ident(_) => match self.bump() {
                Tok::Ident(s) => Ok(s),
                _ => unreachable!(),
            },
            _ => Err(self.error(&["identifier"])),
        }
    }

    fn module(&mut self) -> PResult<ModuleAst> {
        let mut module = ModuleAst::default();
        if self.eat(&Tok::Kw(Kw::Main)) {
            module.entry = Some(self.ident()?);
        }
        loop {
            match self.peek() {
                Tok::Kw(Kw::Procedure) | Tok::Kw(Kw::Enquiry) => {
                    module.decls.push(self.decl()?);
                }
                Tok::Eof => return Ok(module),
                _ => return Err(self.error(&["'procedure'", "'enquiry'", "end of input"])),
            }
        }
    }

    fn decl(&mut self) -> PResult<Decl> {
        let kind = match self.bump() {
            Tok::Kw(Kw::Procedure) => DeclKind::Procedure,
            Tok::Kw(Kw::Enquiry) => DeclKind::Enquiry,
            _ => unreachable!(),
        };
        let name = self.ident()?;
        let mut params = Vec::new();
        if self.eat(&Tok::LParen) && !self.eat(&Tok::RParen) {
            loop {
                params.push(self.ident()?);
                if self.eat(&Tok::RParen) {
                    break;
                }
                if !self.eat(&Tok::Comma) {
                    return Err(self.error(&["','", "')'"]));
                }
            }
        }
        let body = self.block()?;
        self.expect(Tok::Kw(Kw::End))?;
        Ok(Decl {
            name,
            kind,
            params,
            body,
        })
    }

    /// Statements up to (not including) `end`, `elseif` or `else`.
    fn block(&mut self) -> PResult<Vec<Stmt>> {
        let mut out = Vec::new();
        loop {
            match self.peek() {
                Tok::Kw(Kw::End) | Tok::Kw(Kw::Elseif) | Tok::Kw(Kw::Else) => return Ok(out),
                _ => {
                    out.push(self.stmt()?);
                    while self.eat(&Tok::Semi) {}
                }
            }
        }
    }

    fn stmt(&mut self) -> PResult<Stmt> {
        match self.peek().clone() {
            Tok::Kw(Kw::Skip) => {
                self.bump();
                Ok(Stmt::Skip)
            }
            Tok::Kw(Kw::Return) => {
                self.bump();
                Ok(Stmt::Return(self.expr()?))
            }
            Tok::Kw(Kw::If) => {
                self.bump();
                let mut branches = Vec::new();
                let mut otherwise = None;
                loop {
                    let guard = self.expr()?;
                    self.expect(Tok::Kw(Kw::Then))?;
                    branches.push((guard, self.block()?));
                    match self.bump() {
                        Tok::Kw(Kw::Elseif) => continue,
                        Tok::Kw(Kw::Else) => {
                            otherwise = Some(self.block()?);
                            self.expect(Tok::Kw(Kw::End))?;
                            break;
                        }
                        Tok::Kw(Kw::End) => break,
                        _ => unreachable!("block stops only at end/elseif/else"),
                    }
                }
                Ok(Stmt::If {
                    branches,
                    otherwise,
                })
            }
            Tok::Kw(Kw::While) => {
                self.bump();
                let guard = self.expr()?;
                self.expect(Tok::Kw(Kw::Do))?;
                let body = self.block()?;
                self.expect(Tok::Kw(Kw::End))?;
                Ok(Stmt::While(guard, body))
            }
            Tok::Ident(name) => {
                self.bump();
                if name == super::ERROR_INTRINSIC && self.peek() == &Tok::LParen {
                    self.bump();
                    let msg = match self.peek() {
                        Tok::Str(_) => match self.bump() {
                            Tok::Str(s) => s,
                            _ => unreachable!(),
                        },
                        _ => return Err(self.error(&["string"])),
                    };
                    self.expect(Tok::RParen)?;
                    return Ok(Stmt::Error(msg));
                }
                match self.peek() {
                    Tok::Assign => {
                        self.bump();
                        Ok(Stmt::Assign(name, self.expr()?))
                    }
                    Tok::LParen => {
                        self.bump();
                        Ok(Stmt::Call(name, self.args()?))
                    }
                    _ => Ok(Stmt::Call(name, Vec::new())),
                }
            }
            _ => Err(self.error(&[
                "'skip'",
                "'if'",
                "'while'",
                "'return'",
                "identifier",
                "'end'",
            ])),
        }
    }

    /// Arguments after an opening parenthesis, through the closing one.
    fn args(&mut self) -> PResult<Vec<Expr>> {
        let mut args = Vec::new();
        if self.eat(&Tok::RParen) {
            return Ok(args);
        }
        loop {
            args.push(self.expr()?);
            if self.eat(&Tok::RParen) {
                return Ok(args);
            }
            if !self.eat(&Tok::Comma) {
                return Err(self.error(&["','", "')'"]));
            }
        }
    }

    pub fn expr(&mut self) -> PResult<Expr> {
        let mut lhs = self.and_expr()?;
        while self.eat(&Tok::Kw(Kw::Or)) {
            lhs = Expr::bin(BinOp::Or, lhs, self.and_expr()?);
        }
        Ok(lhs)
    }

    fn and_expr(&mut self) -> PResult<Expr> {
        let mut lhs = self.not_expr()?;
        while self.eat(&Tok::Kw(Kw::And)) {
            lhs = Expr::bin(BinOp::And, lhs, self.not_expr()?);
        }
        Ok(lhs)
    }

    fn not_expr(&mut self) -> PResult<Expr> {
        if self.eat(&Tok::Kw(Kw::Not)) {
            return Ok(Expr::not(self.not_expr()?));
        }
        self.cmp_expr()
    }

    fn cmp_expr(&mut self) -> PResult<Expr> {
        let lhs = self.add_expr()?;
        let op = match self.peek() {
            Tok::Eq => BinOp::Eq,
            Tok::Ne => BinOp::Ne,
            Tok::Lt => BinOp::Lt,
            Tok::Le => BinOp::Le,
            _ => return Ok(lhs),
        };
        self.bump();
        Ok(Expr::bin(op, lhs, self.add_expr()?))
    }

    fn add_expr(&mut self) -> PResult<Expr> {
        let mut lhs = self.mul_expr()?;
        loop {
            let op = match self.peek() {
                Tok::Plus => BinOp::Add,
                Tok::Minus => BinOp::Sub,
                _ => return Ok(lhs),
            };
            self.bump();
            lhs = Expr::bin(op, lhs, self.mul_expr()?);
        }
    }

    fn mul_expr(&mut self) -> PResult<Expr> {
        let mut lhs = self.atom()?;
        loop {
            let op = match self.peek() {
                Tok::Star => BinOp::Mul,
                Tok::Kw(Kw::Mod) => BinOp::Mod,
                _ => return Ok(lhs),
            };
            self.bump();
            lhs = Expr::bin(op, lhs, self.atom()?);
        }
    }

    fn atom(&mut self) -> PResult<Expr> {
        match self.peek().clone() {
            Tok::Int(n) => {
                self.bump();
                Ok(Expr::Int(n))
            }
            Tok::Kw(Kw::True) => {
                self.bump();
                Ok(Expr::Bool(true))
            }
            Tok::Kw(Kw::False) => {
                self.bump();
                Ok(Expr::Bool(false))
            }
            Tok::Kw(Kw::Code) => {
                self.bump();
                self.expect(Tok::LParen)?;
                let name = self.ident()?;
                self.expect(Tok::RParen)?;
                Ok(Expr::Code(name))
            }
            Tok::Ident(name) => {
                self.bump();
                if self.peek() == &Tok::LParen {
                    self.bump();
                    Ok(Expr::Call(name, self.args()?))
                } else {
                    Ok(Expr::Var(name))
                }
            }
            Tok::LParen => {
                self.bump();
                let e = self.expr()?;
                self.expect(Tok::RParen)?;
                Ok(e)
            }
            _ => Err(self.error(&[
                "integer",
                "'true'",
                "'false'",
                "'code'",
                "identifier",
                "'('",
                "'not'",
            ])),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn skip_program() {
        let m = parse_unchecked("procedure Skip skip end").unwrap();
        assert_eq!(
            m.decls,
            vec![Decl::procedure("Skip", vec![], vec![Stmt::Skip])]
        );
    }

    #[test]
    fn precedence() {
        let m = parse_unchecked("procedure P x := 1 + 2 * 3 = 7 and not y < 2 or z end").unwrap();
        let Stmt::Assign(_, e) = &m.decls[0].body[0] else {
            panic!()
        };
        let expected = Expr::bin(
            BinOp::Or,
            Expr::bin(
                BinOp::And,
                Expr::bin(
                    BinOp::Eq,
                    Expr::bin(
                        BinOp::Add,
                        Expr::Int(1),
                        Expr::bin(BinOp::Mul, Expr::Int(2), Expr::Int(3)),
                    ),
                    Expr::Int(7),
                ),
                Expr::not(Expr::bin(BinOp::Lt, Expr::var("y"), Expr::Int(2))),
            ),
            Expr::var("z"),
        );
        assert_eq!(e, &expected);
    }

    #[test]
    fn syntax_error_position_and_expected_set() {
        let err = parse_unchecked("procedure P\n  while x do skip\nend").unwrap_err();
        match err {
            ParseError::Syntax {
                line,
                col,
                expected,
                found,
            } => {
                assert_eq!((line, col), (3, 4));
                assert!(expected.contains(&"'end'".to_string()), "{expected:?}");
                assert_eq!(found, "end of input");
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn comparisons_do_not_chain() {
        assert!(parse_unchecked("procedure P x := 1 = 2 = 3 end").is_err());
    }

    #[test]
    fn bare_call_and_semicolons() {
        let m = parse_unchecked("procedure P x := 1; Loop; y := 2 end").unwrap();
        assert_eq!(m.decls[0].body.len(), 3);
        assert_eq!(m.decls[0].body[1], Stmt::Call("Loop".into(), vec![]));
    }
}
