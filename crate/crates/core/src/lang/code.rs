//! Canonical byte encoding of declarations.
//!
//! Layout: a two byte header (`b'G'`, format version) followed by the
//! declaration in prefix form. Lengths and integers are unsigned LEB128 in
//! minimal form, strings are length-prefixed UTF-8, and every node starts
//! with a one byte tag. Decoding rejects anything `encode` would not emit,
//! so the map is a bijection onto its image.

use std::fmt;
use std::sync::Arc;

use num_bigint::BigUint;
use thiserror::Error;

use super::ast::{BinOp, Decl, DeclKind, Expr, Stmt};

const MAGIC: u8 = b'G';
const VERSION: u8 = 1;

/// The encoding ⌈P⌉ of a declaration, used wherever a program is passed as data.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ProgramCode(Arc<[u8]>);

impl ProgramCode {
    pub fn from_bytes(bytes: impl Into<Arc<[u8]>>) -> Self {
        ProgramCode(bytes.into())
    }

    pub fn bytes(&self) -> &[u8] {
        &self.0
    }

    /// The bytes read as a big-endian natural number.
    pub fn number(&self) -> BigUint {
        BigUint::from_bytes_be(&self.0)
    }

    pub fn to_hex(&self) -> String {
        hex::encode(&self.0)
    }

    pub fn from_hex(s: &str) -> Result<Self, DecodeError> {
        let bytes = hex::decode(s.trim()).map_err(|_| DecodeError::Hex)?;
        Ok(ProgramCode::from_bytes(bytes))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl fmt::Debug for ProgramCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ProgramCode({})", self.to_hex())
    }
}

impl fmt::Display for ProgramCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_hex())
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum DecodeError {
    #[error("truncated encoding at byte {0}")]
    Truncated(usize),
    #[error("bad header")]
    Header,
    #[error("unknown tag {tag} at byte {at}")]
    Tag { tag: u8, at: usize },
    #[error("non-canonical integer at byte {0}")]
    Varint(usize),
    #[error("invalid UTF-8 at byte {0}")]
    Utf8(usize),
    #[error("empty if-chain at byte {0}")]
    EmptyIf(usize),
    #[error("{0} trailing byte(s)")]
    Trailing(usize),
    #[error("not a hexadecimal string")]
    Hex,
}

pub fn encode(d: &Decl) -> ProgramCode {
    let mut w = Writer(vec![MAGIC, VERSION]);
    w.byte(match d.kind {
        DeclKind::Procedure => 0,
        DeclKind::Enquiry => 1,
    });
    w.str(&d.name);
    w.uint(d.params.len() as u64);
    for p in &d.params {
        w.str(p);
    }
    w.stmts(&d.body);
    ProgramCode::from_bytes(w.0)
}

pub fn decode(c: &ProgramCode) -> Result<Decl, DecodeError> {
    let mut r = Reader { buf: c.bytes(), pos: 0 };
    if r.byte()? != MAGIC || r.byte()? != VERSION {
        return Err(DecodeError::Header);
    }
    let kind = match r.byte()? {
        0 => DeclKind::Procedure,
        1 => DeclKind::Enquiry,
        tag => return Err(DecodeError::Tag { tag, at: r.pos - 1 }),
    };
    let name = r.str()?;
    let n = r.len()?;
    let mut params = Vec::with_capacity(n);
    for _ in 0..n {
        params.push(r.str()?);
    }
    let body = r.stmts()?;
    if r.pos != r.buf.len() {
        return Err(DecodeError::Trailing(r.buf.len() - r.pos));
    }
    Ok(Decl {
        name,
        kind,
        params,
        body,
    })
}

fn op_tag(op: BinOp) -> u8 {
    BinOp::ALL.iter().position(|o| *o == op).unwrap() as u8
}

struct Writer(Vec<u8>);

impl Writer {
    fn byte(&mut self, b: u8) {
        self.0.push(b);
    }

    fn uint(&mut self, mut n: u64) {
        loop {
            let low = (n & 0x7f) as u8;
            n >>= 7;
            if n == 0 {
                self.0.push(low);
                return;
            }
            self.0.push(low | 0x80);
        }
    }

    fn str(&mut self, s: &str) {
        self.uint(s.len() as u64);
        self.0.extend_from_slice(s.as_bytes());
    }

    fn stmts(&mut self, body: &[Stmt]) {
        self.uint(body.len() as u64);
        for s in body {
            self.stmt(s);
        }
    }

    fn stmt(&mut self, s: &Stmt) {
        match s {
            Stmt::Skip => self.byte(0),
            Stmt::Assign(v, e) => {
                self.byte(1);
                self.str(v);
                self.expr(e);
            }
            Stmt::If {
                branches,
                otherwise,
            } => {
                self.byte(2);
                self.uint(branches.len() as u64);
                for (g, body) in branches {
                    self.expr(g);
                    self.stmts(body);
                }
                match otherwise {
                    None => self.byte(0),
                    Some(body) => {
                        self.byte(1);
                        self.stmts(body);
                    }
                }
            }
            Stmt::While(g, body) => {
                self.byte(3);
                self.expr(g);
                self.stmts(body);
            }
            Stmt::Call(name, args) => {
                self.byte(4);
                self.str(name);
                self.exprs(args);
            }
            Stmt::Return(e) => {
                self.byte(5);
                self.expr(e);
            }
            Stmt::Error(msg) => {
                self.byte(6);
                self.str(msg);
            }
        }
    }

    fn exprs(&mut self, es: &[Expr]) {
        self.uint(es.len() as u64);
        for e in es {
            self.expr(e);
        }
    }

    fn expr(&mut self, e: &Expr) {
        match e {
            Expr::Int(n) => {
                self.byte(0);
                self.uint(*n);
            }
            Expr::Bool(b) => {
                self.byte(1);
                self.byte(*b as u8);
            }
            Expr::Var(v) => {
                self.byte(2);
                self.str(v);
            }
            Expr::Binary(op, l, r) => {
                self.byte(3);
                self.byte(op_tag(*op));
                self.expr(l);
                self.expr(r);
            }
            Expr::Not(inner) => {
                self.byte(4);
                self.expr(inner);
            }
            Expr::Call(name, args) => {
                self.byte(5);
                self.str(name);
                self.exprs(args);
            }
            Expr::Code(name) => {
                self.byte(6);
                self.str(name);
            }
        }
    }
}

struct Reader<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl Reader<'_> {
    fn byte(&mut self) -> Result<u8, DecodeError> {
        let b = *self
            .buf
            .get(self.pos)
            .ok_or(DecodeError::Truncated(self.pos))?;
        self.pos += 1;
        Ok(b)
    }

    fn uint(&mut self) -> Result<u64, DecodeError> {
        let start = self.pos;
        let mut n: u64 = 0;
        for shift in (0..64).step_by(7) {
            let b = self.byte()?;
            let chunk = (b & 0x7f) as u64;
            if shift == 63 && chunk > 1 {
                return Err(DecodeError::Varint(start));
            }
            n |= chunk << shift;
            if b & 0x80 == 0 {
                // a trailing zero group means a shorter form existed
                if b == 0 && shift > 0 {
                    return Err(DecodeError::Varint(start));
                }
                return Ok(n);
            }
        }
        Err(DecodeError::Varint(start))
    }

    /// A length prefix; bounded by the remaining input so corrupt data
    /// cannot trigger huge allocations.
    fn len(&mut self) -> Result<usize, DecodeError> {
        let at = self.pos;
        let n = self.uint()?;
        if n > (self.buf.len() - self.pos) as u64 {
            return Err(DecodeError::Truncated(at));
        }
        Ok(n as usize)
    }

    fn str(&mut self) -> Result<String, DecodeError> {
        let n = self.len()?;
        let at = self.pos;
        let bytes = &self.buf[self.pos..self.pos + n];
        self.pos += n;
        String::from_utf8(bytes.to_vec()).map_err(|_| DecodeError::Utf8(at))
    }

    fn stmts(&mut self) -> Result<Vec<Stmt>, DecodeError> {
        let n = self.len()?;
        (0..n).map(|_| self.stmt()).collect()
    }

    fn stmt(&mut self) -> Result<Stmt, DecodeError> {
        let at = self.pos;
        Ok(match self.byte()? {
            0 => Stmt::Skip,
            1 => Stmt::Assign(self.str()?, self.expr()?),
            2 => {
                let n = self.len()?;
                if n == 0 {
                    return Err(DecodeError::EmptyIf(at));
                }
                let mut branches = Vec::with_capacity(n);
                for _ in 0..n {
                    branches.push((self.expr()?, self.stmts()?));
                }
                let otherwise = match self.byte()? {
                    0 => None,
                    1 => Some(self.stmts()?),
                    tag => return Err(DecodeError::Tag { tag, at: self.pos - 1 }),
                };
                Stmt::If {
                    branches,
                    otherwise,
                }
            }
            3 => Stmt::While(self.expr()?, self.stmts()?),
            4 => Stmt::Call(self.str()?, self.exprs()?),
            5 => Stmt::Return(self.expr()?),
            6 => Stmt::Error(self.str()?),
            tag => return Err(DecodeError::Tag { tag, at }),
        })
    }

    fn exprs(&mut self) -> Result<Vec<Expr>, DecodeError> {
        let n = self.len()?;
        (0..n).map(|_| self.expr()).collect()
    }

    fn expr(&mut self) -> Result<Expr, DecodeError> {
        let at = self.pos;
        Ok(match self.byte()? {
            0 => Expr::Int(self.uint()?),
            1 => match self.byte()? {
                0 => Expr::Bool(false),
                1 => Expr::Bool(true),
                tag => return Err(DecodeError::Tag { tag, at: self.pos - 1 }),
            },
            2 => Expr::Var(self.str()?),
            3 => {
                let tag = self.byte()?;
                let op = *BinOp::ALL
                    .get(tag as usize)
                    .ok_or(DecodeError::Tag { tag, at: self.pos - 1 })?;
                Expr::bin(op, self.expr()?, self.expr()?)
            }
            4 => Expr::not(self.expr()?),
            5 => Expr::Call(self.str()?, self.exprs()?),
            6 => Expr::Code(self.str()?),
            tag => return Err(DecodeError::Tag { tag, at }),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::super::canonical;
    use super::*;

    #[test]
    fn distinct_programs_distinct_codes() {
        assert_ne!(encode(&canonical::skip()), encode(&canonical::loop_()));
    }

    #[test]
    fn inverse_on_loop() {
        let l = canonical::loop_();
        assert_eq!(decode(&encode(&l)).unwrap(), l);
    }

    #[test]
    fn truncated_bytes_are_rejected() {
        let c = encode(&canonical::loop_());
        for cut in 0..c.len() {
            let short = ProgramCode::from_bytes(&c.bytes()[..cut]);
            assert!(decode(&short).is_err(), "prefix of length {cut} decoded");
        }
    }

    #[test]
    fn trailing_and_non_minimal_rejected() {
        let mut bytes = encode(&canonical::skip()).bytes().to_vec();
        bytes.push(0);
        assert_eq!(
            decode(&ProgramCode::from_bytes(bytes)),
            Err(DecodeError::Trailing(1))
        );
        // "Skip" name length written as 0x84 0x00 instead of 0x04
        let good = encode(&canonical::skip()).bytes().to_vec();
        let mut bad = good[..3].to_vec();
        bad.extend_from_slice(&[0x84, 0x00]);
        bad.extend_from_slice(&good[4..]);
        assert!(matches!(
            decode(&ProgramCode::from_bytes(bad)),
            Err(DecodeError::Varint(_))
        ));
    }

    #[test]
    fn large_integers_round_trip() {
        let d = Decl::procedure(
            "P",
            vec![],
            vec![Stmt::Assign("x".into(), Expr::Int(u64::MAX))],
        );
        assert_eq!(decode(&encode(&d)).unwrap(), d);
    }

    #[test]
    fn numeric_view_is_big_endian() {
        let c = encode(&canonical::skip());
        assert_eq!(c.number().to_bytes_be(), c.bytes());
        assert!(c.to_hex().starts_with("4701"));
    }
}
