use std::fmt;

use crate::lang::ProgramCode;

/// Integer width in bits; arithmetic wraps modulo 2^w.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Width(u32);

impl Width {
    pub const DEFAULT: Width = Width(8);

    pub fn new(bits: u32) -> Option<Width> {
        (1..=64).contains(&bits).then_some(Width(bits))
    }

    pub fn bits(self) -> u32 {
        self.0
    }

    pub fn mask(self) -> u64 {
        if self.0 == 64 {
            u64::MAX
        } else {
            (1u64 << self.0) - 1
        }
    }

    pub fn wrap(self, n: u64) -> u64 {
        n & self.mask()
    }
}

impl Default for Width {
    fn default() -> Self {
        Width::DEFAULT
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Value {
    Int(u64),
    Bool(bool),
    Code(ProgramCode),
}

impl Value {
    pub fn type_name(&self) -> &'static str {
        match self {
            Value::Int(_) => "integer",
            Value::Bool(_) => "boolean",
            Value::Code(_) => "program code",
        }
    }

    pub(crate) fn write_canonical(&self, out: &mut Vec<u8>) {
        match self {
            Value::Int(n) => {
                out.push(0);
                out.extend_from_slice(&n.to_be_bytes());
            }
            Value::Bool(b) => {
                out.push(1);
                out.push(*b as u8);
            }
            Value::Code(c) => {
                out.push(2);
                out.extend_from_slice(&(c.len() as u32).to_be_bytes());
                out.extend_from_slice(c.bytes());
            }
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Int(n) => write!(f, "{n}"),
            Value::Bool(b) => write!(f, "{b}"),
            Value::Code(c) => write!(f, "code:{}", c.to_hex()),
        }
    }
}
