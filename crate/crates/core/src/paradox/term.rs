use std::fmt;

/// Statement in the then-branch of a `trm(if g then T end)` term.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Branch {
    Skip,
    Call(String),
}

impl fmt::Display for Branch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Branch::Skip => f.write_str("skip"),
            Branch::Call(p) => f.write_str(p),
        }
    }
}

/// Terms of the termination calculus.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum TrmTerm {
    Const(bool),
    Unknown(String),
    Not(Box<TrmTerm>),
    Or(Box<TrmTerm>, Box<TrmTerm>),
    Implies(Box<TrmTerm>, Box<TrmTerm>),
    Iff(Box<TrmTerm>, Box<TrmTerm>),
    /// `trm(P)`: execution of program `P` terminates.
    TrmOf(String),
    /// `H(P)`: the verdict of halt test `test` on program `program`.
    Test { test: String, program: String },
    /// `trm(if g then T end)`, before rule (1) is applied.
    TrmIf { guard: Box<TrmTerm>, then: Branch },
}

impl TrmTerm {
    pub fn not(t: TrmTerm) -> TrmTerm {
        TrmTerm::Not(Box::new(t))
    }

    pub fn or(a: TrmTerm, b: TrmTerm) -> TrmTerm {
        TrmTerm::Or(Box::new(a), Box::new(b))
    }

    pub fn implies(a: TrmTerm, b: TrmTerm) -> TrmTerm {
        TrmTerm::Implies(Box::new(a), Box::new(b))
    }

    pub fn iff(a: TrmTerm, b: TrmTerm) -> TrmTerm {
        TrmTerm::Iff(Box::new(a), Box::new(b))
    }

    pub fn trm(p: impl Into<String>) -> TrmTerm {
        TrmTerm::TrmOf(p.into())
    }

    pub fn test(test: impl Into<String>, program: impl Into<String>) -> TrmTerm {
        TrmTerm::Test {
            test: test.into(),
            program: program.into(),
        }
    }

    pub fn unknown(name: impl Into<String>) -> TrmTerm {
        TrmTerm::Unknown(name.into())
    }

    /// Atoms whose truth value is not fixed by the term structure.
    pub fn is_atom(&self) -> bool {
        matches!(
            self,
            TrmTerm::Unknown(_) | TrmTerm::TrmOf(_) | TrmTerm::Test { .. } | TrmTerm::TrmIf { .. }
        )
    }

    /// Distinct atoms in order of first appearance, left to right.
    pub fn atoms(&self) -> Vec<TrmTerm> {
        let mut out = Vec::new();
        self.collect_atoms(&mut out);
        out
    }

    pub(crate) fn collect_atoms(&self, out: &mut Vec<TrmTerm>) {
        match self {
            TrmTerm::Const(_) => {}
            a if a.is_atom() => {
                if !out.contains(a) {
                    out.push(a.clone());
                }
            }
            TrmTerm::Not(a) => a.collect_atoms(out),
            TrmTerm::Or(a, b) | TrmTerm::Implies(a, b) | TrmTerm::Iff(a, b) => {
                a.collect_atoms(out);
                b.collect_atoms(out);
            }
            _ => unreachable!(),
        }
    }

    pub fn mentions(&self, needle: &TrmTerm) -> bool {
        if self == needle {
            return true;
        }
        match self {
            TrmTerm::Not(a) => a.mentions(needle),
            TrmTerm::Or(a, b) | TrmTerm::Implies(a, b) | TrmTerm::Iff(a, b) => {
                a.mentions(needle) || b.mentions(needle)
            }
            _ => false,
        }
    }

    /// Evaluates under `value_of` for atoms.
    pub fn eval(&self, value_of: &dyn Fn(&TrmTerm) -> bool) -> bool {
        match self {
            TrmTerm::Const(b) => *b,
            TrmTerm::Not(a) => !a.eval(value_of),
            TrmTerm::Or(a, b) => a.eval(value_of) || b.eval(value_of),
            TrmTerm::Implies(a, b) => !a.eval(value_of) || b.eval(value_of),
            TrmTerm::Iff(a, b) => a.eval(value_of) == b.eval(value_of),
            atom => value_of(atom),
        }
    }

    fn precedence(&self) -> u8 {
        match self {
            TrmTerm::Iff(..) => 1,
            TrmTerm::Implies(..) => 2,
            TrmTerm::Or(..) => 3,
            TrmTerm::Not(_) => 4,
            _ => 5,
        }
    }

    fn fmt_child(&self, child: &TrmTerm, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if child.precedence() <= self.precedence() && !child.is_atom() && child.precedence() < 4 {
            write!(f, "({child})")
        } else {
            write!(f, "{child}")
        }
    }
}

impl fmt::Display for TrmTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TrmTerm::Const(b) => write!(f, "{b}"),
            TrmTerm::Unknown(x) => f.write_str(x),
            TrmTerm::TrmOf(p) => write!(f, "trm({p})"),
            TrmTerm::Test { test, program } => write!(f, "{test}({program})"),
            TrmTerm::TrmIf { guard, then } => write!(f, "trm(if {guard} then {then} end)"),
            TrmTerm::Not(a) => {
                f.write_str("¬")?;
                if a.precedence() < 4 {
                    write!(f, "({a})")
                } else {
                    write!(f, "{a}")
                }
            }
            TrmTerm::Or(a, b) => {
                self.fmt_child(a, f)?;
                f.write_str(" ∨ ")?;
                self.fmt_child(b, f)
            }
            TrmTerm::Implies(a, b) => {
                self.fmt_child(a, f)?;
                f.write_str(" ⇒ ")?;
                self.fmt_child(b, f)
            }
            TrmTerm::Iff(a, b) => {
                self.fmt_child(a, f)?;
                f.write_str(" ⇔ ")?;
                self.fmt_child(b, f)
            }
        }
    }
}

/// `left ⇔ right`, asserted.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TrmEquation {
    pub left: TrmTerm,
    pub right: TrmTerm,
}

impl TrmEquation {
    pub fn new(left: TrmTerm, right: TrmTerm) -> Self {
        TrmEquation { left, right }
    }

    pub fn atoms(&self) -> Vec<TrmTerm> {
        let mut out = Vec::new();
        self.left.collect_atoms(&mut out);
        self.right.collect_atoms(&mut out);
        out
    }

    pub fn holds(&self, value_of: &dyn Fn(&TrmTerm) -> bool) -> bool {
        self.left.eval(value_of) == self.right.eval(value_of)
    }
}

impl fmt::Display for TrmEquation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} ⇔ {}", self.left, self.right)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn renders_like_the_hand_derivation() {
        let h = TrmTerm::test("H", "S");
        let t = TrmTerm::or(
            TrmTerm::not(h.clone()),
            TrmTerm::implies(h.clone(), TrmTerm::trm("Loop")),
        );
        assert_eq!(t.to_string(), "¬H(S) ∨ (H(S) ⇒ trm(Loop))");
        assert_eq!(
            TrmTerm::not(TrmTerm::or(h.clone(), h)).to_string(),
            "¬(H(S) ∨ H(S))"
        );
        let t = TrmTerm::TrmIf {
            guard: Box::new(TrmTerm::test("H", "S")),
            then: Branch::Call("Loop".into()),
        };
        assert_eq!(t.to_string(), "trm(if H(S) then Loop end)");
    }

    #[test]
    fn atoms_in_order() {
        let e = TrmEquation::new(
            TrmTerm::trm("S"),
            TrmTerm::not(TrmTerm::or(TrmTerm::test("H", "S"), TrmTerm::trm("S"))),
        );
        assert_eq!(e.atoms(), vec![TrmTerm::trm("S"), TrmTerm::test("H", "S")]);
    }
}
