//! The self-referential programs S and S1, and the termination calculus
//! showing that `trm(S) ⇔ ¬trm(S)`.

mod rules;
mod solve;
mod term;

use crate::lang::{canonical, Decl, Expr, Stmt, H1_INTRINSIC};

pub use rules::{
    apply_rule1, derive, derive_s_contradiction, logic_once, s_module, simplify,
    unfold_definition, Derivation, DerivationStep, Facts, Justification, ShapeError,
};
pub use solve::{solve_iff, solve_system, SolveError, TrmVerdict, MAX_UNKNOWNS};
pub use term::{Branch, TrmEquation, TrmTerm};

pub const S: &str = "S";
pub const S1: &str = "S1";

/// `procedure S if h_name(code(S)) then loop_name() end end`
pub fn build_s(h_name: &str, loop_name: &str) -> Decl {
    self_refuting(S, h_name, loop_name)
}

/// `procedure S1 if H1(code(S1)) then Loop() end end`, runnable because H1
/// is an interpreter intrinsic.
pub fn build_s1() -> Decl {
    self_refuting(S1, H1_INTRINSIC, canonical::LOOP)
}

fn self_refuting(name: &str, test: &str, loop_name: &str) -> Decl {
    Decl::procedure(
        name,
        vec![],
        vec![Stmt::If {
            branches: vec![(
                Expr::Call(test.into(), vec![Expr::Code(name.into())]),
                vec![Stmt::Call(loop_name.into(), vec![])],
            )],
            otherwise: None,
        }],
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lang::{decode, encode, parse_unchecked, pretty_decl, pretty_inline};

    #[test]
    fn s_has_the_textbook_shape() {
        let s = build_s("H", "Loop");
        assert_eq!(
            pretty_inline(&s),
            "procedure S if H(code(S)) then Loop() end end"
        );
        assert_eq!(
            pretty_decl(&s),
            "procedure S\n  if H(code(S)) then\n    Loop()\n  end\nend\n"
        );
    }

    #[test]
    fn s_round_trips() {
        let s = build_s("H", "Loop");
        let reparsed = parse_unchecked(&pretty_decl(&s)).unwrap();
        assert_eq!(reparsed.decls, vec![s.clone()]);
        assert_eq!(encode(&reparsed.decls[0]), encode(&s));
        assert_eq!(decode(&encode(&s)).unwrap(), s);
    }

    #[test]
    fn distinct_halt_tests_distinct_codes() {
        assert_ne!(encode(&build_s("H", "Loop")), encode(&build_s("H1", "Loop")));
    }
}
