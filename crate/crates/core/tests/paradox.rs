use haltlab_core::lang::{parse, pretty_inline};
use haltlab_core::paradox::{
    build_s, derive, derive_s_contradiction, s_module, solve_iff, solve_system, Facts,
    Justification, SolveError, TrmEquation, TrmTerm, TrmVerdict, MAX_UNKNOWNS,
};

const TRANSCRIPT: &str = "\
1. trm(S) ⇔ \"definition of S\"
2. trm(if H(S) then Loop end) ⇔ \"rule (1)\"
3. ¬H(S) ∨ (H(S) ⇒ trm(Loop)) ⇔ \"property of Loop\"
4. ¬H(S) ∨ (H(S) ⇒ false) ⇔ \"logic\"
5. ¬H(S) ∨ ¬H(S) ⇔ \"logic\"
6. ¬H(S) ⇔ \"specification of H\"
   ¬trm(S)
";

#[test]
fn s_derivation_transcript() {
    let d = derive_s_contradiction(true);
    assert_eq!(d.transcript(), TRANSCRIPT);
    let labels: Vec<_> = d.steps.iter().map(|s| s.justification.clone()).collect();
    assert_eq!(
        labels,
        vec![
            Justification::Definition("S".into()),
            Justification::Rule1,
            Justification::Property("Loop".into()),
            Justification::Logic,
            Justification::Logic,
            Justification::Specification("H".into()),
        ]
    );
    assert_eq!(d.equation.to_string(), "trm(S) ⇔ ¬trm(S)");
    assert!(matches!(d.verdict, TrmVerdict::NoSolution(ref steps) if steps.len() == 6));
    assert_eq!(d.stuck_at, None);
}

#[test]
fn each_step_is_an_equivalence() {
    // every line must agree with the next under all assignments once H(S)
    // is tied to trm(S); brute force over both atoms
    let d = derive_s_contradiction(true);
    for s in &d.steps {
        for (hs, ts, tl) in [(false, false, false), (true, true, false), (false, true, false), (true, false, false)] {
            let val = |t: &TrmTerm| match t {
                TrmTerm::Test { .. } => hs,
                TrmTerm::TrmOf(p) if p == "S" => ts,
                TrmTerm::TrmOf(_) => tl,
                _ => unreachable!("{t}"),
            };
            if matches!(s.justification, Justification::Logic) {
                assert_eq!(s.before.eval(&val), s.after.eval(&val), "{}", s.before);
            }
        }
    }
}

#[test]
fn without_trm_h_the_chain_stops_at_rule_1() {
    let d = derive_s_contradiction(false);
    assert_eq!(d.steps.len(), 1);
    assert_eq!(d.stuck_at, Some(Justification::Rule1));
    assert_eq!(d.verdict, TrmVerdict::Underdetermined);
}

#[test]
fn s_shape() {
    assert_eq!(
        pretty_inline(&build_s("H", "Loop")),
        "procedure S if H(code(S)) then Loop() end end"
    );
    assert_eq!(s_module().decls.len(), 2);
}

#[test]
fn a_program_that_halts_is_determined() {
    let m = parse("procedure P if true then skip end end").unwrap();
    let d = derive("P", &m, &Facts::default()).unwrap();
    assert_eq!(d.verdict, TrmVerdict::Determined(true));
}

#[test]
fn solver_against_truth_tables() {
    let p = TrmTerm::unknown("p");
    let q = TrmTerm::unknown("q");
    let cases = [
        (TrmEquation::new(p.clone(), TrmTerm::not(p.clone())), None),
        (TrmEquation::new(p.clone(), p.clone()), Some(None)),
        (TrmEquation::new(p.clone(), TrmTerm::Const(true)), Some(Some(true))),
        (TrmEquation::new(p.clone(), TrmTerm::implies(p.clone(), TrmTerm::Const(false))), None),
        (TrmEquation::new(p.clone(), TrmTerm::implies(TrmTerm::Const(true), TrmTerm::Const(false))), Some(Some(false))),
        (TrmEquation::new(p.clone(), TrmTerm::or(q.clone(), TrmTerm::not(q.clone()))), Some(Some(true))),
    ];
    for (eq, expected) in cases {
        // oracle: enumerate both atoms directly
        let mut values = vec![];
        for bits in 0..4 {
            let val = |t: &TrmTerm| if *t == p { bits & 1 == 1 } else { bits & 2 == 2 };
            if eq.holds(&val) {
                values.push(bits & 1 == 1);
            }
        }
        let oracle = if values.is_empty() {
            None
        } else if values.iter().all(|&v| v == values[0]) {
            Some(Some(values[0]))
        } else {
            Some(None)
        };
        assert_eq!(oracle, expected, "{eq}");
        let got = solve_iff(&eq, Some(&p)).unwrap();
        let got = match got {
            TrmVerdict::NoSolution(_) => None,
            TrmVerdict::Underdetermined => Some(None),
            TrmVerdict::Determined(b) => Some(Some(b)),
        };
        assert_eq!(got, expected, "{eq}");
    }
}

#[test]
fn solver_limits() {
    let eqs: Vec<_> = (0..=MAX_UNKNOWNS)
        .map(|i| TrmEquation::new(TrmTerm::unknown(format!("u{i}")), TrmTerm::Const(true)))
        .collect();
    assert_eq!(
        solve_system(&eqs, None),
        Err(SolveError::TooManyUnknowns(MAX_UNKNOWNS + 1))
    );
    let e = TrmEquation::new(TrmTerm::unknown("a"), TrmTerm::Const(true));
    assert!(matches!(
        solve_iff(&e, Some(&TrmTerm::unknown("b"))),
        Err(SolveError::QueryNotPresent(_))
    ));
}
