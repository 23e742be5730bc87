//! Rewriting for the termination calculus.
//!
//! Supported program shapes are exactly those the derivation for S needs:
//! a body that is `skip`, or a single `if g then T end` whose guard is a
//! boolean literal or a halt test applied to `code(P)`, and whose branch is
//! `skip` or a parameterless call. Anything else is a [`ShapeError`].

use std::fmt;

use thiserror::Error;

use crate::lang::{canonical, Expr, ModuleAst, Stmt};

use super::solve::{solve_iff, TrmVerdict};
use super::term::{Branch, TrmEquation, TrmTerm};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ShapeError {
    #[error("no declaration `{0}`")]
    Unknown(String),
    #[error("`{program}` has an unsupported shape: {detail}")]
    Unsupported { program: String, detail: String },
    #[error("rule (1) needs trm(g) for guard {0}, which is not assumed")]
    GuardTermination(String),
    #[error("rule (1) applies to trm(P) or trm(if g then T end), not {0}")]
    NotApplicable(String),
}

/// Facts available to the rewriting.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Facts {
    /// Programs known not to terminate (`trm(Loop) = false`).
    pub diverging: Vec<String>,
    /// Halt test `H` specified by `H(P) ⇔ trm(P)`.
    pub halt_spec: Option<String>,
    /// Whether the halt test's own termination, `trm(H)`, is assumed. Rule (1)
    /// needs it whenever the guard is a halt-test call.
    pub assume_trm_h: bool,
}

impl Default for Facts {
    fn default() -> Self {
        Facts {
            diverging: vec![canonical::LOOP.into()],
            halt_spec: Some(crate::lang::HALT_TABLE_INTRINSIC.into()),
            assume_trm_h: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Justification {
    Definition(String),
    Rule1,
    Property(String),
    Logic,
    Specification(String),
}

impl Justification {
    pub fn label(&self) -> String {
        match self {
            Justification::Definition(p) => format!("definition of {p}"),
            Justification::Rule1 => "rule (1)".into(),
            Justification::Property(p) => format!("property of {p}"),
            Justification::Logic => "logic".into(),
            Justification::Specification(h) => format!("specification of {h}"),
        }
    }
}

impl fmt::Display for Justification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DerivationStep {
    pub before: TrmTerm,
    pub after: TrmTerm,
    pub justification: Justification,
}

/// Unfolds `trm(P)` by the definition of `P`.
pub fn unfold_definition(program: &str, m: &ModuleAst) -> Result<TrmTerm, ShapeError> {
    let d = m
        .decl(program)
        .ok_or_else(|| ShapeError::Unknown(program.into()))?;
    let unsupported = |detail: &str| ShapeError::Unsupported {
        program: program.into(),
        detail: detail.into(),
    };
    if !d.params.is_empty() {
        return Err(unsupported("takes parameters"));
    }
    match d.body.as_slice() {
        [Stmt::Skip] => Ok(TrmTerm::Const(true)),
        [Stmt::If {
            branches,
            otherwise: None,
        }] if branches.len() == 1 => {
            let (guard, then) = &branches[0];
            Ok(TrmTerm::TrmIf {
                guard: Box::new(guard_term(guard).ok_or_else(|| unsupported("guard"))?),
                then: branch(then).ok_or_else(|| unsupported("then-branch"))?,
            })
        }
        _ => Err(unsupported("body is not skip or a single if-then-end")),
    }
}

fn guard_term(g: &Expr) -> Option<TrmTerm> {
    match g {
        Expr::Bool(b) => Some(TrmTerm::Const(*b)),
        Expr::Call(test, args) => match args.as_slice() {
            [Expr::Code(p)] => Some(TrmTerm::test(test, p)),
            _ => None,
        },
        _ => None,
    }
}

fn branch(body: &[Stmt]) -> Option<Branch> {
    match body {
        [Stmt::Skip] => Some(Branch::Skip),
        [Stmt::Call(p, args)] if args.is_empty() => Some(Branch::Call(p.clone())),
        _ => None,
    }
}

/// Rule (1): under `trm(g)`,
/// `trm(if g then T end) ⇔ ¬g ∨ (g ⇒ trm(T))`.
///
/// Accepts `trm(P)` (unfolded first) or an explicit `trm(if ..)` term.
pub fn apply_rule1(t: &TrmTerm, m: &ModuleAst, facts: &Facts) -> Result<TrmTerm, ShapeError> {
    let unfolded;
    let t = match t {
        TrmTerm::TrmOf(p) => {
            unfolded = unfold_definition(p, m)?;
            &unfolded
        }
        other => other,
    };
    match t {
        TrmTerm::TrmIf { guard, then } => {
            if matches!(**guard, TrmTerm::Test { .. }) && !facts.assume_trm_h {
                return Err(ShapeError::GuardTermination(guard.to_string()));
            }
            let g = (**guard).clone();
            let trm_then = match then {
                Branch::Skip => TrmTerm::Const(true),
                Branch::Call(p) => TrmTerm::trm(p),
            };
            Ok(TrmTerm::or(TrmTerm::not(g.clone()), TrmTerm::implies(g, trm_then)))
        }
        other => Err(ShapeError::NotApplicable(other.to_string())),
    }
}

/// Rewrites every `trm(P)` for a known diverging `P` to `false`.
fn property_step(t: &TrmTerm, facts: &Facts) -> Option<(TrmTerm, String)> {
    let target = facts
        .diverging
        .iter()
        .find(|p| t.mentions(&TrmTerm::trm(p.as_str())))?;
    let out = replace(t, &TrmTerm::trm(target.as_str()), &TrmTerm::Const(false));
    Some((out, target.clone()))
}

/// Rewrites every `H(P)` to `trm(P)` for the specified halt test.
fn specification_step(t: &TrmTerm, facts: &Facts) -> Option<(TrmTerm, String)> {
    let h = facts.halt_spec.as_ref()?;
    let mut found = None;
    let out = map_atoms(t, &mut |a| match a {
        TrmTerm::Test { test, program } if test == h => {
            found = Some(h.clone());
            Some(TrmTerm::trm(program.as_str()))
        }
        _ => None,
    });
    found.map(|h| (out, h))
}

fn replace(t: &TrmTerm, from: &TrmTerm, to: &TrmTerm) -> TrmTerm {
    map_atoms(t, &mut |a| (a == from).then(|| to.clone()))
}

/// Rebuilds `t` with atoms substituted; `trm(if ..)` atoms are opaque.
fn map_atoms(t: &TrmTerm, f: &mut dyn FnMut(&TrmTerm) -> Option<TrmTerm>) -> TrmTerm {
    match t {
        TrmTerm::Not(a) => TrmTerm::not(map_atoms(a, f)),
        TrmTerm::Or(a, b) => {
            let a = map_atoms(a, f);
            TrmTerm::or(a, map_atoms(b, f))
        }
        TrmTerm::Implies(a, b) => {
            let a = map_atoms(a, f);
            TrmTerm::implies(a, map_atoms(b, f))
        }
        TrmTerm::Iff(a, b) => {
            let a = map_atoms(a, f);
            TrmTerm::iff(a, map_atoms(b, f))
        }
        other => f(other).unwrap_or_else(|| other.clone()),
    }
}

/// One propositional rewrite at the leftmost-outermost position where any
/// rule fires.
pub fn logic_once(t: &TrmTerm) -> Option<TrmTerm> {
    use TrmTerm::*;
    let at_root = match t {
        Not(a) => match &**a {
            Const(b) => Some(Const(!b)),
            Not(inner) => Some((**inner).clone()),
            _ => None,
        },
        Or(a, b) => match (&**a, &**b) {
            (Const(true), _) | (_, Const(true)) => Some(Const(true)),
            (Const(false), x) | (x, Const(false)) => Some(x.clone()),
            (x, y) if x == y => Some(x.clone()),
            _ => None,
        },
        Implies(a, b) => match (&**a, &**b) {
            (x, Const(false)) => Some(TrmTerm::not(x.clone())),
            (Const(true), x) => Some(x.clone()),
            (Const(false), _) | (_, Const(true)) => Some(Const(true)),
            (x, y) if x == y => Some(Const(true)),
            _ => None,
        },
        Iff(a, b) => match (&**a, &**b) {
            (x, Const(true)) | (Const(true), x) => Some(x.clone()),
            (x, Const(false)) | (Const(false), x) => Some(TrmTerm::not(x.clone())),
            (x, y) if x == y => Some(Const(true)),
            _ => None,
        },
        _ => None,
    };
    if at_root.is_some() {
        return at_root;
    }
    match t {
        Not(a) => logic_once(a).map(TrmTerm::not),
        Or(a, b) => logic_once(a)
            .map(|a2| TrmTerm::or(a2, (**b).clone()))
            .or_else(|| logic_once(b).map(|b2| TrmTerm::or((**a).clone(), b2))),
        Implies(a, b) => logic_once(a)
            .map(|a2| TrmTerm::implies(a2, (**b).clone()))
            .or_else(|| logic_once(b).map(|b2| TrmTerm::implies((**a).clone(), b2))),
        Iff(a, b) => logic_once(a)
            .map(|a2| TrmTerm::iff(a2, (**b).clone()))
            .or_else(|| logic_once(b).map(|b2| TrmTerm::iff((**a).clone(), b2))),
        _ => None,
    }
}

/// Applies the facts and propositional simplification until nothing changes.
pub fn simplify(t: &TrmTerm, facts: &Facts) -> TrmTerm {
    let mut cur = t.clone();
    loop {
        if let Some(next) = logic_once(&cur) {
            cur = next;
        } else if let Some((next, _)) = property_step(&cur, facts) {
            cur = next;
        } else if let Some((next, _)) = specification_step(&cur, facts) {
            cur = next;
        } else {
            return cur;
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Derivation {
    pub program: String,
    pub steps: Vec<DerivationStep>,
    pub equation: TrmEquation,
    pub verdict: TrmVerdict,
    /// Set when the chain stopped with a `trm(if ..)` left that rule (1)
    /// could not rewrite.
    pub stuck_at: Option<Justification>,
}

impl Derivation {
    /// Numbered transcript: each line is a term, `⇔` and the justification
    /// for moving to the next line; the final line is the last term.
    pub fn transcript(&self) -> String {
        let mut out = String::new();
        for (i, s) in self.steps.iter().enumerate() {
            out.push_str(&format!("{}. {} ⇔ \"{}\"\n", i + 1, s.before, s.justification));
        }
        let last = self
            .steps
            .last()
            .map_or_else(|| TrmTerm::trm(self.program.as_str()), |s| s.after.clone());
        let pad = " ".repeat(format!("{}. ", self.steps.len().max(1)).len());
        out.push_str(&format!("{pad}{last}\n"));
        out
    }
}

/// Derives `trm(program)` by repeatedly applying, in order of preference:
/// definition unfolding, rule (1), properties of diverging programs, one
/// logic rewrite, and the halt-test specification. Stops when no rule
/// applies or when `trm(program)` reappears, and solves the resulting
/// equation for `trm(program)`.
pub fn derive(program: &str, m: &ModuleAst, facts: &Facts) -> Result<Derivation, ShapeError> {
    let target = TrmTerm::trm(program);
    let mut cur = target.clone();
    let mut steps = Vec::new();
    loop {
        if !steps.is_empty() && cur.mentions(&target) {
            break;
        }
        let next = next_step(&cur, program, m, facts, steps.is_empty())?;
        match next {
            Some((after, justification)) => {
                steps.push(DerivationStep {
                    before: cur.clone(),
                    after: after.clone(),
                    justification,
                });
                cur = after;
            }
            None => break,
        }
    }
    let stuck_at = contains_trm_if(&cur).then_some(Justification::Rule1);
    let equation = TrmEquation::new(target.clone(), cur);
    let verdict = match solve_iff(&equation, Some(&target)) {
        Ok(TrmVerdict::NoSolution(_)) => TrmVerdict::NoSolution(steps.clone()),
        Ok(v) => v,
        Err(_) => TrmVerdict::Underdetermined,
    };
    Ok(Derivation {
        program: program.into(),
        steps,
        equation,
        verdict,
        stuck_at,
    })
}

fn contains_trm_if(t: &TrmTerm) -> bool {
    t.atoms().iter().any(|a| matches!(a, TrmTerm::TrmIf { .. }))
}

fn next_step(
    cur: &TrmTerm,
    program: &str,
    m: &ModuleAst,
    facts: &Facts,
    first: bool,
) -> Result<Option<(TrmTerm, Justification)>, ShapeError> {
    // definition: the target itself on the first step, other programs any time
    for atom in cur.atoms() {
        if let TrmTerm::TrmOf(p) = &atom {
            if (p != program || first) && !facts.diverging.contains(p) {
                match unfold_definition(p, m) {
                    Ok(body) => {
                        return Ok(Some((
                            replace(cur, &atom, &body),
                            Justification::Definition(p.clone()),
                        )))
                    }
                    Err(ShapeError::Unknown(_)) | Err(ShapeError::Unsupported { .. })
                        if !first =>
                    {
                        continue
                    }
                    Err(e) => return Err(e),
                }
            }
        }
    }
    for atom in cur.atoms() {
        if let TrmTerm::TrmIf { .. } = &atom {
            match apply_rule1(&atom, m, facts) {
                Ok(r) => return Ok(Some((replace(cur, &atom, &r), Justification::Rule1))),
                Err(ShapeError::GuardTermination(_)) => continue,
                Err(e) => return Err(e),
            }
        }
    }
    if let Some((t, p)) = property_step(cur, facts) {
        return Ok(Some((t, Justification::Property(p))));
    }
    if let Some(t) = logic_once(cur) {
        return Ok(Some((t, Justification::Logic)));
    }
    if let Some((t, h)) = specification_step(cur, facts) {
        return Ok(Some((t, Justification::Specification(h))));
    }
    Ok(None)
}

/// The module {Loop, S} in which the derivation for S runs.
pub fn s_module() -> ModuleAst {
    ModuleAst::new(vec![
        canonical::loop_(),
        super::build_s(crate::lang::HALT_TABLE_INTRINSIC, canonical::LOOP),
    ])
}

/// Runs the chain for `S ≙ if H(S) then Loop end` under the default facts,
/// optionally withholding the assumption `trm(H)`.
pub fn derive_s_contradiction(assume_trm_h: bool) -> Derivation {
    let facts = Facts {
        assume_trm_h,
        ..Facts::default()
    };
    derive(super::S, &s_module(), &facts).expect("S has the supported shape")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lang::parse;

    fn h(p: &str) -> TrmTerm {
        TrmTerm::test("H", p)
    }

    #[test]
    fn rule1_on_s() {
        let r = apply_rule1(&TrmTerm::trm("S"), &s_module(), &Facts::default()).unwrap();
        assert_eq!(
            r,
            TrmTerm::or(
                TrmTerm::not(h("S")),
                TrmTerm::implies(h("S"), TrmTerm::trm("Loop"))
            )
        );
    }

    #[test]
    fn rule1_on_guarded_skip() {
        let m = parse("procedure P if true then skip end end").unwrap();
        let r = apply_rule1(&TrmTerm::trm("P"), &m, &Facts::default()).unwrap();
        assert_eq!(
            r,
            TrmTerm::or(
                TrmTerm::not(TrmTerm::Const(true)),
                TrmTerm::implies(TrmTerm::Const(true), TrmTerm::Const(true))
            )
        );
        assert_eq!(simplify(&r, &Facts::default()), TrmTerm::Const(true));
    }

    #[test]
    fn rule1_rejects_loops() {
        let m = parse("procedure W while true do skip end end").unwrap();
        assert!(matches!(
            apply_rule1(&TrmTerm::trm("W"), &m, &Facts::default()),
            Err(ShapeError::Unsupported { .. })
        ));
    }

    #[test]
    fn simplify_examples() {
        let no_spec = Facts {
            halt_spec: None,
            ..Facts::default()
        };
        let t = TrmTerm::or(
            TrmTerm::not(h("S")),
            TrmTerm::implies(h("S"), TrmTerm::Const(false)),
        );
        assert_eq!(simplify(&t, &no_spec), TrmTerm::not(h("S")));
        assert_eq!(
            simplify(&TrmTerm::not(h("S")), &Facts::default()),
            TrmTerm::not(TrmTerm::trm("S"))
        );
        assert_eq!(
            simplify(
                &TrmTerm::or(TrmTerm::Const(true), TrmTerm::unknown("x")),
                &Facts::default()
            ),
            TrmTerm::Const(true)
        );
    }

    #[test]
    fn s_chain() {
        let d = derive_s_contradiction(true);
        let labels: Vec<String> = d.steps.iter().map(|s| s.justification.label()).collect();
        assert_eq!(
            labels,
            [
                "definition of S",
                "rule (1)",
                "property of Loop",
                "logic",
                "logic",
                "specification of H"
            ]
        );
        assert_eq!(
            d.equation,
            TrmEquation::new(TrmTerm::trm("S"), TrmTerm::not(TrmTerm::trm("S")))
        );
        assert!(matches!(d.verdict, TrmVerdict::NoSolution(ref s) if s.len() == 6));
        assert_eq!(d.stuck_at, None);
    }

    #[test]
    fn chain_stops_at_rule1_without_trm_h() {
        let d = derive_s_contradiction(false);
        assert_eq!(d.steps.len(), 1);
        assert_eq!(d.stuck_at, Some(Justification::Rule1));
        assert_eq!(d.verdict, TrmVerdict::Underdetermined);
    }

    #[test]
    fn non_self_referential_program_is_determined() {
        let m = parse(
            "procedure Skip skip end procedure Loop while true do skip end end \
             procedure P if H(code(Skip)) then Loop() end end",
        )
        .unwrap();
        let d = derive("P", &m, &Facts::default()).unwrap();
        assert_eq!(d.verdict, TrmVerdict::Determined(false));
    }
}
