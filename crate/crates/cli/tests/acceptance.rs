//! One line per acceptance criterion, with its time limit, printed to
//! stderr so it shows without `--nocapture`.

use std::io::Write;
use std::path::PathBuf;
use std::process::Command;
use std::time::{Duration, Instant};

use haltlab_core::analyzer::{
    decide_applied, enumerate_models, wrap_data, wrap_ignore, Analyzer, Verdict, DEFAULT_MAX_BOUND,
};
use haltlab_core::corpus::{
    arbitrary_module, finite_state_program, parameterized_program, rng, CorpusShape, ENTRY,
};
use haltlab_core::diagonal::{beta, enumerate_machines, Generator, Provenance};
use haltlab_core::halt_map::HaltMap;
use haltlab_core::interp::{
    purity_checks_performed, run, Machine, MachineOptions, Outcome, RunOptions, TraceMode, Value, Width,
    CANNOT_TERMINATE, INVALID_PROGRAM,
};
use haltlab_core::lang::{canonical, decode, encode, parse, parse_unchecked, pretty};
use haltlab_core::paradox::build_s;
use haltlab_core::search::{fermat_search, goldbach_search, GoldbachOptions, Witness};

type Check = fn() -> Result<String, String>;

fn program(name: &str) -> PathBuf {
    [env!("CARGO_MANIFEST_DIR"), "..", "..", "programs", name].iter().collect()
}

fn source(name: &str) -> String {
    std::fs::read_to_string(program(name)).unwrap()
}

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn width4() -> MachineOptions {
    MachineOptions {
        width: Width::new(4).unwrap(),
        ..MachineOptions::default()
    }
}

fn models() -> Result<String, String> {
    let skip = canonical::skip();
    let lp = canonical::loop_();
    let l0 = enumerate_models(&[skip.clone(), lp.clone()]).map_err(|e| e.to_string())?;
    let good: Vec<&HaltMap> = l0.consistent().collect();
    let expected: HaltMap = [(encode(&skip), true), (encode(&lp), false)].into_iter().collect();
    ensure(good == [&expected], || format!("L0 consistent maps: {good:?}"))?;
    let l1 = enumerate_models(&[skip, lp, build_s("H", "Loop")]).map_err(|e| e.to_string())?;
    ensure(l1.candidates.len() == 8 && l1.consistent_count() == 0, || {
        format!("L1: {} of {}", l1.consistent_count(), l1.candidates.len())
    })?;
    Ok("L0 1/4 consistent, L1 0/8".into())
}

fn h1() -> Result<String, String> {
    let m = parse(&source("h1_probe.gcl")).map_err(|e| e.to_string())?;
    let ask = |entry: &str| run(&m, entry, 100, &RunOptions::default()).map(|r| r.0);
    let answer = |entry: &str| match ask(entry) {
        Ok(Outcome::Halted { value: Some(Value::Bool(b)), .. }) => Ok(b),
        other => Err(format!("{entry}: {other:?}")),
    };
    ensure(answer("AskSkip")?, || "H1(Skip) false".into())?;
    ensure(!answer("AskLoop")?, || "H1(Loop) true".into())?;
    ensure(!answer("AskS1")?, || "H1(S1) true at top level".into())?;
    match ask("AskSelf") {
        Ok(Outcome::ErrorStop { report, .. }) if report.message == INVALID_PROGRAM => {}
        other => return Err(format!("H1(other): {other:?}")),
    }
    let out = Command::new(env!("CARGO_BIN_EXE_haltlab"))
        .arg("run")
        .arg(program("s1.gcl"))
        .output()
        .map_err(|e| e.to_string())?;
    let golden = format!("Error at S1\n{CANNOT_TERMINATE}\nreported at H1 in s1.gcl\n");
    let got = String::from_utf8_lossy(&out.stderr);
    ensure(got == golden, || format!("S1 report {got:?}"))?;
    Ok("truth table and S1 report exact".into())
}

fn equivalence() -> Result<String, String> {
    let shape = CorpusShape::default();
    let mut r = rng(2024);
    let (mut halts, mut diverges, mut errors) = (0, 0, 0);
    for i in 0..1000 {
        let m = finite_state_program(&mut r, &shape);
        let a = Analyzer::new(&m, width4()).map_err(|e| e.to_string())?;
        let decided = a.decide(ENTRY, &[], None).map_err(|e| e.to_string())?;
        let counted = a.counter(ENTRY, &[], DEFAULT_MAX_BOUND).map_err(|e| e.to_string())?;
        ensure(decided.halts() == counted.halts(), || {
            format!("program {i}: {decided} vs {counted}\n{}", pretty(&m))
        })?;
        match &decided {
            Verdict::Diverges(e) => {
                diverges += 1;
                ensure(e.replay(&a.machine, ENTRY, &[]).map_err(|e| e.to_string())?, || {
                    format!("program {i}: evidence does not replay")
                })?;
            }
            Verdict::Halts(_) => halts += 1,
            _ => errors += 1,
        }
    }
    Ok(format!("1000 programs, 0 disagreements ({halts} halt, {diverges} diverge, {errors} error)"))
}

fn reduction() -> Result<String, String> {
    let shape = CorpusShape {
        max_stmts: 20,
        ..CorpusShape::default()
    };
    let mut r = rng(5);
    for i in 0..50u64 {
        let mut m = parameterized_program(&mut r, &shape);
        let d = i % 16;
        let direct = decide_applied(&m, ENTRY, &[Value::Int(d)], width4()).map_err(|e| e.to_string())?;
        m.decls.push(wrap_data(&m.decls[0], d).map_err(|e| e.to_string())?);
        let wrapped = Analyzer::new(&m, width4())
            .and_then(|a| a.decide("T", &[], None))
            .map_err(|e| e.to_string())?;
        ensure(direct.halts() == wrapped.halts(), || format!("pair {i}: {direct} vs {wrapped}"))?;
    }
    let shape = CorpusShape {
        helper: false,
        ..shape
    };
    for i in 0..50u64 {
        let mut m = finite_state_program(&mut r, &shape);
        let direct = Analyzer::new(&m, width4())
            .and_then(|a| a.decide(ENTRY, &[], None))
            .map_err(|e| e.to_string())?;
        m.decls.push(wrap_ignore(&m.decls[0], "d").map_err(|e| e.to_string())?);
        let wrapped = decide_applied(&m, "U", &[Value::Int(i % 16)], width4()).map_err(|e| e.to_string())?;
        ensure(direct.halts() == wrapped.halts(), || format!("P0 {i}: {direct} vs {wrapped}"))?;
    }
    Ok("50 (P1, d) pairs and 50 P0 agree".into())
}

const PARADOX: &str = "\
S ≙ if H(S) then Loop end

1. trm(S) ⇔ \"definition of S\"
2. trm(if H(S) then Loop end) ⇔ \"rule (1)\"
3. ¬H(S) ∨ (H(S) ⇒ trm(Loop)) ⇔ \"property of Loop\"
4. ¬H(S) ∨ (H(S) ⇒ false) ⇔ \"logic\"
5. ¬H(S) ∨ ¬H(S) ⇔ \"logic\"
6. ¬H(S) ⇔ \"specification of H\"
   ¬trm(S)

equation: trm(S) ⇔ ¬trm(S)
NoSolution: S does not exist as a conceptual object
";

fn paradox() -> Result<String, String> {
    let out = Command::new(env!("CARGO_BIN_EXE_haltlab"))
        .arg("paradox")
        .output()
        .map_err(|e| e.to_string())?;
    let got = String::from_utf8_lossy(&out.stdout);
    ensure(got == PARADOX && out.status.success(), || format!("got:\n{got}"))?;
    Ok("six-step transcript, NoSolution".into())
}

/// Primes by trial division over the primes found so far.
fn primes_by_trial(limit: usize) -> Vec<bool> {
    let mut is = vec![false; limit + 1];
    let mut found: Vec<usize> = Vec::new();
    for n in 2..=limit {
        if found.iter().take_while(|&&p| p * p <= n).all(|&p| n % p != 0) {
            found.push(n);
            is[n] = true;
        }
    }
    is
}

fn searchers() -> Result<String, String> {
    let g = goldbach_search(1_000_000, GoldbachOptions::default()).map_err(|e| e.to_string())?;
    ensure(g.exhausted && g.counterexample.is_none(), || format!("{g}"))?;
    let mut prime = primes_by_trial(1_000_000);
    prime[1] = true;
    for m in (4..=1_000_000).step_by(2) {
        ensure((1..=m / 2).any(|p| prime[p] && prime[m - p]), || format!("{m} fails recheck"))?;
    }
    let f = fermat_search(100, 7, 3).map_err(|e| e.to_string())?;
    ensure(f.exhausted && f.counterexample.is_none(), || format!("{f}"))?;
    let f2 = fermat_search(100, 7, 2).map_err(|e| e.to_string())?;
    ensure(
        f2.counterexample == Some(Witness::Fermat { a: 3, b: 4, c: 5, n: 2 }),
        || format!("{f2}"),
    )?;
    Ok("Goldbach to 10^6 rechecked, Fermat n=3..7 exhausted, first square witness (3,4,5,2)".into())
}

fn diagonal() -> Result<String, String> {
    let budget = 1000;
    let fam = enumerate_machines(64).map_err(|e| e.to_string())?;
    let b = beta(&fam, 64, budget).map_err(|e| e.to_string())?;
    let mut productive = 0;
    for (n, m) in fam.iter().enumerate() {
        let k = n as u64;
        let independent = match &m.generator {
            Generator::Const(c) => Some(*c),
            Generator::Alternating => Some((k % 2) as u8),
            Generator::Silent => None,
            Generator::ThueMorse => Some((k.count_ones() % 2) as u8),
            Generator::PrimeIndicator => Some(((2..n).all(|d| n % d != 0) && n >= 2) as u8),
            Generator::Exponential => (k < 64 && 1u64 << k <= budget).then_some((k % 2) as u8),
            Generator::Periodic(p) => Some(p[n % p.len()]),
        };
        match independent {
            Some(bit) => {
                productive += 1;
                ensure(b.bits[n] != bit && b.provenance[n] == Provenance::Diagonal(bit), || {
                    format!("β({n}) = {} but M({n})({n}) = {bit}", b.bits[n])
                })?;
            }
            None => ensure(b.provenance[n] == Provenance::Unproductive, || format!("{n} productive"))?,
        }
    }
    Ok(format!("k = 64, {productive} productive indices all differ"))
}

fn invariants() -> Result<String, String> {
    let mut r = rng(8);
    for i in 0..1000 {
        let m = arbitrary_module(&mut r);
        let text = pretty(&m);
        ensure(parse_unchecked(&text).as_ref() == Ok(&m), || format!("module {i} reparse:\n{text}"))?;
        for d in &m.decls {
            ensure(decode(&encode(d)).as_ref() == Ok(d), || format!("module {i} decode {}", d.name))?;
        }
    }
    // enquiry returns with a known count: Positive runs n + 1 times
    let m = parse(&source("countdown.gcl")).map_err(|e| e.to_string())?;
    let machine = Machine::new(&m, MachineOptions::default()).map_err(|e| e.to_string())?;
    for n in [0u64, 3, 9] {
        let before = purity_checks_performed();
        let (o, _) = machine
            .run("Countdown", &[Value::Int(n)], 1000, TraceMode::Off)
            .map_err(|e| e.to_string())?;
        let delta = purity_checks_performed() - before;
        ensure(o.is_halted() && delta == n + 1, || format!("countdown({n}): {delta} checks, {o:?}"))?;
    }
    Ok("1000 modules round-trip, purity checked on every enquiry return".into())
}

#[test]
fn acceptance() {
    let criteria: [(u32, Duration, Check); 8] = [
        (1, Duration::from_secs(1), models),
        (2, Duration::from_secs(1), h1),
        (3, Duration::from_secs(300), equivalence),
        (4, Duration::from_secs(60), reduction),
        (5, Duration::from_secs(60), paradox),
        (6, Duration::from_secs(120), searchers),
        (7, Duration::from_secs(1), diagonal),
        (8, Duration::from_secs(300), invariants),
    ];
    let mut failed = vec![];
    for (n, limit, check) in criteria {
        let start = Instant::now();
        let result = check();
        let elapsed = start.elapsed();
        let line = match &result {
            Ok(summary) if elapsed <= limit => {
                format!("criterion {n}: PASS  {summary} ({elapsed:.2?}, limit {limit:?})")
            }
            Ok(summary) => {
                failed.push(n);
                format!("criterion {n}: FAIL  {summary}, but took {elapsed:.2?} > {limit:?}")
            }
            Err(why) => {
                failed.push(n);
                format!("criterion {n}: FAIL  {why}")
            }
        };
        writeln!(std::io::stderr(), "{line}").unwrap();
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
