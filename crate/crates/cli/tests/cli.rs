use std::path::PathBuf;
use std::process::{Command, Output};

fn program(name: &str) -> String {
    let p: PathBuf = [env!("CARGO_MANIFEST_DIR"), "..", "..", "programs", name].iter().collect();
    p.to_string_lossy().into_owned()
}

fn haltlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_haltlab"))
        .args(args)
        .env_remove("HALTLAB_BUDGET")
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

#[test]
fn encode_skip() {
    let o = haltlab(&["encode", &program("skip.gcl")]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "Skip 47010004536b6970000100\n");
}

#[test]
fn parse_prints_canonically() {
    let o = haltlab(&["parse", &program("loop.gcl")]);
    assert_eq!(stdout(&o), "procedure Loop\n  while true do\n    skip\n  end\nend\n");
}

#[test]
fn run_s1_reports_on_stderr() {
    let o = haltlab(&["run", &program("s1.gcl")]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stderr(&o), "Error at S1\nCannot terminate\nreported at H1 in s1.gcl\n");
    assert_eq!(stdout(&o), "ErrorStop(1, \"Cannot terminate\")\n");
}

#[test]
fn run_uses_main_and_budget() {
    let o = haltlab(&["run", &program("countdown.gcl")]);
    assert_eq!(stdout(&o), "Halted(18)\n");
    let o = haltlab(&["run", &program("loop.gcl"), "--budget", "50"]);
    assert_eq!(stdout(&o), "BudgetExhausted(50)\n");
    let o = Command::new(env!("CARGO_BIN_EXE_haltlab"))
        .args(["run", &program("loop.gcl")])
        .env("HALTLAB_BUDGET", "7")
        .output()
        .unwrap();
    assert_eq!(stdout(&o), "BudgetExhausted(7)\n");
}

#[test]
fn decide_both_methods() {
    let o = haltlab(&["decide", &program("odd3.gcl"), "--width", "3"]);
    assert_eq!(stdout(&o), "Diverges: state at step 1 revisited at step 9\n");
    let o = haltlab(&["decide", &program("wrap3.gcl"), "--width", "3", "--method", "counter"]);
    assert_eq!(
        stdout(&o),
        "Halts in 16 steps\nbound: 24 configurations (3 control states x 2^3 stores)\n"
    );
}

#[test]
fn models_exit_codes() {
    let o = haltlab(&["models", &program("skip.gcl"), &program("loop.gcl")]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).ends_with("1 consistent model(s)\n"));
    assert!(stdout(&o).contains("{⌈Loop⌉ ↦ false, ⌈Skip⌉ ↦ true}  consistent"));
    let o = haltlab(&["models", &program("s.gcl"), &program("skip.gcl")]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).ends_with("0 consistent model(s)\n"));
    assert_eq!(stdout(&o).matches("candidate ").count(), 8);
}

#[test]
fn searches() {
    let o = haltlab(&["search", "fermat", "--min-exp", "2", "--max-exp", "2", "--max-base", "10"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("counterexample: (3,4,5,2)"));
    let o = haltlab(&["search", "goldbach", "--max", "100"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("exhausted: no counterexample"));
    assert!(stdout(&o).contains("out of scale"));
}

#[test]
fn records_and_out_file() {
    let dir = std::env::temp_dir().join(format!("haltlab-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let out = dir.join("beta.txt");
    let o = haltlab(&["--format", "records", "--out", out.to_str().unwrap(), "beta", "--k", "3"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(
        std::fs::read_to_string(&out).unwrap(),
        "n=0 beta=1 provenance=diagonal machine_bit=0\n\
         n=1 beta=0 provenance=diagonal machine_bit=1\n\
         n=2 beta=1 provenance=diagonal machine_bit=0\n"
    );
    std::fs::remove_dir_all(dir).unwrap();
}

#[test]
fn usage_errors_exit_2() {
    for args in [
        vec!["decide", "no-such-file.gcl"],
        vec!["search", "fermat", "--min-exp", "1"],
        vec!["bogus"],
        vec!["decide", "x.gcl", "--width", "0"],
        vec!["beta", "--k", "100"],
    ] {
        let o = haltlab(&args);
        assert_eq!(o.status.code(), Some(2), "{args:?}: {}", stderr(&o));
    }
}
