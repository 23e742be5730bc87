use std::path::Path;

use haltlab_core::analyzer::{enumerate_models_with, AnalysisError, Analyzer, DEFAULT_MAX_BOUND};
use haltlab_core::diagonal::{beta, enumerate_machines, BASE_MACHINES};
use haltlab_core::interp::{MachineOptions, Outcome, RuntimeError, TraceMode, Width};
use haltlab_core::lang::{self, encode, pretty, Decl, ModuleAst};
use haltlab_core::paradox::{derive_s_contradiction, TrmVerdict};
use haltlab_core::search::{fermat_search, goldbach_search, GoldbachOptions, SearchError, SearchReport};

use crate::{Cli, CliError, Command, Format, Method, ProgramArgs, Report, SearchCommand};

pub fn dispatch(cli: &Cli) -> Result<Report, CliError> {
    let format = cli.output.format;
    match &cli.command {
        Command::Parse { path } => cmd_parse(path, format),
        Command::Run {
            program,
            budget,
            trace,
        } => cmd_run(program, *budget, *trace, format),
        Command::Encode { path } => cmd_encode(path, format),
        Command::Decide {
            program,
            method,
            cap,
        } => cmd_decide(program, *method, *cap, format),
        Command::Models { paths, width } => cmd_models(paths, *width, format),
        Command::Paradox { without_trm_h } => Ok(cmd_paradox(!without_trm_h, format)),
        Command::Search(SearchCommand::Goldbach { max, exclude_one }) => {
            let options = GoldbachOptions {
                one_is_prime: !exclude_one,
            };
            search_report(goldbach_search(*max, options), format)
        }
        Command::Search(SearchCommand::Fermat {
            min_exp,
            max_exp,
            max_base,
        }) => search_report(fermat_search(*max_base, *max_exp, *min_exp), format),
        Command::Beta { k, budget, family } => cmd_beta(*k, *budget, *family, format),
    }
}

fn ok(text: String) -> Result<Report, CliError> {
    Ok(Report {
        text,
        ..Report::default()
    })
}

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))
}

fn file_name(path: &Path) -> String {
    path.file_name()
        .map_or_else(|| path.display().to_string(), |n| n.to_string_lossy().into_owned())
}

fn load(path: &Path) -> Result<ModuleAst, CliError> {
    lang::parse(&read(path)?).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
}

/// Parses several files as one program set. A declaration repeated
/// verbatim in several files counts once.
fn load_all(paths: &[std::path::PathBuf]) -> Result<ModuleAst, CliError> {
    let mut decls: Vec<Decl> = Vec::new();
    for path in paths {
        let m = lang::parse_unchecked(&read(path)?)
            .map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
        for d in m.decls {
            match decls.iter().find(|x| x.name == d.name) {
                Some(prev) if *prev == d => {}
                Some(_) => {
                    return Err(CliError::Usage(format!(
                        "{}: conflicting definitions of `{}`",
                        path.display(),
                        d.name
                    )))
                }
                None => decls.push(d),
            }
        }
    }
    let m = ModuleAst::new(decls);
    lang::check(&m).map_err(|e| CliError::Usage(e.to_string()))?;
    Ok(m)
}

fn resolve_entry(m: &ModuleAst, flag: &Option<String>) -> Result<String, CliError> {
    let entry = flag
        .clone()
        .or_else(|| m.entry.clone())
        .or_else(|| m.decls.last().map(|d| d.name.clone()))
        .ok_or_else(|| CliError::Usage("no declarations".into()))?;
    if m.decl(&entry).is_none() {
        return Err(CliError::Usage(format!("no declaration named `{entry}`")));
    }
    Ok(entry)
}

fn machine_options(width: u32, path: &Path) -> MachineOptions {
    MachineOptions {
        width: Width::new(width).expect("width validated by the parser"),
        source_name: file_name(path),
        ..MachineOptions::default()
    }
}

fn runtime_error(e: RuntimeError) -> CliError {
    match e {
        RuntimeError::UnknownEntry(_)
        | RuntimeError::EntryArity { .. }
        | RuntimeError::ZeroBudget
        | RuntimeError::Invalid(_)
        | RuntimeError::NoHaltTable => CliError::Usage(e.to_string()),
        other => CliError::Internal(other.to_string()),
    }
}

fn analysis_error(e: AnalysisError) -> CliError {
    match e {
        AnalysisError::Runtime(r) => runtime_error(r),
        AnalysisError::BoundViolated(_) => CliError::Internal(e.to_string()),
        other => CliError::Usage(other.to_string()),
    }
}

fn cmd_parse(path: &Path, format: Format) -> Result<Report, CliError> {
    let m = load(path)?;
    ok(match format {
        Format::Text => pretty(&m),
        Format::Records => m
            .decls
            .iter()
            .map(|d| {
                format!(
                    "decl={} kind={} params={} statements={}\n",
                    d.name,
                    d.kind.keyword(),
                    d.params.len(),
                    d.body.iter().map(lang::Stmt::size).sum::<usize>()
                )
            })
            .collect(),
    })
}

fn cmd_encode(path: &Path, format: Format) -> Result<Report, CliError> {
    let m = load(path)?;
    let mut out = String::new();
    for d in &m.decls {
        let code = encode(d);
        match format {
            Format::Text => out.push_str(&format!("{} {}\n", d.name, code.to_hex())),
            Format::Records => out.push_str(&format!(
                "decl={} hex={} bytes={} number={}\n",
                d.name,
                code.to_hex(),
                code.len(),
                code.number()
            )),
        }
    }
    ok(out)
}

fn cmd_run(program: &ProgramArgs, budget: u64, trace: bool, format: Format) -> Result<Report, CliError> {
    let m = load(&program.path)?;
    let entry = resolve_entry(&m, &program.entry)?;
    let options = machine_options(program.width, &program.path);
    let machine = haltlab_core::interp::Machine::new(&m, options).map_err(runtime_error)?;
    let mode = if trace {
        TraceMode::Fingerprints
    } else {
        TraceMode::Off
    };
    let (outcome, tr) = machine
        .run(&entry, &[], budget, mode)
        .map_err(runtime_error)?;
    let mut out = match (format, &outcome) {
        (Format::Text, o) => format!("{o}\n"),
        (Format::Records, Outcome::Halted { steps, value }) => format!(
            "outcome=halted steps={steps}{}\n",
            value.as_ref().map_or(String::new(), |v| format!(" value={v}"))
        ),
        (Format::Records, Outcome::ErrorStop { steps, report }) => format!(
            "outcome=error steps={steps} site={} message={:?} reporter={} file={}\n",
            report.site, report.message, report.reporter, report.location.file
        ),
        (Format::Records, Outcome::BudgetExhausted { steps }) => {
            format!("outcome=budget_exhausted steps={steps}\n")
        }
    };
    let diagnostics = match &outcome {
        Outcome::ErrorStop { report, .. } => format!("{report}\n"),
        _ => String::new(),
    };
    if trace {
        match format {
            Format::Text => out.push_str(&tr.to_text()),
            Format::Records => {
                for e in &tr.entries {
                    out.push_str(&format!(
                        "step={} fingerprint={} decl={}\n",
                        e.step,
                        e.fingerprint,
                        e.decl.as_deref().unwrap_or("-")
                    ));
                }
            }
        }
    }
    Ok(Report {
        text: out,
        diagnostics,
        finding: false,
    })
}

fn cmd_decide(
    program: &ProgramArgs,
    method: Method,
    cap: Option<u64>,
    format: Format,
) -> Result<Report, CliError> {
    let m = load(&program.path)?;
    let entry = resolve_entry(&m, &program.entry)?;
    let analyzer =
        Analyzer::new(&m, machine_options(program.width, &program.path)).map_err(analysis_error)?;
    let (verdict, bound) = match method {
        Method::Visited => (analyzer.decide(&entry, &[], cap).map_err(analysis_error)?, None),
        Method::Counter => {
            let budget = analyzer.state_budget(&entry).map_err(analysis_error)?;
            let v = analyzer
                .counter(&entry, &[], DEFAULT_MAX_BOUND)
                .map_err(analysis_error)?;
            (v, Some(budget))
        }
    };
    let mut out = match format {
        Format::Text => format!("{verdict}\n"),
        Format::Records => format!("entry={entry} {}\n", verdict.record_fields()),
    };
    if let Some(b) = bound {
        let bound = b.bound().expect("counter accepted the bound");
        match format {
            Format::Text => out.push_str(&format!(
                "bound: {bound} configurations ({} control states x 2^{} stores)\n",
                b.control, b.store_bits
            )),
            Format::Records => out.push_str(&format!(
                "bound={bound} control={} store_bits={} points={} depth={}\n",
                b.control, b.store_bits, b.points, b.depth
            )),
        }
    }
    ok(out)
}

fn cmd_models(paths: &[std::path::PathBuf], width: u32, format: Format) -> Result<Report, CliError> {
    let m = load_all(paths)?;
    let options = machine_options(width, &paths[0]);
    let search = enumerate_models_with(&m.decls, &options).map_err(analysis_error)?;
    let mut out = String::new();
    for (i, (map, report)) in search.candidates.iter().enumerate() {
        match format {
            Format::Text => {
                out.push_str(&format!(
                    "candidate {}: {map}  {}\n",
                    i + 1,
                    if report.consistent() { "consistent" } else { "inconsistent" }
                ));
                out.push_str(&report.to_string());
            }
            Format::Records => {
                out.push_str(&format!("candidate={} consistent={}\n", i + 1, report.consistent()));
                out.push_str(&report.to_records());
            }
        }
    }
    let n = search.consistent_count();
    match format {
        Format::Text => out.push_str(&format!("{n} consistent model(s)\n")),
        Format::Records => out.push_str(&format!(
            "candidates={} consistent_models={n}\n",
            search.candidates.len()
        )),
    }
    Ok(Report {
        text: out,
        finding: n == 0,
        ..Report::default()
    })
}

fn cmd_paradox(assume_trm_h: bool, format: Format) -> Report {
    let d = derive_s_contradiction(assume_trm_h);
    let mut out = String::new();
    match format {
        Format::Text => {
            out.push_str("S ≙ if H(S) then Loop end\n\n");
            out.push_str(&d.transcript());
            out.push('\n');
            out.push_str(&format!("equation: {}\n", d.equation));
        }
        Format::Records => {
            for (i, s) in d.steps.iter().enumerate() {
                out.push_str(&format!(
                    "step={} justification={:?} before={:?} after={:?}\n",
                    i + 1,
                    s.justification.label(),
                    s.before.to_string(),
                    s.after.to_string()
                ));
            }
            out.push_str(&format!("equation={:?}\n", d.equation.to_string()));
        }
    }
    let verdict = match (&d.verdict, format) {
        (TrmVerdict::NoSolution(_), Format::Text) => {
            "NoSolution: S does not exist as a conceptual object".to_string()
        }
        (TrmVerdict::Determined(b), Format::Text) => format!("Determined: trm(S) = {b}"),
        (TrmVerdict::Underdetermined, Format::Text) => {
            "Underdetermined: the equation does not fix trm(S)".to_string()
        }
        (TrmVerdict::NoSolution(_), Format::Records) => "verdict=no_solution".into(),
        (TrmVerdict::Determined(b), Format::Records) => format!("verdict=determined value={b}"),
        (TrmVerdict::Underdetermined, Format::Records) => "verdict=underdetermined".into(),
    };
    if let Some(j) = &d.stuck_at {
        match format {
            Format::Text => out.push_str(&format!(
                "stuck at {}: trm(H) is not assumed, so the guarded term cannot be rewritten\n",
                j.label()
            )),
            Format::Records => out.push_str(&format!("stuck_at={:?}\n", j.label())),
        }
    }
    out.push_str(&verdict);
    out.push('\n');
    Report {
        text: out,
        ..Report::default()
    }
}

fn search_report(r: Result<SearchReport, SearchError>, format: Format) -> Result<Report, CliError> {
    let r = r.map_err(|e| CliError::Usage(e.to_string()))?;
    let text = match format {
        Format::Text => format!("{r}\n"),
        Format::Records => r.to_records(),
    };
    Ok(Report {
        text,
        finding: r.counterexample.is_some(),
        ..Report::default()
    })
}

fn cmd_beta(k: usize, budget: u64, family: Option<usize>, format: Format) -> Result<Report, CliError> {
    let size = family.unwrap_or(k.max(BASE_MACHINES));
    let machines = enumerate_machines(size).map_err(|e| CliError::Usage(e.to_string()))?;
    let prefix = beta(&machines, k, budget).map_err(|e| CliError::Usage(e.to_string()))?;
    ok(match format {
        Format::Text => {
            let mut out = prefix.to_string();
            out.push_str("machines:\n");
            for m in &machines[..k] {
                out.push_str(&format!("{:>3}  {}\n", m.id, m.name));
            }
            out
        }
        Format::Records => prefix.to_records(),
    })
}
