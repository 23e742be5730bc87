use std::fmt;

use crate::halt_map::HaltMap;
use crate::interp::MachineOptions;
use crate::lang::{encode, Decl, ModuleAst, ProgramCode};

use super::{AnalysisError, Analyzer, Verdict};

/// Enumeration visits `2^n` candidates; beyond this it refuses.
pub const MAX_MODEL_PROGRAMS: usize = 20;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConsistencyEntry {
    pub name: String,
    pub code: ProgramCode,
    pub claimed: bool,
    pub observed: Verdict,
    pub consistent: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConsistencyReport {
    pub entries: Vec<ConsistencyEntry>,
}

impl ConsistencyReport {
    pub fn consistent(&self) -> bool {
        self.entries.iter().all(|e| e.consistent)
    }

    pub fn first_inconsistency(&self) -> Option<&ConsistencyEntry> {
        self.entries.iter().find(|e| !e.consistent)
    }

    /// One line per program: code, claim, observation, agreement.
    pub fn to_records(&self) -> String {
        let mut out = String::new();
        for e in &self.entries {
            out.push_str(&format!(
                "code={} name={} claimed={} {} consistent={}\n",
                e.code.to_hex(),
                e.name,
                e.claimed,
                e.observed.record_fields(),
                e.consistent
            ));
        }
        out
    }
}

impl fmt::Display for ConsistencyReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for e in &self.entries {
            writeln!(
                f,
                "  {:<8} claimed {:<5}  observed {:<10} {}",
                e.name,
                e.claimed,
                e.observed.kind(),
                if e.consistent { "ok" } else { "WRONG" }
            )?;
        }
        Ok(())
    }
}

/// Every candidate halt map over a program set, each with its report.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModelSearch {
    pub candidates: Vec<(HaltMap, ConsistencyReport)>,
}

impl ModelSearch {
    pub fn consistent(&self) -> impl Iterator<Item = &HaltMap> {
        self.candidates
            .iter()
            .filter(|(_, r)| r.consistent())
            .map(|(m, _)| m)
    }

    pub fn consistent_count(&self) -> usize {
        self.consistent().count()
    }

    pub fn has_model(&self) -> bool {
        self.consistent_count() > 0
    }
}

/// Runs each program with `H` read from `candidate` and compares.
pub fn check_model(programs: &[Decl], candidate: &HaltMap) -> Result<ConsistencyReport, AnalysisError> {
    check_model_with(programs, candidate, &MachineOptions::default())
}

pub fn check_model_with(
    programs: &[Decl],
    candidate: &HaltMap,
    options: &MachineOptions,
) -> Result<ConsistencyReport, AnalysisError> {
    let module = ModuleAst::new(programs.to_vec());
    let options = MachineOptions {
        halt_table: Some(candidate.clone()),
        ..options.clone()
    };
    let analyzer = Analyzer::new(&module, options)?;
    let mut entries = Vec::with_capacity(programs.len());
    for p in programs {
        let code = encode(p);
        let claimed = candidate
            .get(&code)
            .ok_or_else(|| AnalysisError::MissingKey(p.name.clone()))?;
        let observed = analyzer.decide(&p.name, &[], None)?;
        let consistent = observed.halts() == Some(claimed);
        entries.push(ConsistencyEntry {
            name: p.name.clone(),
            code,
            claimed,
            observed,
            consistent,
        });
    }
    Ok(ConsistencyReport { entries })
}

/// Tries all `2^n` halt maps. Candidate `i` claims program `j` halts iff
/// bit `n-1-j` of `i` is set, so the all-false map comes first.
pub fn enumerate_models(programs: &[Decl]) -> Result<ModelSearch, AnalysisError> {
    enumerate_models_with(programs, &MachineOptions::default())
}

pub fn enumerate_models_with(
    programs: &[Decl],
    options: &MachineOptions,
) -> Result<ModelSearch, AnalysisError> {
    let n = programs.len();
    if n > MAX_MODEL_PROGRAMS {
        return Err(AnalysisError::TooManyPrograms {
            count: n,
            max: MAX_MODEL_PROGRAMS,
        });
    }
    let codes: Vec<ProgramCode> = programs.iter().map(encode).collect();
    let mut candidates = Vec::with_capacity(1 << n);
    for i in 0u32..(1 << n) {
        let map: HaltMap = codes
            .iter()
            .enumerate()
            .map(|(j, c)| (c.clone(), i >> (n - 1 - j) & 1 == 1))
            .collect();
        let report = check_model_with(programs, &map, options)?;
        candidates.push((map, report));
    }
    Ok(ModelSearch { candidates })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lang::canonical;

    #[test]
    fn single_skip() {
        let found = enumerate_models(&[canonical::skip()]).unwrap();
        assert_eq!(found.candidates.len(), 2);
        let good: Vec<_> = found.consistent().collect();
        assert_eq!(good.len(), 1);
        assert_eq!(good[0].get(&encode(&canonical::skip())), Some(true));
    }

    #[test]
    fn missing_key() {
        let err = check_model(&[canonical::skip()], &HaltMap::new()).unwrap_err();
        assert_eq!(err, AnalysisError::MissingKey("Skip".into()));
    }

    #[test]
    fn too_many() {
        let many: Vec<Decl> = (0..21)
            .map(|i| Decl::procedure(format!("P{i}"), vec![], vec![crate::lang::Stmt::Skip]))
            .collect();
        assert!(matches!(
            enumerate_models(&many),
            Err(AnalysisError::TooManyPrograms { count: 21, .. })
        ));
    }
}
