//! A finite family of bit-sequence machines and the sequence β that
//! differs from every productive machine on the diagonal.

use std::fmt;

use thiserror::Error;

/// Number of hand-picked machines at the front of every family.
pub const BASE_MACHINES: usize = 8;
pub const MAX_FAMILY: usize = 64;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DiagonalError {
    #[error("family of {0} machines exceeds {MAX_FAMILY}")]
    FamilyTooLarge(usize),
    #[error("family of {0} machines is smaller than the {BASE_MACHINES} built-ins")]
    FamilyTooSmall(usize),
    #[error("prefix length {k} exceeds the family size {family}")]
    PrefixTooLong { k: usize, family: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Generator {
    Const(u8),
    Alternating,
    /// Spins forever without emitting.
    Silent,
    ThueMorse,
    /// 1 at primes, by trial division.
    PrimeIndicator,
    /// Bit `k` costs `2^k` steps; its value is `k mod 2`.
    Exponential,
    Periodic(Vec<u8>),
}

/// Bit `k` was not produced within the budget.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OutOfBudget {
    pub steps: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SequenceMachine {
    pub id: usize,
    pub name: String,
    pub generator: Generator,
}

impl SequenceMachine {
    /// Bit `k`, spending at most `budget` steps.
    pub fn bit(&self, k: u64, budget: u64) -> Result<u8, OutOfBudget> {
        let mut steps = 0u64;
        let mut tick = |n: u64| {
            steps = steps.saturating_add(n);
            if steps > budget {
                Err(OutOfBudget { steps: budget })
            } else {
                Ok(())
            }
        };
        match &self.generator {
            Generator::Const(b) => {
                tick(1)?;
                Ok(*b)
            }
            Generator::Alternating => {
                tick(1)?;
                Ok((k % 2) as u8)
            }
            Generator::Silent => loop {
                tick(1)?;
            },
            Generator::ThueMorse => {
                let mut x = k;
                let mut parity = 0;
                while x > 0 {
                    tick(1)?;
                    parity ^= (x & 1) as u8;
                    x >>= 1;
                }
                tick(1)?;
                Ok(parity)
            }
            Generator::PrimeIndicator => {
                tick(1)?;
                if k < 2 {
                    return Ok(0);
                }
                let mut d = 2;
                while d * d <= k {
                    tick(1)?;
                    if k % d == 0 {
                        return Ok(0);
                    }
                    d += 1;
                }
                Ok(1)
            }
            Generator::Exponential => {
                let cost = 1u64.checked_shl(k as u32).filter(|_| k < 64).unwrap_or(u64::MAX);
                tick(cost)?;
                Ok((k % 2) as u8)
            }
            Generator::Periodic(p) => {
                tick(1)?;
                Ok(p[(k % p.len() as u64) as usize])
            }
        }
    }

    pub fn productive(&self, k: u64, budget: u64) -> bool {
        self.bit(k, budget).is_ok()
    }
}

fn base_machine(id: usize) -> Option<(&'static str, Generator)> {
    Some(match id {
        0 => ("constant-0", Generator::Const(0)),
        1 => ("constant-1", Generator::Const(1)),
        2 => ("alternating", Generator::Alternating),
        3 => ("silent", Generator::Silent),
        4 => ("thue-morse", Generator::ThueMorse),
        5 => ("primes", Generator::PrimeIndicator),
        6 => ("exponential", Generator::Exponential),
        7 => ("periodic-110", Generator::Periodic(vec![1, 1, 0])),
        _ => return None,
    })
}

/// Machines `0..size`: the built-ins, then periodic patterns spelled by
/// each id's binary digits.
pub fn enumerate_machines(size: usize) -> Result<Vec<SequenceMachine>, DiagonalError> {
    if size > MAX_FAMILY {
        return Err(DiagonalError::FamilyTooLarge(size));
    }
    if size < BASE_MACHINES {
        return Err(DiagonalError::FamilyTooSmall(size));
    }
    Ok((0..size)
        .map(|id| {
            let (name, generator) = match base_machine(id) {
                Some((name, g)) => (name.to_string(), g),
                None => {
                    let digits: Vec<u8> = format!("{id:b}").bytes().map(|b| b - b'0').collect();
                    let name = format!("periodic-{id:b}");
                    (name, Generator::Periodic(digits))
                }
            };
            SequenceMachine { id, name, generator }
        })
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Provenance {
    /// Machine `n` produced this bit at index `n`; β holds its complement.
    Diagonal(u8),
    Unproductive,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BetaPrefix {
    pub bits: Vec<u8>,
    pub provenance: Vec<Provenance>,
    pub budget: u64,
}

/// β(n) = 0 if M(n)(n) = 1 else 1, for `n < k`.
pub fn beta(machines: &[SequenceMachine], k: usize, budget: u64) -> Result<BetaPrefix, DiagonalError> {
    if k > machines.len() {
        return Err(DiagonalError::PrefixTooLong {
            k,
            family: machines.len(),
        });
    }
    let (bits, provenance) = machines[..k]
        .iter()
        .enumerate()
        .map(|(n, m)| match m.bit(n as u64, budget) {
            Ok(b) => (if b == 1 { 0 } else { 1 }, Provenance::Diagonal(b)),
            Err(_) => (1, Provenance::Unproductive),
        })
        .unzip();
    Ok(BetaPrefix {
        bits,
        provenance,
        budget,
    })
}

impl BetaPrefix {
    pub fn bit_string(&self) -> String {
        self.bits.iter().map(|b| char::from(b'0' + b)).collect()
    }

    pub fn to_records(&self) -> String {
        let mut out = String::new();
        for (n, (b, p)) in self.bits.iter().zip(&self.provenance).enumerate() {
            match p {
                Provenance::Diagonal(d) => out.push_str(&format!(
                    "n={n} beta={b} provenance=diagonal machine_bit={d}\n"
                )),
                Provenance::Unproductive => {
                    out.push_str(&format!("n={n} beta={b} provenance=unproductive\n"))
                }
            }
        }
        out
    }
}

impl fmt::Display for BetaPrefix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "beta = {}  (budget {} steps per bit)", self.bit_string(), self.budget)?;
        for (n, (b, p)) in self.bits.iter().zip(&self.provenance).enumerate() {
            match p {
                Provenance::Diagonal(d) => writeln!(f, "{n:>3}  {b}  diagonal     M({n})({n}) = {d}")?,
                Provenance::Unproductive => writeln!(f, "{n:>3}  {b}  unproductive")?,
            }
        }
        Ok(())
    }
}
