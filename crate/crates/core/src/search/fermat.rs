use std::time::Instant;

use super::{SearchError, SearchReport, Witness};

/// Size of the range `1 ≤ a ≤ b < c ≤ max_base` for one exponent.
pub fn fermat_candidates(max_base: u64) -> u128 {
    let n = max_base as u128;
    if n == 0 {
        return 0;
    }
    (n - 1) * n * (n + 1) / 6
}

/// Looks for `a^n + b^n = c^n` with `1 ≤ a ≤ b < c ≤ max_base` and
/// `min_exp ≤ n ≤ max_exp`, in lexicographic order of `(n, c, b, a)`.
pub fn fermat_search(max_base: u64, max_exp: u32, min_exp: u32) -> Result<SearchReport, SearchError> {
    if min_exp < 2 {
        return Err(SearchError::InvalidBound(format!("min_exp {min_exp} < 2")));
    }
    let start = Instant::now();
    let range = format!("1 <= a <= b < c <= {max_base}, {min_exp} <= n <= {max_exp}");
    let mut examined = 0u64;
    for n in min_exp..=max_exp {
        let mut pow = Vec::with_capacity(max_base as usize + 1);
        pow.push(0u64);
        for x in 1..=max_base {
            pow.push(
                x.checked_pow(n)
                    .ok_or(SearchError::Overflow { base: x, exp: n })?,
            );
        }
        for c in 1..=max_base {
            let cn = pow[c as usize] as u128;
            for b in 1..c {
                let bn = pow[b as usize] as u128;
                for a in 1..=b {
                    examined += 1;
                    if pow[a as usize] as u128 + bn == cn {
                        return Ok(SearchReport {
                            range,
                            counterexample: Some(Witness::Fermat { a, b, c, n }),
                            exhausted: false,
                            examined,
                            notes: vec![],
                            elapsed: start.elapsed(),
                        });
                    }
                }
            }
        }
    }
    Ok(SearchReport {
        range,
        counterexample: None,
        exhausted: true,
        examined,
        notes: vec![],
        elapsed: start.elapsed(),
    })
}
