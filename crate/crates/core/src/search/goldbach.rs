use std::time::Instant;

use super::{SearchError, SearchReport, Witness};

/// Largest even bound accepted; the sieve holds one byte per integer.
pub const GOLDBACH_MAX_EVEN: u64 = 1 << 32;

pub const SCALE_NOTE: &str =
    "verification up to and somewhat beyond 10^18 is out of scale here and not reproduced";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GoldbachOptions {
    /// Count 1 as a prime.
    pub one_is_prime: bool,
}

impl Default for GoldbachOptions {
    fn default() -> Self {
        GoldbachOptions { one_is_prime: true }
    }
}

/// `is_prime[i]` for `i ≤ limit`, Eratosthenes.
pub fn sieve(limit: usize, one_is_prime: bool) -> Vec<bool> {
    let mut p = vec![true; limit + 1];
    p[0] = false;
    if limit >= 1 {
        p[1] = one_is_prime;
    }
    let mut i = 2;
    while i * i <= limit {
        if p[i] {
            for j in (i * i..=limit).step_by(i) {
                p[j] = false;
            }
        }
        i += 1;
    }
    p
}

/// Checks every even `m` in `4..=max_even` for `m = p + q`, `p`, `q` prime.
pub fn goldbach_search(max_even: u64, options: GoldbachOptions) -> Result<SearchReport, SearchError> {
    if max_even < 4 || max_even % 2 != 0 {
        return Err(SearchError::InvalidBound(format!(
            "max_even {max_even} must be even and at least 4"
        )));
    }
    if max_even > GOLDBACH_MAX_EVEN {
        return Err(SearchError::InvalidBound(format!(
            "max_even {max_even} exceeds {GOLDBACH_MAX_EVEN}"
        )));
    }
    let start = Instant::now();
    let limit = max_even as usize;
    let is_prime = sieve(limit, options.one_is_prime);
    let primes: Vec<usize> = (0..=limit / 2).filter(|&i| is_prime[i]).collect();
    let range = format!(
        "even m, 4 <= m <= {max_even}, 1 {} prime",
        if options.one_is_prime { "counted as" } else { "not" }
    );
    let mut examined = 0;
    for m in (4..=limit).step_by(2) {
        examined += 1;
        let found = primes
            .iter()
            .take_while(|&&p| p <= m / 2)
            .any(|&p| is_prime[m - p]);
        if !found {
            return Ok(SearchReport {
                range,
                counterexample: Some(Witness::Goldbach { m: m as u64 }),
                exhausted: false,
                examined,
                notes: vec![SCALE_NOTE.into()],
                elapsed: start.elapsed(),
            });
        }
    }
    Ok(SearchReport {
        range,
        counterexample: None,
        exhausted: true,
        examined,
        notes: vec![SCALE_NOTE.into()],
        elapsed: start.elapsed(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn four_is_two_plus_two() {
        let r = goldbach_search(4, GoldbachOptions::default()).unwrap();
        assert!(r.exhausted);
        assert_eq!(r.examined, 1);
    }

    #[test]
    fn small_primes() {
        let p = sieve(30, false);
        let got: Vec<usize> = (0..=30).filter(|&i| p[i]).collect();
        assert_eq!(got, [2, 3, 5, 7, 11, 13, 17, 19, 23, 29]);
        assert!(sieve(1, true)[1]);
    }

    #[test]
    fn bad_bounds() {
        assert!(goldbach_search(7, GoldbachOptions::default()).is_err());
        assert!(goldbach_search(2, GoldbachOptions::default()).is_err());
    }
}
