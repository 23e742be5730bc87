use haltlab_core::diagonal::{beta, enumerate_machines, Generator, Provenance};
use haltlab_core::search::{
    fermat_candidates, fermat_search, goldbach_search, sieve, GoldbachOptions, SearchError, Witness,
};

fn trial_division(n: usize, one_is_prime: bool) -> bool {
    match n {
        0 => false,
        1 => one_is_prime,
        _ => (2..).take_while(|d| d * d <= n).all(|d| n % d != 0),
    }
}

#[test]
fn sieve_matches_trial_division() {
    for one in [true, false] {
        let s = sieve(20_000, one);
        for (n, &p) in s.iter().enumerate() {
            assert_eq!(p, trial_division(n, one), "{n}");
        }
    }
}

/// Independent oracle: all decompositions by brute force.
fn goldbach_holds(m: usize, one: bool) -> bool {
    (1..=m / 2).any(|p| trial_division(p, one) && trial_division(m - p, one))
}

#[test]
fn goldbach_small_range() {
    for one in [true, false] {
        let r = goldbach_search(2000, GoldbachOptions { one_is_prime: one }).unwrap();
        assert!((4..=2000).step_by(2).all(|m| goldbach_holds(m, one)));
        assert!(r.exhausted);
        assert_eq!(r.counterexample, None);
        assert_eq!(r.examined, 999);
    }
}

#[test]
fn goldbach_bounds() {
    assert!(matches!(
        goldbach_search(7, GoldbachOptions::default()),
        Err(SearchError::InvalidBound(_))
    ));
    assert!(goldbach_search(1 << 33, GoldbachOptions::default()).is_err());
}

#[test]
fn fermat_squares_find_pythagoras() {
    let r = fermat_search(10, 2, 2).unwrap();
    assert_eq!(r.counterexample, Some(Witness::Fermat { a: 3, b: 4, c: 5, n: 2 }));
    // (n, c, b, a) order: everything with c < 5 comes first, then c = 5 up to (3, 4)
    let before: u64 = (1..5u64).map(|c| c * (c - 1) / 2).sum();
    assert_eq!(r.examined, before + 1 + 2 + 3 + 3);
}

#[test]
fn fermat_exhausts_higher_powers() {
    let r = fermat_search(100, 7, 3).unwrap();
    assert!(r.exhausted && r.counterexample.is_none());
    assert_eq!(r.examined as u128, 5 * fermat_candidates(100));
    // independent recheck in wider arithmetic on a sample
    for n in 3..=7u32 {
        for c in 1..=40u128 {
            for b in 1..c {
                for a in 1..=b {
                    assert_ne!(a.pow(n) + b.pow(n), c.pow(n));
                }
            }
        }
    }
}

#[test]
fn fermat_candidate_count() {
    for n in 0..30u64 {
        let brute = (1..=n).flat_map(|c| (1..c).flat_map(move |b| (1..=b).map(move |_| ()))).count();
        assert_eq!(fermat_candidates(n), brute as u128);
    }
}

#[test]
fn fermat_rejects_bad_bounds() {
    assert!(matches!(fermat_search(10, 3, 1), Err(SearchError::InvalidBound(_))));
    assert!(matches!(fermat_search(1 << 20, 4, 4), Err(SearchError::Overflow { exp: 4, .. })));
}

/// Regenerates M(n)(n) from the generator definitions without a budget,
/// treating the silent and too-slow machines as unproductive.
fn diagonal_oracle(n: usize, g: &Generator, budget: u64) -> Option<u8> {
    let k = n as u64;
    match g {
        Generator::Const(b) => Some(*b),
        Generator::Alternating => Some((k % 2) as u8),
        Generator::Silent => None,
        Generator::ThueMorse => Some((k.count_ones() % 2) as u8),
        Generator::PrimeIndicator => Some(trial_division(n, false) as u8),
        Generator::Exponential => (k < 64 && (1u64 << k) <= budget).then_some((k % 2) as u8),
        Generator::Periodic(p) => Some(p[n % p.len()]),
    }
}

#[test]
fn beta_differs_on_the_diagonal() {
    let fam = enumerate_machines(64).unwrap();
    for budget in [100, 1000] {
        let b = beta(&fam, 64, budget).unwrap();
        for (n, m) in fam.iter().enumerate() {
            match diagonal_oracle(n, &m.generator, budget) {
                Some(d) => {
                    assert_eq!(b.provenance[n], Provenance::Diagonal(d));
                    assert_ne!(b.bits[n], d);
                }
                None => assert_eq!((b.bits[n], b.provenance[n]), (1, Provenance::Unproductive)),
            }
        }
    }
    assert_eq!(beta(&fam[..8], 8, 1000).unwrap().bit_string(), "10110010");
}
