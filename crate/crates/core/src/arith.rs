//! Prime sieves, factorization and the elementary arithmetic functions the
//! genus formulas are built from.
//!
//! Two factorization routes exist: trial division up to `√n` for isolated
//! levels, and [`SpfTable`] lookups for batch work over a contiguous range.
//! Tests cross-check one against the other.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Prime-power decomposition of a positive integer.
///
/// Primes are strictly increasing and every exponent is at least 1; the
/// empty list represents `n = 1`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Factorization {
    n: u64,
    factors: Vec<(u64, u32)>,
}

impl Factorization {
    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn factors(&self) -> &[(u64, u32)] {
        &self.factors
    }

    pub fn primes(&self) -> impl Iterator<Item = u64> + '_ {
        self.factors.iter().map(|&(p, _)| p)
    }

    /// Number of distinct prime factors.
    pub fn omega(&self) -> usize {
        self.factors.len()
    }

    pub fn is_squarefree(&self) -> bool {
        self.factors.iter().all(|&(_, r)| r == 1)
    }

    pub fn exponent_of(&self, p: u64) -> u32 {
        self.factors
            .iter()
            .find(|&&(q, _)| q == p)
            .map_or(0, |&(_, r)| r)
    }

    /// Multiplies the prime powers back together.
    pub fn product(&self) -> Option<u64> {
        self.factors
            .iter()
            .try_fold(1u64, |acc, &(p, r)| acc.checked_mul(p.checked_pow(r)?))
    }

    fn from_factors(n: u64, factors: Vec<(u64, u32)>) -> Self {
        debug_assert!(factors.windows(2).all(|w| w[0].0 < w[1].0));
        Factorization { n, factors }
    }
}

/// Factorizes `n` by trial division.
///
/// Runs in `O(√p₂)` where `p₂` is the second largest prime factor, which is
/// fine for isolated queries; batch ranges should go through [`SpfTable`].
pub fn factorize(n: u64) -> Result<Factorization> {
    if n == 0 {
        return Err(Error::ZeroLevel);
    }
    let mut m = n;
    let mut factors = Vec::new();
    for p in [2u64, 3] {
        let mut r = 0;
        while m.is_multiple_of(p) {
            m /= p;
            r += 1;
        }
        if r > 0 {
            factors.push((p, r));
        }
    }
    // 6k ± 1 wheel
    let mut d = 5u64;
    while d <= m / d {
        for p in [d, d + 2] {
            let mut r = 0;
            while m.is_multiple_of(p) {
                m /= p;
                r += 1;
            }
            if r > 0 {
                factors.push((p, r));
            }
        }
        d += 6;
    }
    if m > 1 {
        factors.push((m, 1));
    }
    Ok(Factorization::from_factors(n, factors))
}

/// Smallest-prime-factor table for every `2 ≤ m ≤ limit`, built by a linear
/// sieve.
///
/// Entries are stored as `u32`, so the table costs 4 bytes per integer and
/// `limit` may not exceed [`SpfTable::MAX_LIMIT`]. In practice memory is the
/// binding constraint: `10⁸` needs about 400 MB, `1.2·10⁶` (the missed-value
/// scan up to genus `10⁵`) under 5 MB.
#[derive(Debug, Clone)]
pub struct SpfTable {
    spf: Vec<u32>,
}

impl SpfTable {
    pub const MAX_LIMIT: u64 = u32::MAX as u64;

    pub fn new(limit: u64) -> Result<Self> {
        if limit < 2 {
            return Err(Error::SieveLimitTooSmall(limit));
        }
        if limit > Self::MAX_LIMIT {
            return Err(Error::SieveLimitTooLarge { limit, max: Self::MAX_LIMIT });
        }
        let len = limit as usize + 1;
        let mut spf = vec![0u32; len];
        let mut primes: Vec<u32> = Vec::new();
        for i in 2..len {
            if spf[i] == 0 {
                spf[i] = i as u32;
                primes.push(i as u32);
            }
            let si = spf[i];
            for &p in &primes {
                let m = i as u64 * p as u64;
                if p > si || m > limit {
                    break;
                }
                spf[m as usize] = p;
            }
        }
        Ok(SpfTable { spf })
    }

    pub fn limit(&self) -> u64 {
        (self.spf.len() - 1) as u64
    }

    /// Smallest prime factor of `m`, or `None` outside `2..=limit`.
    pub fn smallest_prime_factor(&self, m: u64) -> Option<u64> {
        if m < 2 || m > self.limit() {
            return None;
        }
        Some(self.spf[m as usize] as u64)
    }

    pub fn is_prime(&self, m: u64) -> bool {
        self.smallest_prime_factor(m) == Some(m)
    }

    /// Iterates over the prime powers of `m` in increasing order of prime,
    /// without allocating. `m` must lie in `1..=limit`.
    pub fn prime_powers(&self, m: u64) -> PrimePowers<'_> {
        assert!(m >= 1 && m <= self.limit(), "{m} outside sieve table");
        PrimePowers { spf: &self.spf, rest: m as u32 }
    }

    pub fn factorize(&self, m: u64) -> Result<Factorization> {
        if m == 0 {
            return Err(Error::ZeroLevel);
        }
        if m > self.limit() {
            return Err(Error::RangeOutsideTable { lo: m, hi: m, limit: self.limit() });
        }
        Ok(Factorization::from_factors(m, self.prime_powers(m).collect()))
    }

    /// Checks that `[lo, hi]` is a non-empty range of levels the table covers.
    pub fn check_range(&self, lo: u64, hi: u64) -> Result<()> {
        if lo == 0 || lo > hi || hi > self.limit() {
            return Err(Error::RangeOutsideTable { lo, hi, limit: self.limit() });
        }
        Ok(())
    }
}

pub struct PrimePowers<'a> {
    spf: &'a [u32],
    rest: u32,
}

impl Iterator for PrimePowers<'_> {
    type Item = (u64, u32);

    fn next(&mut self) -> Option<(u64, u32)> {
        if self.rest <= 1 {
            return None;
        }
        let p = self.spf[self.rest as usize];
        let mut r = 0;
        while self.rest.is_multiple_of(p) {
            self.rest /= p;
            r += 1;
        }
        Some((p as u64, r))
    }
}

/// Euler's totient `∏ p^(r−1)(p−1)`.
pub fn euler_phi(f: &Factorization) -> u64 {
    f.factors()
        .iter()
        .map(|&(p, r)| p.pow(r - 1) * (p - 1))
        .product()
}

pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Odd-only sieve of Eratosthenes; returns all primes `≤ limit`.
pub fn primes_up_to(limit: u64) -> Vec<u64> {
    if limit < 2 {
        return Vec::new();
    }
    // index i stands for 2i + 1
    let half = (limit as usize - 1) / 2 + 1;
    let mut composite = vec![false; half];
    let mut i = 1;
    while (2 * i + 1) * (2 * i + 1) <= limit as usize {
        if !composite[i] {
            let p = 2 * i + 1;
            let mut j = p * p / 2;
            while j < half {
                composite[j] = true;
                j += p;
            }
        }
        i += 1;
    }
    let mut primes = vec![2];
    primes.extend(
        composite
            .iter()
            .enumerate()
            .skip(1)
            .filter(|(_, &c)| !c)
            .map(|(i, _)| 2 * i as u64 + 1),
    );
    primes
}

/// All primes `p ≤ limit` with `p ≡ residue (mod modulus)`, ascending.
pub fn primes_in_progression(modulus: u64, residue: i64, limit: u64) -> Vec<u64> {
    assert!(modulus >= 1, "modulus must be positive");
    let target = residue.rem_euclid(modulus as i64) as u64;
    primes_up_to(limit)
        .into_iter()
        .filter(|p| p % modulus == target)
        .collect()
}

/// Deterministic primality by trial division; meant for small arguments.
pub fn is_prime(n: u64) -> bool {
    n >= 2 && factorize(n).is_ok_and(|f| f.factors() == [(n, 1)])
}

/// Smallest `r` with `r² ≥ n`.
pub fn ceil_sqrt(n: u64) -> u64 {
    let r = n.isqrt();
    if r * r == n {
        r
    } else {
        r + 1
    }
}
