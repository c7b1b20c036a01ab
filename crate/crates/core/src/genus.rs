//! Genus of `X₀(N)` and its four constituents.
//!
//! The genus comes from the integer identity
//! `12(g − 1) = μ − 3ν₂ − 4ν₃ − 6ν∞`, so no floating point is involved.
//! Each constituent has a multiplicative closed form and a brute-force
//! oracle ([`BruteForce`]) that counts solutions or sums over divisors
//! directly.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arith::{self, euler_phi, Factorization, SpfTable};
use crate::error::{Error, Result};

/// Environment variable overriding [`BruteForce::DEFAULT_CEILING`].
pub const BRUTE_CEILING_ENV: &str = "GENUS0_BRUTE_CEILING";

/// Levels handled per shard by [`fold_range`]. Fixed so that results do not
/// depend on the thread count.
pub const SHARD_LEN: u64 = 1 << 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GenusBreakdown {
    pub n: u64,
    pub mu: u64,
    pub nu2: u64,
    pub nu3: u64,
    pub nu_inf: u64,
    pub genus: u64,
}

impl GenusBreakdown {
    /// Evaluates every constituent in one pass over the prime powers of `n`.
    pub fn from_prime_powers<I>(n: u64, prime_powers: I) -> Result<Self>
    where
        I: IntoIterator<Item = (u64, u32)>,
    {
        let mut mu = 1u64;
        let mut nu_inf = 1u64;
        let (mut nu2_dead, mut s) = (false, 0u32);
        let (mut nu3_dead, mut t) = (false, 0u32);
        for (p, r) in prime_powers {
            mu = p
                .checked_pow(r - 1)
                .and_then(|q| q.checked_mul(p + 1))
                .and_then(|q| q.checked_mul(mu))
                .ok_or(Error::Overflow(n))?;
            nu_inf = nu_inf
                .checked_mul(theta(p, r))
                .ok_or(Error::Overflow(n))?;
            match p % 4 {
                1 => s += 1,
                3 => nu2_dead = true,
                _ => nu2_dead |= r >= 2,
            }
            match p % 3 {
                1 => t += 1,
                2 => nu3_dead = true,
                _ => nu3_dead |= r >= 2,
            }
        }
        let nu2 = if nu2_dead { 0 } else { 1u64 << s };
        let nu3 = if nu3_dead { 0 } else { 1u64 << t };
        Self::assemble(n, mu, nu2, nu3, nu_inf)
    }

    /// Combines the constituents, checking the divisibility by 12 that the
    /// genus formula guarantees.
    pub fn assemble(n: u64, mu: u64, nu2: u64, nu3: u64, nu_inf: u64) -> Result<Self> {
        let twelve_g_minus_12 =
            mu as i128 - 3 * nu2 as i128 - 4 * nu3 as i128 - 6 * nu_inf as i128;
        if twelve_g_minus_12 % 12 != 0 {
            return Err(Error::Consistency {
                n,
                detail: format!(
                    "mu - 3nu2 - 4nu3 - 6nu_inf = {twelve_g_minus_12} is not divisible by 12"
                ),
            });
        }
        let genus = 1 + twelve_g_minus_12 / 12;
        if genus < 0 {
            return Err(Error::Consistency { n, detail: format!("negative genus {genus}") });
        }
        Ok(GenusBreakdown { n, mu, nu2, nu3, nu_inf, genus: genus as u64 })
    }
}

/// Index `μ = ∏ (p+1)p^(r−1)` of `Γ₀(N)` in `SL₂(Z)`.
pub fn mu(f: &Factorization) -> u64 {
    f.factors().iter().map(|&(p, r)| (p + 1) * p.pow(r - 1)).product()
}

/// Number of solutions of `x² + 1 = 0` in `Z/NZ`.
///
/// Zero when `4 | N` or some prime `≡ 3 (mod 4)` divides `N`; otherwise
/// `2^s` with `s` the number of prime factors `≡ 1 (mod 4)`. A single factor
/// of 2 contributes nothing either way.
pub fn nu2(f: &Factorization) -> u64 {
    if f.exponent_of(2) >= 2 || f.primes().any(|p| p % 4 == 3) {
        return 0;
    }
    1 << f.primes().filter(|p| p % 4 == 1).count()
}

/// Number of solutions of `x² + x + 1 = 0` in `Z/NZ`.
pub fn nu3(f: &Factorization) -> u64 {
    if f.exponent_of(3) >= 2 || f.primes().any(|p| p % 3 == 2) {
        return 0;
    }
    1 << f.primes().filter(|p| p % 3 == 1).count()
}

/// Local cusp count: `θ(p, 2R+1) = 2p^R`, `θ(p, 2R) = (p+1)p^(R−1)`.
pub fn theta(p: u64, r: u32) -> u64 {
    assert!(r >= 1, "theta needs a positive exponent");
    if r % 2 == 1 {
        2 * p.pow(r / 2)
    } else {
        (p + 1) * p.pow(r / 2 - 1)
    }
}

/// Number of cusps `ν∞ = ∏ θ(p, r_p)`.
pub fn nu_infinity(f: &Factorization) -> u64 {
    f.factors().iter().map(|&(p, r)| theta(p, r)).product()
}

/// Genus breakdown of a single level, factorized by trial division.
pub fn genus(n: u64) -> Result<GenusBreakdown> {
    let f = arith::factorize(n)?;
    genus_of(&f)
}

pub fn genus_of(f: &Factorization) -> Result<GenusBreakdown> {
    GenusBreakdown::from_prime_powers(f.n(), f.factors().iter().copied())
}

/// Genus of a level covered by the sieve table.
pub fn genus_with_table(spf: &SpfTable, n: u64) -> Result<GenusBreakdown> {
    spf.check_range(n, n)?;
    GenusBreakdown::from_prime_powers(n, spf.prime_powers(n))
}

/// Breakdowns for every level in `[lo, hi]`, ascending.
pub fn genus_range(
    lo: u64,
    hi: u64,
    spf: &SpfTable,
) -> Result<impl Iterator<Item = Result<GenusBreakdown>> + '_> {
    spf.check_range(lo, hi)?;
    Ok((lo..=hi).map(move |n| GenusBreakdown::from_prime_powers(n, spf.prime_powers(n))))
}

/// Folds `fold` over the breakdowns of `[lo, hi]`.
///
/// The range is cut into shards of [`SHARD_LEN`] levels, each folded from
/// `identity()`, and shard results are merged left to right. The partition
/// does not depend on `threads`, so neither does the result (floating-point
/// accumulators included). `threads <= 1` runs on the calling thread.
pub fn fold_range<A, I, F, M>(
    spf: &SpfTable,
    lo: u64,
    hi: u64,
    threads: usize,
    identity: I,
    fold: F,
    merge: M,
) -> Result<A>
where
    A: Send,
    I: Fn() -> A + Sync,
    F: Fn(A, &GenusBreakdown) -> A + Sync,
    M: Fn(A, A) -> A,
{
    spf.check_range(lo, hi)?;
    let shards: Vec<(u64, u64)> = (lo..=hi)
        .step_by(SHARD_LEN as usize)
        .map(|a| (a, hi.min(a + SHARD_LEN - 1)))
        .collect();
    let run_shard = |&(a, b): &(u64, u64)| -> Result<A> {
        let mut acc = identity();
        for n in a..=b {
            let g = GenusBreakdown::from_prime_powers(n, spf.prime_powers(n))?;
            acc = fold(acc, &g);
        }
        Ok(acc)
    };
    let mut total: Option<A> = None;
    let mut absorb = |parts: Vec<A>| {
        for part in parts {
            total = Some(match total.take() {
                Some(t) => merge(t, part),
                None => part,
            });
        }
    };
    if threads <= 1 {
        for shard in &shards {
            absorb(vec![run_shard(shard)?]);
        }
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .expect("failed to start worker threads");
        // bounded batches keep at most a few shard results alive at once
        for batch in shards.chunks(4 * threads) {
            let parts = pool.install(|| batch.par_iter().map(run_shard).collect::<Result<Vec<A>>>())?;
            absorb(parts);
        }
    }
    Ok(total.unwrap_or_else(identity))
}

/// Exhaustive oracles for the constituents, refused above a ceiling.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BruteForce {
    pub ceiling: u64,
}

impl Default for BruteForce {
    fn default() -> Self {
        BruteForce { ceiling: Self::DEFAULT_CEILING }
    }
}

impl BruteForce {
    pub const DEFAULT_CEILING: u64 = 1_000_000;

    /// Reads the ceiling from `GENUS0_BRUTE_CEILING`, falling back to the
    /// default when unset or unparsable.
    pub fn from_env() -> Self {
        std::env::var(BRUTE_CEILING_ENV)
            .ok()
            .and_then(|v| v.trim().parse().ok())
            .map_or_else(Self::default, |ceiling| BruteForce { ceiling })
    }

    fn admit(&self, n: u64) -> Result<()> {
        if n == 0 {
            return Err(Error::ZeroLevel);
        }
        if n > self.ceiling {
            return Err(Error::BruteForceCeiling { n, ceiling: self.ceiling });
        }
        Ok(())
    }

    /// Counts `x ∈ Z/nZ` with `x² + 1 ≡ 0`.
    pub fn nu2(&self, n: u64) -> Result<u64> {
        self.admit(n)?;
        Ok((0..n).filter(|&x| (x * x + 1) % n == 0).count() as u64)
    }

    /// Counts `x ∈ Z/nZ` with `x² + x + 1 ≡ 0`.
    pub fn nu3(&self, n: u64) -> Result<u64> {
        self.admit(n)?;
        Ok((0..n).filter(|&x| (x * x + x + 1) % n == 0).count() as u64)
    }

    /// `Σ_{d | n} φ(gcd(d, n/d))`.
    pub fn nu_infinity(&self, n: u64) -> Result<u64> {
        self.admit(n)?;
        Ok(divisors(n)
            .into_iter()
            .map(|d| totient_by_count(arith::gcd(d, n / d)))
            .sum())
    }

    /// `n · Σ 1/a` over squarefree divisors `a`, computed as `Σ n/a`.
    pub fn mu(&self, n: u64) -> Result<u64> {
        self.admit(n)?;
        Ok(divisors(n)
            .into_iter()
            .filter(|&a| (2..).take_while(|q| q * q <= a).all(|q| a % (q * q) != 0))
            .map(|a| n / a)
            .sum())
    }
}

pub fn nu2_brute(n: u64) -> Result<u64> {
    BruteForce::from_env().nu2(n)
}

pub fn nu3_brute(n: u64) -> Result<u64> {
    BruteForce::from_env().nu3(n)
}

pub fn nu_infinity_brute(n: u64) -> Result<u64> {
    BruteForce::from_env().nu_infinity(n)
}

fn divisors(n: u64) -> Vec<u64> {
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut d = 1;
    while d * d <= n {
        if n.is_multiple_of(d) {
            small.push(d);
            if d * d != n {
                large.push(n / d);
            }
        }
        d += 1;
    }
    small.extend(large.into_iter().rev());
    small
}

fn totient_by_count(m: u64) -> u64 {
    // arguments are gcd(d, n/d) <= √n, so factorization is cheap
    euler_phi(&arith::factorize(m).expect("gcd of positive divisors is positive"))
}
