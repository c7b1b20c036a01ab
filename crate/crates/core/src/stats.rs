//! Average size of the genus, the Dirichlet series of `μ/N`, residue-class
//! densities of `g₀(N)` modulo a prime, and the constants governing the
//! growth of the set of attained genera.

use serde::{Deserialize, Serialize};

use crate::arith::{is_prime, primes_up_to, SpfTable};
use crate::bounds::PI_SQUARED;
use crate::error::{Error, Result};
use crate::genus::fold_range;

/// Neumaier-compensated running sum.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct CompensatedSum {
    sum: f64,
    compensation: f64,
}

impl CompensatedSum {
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.compensation += (self.sum - t) + x;
        } else {
            self.compensation += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn merge(mut self, other: CompensatedSum) -> CompensatedSum {
        self.add(other.sum);
        self.add(other.compensation);
        self
    }

    pub fn value(&self) -> f64 {
        self.sum + self.compensation
    }
}

/// `5/(4π²)`, the limit of `(1/B) Σ g₀(N)/N`.
pub fn average_ratio_target() -> f64 {
    5.0 / (4.0 * PI_SQUARED)
}

/// `5/(8π²)`, the limit of `(1/B²) Σ g₀(N)`.
pub fn average_genus_target() -> f64 {
    5.0 / (8.0 * PI_SQUARED)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AverageReport {
    pub bound: u64,
    /// `(1/B) Σ_{N ≤ B} g₀(N)/N`
    pub avg_ratio: f64,
    /// `(1/B²) Σ_{N ≤ B} g₀(N)`
    pub avg_genus_over_bound: f64,
    pub target: f64,
    pub genus_target: f64,
}

pub fn average_partial(spf: &SpfTable, bound: u64, threads: usize) -> Result<AverageReport> {
    let (ratio_sum, genus_sum) = fold_range(
        spf,
        1,
        bound,
        threads,
        || (CompensatedSum::default(), 0u128),
        |(mut ratios, total), g| {
            ratios.add(g.genus as f64 / g.n as f64);
            (ratios, total + g.genus as u128)
        },
        |(a, b), (c, d)| (a.merge(c), b + d),
    )?;
    let b = bound as f64;
    Ok(AverageReport {
        bound,
        avg_ratio: ratio_sum.value() / b,
        avg_genus_over_bound: genus_sum as f64 / (b * b),
        target: average_ratio_target(),
        genus_target: average_genus_target(),
    })
}

// B_{2k} / (2k)! for k = 1..=10
const EM_COEFFS: [f64; 10] = [
    8.333_333_333_333_333e-2,
    -1.388_888_888_888_889e-3,
    3.306_878_306_878_307e-5,
    -8.267_195_767_195_767e-7,
    2.087_675_698_786_81e-8,
    -5.284_190_138_687_493e-10,
    1.338_253_653_068_468e-11,
    -3.389_680_296_322_583e-13,
    8.586_062_056_277_845e-15,
    -2.174_868_698_558_062e-16,
];
const EM_CUTOFF: u32 = 16;
const EM_TERMS: usize = 9;

/// Riemann zeta at real `s > 1` by Euler–Maclaurin summation.
///
/// Returns the value together with a bound on the remainder: for real
/// `s` the remainder after `m` correction terms is at most the magnitude of
/// term `m + 1`. Floating-point rounding (a few ulps) is not included.
pub fn zeta(s: f64) -> Result<(f64, f64)> {
    if !(s > 1.0) {
        return Err(Error::DirichletDomain(s));
    }
    let n = EM_CUTOFF as f64;
    let mut acc = CompensatedSum::default();
    for k in (1..EM_CUTOFF).rev() {
        acc.add((k as f64).powf(-s));
    }
    acc.add(n.powf(1.0 - s) / (s - 1.0));
    acc.add(0.5 * n.powf(-s));
    // rising factorial s(s+1)...(s+2k-2) times n^(-s-2k+1)
    let mut rising = s;
    let mut power = n.powf(-s - 1.0);
    let term = |k: usize, rising: f64, power: f64| EM_COEFFS[k] * rising * power;
    for k in 0..EM_TERMS {
        acc.add(term(k, rising, power));
        let a = s + 2.0 * k as f64 + 1.0;
        rising *= a * (a + 1.0);
        power /= n * n;
    }
    let remainder = term(EM_TERMS, rising, power).abs();
    Ok((acc.value(), remainder))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DirichletCheck {
    pub s: f64,
    pub terms: u64,
    /// `Σ_{N ≤ terms} (μ/N) N^(−s)`
    pub lhs: f64,
    /// `ζ(s)ζ(s+1)/ζ(2s+2)`
    pub rhs: f64,
    /// `rhs − lhs`
    pub gap: f64,
    /// Rigorous bound on the omitted terms `Σ_{N > terms}`.
    pub tail_bound: f64,
    /// Error allowance on `rhs` and on the summation.
    pub numeric_error: f64,
    pub within_bound: bool,
}

/// Partial sum of `F(s) = Σ (μ/N) N^(−s)` over `N ≤ terms`.
pub fn dirichlet_partial(s: f64, terms: u64) -> Result<f64> {
    if !(s > 1.0) {
        return Err(Error::DirichletDomain(s));
    }
    let spf = SpfTable::new(terms.max(2))?;
    let mut acc = CompensatedSum::default();
    for n in (1..=terms).rev() {
        // μ/N = ∏ (1 + 1/p)
        let ratio: f64 = spf.prime_powers(n).map(|(p, _)| 1.0 + 1.0 / p as f64).product();
        acc.add(ratio * (n as f64).powf(-s));
    }
    Ok(acc.value())
}

/// Bound on `Σ_{N > M} (μ/N) N^(−s)`.
///
/// Writing `μ/N = Σ_{a | N squarefree} 1/a` and `N = ak`, the tail is at
/// most `Σ_a a^(−1−s) Σ_{k > ⌊M/a⌋} k^(−s)`. For `a ≤ M` the inner sum is at
/// most `⌊M/a⌋^(1−s)/(s−1)`; the terms with `a > M` add at most
/// `M^(−s)/(s−1)` (using `ζ(s) ≤ s/(s−1)`).
pub fn dirichlet_tail_bound(s: f64, terms: u64) -> Result<f64> {
    if !(s > 1.0) {
        return Err(Error::DirichletDomain(s));
    }
    if terms == 0 {
        return Err(Error::InvalidArgument("need at least one term".into()));
    }
    let m = terms as f64;
    let mut acc = CompensatedSum::default();
    for a in (1..=terms).rev() {
        let k = (terms / a) as f64;
        acc.add((a as f64).powf(-1.0 - s) * k.powf(1.0 - s) / (s - 1.0));
    }
    acc.add(m.powf(-s) / (s - 1.0));
    // round up for the summation error
    Ok(acc.value() * (1.0 + 1e-12))
}

pub fn zeta_identity_check(s: f64, terms: u64) -> Result<DirichletCheck> {
    let (z1, e1) = zeta(s)?;
    let (z2, e2) = zeta(s + 1.0)?;
    let (z3, e3) = zeta(2.0 * s + 2.0)?;
    let rhs = z1 * z2 / z3;
    let relative = e1 / z1 + e2 / z2 + e3 / (z3 - e3) + 16.0 * f64::EPSILON;
    let lhs = dirichlet_partial(s, terms)?;
    let numeric_error = rhs * relative + lhs * 1e-13;
    let tail_bound = dirichlet_tail_bound(s, terms)?;
    let gap = rhs - lhs;
    Ok(DirichletCheck {
        s,
        terms,
        lhs,
        rhs,
        gap,
        tail_bound,
        numeric_error,
        within_bound: gap >= -numeric_error && gap <= tail_bound + numeric_error,
    })
}

/// Density of `N` with `g₀(N) ≡ 1 (mod ℓ)`, from the Euler product over
/// primes `s ≡ −1 (mod ℓ)` up to `prime_limit`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResidueDensity {
    pub ell: u64,
    pub exact_value: f64,
    /// `exact_value ≤ P(ℓ) ≤ exact_value + truncation_error`
    pub truncation_error: f64,
    pub prime_limit: u64,
    pub empirical_frequency: Option<f64>,
    pub sample_bound: Option<u64>,
}

impl ResidueDensity {
    pub fn upper(&self) -> f64 {
        self.exact_value + self.truncation_error
    }
}

pub const DEFAULT_PRIME_LIMIT: u64 = 10_000_000;

/// Reference upper bounds `P(ℓ) < 1/d` as `(ℓ, d)`.
pub const DENSITY_TABLE: [(u64, u64); 8] = [
    (3, 4),
    (5, 78),
    (7, 105),
    (11, 653),
    (13, 1542),
    (17, 1793),
    (19, 978),
    (23, 5821),
];

fn check_odd_prime(ell: u64) -> Result<()> {
    if ell == 2 || !is_prime(ell) {
        return Err(Error::NotOddPrime(ell));
    }
    Ok(())
}

pub fn residue_density_exact(ell: u64, prime_limit: u64) -> Result<ResidueDensity> {
    check_odd_prime(ell)?;
    if prime_limit < 2 * ell {
        return Err(Error::PrimeLimitTooSmall { prime_limit, min: 2 * ell });
    }
    residue_density_from_primes(ell, prime_limit, &primes_up_to(prime_limit))
}

/// As [`residue_density_exact`], reusing a prime list that covers at least
/// `prime_limit`.
pub fn residue_density_from_primes(ell: u64, prime_limit: u64, primes: &[u64]) -> Result<ResidueDensity> {
    check_odd_prime(ell)?;
    if prime_limit < 2 * ell {
        return Err(Error::PrimeLimitTooSmall { prime_limit, min: 2 * ell });
    }
    // log-domain keeps the product of ~10⁵ factors accurate
    let log_product: f64 = primes
        .iter()
        .take_while(|&&s| s <= prime_limit)
        .filter(|&&s| s % ell == ell - 1)
        .map(|&s| {
            let s = s as f64;
            (-1.0 / (s * s + s)).ln_1p()
        })
        .sum();
    let l3 = (ell as f64).powi(3);
    let survive = (-1.0 / l3).ln_1p() + log_product;
    Ok(ResidueDensity {
        ell,
        exact_value: -survive.exp_m1(),
        truncation_error: progression_tail_bound(ell, prime_limit),
        prime_limit,
        empirical_frequency: None,
        sample_bound: None,
    })
}

/// Upper bound for `Σ 1/(s² + s)` over primes `s > limit`, `s ≡ −1 (mod ℓ)`.
///
/// Such `s` are coprime to every prime `q ≤ min(7, limit)` other than `ℓ`,
/// so the sum runs over `φ(W)` residue classes modulo `Q = ℓW`, with `W` the
/// product of those `q`. In each class with first member `m₀ > limit` the sum
/// is at most `1/(m₀(m₀+1)) + 1/(Q m₀)`. The result never exceeds `1/limit`.
/// Since the omitted factors multiply a product below 1, this is also a bound
/// on how far the truncated `P(ℓ)` can fall short of the full product.
pub fn progression_tail_bound(ell: u64, limit: u64) -> f64 {
    let wheel: u64 = [2u64, 3, 5, 7]
        .into_iter()
        .filter(|&q| q != ell && q <= limit)
        .product();
    let q = ell * wheel;
    let mut total = 0.0;
    for r in (ell - 1..q).step_by(ell as usize) {
        if crate::arith::gcd(r, wheel) != 1 {
            continue;
        }
        let m0 = if r > limit { r } else { r + (limit - r) / q * q + q };
        let m0f = m0 as f64;
        total += 1.0 / (m0f * (m0f + 1.0)) + 1.0 / (q as f64 * m0f);
    }
    total * (1.0 + 1e-12)
}

/// `P(ℓ) < 3/ℓ²`, certified with the truncation error included.
pub fn bound_3_over_ell_squared(density: &ResidueDensity) -> bool {
    density.upper() < 3.0 / (density.ell as f64).powi(2)
}

/// Histogram of `g₀(N) mod ℓ` over `N ≤ bound`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResidueHistogram {
    pub ell: u64,
    pub bound: u64,
    /// `counts[r]` = number of `N ≤ bound` with `g₀(N) ≡ r`.
    pub counts: Vec<u64>,
    /// Classes `1 − 2^k mod ℓ`, ascending.
    pub flagged: Vec<u64>,
    pub two_is_primitive_root: bool,
    pub min_flagged_count: u64,
    pub max_unflagged_count: Option<u64>,
    /// Whether every flagged class beats every other class. Not asserted when
    /// 2 is a primitive root modulo `ℓ`.
    pub enriched: Option<bool>,
}

/// Residues `1 − 2^k mod ℓ` for `k ≥ 0`, ascending.
pub fn flagged_classes(ell: u64) -> Vec<u64> {
    let mut seen = vec![false; ell as usize];
    let mut pow = 1 % ell;
    while !seen[((1 + ell - pow) % ell) as usize] {
        seen[((1 + ell - pow) % ell) as usize] = true;
        pow = pow * 2 % ell;
    }
    (0..ell).filter(|&r| seen[r as usize]).collect()
}

/// Multiplicative order of 2 equals `ℓ − 1`.
pub fn two_is_primitive_root(ell: u64) -> bool {
    let mut pow = 2 % ell;
    let mut order = 1;
    while pow != 1 {
        if pow == 0 || order > ell {
            return false;
        }
        pow = pow * 2 % ell;
        order += 1;
    }
    order == ell - 1
}

pub fn residue_histogram(spf: &SpfTable, ell: u64, bound: u64, threads: usize) -> Result<ResidueHistogram> {
    if !is_prime(ell) {
        return Err(Error::InvalidArgument(format!("modulus must be prime, got {ell}")));
    }
    let len = ell as usize;
    let counts = fold_range(
        spf,
        1,
        bound,
        threads,
        || vec![0u64; len],
        |mut c, g| {
            c[(g.genus % ell) as usize] += 1;
            c
        },
        |mut a, b| {
            a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
            a
        },
    )?;
    let flagged = flagged_classes(ell);
    let primitive = two_is_primitive_root(ell);
    let min_flagged_count = flagged.iter().map(|&r| counts[r as usize]).min().unwrap_or(0);
    let max_unflagged_count = (0..ell)
        .filter(|r| !flagged.contains(r))
        .map(|r| counts[r as usize])
        .max();
    let enriched = match (primitive, max_unflagged_count) {
        (false, Some(m)) => Some(min_flagged_count > m),
        _ => None,
    };
    Ok(ResidueHistogram {
        ell,
        bound,
        counts,
        flagged,
        two_is_primitive_root: primitive,
        min_flagged_count,
        max_unflagged_count,
        enriched,
    })
}

/// `#{N ≤ bound : g₀(N) ≡ 1 (mod ℓ)} / bound`.
pub fn residue_density_empirical(spf: &SpfTable, ell: u64, bound: u64, threads: usize) -> Result<f64> {
    if !is_prime(ell) {
        return Err(Error::InvalidArgument(format!("modulus must be prime, got {ell}")));
    }
    let hits = fold_range(
        spf,
        1,
        bound,
        threads,
        || 0u64,
        |c, g| c + (g.genus % ell == 1 % ell) as u64,
        |a, b| a + b,
    )?;
    Ok(hits as f64 / bound as f64)
}

/// Fraction of `N ≤ bound` with even genus.
pub fn even_genus_frequency(spf: &SpfTable, bound: u64, threads: usize) -> Result<f64> {
    Ok(1.0 - residue_density_empirical(spf, 2, bound, threads)?)
}

/// Fraction of squarefree `N ≤ bound`.
pub fn squarefree_fraction(spf: &SpfTable, bound: u64) -> Result<f64> {
    spf.check_range(1, bound)?;
    let count = (1..=bound)
        .filter(|&n| spf.prime_powers(n).all(|(_, r)| r == 1))
        .count();
    Ok(count as f64 / bound as f64)
}

/// Constants in the growth estimates for the number of attained genera.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AsymptoticConstants {
    /// Root in (0, 1) of `Σ_{n≥1} A^n((n+1)log(n+1) − n log n − 1) = 1`.
    pub a_root: f64,
    /// Root in (0, 1) of `1/B + log B = 1 + log 2`.
    pub b_root: f64,
    /// `−1/(2 log A)`
    pub a0: f64,
    /// `B log 2`
    pub b: f64,
    /// `B log 2 / (2 − 2B)`
    pub c: f64,
}

pub const DEFAULT_CONSTANTS_TOLERANCE: f64 = 1e-12;

/// `1/B + log B − 1 − log 2`.
pub fn b_equation(b: f64) -> f64 {
    1.0 / b + b.ln() - 1.0 - std::f64::consts::LN_2
}

fn series_coefficient(n: u64) -> f64 {
    let n = n as f64;
    (n + 1.0) * (n + 1.0).ln() - n * n.ln() - 1.0
}

/// `Σ_{n≥1} A^n c_n` with `c_n = (n+1)log(n+1) − n log n − 1`.
///
/// Summation stops once the terms have started to shrink and drop below
/// `tolerance / 10`. The coefficients grow like `log n` with ratios
/// `c_{n+1}/c_n` decreasing to 1, so the remainder after term `t` is at
/// most `t q/(1 − q)` with `q = A c_{n+1}/c_n`; that bound is returned
/// alongside the sum.
pub fn a_series(a: f64, tolerance: f64) -> (f64, f64) {
    let mut acc = CompensatedSum::default();
    let mut power = 1.0;
    let mut n = 1u64;
    loop {
        power *= a;
        let term = power * series_coefficient(n);
        acc.add(term);
        let q = a * series_coefficient(n + 1) / series_coefficient(n);
        if q < 1.0 && term < tolerance / 10.0 {
            return (acc.value(), term * q / (1.0 - q));
        }
        n += 1;
        if n > 1_000_000 {
            return (acc.value(), f64::INFINITY);
        }
    }
}

/// Bisection on `[lo, hi]` for a function changing sign there; stops when
/// the bracket is narrower than `width` or can no longer be split.
fn bisect<F: Fn(f64) -> f64>(
    equation: &'static str,
    f: F,
    mut lo: f64,
    mut hi: f64,
    width: f64,
) -> Result<f64> {
    let (flo, fhi) = (f(lo), f(hi));
    if flo == 0.0 {
        return Ok(lo);
    }
    if fhi == 0.0 {
        return Ok(hi);
    }
    if flo.signum() == fhi.signum() || flo.is_nan() || fhi.is_nan() {
        return Err(Error::Bracketing { equation, lo, hi });
    }
    let lo_sign = flo.signum();
    while hi - lo > width {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let fm = f(mid);
        if fm == 0.0 {
            return Ok(mid);
        }
        if fm.signum() == lo_sign {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

pub fn asymptotic_constants(tolerance: f64) -> Result<AsymptoticConstants> {
    if !(tolerance > 0.0 && tolerance <= 1e-6) {
        return Err(Error::InvalidTolerance(tolerance));
    }
    let width = tolerance * 1e-3;
    let b_root = bisect("1/B + log B = 1 + log 2", b_equation, 1e-6, 1.0, width)?;
    let a_root = bisect(
        "sum A^n((n+1)log(n+1) - n log n - 1) = 1",
        |a| a_series(a, tolerance).0 - 1.0,
        1e-6,
        0.9,
        width,
    )?;
    let b = b_root * std::f64::consts::LN_2;
    Ok(AsymptoticConstants {
        a_root,
        b_root,
        a0: -1.0 / (2.0 * a_root.ln()),
        b,
        c: b / (2.0 - 2.0 * b_root),
    })
}
