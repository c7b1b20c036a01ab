//! Lower and upper bounds on the genus, and the primorial diagnostic for
//! the `limsup g₀(N)/(N log log N)` constant.

use serde::{Deserialize, Serialize};

use crate::arith::{primes_up_to, SpfTable};
use crate::error::{Error, Result};
use crate::genus::{self, fold_range, GenusBreakdown};

/// Euler's constant γ.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;
/// `e^γ`.
pub const EXP_GAMMA: f64 = 1.781_072_417_990_198;
pub const PI_SQUARED: f64 = std::f64::consts::PI * std::f64::consts::PI;

/// `e^γ / (2π²)`, the limsup of `g₀(N)/(N log log N)`.
pub fn limsup_constant() -> f64 {
    EXP_GAMMA / (2.0 * PI_SQUARED)
}

/// `6e^γ / π²`, the Mertens-type limit of `μ(N_x)/(N_x log x)`.
pub fn mertens_constant() -> f64 {
    6.0 * EXP_GAMMA / PI_SQUARED
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundsReport {
    pub n: u64,
    pub genus: u64,
    pub lower: f64,
    /// Absent for `n ≤ 2`, where the upper bound is not defined.
    pub upper: Option<f64>,
    pub lower_equality: bool,
}

impl BoundsReport {
    pub fn from_breakdown(g: &GenusBreakdown) -> Self {
        BoundsReport {
            n: g.n,
            genus: g.genus,
            lower: lower_bound(g.n),
            upper: upper_bound(g.n).ok(),
            lower_equality: is_lower_equality(g.n, g.genus),
        }
    }

    pub fn lower_holds(&self) -> bool {
        lower_bound_holds(self.n, self.genus)
    }

    pub fn upper_holds(&self) -> bool {
        self.upper.is_none_or(|u| (self.genus as f64) < u)
    }
}

/// `(n − 5√n − 8)/12`.
pub fn lower_bound(n: u64) -> f64 {
    let n = n as f64;
    (n - 5.0 * n.sqrt() - 8.0) / 12.0
}

/// Exact test of `12g + 8 ≥ n − 5√n`.
pub fn lower_bound_holds(n: u64, genus: u64) -> bool {
    let gap = n as i128 - 12 * genus as i128 - 8;
    gap <= 0 || gap * gap <= 25 * n as i128
}

/// Exact test of `12g + 8 + 5√n = n` with `n` a perfect square.
pub fn is_lower_equality(n: u64, genus: u64) -> bool {
    let r = n.isqrt();
    r * r == n && 12 * genus as u128 + 8 + 5 * r as u128 == n as u128
}

/// `n · e^γ/(2π²) · (log log n + 2/log log n)`, defined for `n > 2`.
pub fn upper_bound(n: u64) -> Result<f64> {
    if n <= 2 {
        return Err(Error::UpperBoundDomain(n));
    }
    let ll = (n as f64).ln().ln();
    Ok(n as f64 * limsup_constant() * (ll + 2.0 / ll))
}

/// Levels in `[lo, hi]` with `12·g₀(N) > μ`.
pub fn mu_over_12_bound_check(spf: &SpfTable, lo: u64, hi: u64, threads: usize) -> Result<Vec<u64>> {
    fold_range(
        spf,
        lo,
        hi,
        threads,
        Vec::new,
        |mut acc, g| {
            if 12 * g.genus > g.mu {
                acc.push(g.n);
            }
            acc
        },
        concat,
    )
}

/// Outcome of checking every bound over a range of levels.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundsCheck {
    pub lo: u64,
    pub hi: u64,
    /// Levels where the lower or upper bound fails.
    pub violations: Vec<BoundsReport>,
    /// Levels attaining the lower bound.
    pub equality_cases: Vec<BoundsReport>,
    /// Levels where `12·g₀(N) > μ`.
    pub mu_over_12_violations: Vec<u64>,
}

pub fn check_bounds_range(spf: &SpfTable, lo: u64, hi: u64, threads: usize) -> Result<BoundsCheck> {
    let (violations, equality_cases, mu_over_12_violations) = fold_range(
        spf,
        lo,
        hi,
        threads,
        || (Vec::new(), Vec::new(), Vec::new()),
        |(mut bad, mut eq, mut mu_bad), g| {
            if !lower_bound_holds(g.n, g.genus) || (g.n > 2 && !upper_holds_fast(g)) {
                bad.push(BoundsReport::from_breakdown(g));
            }
            if is_lower_equality(g.n, g.genus) {
                eq.push(BoundsReport::from_breakdown(g));
            }
            if 12 * g.genus > g.mu {
                mu_bad.push(g.n);
            }
            (bad, eq, mu_bad)
        },
        |(a, b, c), (d, e, f)| (concat(a, d), concat(b, e), concat(c, f)),
    )?;
    Ok(BoundsCheck { lo, hi, violations, equality_cases, mu_over_12_violations })
}

fn upper_holds_fast(g: &GenusBreakdown) -> bool {
    upper_bound(g.n).is_ok_and(|u| (g.genus as f64) < u)
}

fn concat<T>(mut a: Vec<T>, b: Vec<T>) -> Vec<T> {
    a.extend(b);
    a
}

/// Largest `x` whose primorial fits in 64 bits.
pub const MAX_PRIMORIAL_X: u64 = 52;

/// `N_x = ∏_{p ≤ x} p`.
pub fn primorial(x: u64) -> Result<u64> {
    if x > MAX_PRIMORIAL_X {
        return Err(Error::PrimorialOverflow { x, max_x: MAX_PRIMORIAL_X });
    }
    primes_up_to(x)
        .into_iter()
        .try_fold(1u64, |acc, p| acc.checked_mul(p))
        .ok_or(Error::PrimorialOverflow { x, max_x: MAX_PRIMORIAL_X })
}

/// One row of the primorial convergence table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LimsupRow {
    pub x: u64,
    pub primorial: u64,
    pub genus: u64,
    /// `μ(N_x) / (N_x log x)`
    pub mu_ratio: f64,
    pub mertens_target: f64,
    /// `g₀(N_x) / (N_x log log N_x)`
    pub genus_ratio: f64,
    pub limsup_target: f64,
}

pub fn limsup_diagnostic(x: u64) -> Result<LimsupRow> {
    if x < 3 {
        return Err(Error::InvalidArgument(format!(
            "limsup diagnostic needs x >= 3 so that log log N_x > 0, got {x}"
        )));
    }
    let n = primorial(x)?;
    let g = genus::genus(n)?;
    let nf = n as f64;
    Ok(LimsupRow {
        x,
        primorial: n,
        genus: g.genus,
        mu_ratio: g.mu as f64 / (nf * (x as f64).ln()),
        mertens_target: mertens_constant(),
        genus_ratio: g.genus as f64 / (nf * nf.ln().ln()),
        limsup_target: limsup_constant(),
    })
}

/// Diagnostic rows for every prime `3 ≤ x ≤ 52`.
pub fn limsup_table() -> Result<Vec<LimsupRow>> {
    primes_up_to(MAX_PRIMORIAL_X)
        .into_iter()
        .filter(|&p| p >= 3)
        .map(limsup_diagnostic)
        .collect()
}
