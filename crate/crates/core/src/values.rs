//! Which integers occur as a genus.
//!
//! The lower bound `g₀(N) ≥ (N − 5√N − 8)/12` means any level of genus `n`
//! satisfies `N < 12n + 18√n + 40`, so scanning levels up to that bound
//! decides every `n ≤ x`. Also here: the classification of levels with even
//! genus and the congruence `g₀(N) ≡ 1 (mod 2^(s−2))` for levels with
//! `s > 2` distinct odd prime factors.

use std::collections::BTreeMap;

use bitvec::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arith::{self, ceil_sqrt, SpfTable};
use crate::error::{Error, Result};
use crate::genus::{self, fold_range};

/// Largest level a search for genera `≤ x` has to visit:
/// `12x + 18⌈√x⌉ + 40`, plus one.
pub fn scan_limit(x: u64) -> u64 {
    12 * x + 18 * ceil_sqrt(x) + 40 + 1
}

/// Attained genera in `[0, x]`, one bit per candidate value.
#[derive(Debug, Clone)]
pub struct AttainedSet {
    x: u64,
    scan_limit: u64,
    bits: BitVec,
}

impl AttainedSet {
    pub fn x(&self) -> u64 {
        self.x
    }

    pub fn scan_limit(&self) -> u64 {
        self.scan_limit
    }

    pub fn contains(&self, n: u64) -> bool {
        n <= self.x && self.bits[n as usize]
    }

    /// Positive values in `[1, x]` that are not attained, ascending.
    pub fn missed(&self) -> impl Iterator<Item = u64> + '_ {
        self.bits.iter_zeros().map(|i| i as u64).filter(|&n| n >= 1)
    }

    /// Number of attained values in `[1, x]`.
    pub fn attained_positive(&self) -> u64 {
        self.bits[1..].count_ones() as u64
    }
}

/// Marks every genus `≤ x` reached by some level `≤ scan_limit(x)`.
pub fn attained_genera(x: u64, threads: usize) -> Result<AttainedSet> {
    if x == 0 {
        return Err(Error::InvalidArgument("genus ceiling must be at least 1".into()));
    }
    let limit = scan_limit(x);
    if limit > SpfTable::MAX_LIMIT {
        return Err(Error::CapacityExceeded { x, required: limit, capacity: SpfTable::MAX_LIMIT });
    }
    let spf = SpfTable::new(limit)?;
    attained_genera_with_table(&spf, x, threads)
}

pub fn attained_genera_with_table(spf: &SpfTable, x: u64, threads: usize) -> Result<AttainedSet> {
    let limit = scan_limit(x);
    if limit > spf.limit() {
        return Err(Error::CapacityExceeded { x, required: limit, capacity: spf.limit() });
    }
    let len = x as usize + 1;
    let bits = fold_range(
        spf,
        1,
        limit,
        threads,
        || bitvec![0; len],
        |mut bits, g| {
            if g.genus <= x {
                bits.set(g.genus as usize, true);
            }
            bits
        },
        |mut a, b| {
            a |= b;
            a
        },
    )?;
    Ok(AttainedSet { x, scan_limit: limit, bits })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MissedValuesReport {
    pub x: u64,
    pub scan_limit: u64,
    pub missed: Vec<u64>,
    pub attained_count: u64,
    pub odd_missed: Vec<u64>,
    /// 1-based index of the first odd entry of `missed`.
    pub first_odd_position: Option<usize>,
}

impl MissedValuesReport {
    pub fn from_set(set: &AttainedSet) -> Self {
        let missed: Vec<u64> = set.missed().collect();
        let odd_missed: Vec<u64> = missed.iter().copied().filter(|n| n % 2 == 1).collect();
        let first_odd_position = missed.iter().position(|n| n % 2 == 1).map(|i| i + 1);
        MissedValuesReport {
            x: set.x(),
            scan_limit: set.scan_limit(),
            attained_count: set.attained_positive(),
            missed,
            odd_missed,
            first_odd_position,
        }
    }
}

pub fn missed_values(x: u64, threads: usize) -> Result<MissedValuesReport> {
    Ok(MissedValuesReport::from_set(&attained_genera(x, threads)?))
}

/// Looks for levels of the given genera by a plain loop over
/// `N ≤ 12n + 18√n + 40`, factorizing each level by trial division.
///
/// Returns the smallest level found for each target; a target missing from
/// the map is not a genus. Independent of the sieve and bitmap used by
/// [`attained_genera`].
pub fn find_levels_with_genus(targets: &[u64]) -> Result<BTreeMap<u64, u64>> {
    let Some(&max) = targets.iter().max() else {
        return Ok(BTreeMap::new());
    };
    let wanted: std::collections::HashSet<u64> = targets.iter().copied().collect();
    let mut found = BTreeMap::new();
    for level in 1..scan_limit(max) {
        let g = genus::genus(level)?.genus;
        if wanted.contains(&g) {
            found.entry(g).or_insert(level);
        }
    }
    Ok(found)
}

/// The six shapes of `N` with even genus.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "case", rename_all = "snake_case")]
pub enum EvenGenusFamily {
    /// `N ∈ {1, 2, 3, 4, 8, 16}`
    Exceptional { n: u64 },
    /// `N = p^r`, `p ≡ 5 (mod 8)`
    PrimePowerFiveMod8 { p: u64, r: u32 },
    /// `N = p^r`, `p ≡ 7 (mod 8)`, `r` odd
    PrimePowerSevenMod8 { p: u64, r: u32 },
    /// `N = p^r`, `p ≡ 3 (mod 8)`, `r` even
    PrimePowerThreeMod8 { p: u64, r: u32 },
    /// `N = 2p^r`, `p ≡ ±3 (mod 8)`
    TwicePrimePower { p: u64, r: u32 },
    /// `N = 4p^r`, `p ≡ 3 (mod 4)`, `r` odd
    FourTimesPrimePower { p: u64, r: u32 },
}

impl EvenGenusFamily {
    /// Case number, 1 through 6.
    pub fn id(&self) -> u8 {
        match self {
            Self::Exceptional { .. } => 1,
            Self::PrimePowerFiveMod8 { .. } => 2,
            Self::PrimePowerSevenMod8 { .. } => 3,
            Self::PrimePowerThreeMod8 { .. } => 4,
            Self::TwicePrimePower { .. } => 5,
            Self::FourTimesPrimePower { .. } => 6,
        }
    }

    /// Matches `n` given its prime powers (ascending by prime).
    pub fn classify(n: u64, prime_powers: &[(u64, u32)]) -> Option<Self> {
        if matches!(n, 1 | 2 | 3 | 4 | 8 | 16) {
            return Some(Self::Exceptional { n });
        }
        match *prime_powers {
            [(p, r)] if p % 2 == 1 => match (p % 8, r % 2) {
                (5, _) => Some(Self::PrimePowerFiveMod8 { p, r }),
                (7, 1) => Some(Self::PrimePowerSevenMod8 { p, r }),
                (3, 0) => Some(Self::PrimePowerThreeMod8 { p, r }),
                _ => None,
            },
            [(2, 1), (p, r)] if p % 8 == 3 || p % 8 == 5 => Some(Self::TwicePrimePower { p, r }),
            [(2, 2), (p, r)] if p % 4 == 3 && r % 2 == 1 => {
                Some(Self::FourTimesPrimePower { p, r })
            }
            _ => None,
        }
    }
}

/// Classification result for one level; `family` is `None` when `N` fits
/// none of the six cases.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParityFamily {
    pub n: u64,
    pub family: Option<EvenGenusFamily>,
}

impl ParityFamily {
    pub fn family_id(&self) -> Option<u8> {
        self.family.map(|f| f.id())
    }
}

pub fn even_genus_family(n: u64) -> Result<ParityFamily> {
    let f = arith::factorize(n)?;
    Ok(ParityFamily { n, family: EvenGenusFamily::classify(n, f.factors()) })
}

/// Levels `≤ limit` where the six-family predicate disagrees with the parity
/// of the genus.
pub fn verify_parity_classification(spf: &SpfTable, limit: u64, threads: usize) -> Result<Vec<u64>> {
    fold_range(
        spf,
        1,
        limit,
        threads,
        Vec::new,
        |mut bad, g| {
            let pp: Vec<(u64, u32)> = spf.prime_powers(g.n).collect();
            let predicted_even = EvenGenusFamily::classify(g.n, &pp).is_some();
            if predicted_even != (g.genus % 2 == 0) {
                bad.push(g.n);
            }
            bad
        },
        concat,
    )
}

/// Levels `≤ limit` with `s > 2` distinct odd prime factors and
/// `g₀(N) ≢ 1 (mod 2^(s−2))`.
pub fn power_of_two_congruence_check(spf: &SpfTable, limit: u64, threads: usize) -> Result<Vec<u64>> {
    fold_range(
        spf,
        1,
        limit,
        threads,
        Vec::new,
        |mut bad, g| {
            let s = spf.prime_powers(g.n).filter(|&(p, _)| p != 2).count() as u32;
            if s > 2 {
                let m = 1u64 << (s - 2);
                if g.genus % m != 1 % m {
                    bad.push(g.n);
                }
            }
            bad
        },
        concat,
    )
}

fn concat(mut a: Vec<u64>, b: Vec<u64>) -> Vec<u64> {
    a.extend(b);
    a
}

/// Count of even attained genera in `[1, x]` and its ratio to `x / log x`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvenAttainedRow {
    pub x: u64,
    pub count: u64,
    pub ratio: f64,
}

impl EvenAttainedRow {
    pub fn from_set(set: &AttainedSet) -> Self {
        let x = set.x();
        let count = (2..=x).step_by(2).filter(|&n| set.contains(n)).count() as u64;
        let xf = x as f64;
        EvenAttainedRow { x, count, ratio: count as f64 / (xf / xf.ln()) }
    }
}

pub fn even_attained_count(x: u64, threads: usize) -> Result<EvenAttainedRow> {
    Ok(EvenAttainedRow::from_set(&attained_genera(x, threads)?))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scan_limit_covers_bound() {
        for x in [1u64, 2, 10, 150, 100_000] {
            let bound = 12.0 * x as f64 + 18.0 * (x as f64).sqrt() + 40.0;
            assert!(scan_limit(x) as f64 >= bound);
        }
        assert_eq!(scan_limit(100_000), 1_205_747);
    }

    #[test]
    fn attained_small() {
        let set = attained_genera(1, 1).unwrap();
        assert!(set.contains(0) && set.contains(1));
        let set = attained_genera(10, 1).unwrap();
        assert!((0..=10).all(|n| set.contains(n)));
        assert_eq!(set.missed().count(), 0);
        let set = attained_genera(150, 1).unwrap();
        assert!(!set.contains(150));
        assert!((0..150).all(|n| set.contains(n)));
        assert!(attained_genera(0, 1).is_err());
    }

    #[test]
    fn capacity_is_enforced() {
        let err = attained_genera(400_000_000, 1).unwrap_err();
        assert!(matches!(err, Error::CapacityExceeded { .. }));
        let spf = SpfTable::new(1000).unwrap();
        assert!(attained_genera_with_table(&spf, 100, 1).is_err());
    }

    #[test]
    fn first_missed_values() {
        let r = missed_values(320, 1).unwrap();
        assert_eq!(r.missed, vec![150, 180, 210, 286, 304, 312]);
        assert!(r.odd_missed.is_empty());
        assert_eq!(r.first_odd_position, None);
        assert_eq!(r.attained_count, 320 - 6);
    }

    #[test]
    fn direct_scan_confirms_first_missed() {
        let found = find_levels_with_genus(&[149, 150, 151, 180, 210]).unwrap();
        assert!(found.contains_key(&149) && found.contains_key(&151));
        assert!(!found.contains_key(&150));
        assert!(!found.contains_key(&180));
        assert!(!found.contains_key(&210));
        assert_eq!(genus::genus(found[&149]).unwrap().genus, 149);
    }

    #[test]
    fn family_examples() {
        assert_eq!(even_genus_family(16).unwrap().family_id(), Some(1));
        assert_eq!(
            even_genus_family(9).unwrap().family,
            Some(EvenGenusFamily::PrimePowerThreeMod8 { p: 3, r: 2 })
        );
        assert_eq!(even_genus_family(11).unwrap().family, None);
        assert_eq!(even_genus_family(13).unwrap().family_id(), Some(2));
        assert_eq!(even_genus_family(7).unwrap().family_id(), Some(3));
        assert_eq!(even_genus_family(49).unwrap().family, None);
        assert_eq!(even_genus_family(10).unwrap().family_id(), Some(5));
        assert_eq!(even_genus_family(14).unwrap().family, None);
        assert_eq!(even_genus_family(12).unwrap().family_id(), Some(6));
        assert_eq!(even_genus_family(36).unwrap().family, None);
        assert_eq!(even_genus_family(32).unwrap().family, None);
        assert!(even_genus_family(0).is_err());
    }

    #[test]
    fn parity_classification_small() {
        let spf = SpfTable::new(1000).unwrap();
        assert!(verify_parity_classification(&spf, 16, 1).unwrap().is_empty());
        assert!(verify_parity_classification(&spf, 1000, 1).unwrap().is_empty());
        for n in [1u64, 2, 3, 4, 8, 16] {
            assert_eq!(genus::genus(n).unwrap().genus % 2, 0);
        }
    }

    #[test]
    fn congruence_examples() {
        let g = genus::genus(1155).unwrap();
        assert_eq!((g.mu, g.nu2, g.nu3, g.nu_inf, g.genus), (2304, 0, 0, 16, 185));
        assert_eq!(g.genus % 4, 1);
        let g = genus::genus(105).unwrap();
        assert_eq!((g.mu, g.nu_inf, g.genus), (192, 8, 13));
        let spf = SpfTable::new(20_000).unwrap();
        assert!(power_of_two_congruence_check(&spf, 20_000, 1).unwrap().is_empty());
    }

    #[test]
    fn even_attained_small() {
        let row = even_attained_count(10, 1).unwrap();
        assert_eq!(row.count, 5);
    }
}
