//! Genus of the modular curve `X₀(N)`.
//!
//! `g₀(N) = 1 + μ/12 − ν₂/4 − ν₃/3 − ν∞/2` is evaluated exactly from the
//! multiplicative closed forms of its constituents. On top of that the crate
//! verifies the classical lower and upper bounds, enumerates integers that
//! never occur as a genus, classifies levels of even genus, and computes
//! the average size of `g₀(N)/N` and residue-class densities of `g₀(N)`
//! modulo primes.
//!
//! ```
//! let g = genus0::genus(11).unwrap();
//! assert_eq!((g.mu, g.nu_inf, g.genus), (12, 2, 1));
//! ```

pub mod arith;
pub mod bounds;
pub mod cli;
pub mod error;
pub mod genus;
pub mod stats;
pub mod values;

pub use arith::{factorize, Factorization, SpfTable};
pub use error::{Error, Result};
pub use genus::{genus, genus_range, BruteForce, GenusBreakdown};
pub use values::{missed_values, EvenGenusFamily, MissedValuesReport, ParityFamily};
