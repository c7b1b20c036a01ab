//! Acceptance suite. Runs every criterion, prints one PASS/FAIL line each,
//! and exits non-zero if any criterion fails.

use std::process::{Command, ExitCode};
use std::time::Instant;

use genus0::arith::{primes_up_to, SpfTable};
use genus0::bounds;
use genus0::genus::{self, BruteForce};
use genus0::stats::{self, DENSITY_TABLE};
use genus0::values::{self, MissedValuesReport};

const LEVELS: u64 = 1_000_000;

struct Outcome {
    passed: bool,
    detail: String,
}

fn check(passed: bool, detail: impl Into<String>) -> Outcome {
    Outcome { passed, detail: detail.into() }
}

fn threads() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

fn missed_value_reproduction() -> Outcome {
    let out = Command::new(env!("CARGO_BIN_EXE_genus0"))
        .args(["missed", "--max", "100000", "--format", "json"])
        .output()
        .expect("run genus0");
    if !out.status.success() {
        return check(false, format!("exit status {}", out.status));
    }
    let r: MissedValuesReport = serde_json::from_slice(&out.stdout).expect("report JSON");
    let ok = r.missed.len() == 9035
        && r.missed[..6] == [150, 180, 210, 286, 304, 312]
        && r.odd_missed == [49267, 74135, 94091, 96463]
        && r.first_odd_position == Some(3885);
    check(
        ok,
        format!(
            "{} missed, first six {:?}, odd {:?}, first odd at #{:?}, scanned N <= {}",
            r.missed.len(),
            &r.missed[..6.min(r.missed.len())],
            r.odd_missed,
            r.first_odd_position,
            r.scan_limit
        ),
    )
}

fn parity_classification(spf: &SpfTable) -> Outcome {
    let bad = values::verify_parity_classification(spf, LEVELS, threads()).unwrap();
    check(bad.is_empty(), format!("{} mismatches for N <= {LEVELS}", bad.len()))
}

fn bounds_check(spf: &SpfTable) -> Outcome {
    let c = bounds::check_bounds_range(spf, 1, LEVELS, threads()).unwrap();
    let expected: Vec<u64> = primes_up_to(1000)
        .into_iter()
        .filter(|p| p % 12 == 1)
        .map(|p| p * p)
        .collect();
    let found: Vec<u64> = c.equality_cases.iter().map(|r| r.n).collect();
    check(
        c.violations.is_empty() && c.mu_over_12_violations.is_empty() && found == expected,
        format!(
            "{} bound violations, {} mu/12 violations, equality at {:?}",
            c.violations.len(),
            c.mu_over_12_violations.len(),
            found
        ),
    )
}

fn oracle_equivalences() -> Outcome {
    let bf = BruteForce::default();
    let mut bad = Vec::new();
    for n in 1..=10_000u64 {
        let f = genus0::factorize(n).unwrap();
        if genus::nu2(&f) != bf.nu2(n).unwrap() || genus::nu3(&f) != bf.nu3(n).unwrap() {
            bad.push(n);
        }
    }
    for n in 1..=100_000u64 {
        let f = genus0::factorize(n).unwrap();
        if genus::mu(&f) != bf.mu(n).unwrap() || genus::nu_infinity(&f) != bf.nu_infinity(n).unwrap() {
            bad.push(n);
        }
    }
    check(bad.is_empty(), format!("{} disagreements (nu2, nu3 to 1e4; mu, nu_inf to 1e5)", bad.len()))
}

fn average(spf: &SpfTable) -> Outcome {
    let r = stats::average_partial(spf, LEVELS, threads()).unwrap();
    let diff = (r.avg_ratio - r.target).abs();
    check(diff <= 1e-3, format!("avg {:.6} vs 5/(4pi^2) = {:.6}, |diff| = {diff:.2e} (tol 1e-3)", r.avg_ratio, r.target))
}

fn dirichlet_identity() -> Outcome {
    let mut parts = Vec::new();
    let mut ok = true;
    for s in [1.5, 2.0, 3.0] {
        let c = stats::zeta_identity_check(s, LEVELS).unwrap();
        ok &= c.within_bound;
        parts.push(format!("s={s}: gap {:.3e} <= tail {:.3e}", c.gap, c.tail_bound));
    }
    check(ok, parts.join("; "))
}

fn congruence(spf: &SpfTable) -> Outcome {
    let bad = values::power_of_two_congruence_check(spf, LEVELS, threads()).unwrap();
    check(bad.is_empty(), format!("{} violations for N <= {LEVELS}", bad.len()))
}

fn constants() -> Outcome {
    let k = stats::asymptotic_constants(stats::DEFAULT_CONSTANTS_TOLERANCE).unwrap();
    let b_res = stats::b_equation(k.b_root).abs();
    let a_res = (stats::a_series(k.a_root, 1e-15).0 - 1.0).abs();
    let da0 = (k.a0 - 0.8168146).abs();
    let db = (k.b - 0.2587966).abs();
    let dc = (k.c - 0.2064969).abs();
    let ok = da0 <= 1e-6 && db <= 1e-6 && dc <= 1e-6 && b_res <= 1e-9 && a_res <= 1e-9;
    check(
        ok,
        format!(
            "a0 = {:.7} (|diff| {da0:.1e}), b = {:.7} (|diff| {db:.1e}), c = {:.7} (|diff| {dc:.1e}), \
             residuals {b_res:.1e} / {a_res:.1e}",
            k.a0, k.b, k.c
        ),
    )
}

fn residue_densities() -> Outcome {
    let limit = stats::DEFAULT_PRIME_LIMIT;
    let primes = primes_up_to(limit);
    let mut ok = true;
    let mut worst_margin = f64::INFINITY;
    for (ell, d) in DENSITY_TABLE {
        let p = stats::residue_density_from_primes(ell, limit, &primes).unwrap();
        let margin = 1.0 / d as f64 - p.upper();
        worst_margin = worst_margin.min(margin);
        ok &= margin > 0.0;
    }
    let odd: Vec<u64> = primes.iter().copied().filter(|&l| l > 2 && l <= 100).collect();
    let mut three = 0;
    for &ell in &odd {
        let p = stats::residue_density_from_primes(ell, limit, &primes).unwrap();
        if stats::bound_3_over_ell_squared(&p) {
            three += 1;
        }
    }
    ok &= three == odd.len();
    check(
        ok,
        format!(
            "table bounds hold for all 8 (smallest margin {worst_margin:.2e}); P < 3/l^2 for {three}/{} odd l <= 100",
            odd.len()
        ),
    )
}

fn enrichment(spf: &SpfTable) -> Outcome {
    let h = stats::residue_histogram(spf, 7, LEVELS, threads()).unwrap();
    let min_flagged = [0, 4, 6].iter().map(|&r| h.counts[r]).min().unwrap();
    let max_other = [2, 3, 5].iter().map(|&r| h.counts[r]).max().unwrap();
    check(min_flagged > max_other, format!("counts {:?}; min{{0,4,6}} = {min_flagged} > max{{2,3,5}} = {max_other}", h.counts))
}

fn squarefree(spf: &SpfTable) -> Outcome {
    let f = stats::squarefree_fraction(spf, LEVELS).unwrap();
    let diff = (f - 0.607927).abs();
    check(diff <= 0.002, format!("fraction {f:.6}, |diff| = {diff:.2e} (tol 2e-3)"))
}

fn main() -> ExitCode {
    let start = Instant::now();
    let spf = SpfTable::new(LEVELS).unwrap();
    let criteria: Vec<(&str, Box<dyn Fn() -> Outcome + '_>)> = vec![
        ("1 missed values up to 1e5", Box::new(missed_value_reproduction)),
        ("2 parity classification", Box::new(|| parity_classification(&spf))),
        ("3 lower/upper/mu-12 bounds", Box::new(|| bounds_check(&spf))),
        ("4 formula vs brute-force oracles", Box::new(oracle_equivalences)),
        ("5 average of g0(N)/N", Box::new(|| average(&spf))),
        ("6 Dirichlet series identity", Box::new(dirichlet_identity)),
        ("7 congruence mod 2^(s-2)", Box::new(|| congruence(&spf))),
        ("8 growth constants a0, b, c", Box::new(constants)),
        ("9 residue densities P(l)", Box::new(residue_densities)),
        ("10 enrichment mod 7", Box::new(|| enrichment(&spf))),
        ("11 squarefree density", Box::new(|| squarefree(&spf))),
    ];
    let mut failed = 0;
    for (name, run) in &criteria {
        let t = Instant::now();
        let outcome = run();
        let tag = if outcome.passed { "PASS" } else { "FAIL" };
        if !outcome.passed {
            failed += 1;
        }
        println!("[{tag}] criterion {name}: {} ({:.2?})", outcome.detail, t.elapsed());
    }
    println!(
        "acceptance: {}/{} criteria passed in {:.2?}",
        criteria.len() - failed,
        criteria.len(),
        start.elapsed()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
