use std::path::PathBuf;
use std::process::{Command, Output};

use serde::de::DeserializeOwned;

use genus0::bounds::BoundsCheck;
use genus0::cli::{ConstantsReport, DensityReport, EvenAttainedReport, LimsupReport, ParityReport, TableReport};
use genus0::stats::{AverageReport, DirichletCheck, ResidueHistogram};
use genus0::{GenusBreakdown, MissedValuesReport};

fn genus0(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_genus0"))
        .args(args)
        .env_remove(genus0::genus::BRUTE_CEILING_ENV)
        .output()
        .expect("failed to spawn genus0")
}

fn stdout(args: &[&str]) -> String {
    let out = genus0(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn json<T: DeserializeOwned>(args: &[&str]) -> T {
    let mut full = args.to_vec();
    full.extend(["--format", "json"]);
    serde_json::from_str(&stdout(&full)).unwrap_or_else(|e| panic!("{args:?}: {e}"))
}

fn scratch(name: &str) -> PathBuf {
    std::env::temp_dir().join(format!("genus0-{}-{name}", std::process::id()))
}

#[test]
fn genus_in_every_format() {
    assert_eq!(stdout(&["genus", "11"]), "n=11\nmu=12\nnu2=0\nnu3=0\nnu_inf=2\ngenus=1\n");
    assert_eq!(stdout(&["genus", "11", "--format", "csv"]), "n,mu,nu2,nu3,nu_inf,genus\n11,12,0,0,2,1\n");
    let g: GenusBreakdown = json(&["genus", "11"]);
    assert_eq!((g.n, g.mu, g.nu2, g.nu3, g.nu_inf, g.genus), (11, 12, 0, 0, 2, 1));
}

#[test]
fn genus_verify_uses_brute_force_ceiling() {
    assert!(genus0(&["genus", "1000", "--verify"]).status.success());
    let out = Command::new(env!("CARGO_BIN_EXE_genus0"))
        .args(["genus", "1000", "--verify"])
        .env(genus0::genus::BRUTE_CEILING_ENV, "100")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("ceiling 100"));
}

#[test]
fn missed_lists_first_gaps() {
    assert_eq!(stdout(&["missed", "--max", "320"]), "150\n180\n210\n286\n304\n312\n");
    let csv = stdout(&["missed", "--max", "320", "--format", "csv"]);
    assert_eq!(csv.lines().next(), Some("n,parity,position"));
    assert_eq!(csv.lines().nth(1), Some("150,even,1"));
}

#[test]
fn table_rows_match_library() {
    let t: TableReport = json(&["table", "--min", "20", "--max", "40"]);
    assert_eq!(t.rows.len(), 21);
    for g in &t.rows {
        assert_eq!(*g, genus0::genus(g.n).unwrap());
    }
    let plain = stdout(&["table", "--min", "11", "--max", "11"]);
    assert_eq!(plain, "11 12 0 0 2 1\n");
}

#[test]
fn constants_at_default_precision() {
    let text = stdout(&["constants"]);
    assert!(text.contains("a0=0.8178146401\n"), "{text}");
    assert!(text.contains("b=0.2587966321\n"));
    assert!(text.contains("c=0.2064969832\n"));
    let k: ConstantsReport = json(&["constants"]);
    assert!(k.b_residual.abs() < 1e-9 && k.a_residual.abs() < 1e-9);
}

#[test]
fn reports_round_trip_through_json() {
    let m: MissedValuesReport = json(&["missed", "--max", "2000"]);
    assert_eq!(m, genus0::missed_values(2000, 1).unwrap());

    let p: ParityReport = json(&["parity", "--max", "50000"]);
    assert!(p.mismatches.is_empty());
    assert_eq!(p.family_counts.len(), 6);
    assert_eq!(p.family_counts.iter().sum::<u64>(), p.even_count);

    let b: BoundsCheck = json(&["bounds", "--max", "200"]);
    assert!(b.violations.is_empty());
    assert_eq!(b.equality_cases.iter().map(|r| r.n).collect::<Vec<_>>(), [169]);

    let a: AverageReport = json(&["average", "--max", "1000"]);
    assert!((a.avg_ratio - 0.112236390259).abs() < 1e-9);

    let d: DensityReport = json(&["density", "--ell", "13", "--prime-limit", "10000000"]);
    assert_eq!(d.below_table_bound, Some(true));
    assert!(d.below_three_over_ell_squared);

    let h: ResidueHistogram = json(&["histogram", "--ell", "7", "--max", "100000"]);
    assert_eq!(h.counts.iter().sum::<u64>(), 100_000);

    let z: DirichletCheck = json(&["dirichlet", "--s", "2", "--terms", "100000"]);
    assert!(z.within_bound);

    let l: LimsupReport = json(&["limsup"]);
    assert_eq!(l.rows.last().map(|r| r.x), Some(47));

    let e: EvenAttainedReport = json(&["even-attained", "--max", "1000"]);
    assert_eq!((e.row.count, e.attained_count), (471, 971));
}

#[test]
fn output_is_independent_of_thread_count() {
    for args in [
        &["average", "--max", "300000"][..],
        &["missed", "--max", "30000"],
        &["histogram", "--ell", "5", "--max", "200000"],
    ] {
        let one = stdout(&[args, &["--threads", "1", "--format", "json"]].concat());
        let many = stdout(&[args, &["--threads", "6", "--format", "json"]].concat());
        assert_eq!(one, many, "{args:?}");
        assert_eq!(one, stdout(&[args, &["--threads", "1", "--format", "json"]].concat()));
    }
}

#[test]
fn output_flag_writes_file() {
    let path = scratch("genus.csv");
    let out = genus0(&["genus", "37", "--format", "csv", "--output", path.to_str().unwrap()]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let written = std::fs::read_to_string(&path).unwrap();
    std::fs::remove_file(&path).unwrap();
    assert_eq!(written, "n,mu,nu2,nu3,nu_inf,genus\n37,38,2,2,2,2\n");
}

#[test]
fn precision_controls_real_digits() {
    let text = stdout(&["average", "--max", "1000", "--precision", "3"]);
    assert!(text.lines().any(|l| l == "avg_ratio=0.112"), "{text}");
}

#[test]
fn usage_and_runtime_errors_have_distinct_codes() {
    for (args, code) in [
        (&["genus"][..], 2),
        (&["frobnicate"], 2),
        (&["table", "--min", "9", "--max", "5"], 2),
        (&["genus", "0"], 1),
        (&["density", "--ell", "4"], 1),
        (&["constants", "--tol", "0"], 1),
    ] {
        let out = genus0(args);
        assert_eq!(out.status.code(), Some(code), "{args:?}");
        assert!(out.stdout.is_empty());
        let err = String::from_utf8(out.stderr).unwrap();
        assert_eq!(err.lines().count(), 1, "{args:?}: {err}");
    }
}

#[test]
fn unwritable_output_path_fails() {
    let out = genus0(&["genus", "11", "--output", "/nonexistent-dir/out.txt"]);
    assert_eq!(out.status.code(), Some(1));
}
