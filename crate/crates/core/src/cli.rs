//! Command-line front end.
//!
//! Every subcommand produces one report, written as CSV, JSON or plain
//! text. Reports with a tabular shape (`table`, `missed`, `histogram`,
//! `limsup`, `bounds`) get dedicated CSV columns; the rest are written as
//! `key,value` rows (CSV) or `key=value` lines (plain). Real numbers are
//! rounded to `--precision` digits in every format.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::arith::SpfTable;
use crate::bounds::{self, BoundsCheck, LimsupRow};
use crate::error::Error;
use crate::genus::{self, BruteForce, GenusBreakdown};
use crate::stats::{self, AsymptoticConstants, AverageReport, DirichletCheck, ResidueDensity, ResidueHistogram};
use crate::values::{self, EvenAttainedRow, MissedValuesReport};

pub const EXIT_OK: u8 = 0;
pub const EXIT_FAILURE: u8 = 1;
pub const EXIT_USAGE: u8 = 2;
pub const EXIT_FAULT: u8 = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
    Plain,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OutputConfig {
    pub format: Format,
    /// `None` writes to standard output.
    pub output: Option<PathBuf>,
    pub precision: usize,
}

#[derive(Debug, Parser)]
#[command(name = "genus0", version, about = "Genus of the modular curve X0(N) and its statistics")]
pub struct Cli {
    /// Output format
    #[arg(long, value_enum, default_value_t = Format::Plain, global = true)]
    pub format: Format,

    /// Write output to this file instead of standard output
    #[arg(long, short, global = true)]
    pub output: Option<PathBuf>,

    /// Decimal digits for real values
    #[arg(long, default_value_t = 10, global = true)]
    pub precision: usize,

    /// Worker threads for range scans (results do not depend on it)
    #[arg(long, default_value_t = 1, global = true)]
    pub threads: usize,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Genus breakdown of a single level
    Genus {
        n: u64,
        /// Cross-check against exhaustive counts (ceiling: GENUS0_BRUTE_CEILING)
        #[arg(long)]
        verify: bool,
    },
    /// Breakdowns for every level in a range
    Table {
        #[arg(long)]
        max: u64,
        #[arg(long, default_value_t = 1)]
        min: u64,
    },
    /// Positive integers up to X that are not a genus
    Missed {
        #[arg(long)]
        max: u64,
    },
    /// Check the even-genus classification for N <= B
    Parity {
        #[arg(long)]
        max: u64,
    },
    /// Check lower/upper bounds for N in a range
    Bounds {
        #[arg(long)]
        max: u64,
        #[arg(long, default_value_t = 1)]
        min: u64,
    },
    /// Average of g0(N)/N over N <= B
    Average {
        #[arg(long)]
        max: u64,
    },
    /// Density of N with g0(N) = 1 (mod L)
    Density {
        #[arg(long)]
        ell: u64,
        /// Also count the empirical frequency over N <= B
        #[arg(long)]
        empirical_max: Option<u64>,
        #[arg(long, default_value_t = stats::DEFAULT_PRIME_LIMIT)]
        prime_limit: u64,
    },
    /// Histogram of g0(N) mod L over N <= B
    Histogram {
        #[arg(long)]
        ell: u64,
        #[arg(long)]
        max: u64,
    },
    /// Solve for the growth constants A, B, a0, b, c
    Constants {
        #[arg(long, default_value_t = stats::DEFAULT_CONSTANTS_TOLERANCE)]
        tol: f64,
    },
    /// Compare partial sums of sum (mu/N) N^-s with zeta(s)zeta(s+1)/zeta(2s+2)
    Dirichlet {
        #[arg(long)]
        s: f64,
        #[arg(long, default_value_t = 1_000_000)]
        terms: u64,
    },
    /// Primorial convergence table for the limsup constant
    Limsup,
    /// Number of even genera up to X, against X / log X
    EvenAttained {
        #[arg(long)]
        max: u64,
    },
}

/// A report that can be rendered in every output format.
pub trait Report: Serialize {
    /// Column names and rows, for reports with a tabular CSV form.
    fn csv_table(&self, _precision: usize) -> Option<(Vec<&'static str>, Vec<Vec<String>>)> {
        None
    }

    /// One value per line, for reports that are naturally a list.
    fn plain_lines(&self, _precision: usize) -> Option<Vec<String>> {
        None
    }
}

/// Fixed-point with `precision` decimals; magnitudes below `1e-4` switch to
/// scientific notation with the same number of digits.
fn real(x: f64, precision: usize) -> String {
    if x != 0.0 && x.abs() < 1e-4 {
        format!("{x:.precision$e}")
    } else {
        format!("{x:.precision$}")
    }
}

impl Report for GenusBreakdown {
    fn csv_table(&self, _: usize) -> Option<(Vec<&'static str>, Vec<Vec<String>>)> {
        Some((breakdown_header(), vec![breakdown_row(self)]))
    }
}

fn breakdown_header() -> Vec<&'static str> {
    vec!["n", "mu", "nu2", "nu3", "nu_inf", "genus"]
}

fn breakdown_row(g: &GenusBreakdown) -> Vec<String> {
    [g.n, g.mu, g.nu2, g.nu3, g.nu_inf, g.genus].iter().map(u64::to_string).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TableReport {
    pub min: u64,
    pub max: u64,
    pub rows: Vec<GenusBreakdown>,
}

impl Report for TableReport {
    fn csv_table(&self, _: usize) -> Option<(Vec<&'static str>, Vec<Vec<String>>)> {
        Some((breakdown_header(), self.rows.iter().map(breakdown_row).collect()))
    }

    fn plain_lines(&self, _: usize) -> Option<Vec<String>> {
        Some(self.rows.iter().map(|g| breakdown_row(g).join(" ")).collect())
    }
}

impl Report for MissedValuesReport {
    fn csv_table(&self, _: usize) -> Option<(Vec<&'static str>, Vec<Vec<String>>)> {
        let rows = self
            .missed
            .iter()
            .enumerate()
            .map(|(i, n)| {
                let parity = if n % 2 == 0 { "even" } else { "odd" };
                vec![n.to_string(), parity.to_string(), (i + 1).to_string()]
            })
            .collect();
        Some((vec!["n", "parity", "position"], rows))
    }

    fn plain_lines(&self, _: usize) -> Option<Vec<String>> {
        Some(self.missed.iter().map(u64::to_string).collect())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParityReport {
    pub max: u64,
    pub even_count: u64,
    /// Levels per family, cases 1 through 6.
    pub family_counts: Vec<u64>,
    pub mismatches: Vec<u64>,
}

impl Report for ParityReport {}

impl Report for BoundsCheck {
    fn csv_table(&self, precision: usize) -> Option<(Vec<&'static str>, Vec<Vec<String>>)> {
        let mut rows = Vec::new();
        let mut push = |kind: &str, r: &bounds::BoundsReport| {
            rows.push(vec![
                kind.to_string(),
                r.n.to_string(),
                r.genus.to_string(),
                real(r.lower, precision),
                r.upper.map(|u| real(u, precision)).unwrap_or_default(),
                r.lower_equality.to_string(),
            ]);
        };
        self.equality_cases.iter().for_each(|r| push("equality", r));
        self.violations.iter().for_each(|r| push("violation", r));
        for &n in &self.mu_over_12_violations {
            rows.push(vec!["mu_over_12".into(), n.to_string(), String::new(), String::new(), String::new(), String::new()]);
        }
        Some((vec!["kind", "n", "genus", "lower", "upper", "lower_equality"], rows))
    }
}

impl Report for AverageReport {}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityReport {
    #[serde(flatten)]
    pub density: ResidueDensity,
    /// `1/d` from [`stats::DENSITY_TABLE`], when `ℓ` is listed there.
    pub table_bound: Option<f64>,
    pub below_table_bound: Option<bool>,
    pub three_over_ell_squared: f64,
    pub below_three_over_ell_squared: bool,
}

impl Report for DensityReport {}

impl Report for ResidueHistogram {
    fn csv_table(&self, _: usize) -> Option<(Vec<&'static str>, Vec<Vec<String>>)> {
        let rows = self
            .counts
            .iter()
            .enumerate()
            .map(|(r, c)| {
                let flagged = self.flagged.contains(&(r as u64));
                vec![r.to_string(), c.to_string(), flagged.to_string()]
            })
            .collect();
        Some((vec!["residue", "count", "flagged"], rows))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConstantsReport {
    #[serde(flatten)]
    pub constants: AsymptoticConstants,
    pub b_residual: f64,
    pub a_residual: f64,
    pub tolerance: f64,
}

impl Report for ConstantsReport {}

impl Report for DirichletCheck {}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LimsupReport {
    pub rows: Vec<LimsupRow>,
}

impl Report for LimsupReport {
    fn csv_table(&self, precision: usize) -> Option<(Vec<&'static str>, Vec<Vec<String>>)> {
        let rows = self
            .rows
            .iter()
            .map(|r| {
                vec![
                    r.x.to_string(),
                    r.primorial.to_string(),
                    r.genus.to_string(),
                    real(r.mu_ratio, precision),
                    real(r.mertens_target, precision),
                    real(r.genus_ratio, precision),
                    real(r.limsup_target, precision),
                ]
            })
            .collect();
        Some((
            vec!["x", "primorial", "genus", "mu_ratio", "mertens_target", "genus_ratio", "limsup_target"],
            rows,
        ))
    }

    fn plain_lines(&self, precision: usize) -> Option<Vec<String>> {
        self.csv_table(precision)
            .map(|(_, rows)| rows.into_iter().map(|r| r.join(" ")).collect())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvenAttainedReport {
    #[serde(flatten)]
    pub row: EvenAttainedRow,
    pub attained_count: u64,
}

impl Report for EvenAttainedReport {}

/// Rounds every non-integer number in `v` to `precision` decimals.
fn round_reals(v: Value, precision: usize) -> Value {
    match v {
        Value::Number(n) if n.is_f64() => {
            let x = n.as_f64().expect("f64 number");
            real(x, precision)
                .parse::<f64>()
                .ok()
                .and_then(serde_json::Number::from_f64)
                .map_or(Value::Null, Value::Number)
        }
        Value::Array(a) => Value::Array(a.into_iter().map(|x| round_reals(x, precision)).collect()),
        Value::Object(o) => Value::Object(
            o.into_iter().map(|(k, x)| (k, round_reals(x, precision))).collect(),
        ),
        other => other,
    }
}

fn scalar_text(v: &Value, precision: usize) -> String {
    match v {
        Value::Null => String::new(),
        Value::Number(n) if n.is_f64() => real(n.as_f64().expect("f64 number"), precision),
        Value::Number(n) => n.to_string(),
        Value::String(s) => s.clone(),
        Value::Bool(b) => b.to_string(),
        Value::Array(a) => a.iter().map(|x| scalar_text(x, precision)).collect::<Vec<_>>().join(";"),
        Value::Object(_) => v.to_string(),
    }
}

/// Renders a report into bytes.
pub fn render<R: Report>(report: &R, format: Format, precision: usize) -> Result<Vec<u8>, String> {
    let value = serde_json::to_value(report).map_err(|e| format!("serialization failed: {e}"))?;
    let mut out = Vec::new();
    match format {
        Format::Json => {
            let rounded = round_reals(value, precision);
            serde_json::to_writer_pretty(&mut out, &rounded).map_err(|e| e.to_string())?;
            out.push(b'\n');
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(&mut out);
            let (header, rows) = report.csv_table(precision).unwrap_or_else(|| {
                (vec!["key", "value"], key_values(&value, precision))
            });
            w.write_record(&header).map_err(|e| e.to_string())?;
            for row in rows {
                w.write_record(&row).map_err(|e| e.to_string())?;
            }
            w.flush().map_err(|e| e.to_string())?;
        }
        Format::Plain => {
            let lines = report.plain_lines(precision).unwrap_or_else(|| {
                key_values(&value, precision)
                    .into_iter()
                    .map(|kv| format!("{}={}", kv[0], kv[1]))
                    .collect()
            });
            for line in lines {
                out.extend_from_slice(line.as_bytes());
                out.push(b'\n');
            }
        }
    }
    Ok(out)
}

fn key_values(value: &Value, precision: usize) -> Vec<Vec<String>> {
    match value {
        Value::Object(o) => o
            .iter()
            .map(|(k, v)| vec![k.clone(), scalar_text(v, precision)])
            .collect(),
        other => vec![vec!["value".into(), scalar_text(other, precision)]],
    }
}

enum Failure {
    Usage(String),
    Runtime(Error),
    Io(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Runtime(e)
    }
}

/// Parses `argv` (program name first), runs the subcommand and writes the
/// report. Returns the process exit status.
pub fn run(argv: &[String], stdout: &mut dyn Write, stderr: &mut dyn Write) -> u8 {
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = write!(stdout, "{e}");
                return EXIT_OK;
            }
            let msg = e.to_string();
            let first = msg.lines().next().unwrap_or("invalid arguments");
            let _ = writeln!(stderr, "{first}");
            return EXIT_USAGE;
        }
    };
    let config = OutputConfig { format: cli.format, output: cli.output.clone(), precision: cli.precision };
    match execute(&cli.command, cli.threads.max(1), &config, stdout) {
        Ok(()) => EXIT_OK,
        Err(Failure::Usage(msg)) => {
            let _ = writeln!(stderr, "error: {msg}");
            EXIT_USAGE
        }
        Err(Failure::Io(msg)) => {
            let _ = writeln!(stderr, "error: {msg}");
            EXIT_FAILURE
        }
        Err(Failure::Runtime(e)) => {
            let _ = writeln!(stderr, "error: {e}");
            match e {
                Error::Consistency { .. } => EXIT_FAULT,
                _ => EXIT_FAILURE,
            }
        }
    }
}

fn emit<R: Report>(report: &R, config: &OutputConfig, stdout: &mut dyn Write) -> Result<(), Failure> {
    let bytes = render(report, config.format, config.precision).map_err(Failure::Io)?;
    match &config.output {
        Some(path) => {
            let file = File::create(path)
                .map_err(|e| Failure::Io(format!("cannot create {}: {e}", path.display())))?;
            let mut w = BufWriter::new(file);
            w.write_all(&bytes).and_then(|_| w.flush())
        }
        None => stdout.write_all(&bytes).and_then(|_| stdout.flush()),
    }
    .map_err(|e| Failure::Io(format!("write failed: {e}")))
}

fn table_for(max: u64) -> Result<SpfTable, Failure> {
    if max == 0 {
        return Err(Failure::Usage("--max must be a positive integer".into()));
    }
    Ok(SpfTable::new(max.max(2))?)
}

fn execute(command: &Command, threads: usize, config: &OutputConfig, out: &mut dyn Write) -> Result<(), Failure> {
    match *command {
        Command::Genus { n, verify } => {
            let g = genus::genus(n)?;
            if verify {
                let bf = BruteForce::from_env();
                let oracle = (bf.mu(n)?, bf.nu2(n)?, bf.nu3(n)?, bf.nu_infinity(n)?);
                if oracle != (g.mu, g.nu2, g.nu3, g.nu_inf) {
                    return Err(Error::Consistency {
                        n,
                        detail: format!("formula {:?} disagrees with brute force {oracle:?}", (g.mu, g.nu2, g.nu3, g.nu_inf)),
                    }
                    .into());
                }
            }
            emit(&g, config, out)
        }
        Command::Table { min, max } => {
            if min == 0 || min > max {
                return Err(Failure::Usage(format!("invalid range [{min}, {max}]")));
            }
            let spf = table_for(max)?;
            let rows = genus::genus_range(min, max, &spf)?.collect::<Result<Vec<_>, _>>()?;
            emit(&TableReport { min, max, rows }, config, out)
        }
        Command::Missed { max } => emit(&values::missed_values(max, threads)?, config, out),
        Command::Parity { max } => {
            let spf = table_for(max)?;
            let mismatches = values::verify_parity_classification(&spf, max, threads)?;
            let mut family_counts = vec![0u64; 6];
            let mut even_count = 0;
            for n in 1..=max {
                let pp: Vec<(u64, u32)> = spf.prime_powers(n).collect();
                if let Some(f) = values::EvenGenusFamily::classify(n, &pp) {
                    family_counts[f.id() as usize - 1] += 1;
                }
                if genus::genus_with_table(&spf, n)?.genus % 2 == 0 {
                    even_count += 1;
                }
            }
            emit(&ParityReport { max, even_count, family_counts, mismatches }, config, out)
        }
        Command::Bounds { min, max } => {
            if min == 0 || min > max {
                return Err(Failure::Usage(format!("invalid range [{min}, {max}]")));
            }
            let spf = table_for(max)?;
            emit(&bounds::check_bounds_range(&spf, min, max, threads)?, config, out)
        }
        Command::Average { max } => {
            let spf = table_for(max)?;
            emit(&stats::average_partial(&spf, max, threads)?, config, out)
        }
        Command::Density { ell, empirical_max, prime_limit } => {
            let mut density = stats::residue_density_exact(ell, prime_limit)?;
            if let Some(b) = empirical_max {
                let spf = table_for(b)?;
                density.empirical_frequency = Some(stats::residue_density_empirical(&spf, ell, b, threads)?);
                density.sample_bound = Some(b);
            }
            let table_bound = stats::DENSITY_TABLE
                .iter()
                .find(|&&(l, _)| l == ell)
                .map(|&(_, d)| 1.0 / d as f64);
            let three = 3.0 / (ell as f64 * ell as f64);
            let report = DensityReport {
                below_table_bound: table_bound.map(|t| density.upper() < t),
                below_three_over_ell_squared: stats::bound_3_over_ell_squared(&density),
                three_over_ell_squared: three,
                table_bound,
                density,
            };
            emit(&report, config, out)
        }
        Command::Histogram { ell, max } => {
            let spf = table_for(max)?;
            emit(&stats::residue_histogram(&spf, ell, max, threads)?, config, out)
        }
        Command::Constants { tol } => {
            let constants = stats::asymptotic_constants(tol)?;
            let report = ConstantsReport {
                b_residual: stats::b_equation(constants.b_root),
                a_residual: stats::a_series(constants.a_root, tol).0 - 1.0,
                tolerance: tol,
                constants,
            };
            emit(&report, config, out)
        }
        Command::Dirichlet { s, terms } => emit(&stats::zeta_identity_check(s, terms)?, config, out),
        Command::Limsup => emit(&LimsupReport { rows: bounds::limsup_table()? }, config, out),
        Command::EvenAttained { max } => {
            let set = values::attained_genera(max, threads)?;
            let report = EvenAttainedReport {
                row: EvenAttainedRow::from_set(&set),
                attained_count: set.attained_positive(),
            };
            emit(&report, config, out)
        }
    }
}
