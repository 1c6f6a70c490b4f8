//! Command-line front end.

pub mod output;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;
use std::str::FromStr;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};
use num::{BigRational, ToPrimitive};
use rayon::prelude::*;

use crate::calculus::PerturbationChart;
use crate::certificate::{certify, perturb_sample, toy_horn_values, MinProblem, Verdict};
use crate::error::{Error, Result};
use crate::galois::{field_check, symmetry_report};

pub use output::{certificate_json, emit_certificate, emit_scan, scan_csv, scan_row, write_atomic, ScanRow};

/// Environment variable holding an optional worker thread count.
pub const THREADS_ENV: &str = "SIXCYL_THREADS";

pub const DEFAULT_SEED: u64 = 20_240_601;

#[derive(Parser, Debug)]
#[command(name = "sixcyl", version, about = "Extremal configurations of six unit cylinders")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Tabulate the extremal curve.
    Scan(ScanArgs),
    /// Run the local-maximality certificate at a curve point.
    Certify(CertifyArgs),
    /// Sample random perturbations of a curve point.
    Perturb(PerturbArgs),
    /// Field of definition of the first Taylor coefficients and symmetry checks.
    Galois(GaloisArgs),
    /// The two-function example that satisfies the first condition only.
    Toy(ToyArgs),
}

#[derive(Args, Debug)]
pub struct ScanArgs {
    #[arg(long, default_value_t = 0.01)]
    pub from: f64,
    #[arg(long, default_value_t = 1.0)]
    pub to: f64,
    #[arg(long, default_value_t = 100)]
    pub steps: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct CertifyArgs {
    /// Curve parameter as an exact rational `p/q`.
    #[arg(long, default_value = "1/2", value_parser = parse_rational)]
    pub x: BigRational,
    /// Recorded in the output; the certificate itself is deterministic.
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct PerturbArgs {
    #[arg(long, default_value = "1/2", value_parser = parse_rational)]
    pub x: BigRational,
    #[arg(long, default_value_t = 10_000)]
    pub samples: usize,
    #[arg(long, value_delimiter = ',', default_values_t = [1e-2, 1e-3])]
    pub t: Vec<f64>,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct GaloisArgs {
    #[arg(long, default_value = "1/2", value_parser = parse_rational)]
    pub x: BigRational,
    /// Largest denominator accepted in a reconstruction.
    #[arg(long, default_value_t = 10_000)]
    pub max_den: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct ToyArgs {
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

pub fn parse_rational(s: &str) -> std::result::Result<BigRational, String> {
    let r = BigRational::from_str(s.trim()).map_err(|_| format!("`{s}` is not a rational p/q"))?;
    let f = r.to_f64().unwrap_or(f64::NAN);
    if !(f > 0.0 && f <= 1.0) {
        return Err(format!("`{s}` is outside (0, 1]"));
    }
    Ok(r)
}

/// Outcome of a subcommand that ran to completion.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Outcome {
    Success,
    Negative,
}

impl Outcome {
    pub fn code(self) -> i32 {
        match self {
            Outcome::Success => 0,
            Outcome::Negative => 2,
        }
    }
}

fn emit(out: &Option<PathBuf>, bytes: &[u8]) -> Result<()> {
    match out {
        Some(p) => write_atomic(p, bytes),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(bytes)?;
            stdout.flush()?;
            Ok(())
        }
    }
}

fn x_f64(x: &BigRational) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

pub fn scan_rows(from: f64, to: f64, steps: usize) -> Result<Vec<ScanRow>> {
    if steps == 0 || !(from > 0.0 && to <= 1.0 && from <= to) {
        return Err(Error::Usage(format!("invalid grid from={from} to={to} steps={steps}")));
    }
    (0..=steps)
        .into_par_iter()
        .map(|i| {
            let x = if i == steps { to } else { from + (to - from) * i as f64 / steps as f64 };
            scan_row(x)
        })
        .collect()
}

fn scan(a: &ScanArgs) -> Result<Outcome> {
    let rows = scan_rows(a.from, a.to, a.steps)?;
    emit(&a.out, &scan_csv(&rows)?)?;
    Ok(Outcome::Success)
}

fn certify_cmd(a: &CertifyArgs) -> Result<Outcome> {
    let chart = PerturbationChart::at(x_f64(&a.x))?;
    let problem = MinProblem::relevant(&chart);
    let cert = certify(&problem, &vec![0.0; problem.dim()])?;
    emit(&a.out, certificate_json(&cert, a.seed).as_bytes())?;
    Ok(match cert.verdict {
        Verdict::CertifiedSharpMax => Outcome::Success,
        _ => Outcome::Negative,
    })
}

fn perturb(a: &PerturbArgs) -> Result<Outcome> {
    if a.samples == 0 || a.t.is_empty() || a.t.iter().any(|t| !(t.is_finite() && *t > 0.0)) {
        return Err(Error::Usage("need a positive sample count and positive t values".into()));
    }
    let chart = PerturbationChart::at(x_f64(&a.x))?;
    let stats = perturb_sample(&chart, a.samples, &a.t, a.seed);
    emit(&a.out, output::sample_json(&a.x.to_string(), &stats).as_bytes())?;
    Ok(if stats.total_violations() == 0 { Outcome::Success } else { Outcome::Negative })
}

fn galois(a: &GaloisArgs) -> Result<Outcome> {
    let report = field_check(&a.x, 1, a.max_den)?;
    let sym = symmetry_report();
    emit(&a.out, output::galois_json(&report, &sym).as_bytes())?;
    Ok(if report.all_reconstructed() && sym.all_hold() { Outcome::Success } else { Outcome::Negative })
}

pub const TOY_HORN_POINTS: [f64; 3] = [1e-1, 1e-2, 1e-3];

fn toy(a: &ToyArgs) -> Result<Outcome> {
    let problem = MinProblem::toy();
    let cert = certify(&problem, &[0.0, 0.0])?;
    emit(&a.out, certificate_json(&cert, a.seed).as_bytes())?;
    let horn = toy_horn_values(&problem, &TOY_HORN_POINTS);
    for (x, v) in TOY_HORN_POINTS.iter().zip(&horn) {
        eprintln!("horn x={x:e} min={v:e}");
    }
    Ok(match cert.verdict {
        Verdict::CertifiedSharpMax => Outcome::Success,
        _ => Outcome::Negative,
    })
}

pub fn execute(cli: &Cli) -> Result<Outcome> {
    match &cli.command {
        Command::Scan(a) => scan(a),
        Command::Certify(a) => certify_cmd(a),
        Command::Perturb(a) => perturb(a),
        Command::Galois(a) => galois(a),
        Command::Toy(a) => toy(a),
    }
}

fn configure_threads() -> Result<()> {
    let Ok(v) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let n: usize = v
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| Error::Usage(format!("{THREADS_ENV} must be a positive integer, got `{v}`")))?;
    // A pool may already exist when run() is called more than once in a process.
    let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    Ok(())
}

/// Parse `argv`, run the subcommand and return the process exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
        }
    };
    let result = configure_threads().and_then(|()| execute(&cli));
    match result {
        Ok(outcome) => outcome.code(),
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rationals() {
        assert_eq!(parse_rational("1/2").unwrap(), BigRational::new(1.into(), 2.into()));
        assert_eq!(parse_rational("2/4").unwrap(), BigRational::new(1.into(), 2.into()));
        assert!(parse_rational("0.5").is_err());
        assert!(parse_rational("3/2").is_err());
        assert!(parse_rational("0/1").is_err());
        assert!(parse_rational("1/0").is_err());
    }

    #[test]
    fn usage_errors_exit_one() {
        assert_eq!(run(["sixcyl"]), 1);
        assert_eq!(run(["sixcyl", "bogus"]), 1);
        assert_eq!(run(["sixcyl", "certify", "--x", "abc"]), 1);
        assert_eq!(run(["sixcyl", "--help"]), 0);
    }

    #[test]
    fn grid() {
        let rows = scan_rows(0.01, 1.0, 4).unwrap();
        assert_eq!(rows.len(), 5);
        assert_eq!(rows[4].point.x, 1.0);
        assert!(scan_rows(0.0, 1.0, 4).is_err());
        assert!(scan_rows(0.5, 0.2, 4).is_err());
        assert!(scan_rows(0.1, 1.0, 0).is_err());
    }
}
