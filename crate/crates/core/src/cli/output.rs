//! Machine-readable outputs: JSON with fixed key order and CSV.

use std::io::Write;
use std::path::Path;

use serde::{Serialize, Serializer};
use serde_json::value::RawValue;

use crate::certificate::{Certificate, SampleStats};
use crate::configuration::{curve_point, pairwise, CurvePoint, DistanceClass};
use crate::error::{Error, Result};
use crate::galois::{FieldReport, QuadExt, SymmetryReport};

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

/// A float written with 17 significant digits; non-finite values become `null`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct F64(pub f64);

pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

impl Serialize for F64 {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        if self.0.is_finite() {
            let raw = RawValue::from_string(fmt_f64(self.0)).map_err(serde::ser::Error::custom)?;
            raw.serialize(s)
        } else {
            s.serialize_none()
        }
    }
}

fn floats(v: impl IntoIterator<Item = f64>) -> Vec<F64> {
    v.into_iter().map(F64).collect()
}

/// Write `bytes` to `path` through a temporary file in the same directory.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    if path.as_os_str().is_empty() {
        return Err(Error::Usage("output path is empty".into()));
    }
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| Error::Io(e.error.to_string()))?;
    Ok(())
}

#[derive(Serialize)]
struct LabeledValue {
    label: String,
    value: F64,
}

#[derive(Serialize)]
struct MarginsJson {
    min_lambda: F64,
    max_eigenvalue: F64,
    sv_gap: F64,
}

#[derive(Serialize)]
struct CertificateJson {
    verdict: &'static str,
    reason: Option<String>,
    rank: usize,
    singular_values: Vec<F64>,
    lambda: Vec<LabeledValue>,
    e_dim: usize,
    restricted_form: Vec<Vec<F64>>,
    eigenvalues: Vec<F64>,
    margins: MarginsJson,
    tool_version: &'static str,
    seed: u64,
}

pub fn certificate_json(cert: &Certificate, seed: u64) -> String {
    let form = &cert.restricted_form;
    let doc = CertificateJson {
        verdict: cert.verdict.as_str(),
        reason: cert.failure.map(|f| f.to_string()),
        rank: cert.rank(),
        singular_values: floats(cert.relation.singular_values.iter().copied()),
        lambda: cert
            .lambda()
            .map(|l| {
                cert.labels
                    .iter()
                    .zip(l.iter())
                    .map(|(label, &value)| LabeledValue { label: label.clone(), value: F64(value) })
                    .collect()
            })
            .unwrap_or_default(),
        e_dim: cert.e_dim(),
        restricted_form: (0..form.nrows()).map(|i| floats(form.row(i).iter().copied())).collect(),
        eigenvalues: floats(cert.eigenvalues.iter().copied()),
        margins: MarginsJson {
            min_lambda: F64(cert.margins.min_lambda),
            max_eigenvalue: F64(cert.margins.max_eigenvalue),
            sv_gap: F64(cert.margins.sv_gap),
        },
        tool_version: TOOL_VERSION,
        seed,
    };
    let mut s = serde_json::to_string_pretty(&doc).expect("certificate serializes");
    s.push('\n');
    s
}

pub fn emit_certificate(cert: &Certificate, seed: u64, path: &Path) -> Result<()> {
    write_atomic(path, certificate_json(cert, seed).as_bytes())
}

#[derive(Clone, Debug, PartialEq)]
pub struct ScanRow {
    pub point: CurvePoint,
    /// Smallest of the twelve relevant squared distances. On the open curve
    /// they all agree; at `x = 1` the lines are parallel and only six of
    /// them reach the minimum.
    pub d2_common: f64,
    pub d2_ae_class: f64,
    pub psi_residual: f64,
}

pub const SCAN_HEADER: [&str; 7] = ["x", "phi", "delta", "kappa", "d2_common", "d2_AE_class", "psi_residual"];

fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

pub fn scan_row(x: f64) -> Result<ScanRow> {
    let point = curve_point(x)?;
    let report = pairwise(&point.configuration());
    let d2_common =
        report.entries.iter().filter(|e| e.class.is_relevant()).map(|e| e.distance_sq).fold(f64::INFINITY, f64::min);
    Ok(ScanRow {
        point,
        d2_common,
        d2_ae_class: mean(&report.class_values(DistanceClass::AeTriplet)),
        psi_residual: point.psi_residual(),
    })
}

pub fn scan_csv(rows: &[ScanRow]) -> Result<Vec<u8>> {
    if rows.is_empty() {
        return Err(Error::Usage("scan produced no rows".into()));
    }
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
    let io = |e: csv::Error| Error::Io(e.to_string());
    w.write_record(SCAN_HEADER).map_err(io)?;
    for r in rows {
        let p = &r.point;
        w.write_record([p.x, p.phi, p.delta, p.kappa, r.d2_common, r.d2_ae_class, r.psi_residual].map(fmt_f64))
            .map_err(io)?;
    }
    w.into_inner().map_err(|e| Error::Io(e.to_string()))
}

pub fn emit_scan(rows: &[ScanRow], path: &Path) -> Result<()> {
    write_atomic(path, &scan_csv(rows)?)
}

#[derive(Serialize)]
struct SampleJson<'a> {
    x: &'a str,
    n_samples: usize,
    seed: u64,
    threshold: F64,
    t_values: Vec<F64>,
    max_distance: Vec<F64>,
    violations: &'a [usize],
    total_violations: usize,
    tool_version: &'static str,
}

pub fn sample_json(x: &str, stats: &SampleStats) -> String {
    let doc = SampleJson {
        x,
        n_samples: stats.n_samples,
        seed: stats.seed,
        threshold: F64(stats.threshold),
        t_values: floats(stats.t_values.iter().copied()),
        max_distance: floats(stats.max_distance.iter().copied()),
        violations: &stats.violations,
        total_violations: stats.total_violations(),
        tool_version: TOOL_VERSION,
    };
    let mut s = serde_json::to_string_pretty(&doc).expect("statistics serialize");
    s.push('\n');
    s
}

#[derive(Serialize)]
struct CoefficientJson {
    series: &'static str,
    k: usize,
    estimate: F64,
    value: Option<String>,
    a: Option<String>,
    b: Option<String>,
    residual: F64,
    confirmation: F64,
}

#[derive(Serialize)]
struct SymmetryJson {
    group_order: usize,
    rho_sigma_sixth_power_is_identity: bool,
    varpi_relation_holds: bool,
    order1_round_trip: bool,
    order2_round_trip: bool,
}

#[derive(Serialize)]
struct GaloisJson {
    x: String,
    d: u64,
    field: String,
    px_rational: bool,
    conjugation_swaps: bool,
    coefficients: Vec<CoefficientJson>,
    symmetry: SymmetryJson,
    tool_version: &'static str,
}

pub fn galois_json(report: &FieldReport, sym: &SymmetryReport) -> String {
    let coeff = |series: &'static str, c: &crate::galois::field::Coefficient| CoefficientJson {
        series,
        k: c.k,
        estimate: F64(c.estimate),
        value: c.value.as_ref().map(QuadExt::to_string),
        a: c.value.as_ref().map(|v| v.a().to_string()),
        b: c.value.as_ref().map(|v| v.b().to_string()),
        residual: F64(c.residual),
        confirmation: F64(c.confirmation),
    };
    let doc = GaloisJson {
        x: report.x.to_string(),
        d: report.d,
        field: report.field.to_string(),
        px_rational: report.px_rational,
        conjugation_swaps: report.conjugation_swaps,
        coefficients: report
            .ad
            .iter()
            .map(|c| coeff("AD", c))
            .chain(report.af.iter().map(|c| coeff("AF", c)))
            .collect(),
        symmetry: SymmetryJson {
            group_order: sym.group_order,
            rho_sigma_sixth_power_is_identity: sym.rho_sigma_sixth_power_is_identity,
            varpi_relation_holds: sym.varpi_relation_holds,
            order1_round_trip: sym.order1_round_trip,
            order2_round_trip: sym.order2_round_trip,
        },
        tool_version: TOOL_VERSION,
    };
    let mut s = serde_json::to_string_pretty(&doc).expect("report serializes");
    s.push('\n');
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn float_format_has_17_digits() {
        assert_eq!(fmt_f64(12.0 / 11.0), "1.0909090909090908e0");
        assert_eq!(serde_json::to_string(&F64(f64::INFINITY)).unwrap(), "null");
        assert_eq!(serde_json::to_string(&F64(-0.25)).unwrap(), "-2.5000000000000000e-1");
    }

    #[test]
    fn scan_rows() {
        let csv = String::from_utf8(scan_csv(&[scan_row(0.5).unwrap(), scan_row(1.0).unwrap()]).unwrap()).unwrap();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "x,phi,delta,kappa,d2_common,d2_AE_class,psi_residual");
        assert!(lines[1].contains(",1.0909090909090"));
        assert!(lines[2]
            .starts_with("1.0000000000000000e0,0.0000000000000000e0,0.0000000000000000e0,0.0000000000000000e0,"));
        let d2: f64 = lines[2].split(',').nth(4).unwrap().parse().unwrap();
        assert!((d2 - 1.0).abs() < 1e-14);
        assert!(!csv.contains('\r'));
        assert!(scan_csv(&[]).is_err());
    }

    #[test]
    fn empty_path_is_rejected() {
        assert!(matches!(write_atomic(Path::new(""), b"x"), Err(Error::Usage(_))));
    }

    #[test]
    fn atomic_write_replaces_file() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("out.txt");
        write_atomic(&p, b"one").unwrap();
        write_atomic(&p, b"two").unwrap();
        assert_eq!(std::fs::read(&p).unwrap(), b"two");
    }
}
