//! C ABI over the `sixcyl` library.
//!
//! Every fallible call returns a [`SixcylStatus`]; results go through out
//! pointers. Certificates are opaque heap handles released with
//! [`sixcyl_certificate_free`]. The message of the most recent failure on
//! the calling thread is available from [`sixcyl_last_error`].

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use num::{BigInt, BigRational, ToPrimitive};

use sixcyl::calculus::PerturbationChart;
use sixcyl::certificate::{certify, perturb_sample, Certificate, MinProblem, Verdict};
use sixcyl::cli::output::certificate_json;
use sixcyl::configuration::{common_distance_sq, curve_point};
use sixcyl::error::Error;
use sixcyl::galois::{closed_form_ad, closed_form_af};
use sixcyl::geometry::{distance, TangentLine};

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SixcylStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    OutOfRange = 3,
    Numerical = 4,
    BufferTooSmall = 5,
    Internal = 6,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SixcylVerdict {
    CertifiedSharpMax = 0,
    FailedA = 1,
    FailedB = 2,
}

impl From<Verdict> for SixcylVerdict {
    fn from(v: Verdict) -> Self {
        match v {
            Verdict::CertifiedSharpMax => SixcylVerdict::CertifiedSharpMax,
            Verdict::FailedA => SixcylVerdict::FailedA,
            Verdict::FailedB => SixcylVerdict::FailedB,
        }
    }
}

/// Opaque certificate handle.
pub struct SixcylCertificate {
    inner: Certificate,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> SixcylStatus {
    match e {
        Error::GapOutOfRange(_) | Error::ParameterOutOfRange(_) | Error::PolarDegeneracy(_) | Error::NotOnLocus(_) => {
            SixcylStatus::OutOfRange
        }
        Error::NonfiniteEvaluation(_)
        | Error::Inconclusive { .. }
        | Error::ClosedFormPole(_)
        | Error::DegenerateClockAngle(_) => SixcylStatus::Numerical,
        Error::Io(_) => SixcylStatus::Internal,
        _ => SixcylStatus::InvalidArgument,
    }
}

/// Run `f`, translating errors and panics into a status.
fn guard(f: impl FnOnce() -> Result<(), (SixcylStatus, String)>) -> SixcylStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => SixcylStatus::Ok,
        Ok(Err((status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic".into());
            SixcylStatus::Internal
        }
    }
}

fn lift(e: Error) -> (SixcylStatus, String) {
    (status_of(&e), e.to_string())
}

fn null(name: &str) -> (SixcylStatus, String) {
    (SixcylStatus::NullPointer, format!("{name} is null"))
}

unsafe fn write<T>(out: *mut T, value: T, name: &str) -> Result<(), (SixcylStatus, String)> {
    if out.is_null() {
        return Err(null(name));
    }
    out.write(value);
    Ok(())
}

/// Version string of the library. Static; do not free.
#[no_mangle]
pub extern "C" fn sixcyl_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Message of the last failed call on this thread, or NULL. Valid until the
/// next failing call on the same thread; do not free.
#[no_mangle]
pub extern "C" fn sixcyl_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Distance between two tangent lines given by `(φ, κ, δ)`.
///
/// # Safety
/// `out` must be NULL or valid for a write of one `double`.
#[no_mangle]
pub unsafe extern "C" fn sixcyl_line_distance(
    phi1: f64,
    kappa1: f64,
    delta1: f64,
    phi2: f64,
    kappa2: f64,
    delta2: f64,
    out: *mut f64,
) -> SixcylStatus {
    guard(|| {
        let u = TangentLine::new(phi1, kappa1, delta1);
        let v = TangentLine::new(phi2, kappa2, delta2);
        if !(u.is_finite() && v.is_finite()) {
            return Err((SixcylStatus::InvalidArgument, "non-finite angle".into()));
        }
        write(out, distance(&u, &v), "out")
    })
}

/// Angles `(φ, δ, κ)` of the curve point with parameter `x ∈ (0, 1]` and the
/// common squared distance of its twelve relevant pairs.
///
/// # Safety
/// Each out pointer must be NULL or valid for a write of one `double`;
/// `d2_out` may be NULL, the others may not.
#[no_mangle]
pub unsafe extern "C" fn sixcyl_curve_point(
    x: f64,
    phi_out: *mut f64,
    delta_out: *mut f64,
    kappa_out: *mut f64,
    d2_out: *mut f64,
) -> SixcylStatus {
    guard(|| {
        let p = curve_point(x).map_err(lift)?;
        write(phi_out, p.phi, "phi_out")?;
        write(delta_out, p.delta, "delta_out")?;
        write(kappa_out, p.kappa, "kappa_out")?;
        if !d2_out.is_null() {
            d2_out.write(common_distance_sq(x));
        }
        Ok(())
    })
}

/// Closed form of `d(A, D(ξ))²` (`which = 0`) or `d(A, F(ξ))²` (`which = 1`)
/// along the curve, with the moving line turned by `arctan Ξ`.
///
/// # Safety
/// `out` must be NULL or valid for a write of one `double`.
#[no_mangle]
pub unsafe extern "C" fn sixcyl_closed_form(x: f64, xi: f64, which: u32, out: *mut f64) -> SixcylStatus {
    guard(|| {
        let v = match which {
            0 => closed_form_ad(x, xi),
            1 => closed_form_af(x, xi),
            _ => return Err((SixcylStatus::InvalidArgument, format!("unknown closed form {which}"))),
        }
        .map_err(lift)?;
        write(out, v, "out")
    })
}

fn rational(p: i64, q: i64) -> Result<BigRational, (SixcylStatus, String)> {
    if q == 0 {
        return Err((SixcylStatus::InvalidArgument, "zero denominator".into()));
    }
    let r = BigRational::new(BigInt::from(p), BigInt::from(q));
    let f = r.to_f64().unwrap_or(f64::NAN);
    if !(f > 0.0 && f <= 1.0) {
        return Err((SixcylStatus::OutOfRange, format!("x = {r} is outside (0, 1]")));
    }
    Ok(r)
}

unsafe fn emit_handle(cert: Certificate, out: *mut *mut SixcylCertificate) -> Result<(), (SixcylStatus, String)> {
    let handle = Box::into_raw(Box::new(SixcylCertificate { inner: cert }));
    if out.is_null() {
        drop(Box::from_raw(handle));
        return Err(null("out"));
    }
    out.write(handle);
    Ok(())
}

/// Run the certificate at the curve point `x = p/q`.
///
/// # Safety
/// `out` must be NULL or valid for a write of one pointer. On success the
/// handle must be released with [`sixcyl_certificate_free`].
#[no_mangle]
pub unsafe extern "C" fn sixcyl_certify(p: i64, q: i64, out: *mut *mut SixcylCertificate) -> SixcylStatus {
    guard(|| {
        let x = rational(p, q)?;
        let chart = PerturbationChart::at(x.to_f64().unwrap_or(f64::NAN)).map_err(lift)?;
        let problem = MinProblem::relevant(&chart);
        let cert = certify(&problem, &vec![0.0; problem.dim()]).map_err(lift)?;
        emit_handle(cert, out)
    })
}

/// Run the certificate on the two-function example `(−y + 3x², y − x²)`.
///
/// # Safety
/// As for [`sixcyl_certify`].
#[no_mangle]
pub unsafe extern "C" fn sixcyl_certify_toy(out: *mut *mut SixcylCertificate) -> SixcylStatus {
    guard(|| {
        let cert = certify(&MinProblem::toy(), &[0.0, 0.0]).map_err(lift)?;
        emit_handle(cert, out)
    })
}

/// # Safety
/// `cert` must be NULL or a handle from this library that was not yet freed.
#[no_mangle]
pub unsafe extern "C" fn sixcyl_certificate_free(cert: *mut SixcylCertificate) {
    if !cert.is_null() {
        drop(Box::from_raw(cert));
    }
}

unsafe fn borrow<'a>(cert: *const SixcylCertificate) -> Result<&'a Certificate, (SixcylStatus, String)> {
    cert.as_ref().map(|c| &c.inner).ok_or_else(|| null("cert"))
}

/// # Safety
/// `cert` must be a live handle; `out` valid for one write.
#[no_mangle]
pub unsafe extern "C" fn sixcyl_certificate_verdict(
    cert: *const SixcylCertificate,
    out: *mut SixcylVerdict,
) -> SixcylStatus {
    guard(|| write(out, borrow(cert)?.verdict.into(), "out"))
}

/// Numerical rank of the gradient matrix and dimension of its kernel.
///
/// # Safety
/// `cert` must be a live handle; out pointers valid for one write each.
#[no_mangle]
pub unsafe extern "C" fn sixcyl_certificate_dims(
    cert: *const SixcylCertificate,
    rank_out: *mut usize,
    e_dim_out: *mut usize,
) -> SixcylStatus {
    guard(|| {
        let c = borrow(cert)?;
        write(rank_out, c.rank(), "rank_out")?;
        write(e_dim_out, c.e_dim(), "e_dim_out")
    })
}

unsafe fn copy_out(src: &[f64], buf: *mut f64, cap: usize, len_out: *mut usize) -> Result<(), (SixcylStatus, String)> {
    write(len_out, src.len(), "len_out")?;
    if src.is_empty() {
        return Ok(());
    }
    if buf.is_null() {
        return Err(null("buf"));
    }
    if cap < src.len() {
        return Err((SixcylStatus::BufferTooSmall, format!("need {} entries, have {cap}", src.len())));
    }
    ptr::copy_nonoverlapping(src.as_ptr(), buf, src.len());
    Ok(())
}

/// Copy the eigenvalues of the restricted form, ascending, into `buf`.
/// `*len_out` always receives the count; with `cap` too small nothing is
/// copied and `BufferTooSmall` is returned.
///
/// # Safety
/// `cert` must be a live handle; `buf` valid for `cap` writes; `len_out`
/// valid for one write.
#[no_mangle]
pub unsafe extern "C" fn sixcyl_certificate_eigenvalues(
    cert: *const SixcylCertificate,
    buf: *mut f64,
    cap: usize,
    len_out: *mut usize,
) -> SixcylStatus {
    guard(|| copy_out(&borrow(cert)?.eigenvalues, buf, cap, len_out))
}

/// Copy the dependency coefficients (first entry 1) into `buf`; the count is
/// zero when condition (A) failed.
///
/// # Safety
/// As for [`sixcyl_certificate_eigenvalues`].
#[no_mangle]
pub unsafe extern "C" fn sixcyl_certificate_lambda(
    cert: *const SixcylCertificate,
    buf: *mut f64,
    cap: usize,
    len_out: *mut usize,
) -> SixcylStatus {
    guard(|| {
        let c = borrow(cert)?;
        let lambda: Vec<f64> = c.lambda().map(|l| l.iter().copied().collect()).unwrap_or_default();
        copy_out(&lambda, buf, cap, len_out)
    })
}

/// The certificate as JSON. Free the string with [`sixcyl_string_free`].
///
/// # Safety
/// `cert` must be a live handle; `out` valid for one write.
#[no_mangle]
pub unsafe extern "C" fn sixcyl_certificate_json(
    cert: *const SixcylCertificate,
    seed: u64,
    out: *mut *mut c_char,
) -> SixcylStatus {
    guard(|| {
        let json = certificate_json(borrow(cert)?, seed);
        let s = CString::new(json).map_err(|e| (SixcylStatus::Internal, e.to_string()))?;
        if out.is_null() {
            return Err(null("out"));
        }
        out.write(s.into_raw());
        Ok(())
    })
}

/// # Safety
/// `s` must be NULL or a string returned by this library and not yet freed.
#[no_mangle]
pub unsafe extern "C" fn sixcyl_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Count samples with `D ≥ D(C₆,ₓ)` over `n_samples` seeded random
/// directions scaled by each of the `n_t` values in `t`.
///
/// # Safety
/// `t` must be valid for `n_t` reads; `violations_out` for one write.
#[no_mangle]
pub unsafe extern "C" fn sixcyl_perturb(
    p: i64,
    q: i64,
    n_samples: usize,
    t: *const f64,
    n_t: usize,
    seed: u64,
    violations_out: *mut usize,
) -> SixcylStatus {
    guard(|| {
        let x = rational(p, q)?;
        if t.is_null() {
            return Err(null("t"));
        }
        let ts = std::slice::from_raw_parts(t, n_t);
        if n_samples == 0 || ts.is_empty() || ts.iter().any(|v| !(v.is_finite() && *v > 0.0)) {
            return Err((SixcylStatus::InvalidArgument, "need samples and positive t values".into()));
        }
        let chart = PerturbationChart::at(x.to_f64().unwrap_or(f64::NAN)).map_err(lift)?;
        let stats = perturb_sample(&chart, n_samples, ts, seed);
        write(violations_out, stats.total_violations(), "violations_out")
    })
}
