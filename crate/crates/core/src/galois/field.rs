//! Field membership of the δ-direction Taylor coefficients of `d(A, D)²` and
//! `d(A, F)²` at a rational curve point.

use std::fmt;

use num::BigRational;

use crate::calculus::richardson;
use crate::configuration::Label;
use crate::error::{Error, Result};
use crate::galois::curve_algebra::{p_of, perturbed_distance_sq, q_of, CurveAlgebra};
use crate::galois::quad::QuadExt;
use crate::galois::reconstruct::reconstruct;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Field {
    Rational,
    Quadratic(u64),
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Field::Rational => f.write_str("Q"),
            Field::Quadratic(d) => write!(f, "Q[sqrt({d})]"),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Coefficient {
    pub k: usize,
    pub estimate: f64,
    /// Independent estimate with a different base step.
    pub check: f64,
    pub value: Option<QuadExt>,
    /// `|value − estimate|`
    pub residual: f64,
    /// `|value − check|`
    pub confirmation: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct FieldReport {
    pub x: BigRational,
    pub d: u64,
    pub px_rational: bool,
    pub ad: Vec<Coefficient>,
    pub af: Vec<Coefficient>,
    /// Smallest field containing every reconstructed coefficient.
    pub field: Field,
    /// Whether `[AF]_k = (−1)^k ι([AD]_k)` for every order `k`.
    pub conjugation_swaps: bool,
}

impl FieldReport {
    pub fn all_reconstructed(&self) -> bool {
        self.ad.iter().chain(&self.af).all(|c| c.value.is_some())
    }

    pub fn max_residual(&self) -> f64 {
        self.ad.iter().chain(&self.af).map(|c| c.residual).fold(0.0, f64::max)
    }

    pub fn max_confirmation(&self) -> f64 {
        self.ad.iter().chain(&self.af).map(|c| c.confirmation).fold(0.0, f64::max)
    }
}

const LEVELS: usize = 6;
const BASE_STEP: f64 = 0.05;
const CHECK_STEP: f64 = 0.04;

/// `k`-th Taylor coefficient of `f` at 0 from central differences on the
/// steps `h, h/2, …` with a full Richardson tableau.
fn taylor_coefficient(f: &dyn Fn(f64) -> f64, k: usize, h: f64) -> f64 {
    let mut table: Vec<f64> = (0..LEVELS)
        .map(|l| {
            let s = h / f64::powi(2.0, l as i32);
            match k {
                1 => (f(s) - f(-s)) / (2.0 * s),
                _ => (f(s) - 2.0 * f(0.0) + f(-s)) / (2.0 * s * s),
            }
        })
        .collect();
    richardson(&mut table);
    table[0]
}

fn coefficient(f: &dyn Fn(f64) -> f64, k: usize, d: u64, max_den: u64) -> Coefficient {
    let estimate = taylor_coefficient(f, k, BASE_STEP);
    let check = taylor_coefficient(f, k, CHECK_STEP);
    let value = reconstruct(estimate, d, max_den).map(|r| r.value);
    let (residual, confirmation) = match &value {
        Some(v) => ((v.value() - estimate).abs(), (v.value() - check).abs()),
        None => (f64::INFINITY, f64::INFINITY),
    };
    Coefficient { k, estimate, check, value, residual, confirmation }
}

/// Reconstruct the first-order coefficients of `d(A, D(Ξ₁))²` and
/// `d(A, F(Ξ₁))²` in `ℚ[√d]`, where line J is turned by `arctan((p²/q)Ξ₁)`.
pub fn field_check(x: &BigRational, order: usize, max_den: u64) -> Result<FieldReport> {
    if order != 1 {
        return Err(Error::Usage(format!("field_check supports order 1 only, got {order}")));
    }
    let alg = CurveAlgebra::new(x)?;
    let xf = alg.x_f64();
    let scale = p_of(xf) * p_of(xf) / q_of(xf);
    let series = |label: Label| move |xi1: f64| perturbed_distance_sq(xf, label, scale * xi1).unwrap_or(f64::NAN);
    let (fad, faf) = (series(Label::D), series(Label::F));
    let ad: Vec<_> = (1..=order).map(|k| coefficient(&fad, k, alg.d, max_den)).collect();
    let af: Vec<_> = (1..=order).map(|k| coefficient(&faf, k, alg.d, max_den)).collect();

    let irrational = ad.iter().chain(&af).any(|c| c.value.as_ref().is_some_and(|v| !v.is_rational()));
    let field = if irrational { Field::Quadratic(alg.d) } else { Field::Rational };
    let conjugation_swaps = !alg.p_is_rational()
        && ad.iter().zip(&af).all(|(a, f)| match (&a.value, &f.value) {
            (Some(av), Some(fv)) => {
                let c = av.conjugate();
                let expected = if a_k_is_odd(a.k) { -c } else { c };
                &expected == fv
            }
            _ => false,
        });
    Ok(FieldReport { x: x.clone(), d: alg.d, px_rational: alg.p_is_rational(), ad, af, field, conjugation_swaps })
}

fn a_k_is_odd(k: usize) -> bool {
    k % 2 == 1
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::galois::quad::rat;

    #[test]
    fn record_point_field() {
        let r = field_check(&rat(1, 2), 1, 10_000).unwrap();
        assert_eq!(r.field, Field::Quadratic(5));
        assert!(r.conjugation_swaps);
        assert_eq!(r.ad[0].value, Some(QuadExt::from_ratios(-240, 121, -60, 121, 5)));
        assert!(r.max_residual() < 1e-9 && r.max_confirmation() < 1e-10);
    }

    #[test]
    fn rational_p() {
        let r = field_check(&rat(1, 5), 1, 10_000).unwrap();
        assert_eq!(r.field, Field::Rational);
        assert!(r.px_rational);
        assert!(!r.conjugation_swaps);
    }

    #[test]
    fn order_is_validated() {
        assert!(field_check(&rat(1, 2), 2, 100).is_err());
    }
}
