//! Algebraic data of a rational curve point and the closed forms of the
//! δ-perturbed distances from line A.

use num::{BigRational, One, Signed, ToPrimitive, Zero};

use crate::configuration::{curve_point, family_line, Label};
use crate::error::{Error, Result};
use crate::galois::quad::{rat, rational_square_free, QuadExt};
use crate::geometry::distance_sq;

/// Curve data at a rational parameter `0 < x < 1`.
#[derive(Clone, Debug, PartialEq)]
pub struct CurveAlgebra {
    pub x: BigRational,
    /// Square-free part of `3(1+x)(1+3x)`; 1 when `p_x` is rational.
    pub d: u64,
    /// `p_x = √((1+x)(1+3x)/3)`
    pub p: QuadExt,
    /// Cosine of the angle between lines A and D.
    pub gamma: QuadExt,
    /// Cosine of the angle between lines A and F.
    pub gamma_bar: QuadExt,
}

impl CurveAlgebra {
    pub fn new(x: &BigRational) -> Result<Self> {
        let one = BigRational::one();
        if !(x.is_positive() && x < &one) {
            return Err(Error::ParameterOutOfRange(x.to_string()));
        }
        let three = rat(3, 1);
        let p_sq = (&one + x) * (&one + &three * x) / &three;
        let (k, d) = rational_square_free(&p_sq);
        let p = QuadExt::new(BigRational::zero(), k, d);
        let two = rat(2, 1);
        let den = &two * (&one + &two * x);
        let slope = QuadExt::rational(&three * (&one - x) / &den);
        let shift = QuadExt::rational(x * (&one + rat(5, 1) * x) / &den);
        let sp = &slope * &p;
        Ok(Self { x: x.clone(), d, gamma: &shift - &sp, gamma_bar: &shift + &sp, p })
    }

    pub fn p_is_rational(&self) -> bool {
        self.p.is_rational()
    }

    /// Fails with [`Error::PxRational`] when `p_x ∈ ℚ`.
    pub fn require_irrational(&self) -> Result<()> {
        if self.p_is_rational() {
            Err(Error::PxRational(self.x.to_string()))
        } else {
            Ok(())
        }
    }

    pub fn x_f64(&self) -> f64 {
        self.x.to_f64().unwrap_or(f64::NAN)
    }

    /// `q_x = √((1+x) / (3x(1−x)(1+7x+4x²)))`
    pub fn q(&self) -> f64 {
        q_of(self.x_f64())
    }
}

pub fn p_of(x: f64) -> f64 {
    ((1.0 + x) * (1.0 + 3.0 * x) / 3.0).sqrt()
}

pub fn q_of(x: f64) -> f64 {
    ((1.0 + x) / (3.0 * x * (1.0 - x) * (1.0 + 7.0 * x + 4.0 * x * x))).sqrt()
}

/// `Ξ₁ = (q_x / p_x²) Ξ`
pub fn normalized_xi(x: f64, xi: f64) -> f64 {
    q_of(x) / (p_of(x) * p_of(x)) * xi
}

/// Shared evaluation of both closed forms; `p_sign` selects the branch of `p_x`.
pub fn closed_form(x: f64, xi: f64, p_sign: f64) -> Result<f64> {
    if !(x > 0.0 && x < 1.0) {
        return Err(Error::ParameterOutOfRange(x.to_string()));
    }
    let p = p_sign * p_of(x);
    let q = q_of(x);
    let w = 1.0 + 2.0 * x;
    let g = -3.0 * (1.0 - x) / (2.0 * w) * p + x * (1.0 + 5.0 * x) / (2.0 * w);
    let xi1 = q / (p * p) * xi;
    let s = 1.0 + xi * xi;
    let n = 3.0 / x * (2.0 * p * g / (1.0 + 3.0 * x) + 1.0 / w) + (w * w * (g - 1.0) + 6.0 * x * g) * p * xi1;
    let t = g - 3.0 * (1.0 - x) * (p * g + (1.0 + 3.0 * x) / (2.0 * w)) * p * xi1;
    let denom = s - t * t;
    if denom.abs() <= 1e-14 * s {
        return Err(Error::ClosedFormPole(xi));
    }
    let pre = x * (1.0 - x) * (1.0 + 3.0 * x) / (1.0 + 7.0 * x + 4.0 * x * x);
    Ok(pre * n * n / denom)
}

/// `d(A, D(ξ))²` where line D is turned by `ξ = arctan Ξ` in its clock angle.
pub fn closed_form_ad(x: f64, xi: f64) -> Result<f64> {
    closed_form(x, xi, 1.0)
}

/// `d(A, F(ξ))²`: the AD form under `(Ξ, p_x) → (−Ξ, −p_x)`.
pub fn closed_form_af(x: f64, xi: f64) -> Result<f64> {
    closed_form(x, -xi, -1.0)
}

/// `d(A, J(ξ))²` from geometry, with line `J` of the curve configuration at `x`
/// turned by `arctan Ξ` in its clock angle.
pub fn perturbed_distance_sq(x: f64, label: Label, xi: f64) -> Result<f64> {
    let c = curve_point(x)?;
    let a = family_line(Label::A, c.phi, c.kappa, c.delta);
    let j = family_line(label, c.phi, c.kappa, c.delta + xi.atan());
    Ok(distance_sq(&a, &j))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::configuration::common_distance_sq;

    #[test]
    fn p_at_special_points() {
        let a = CurveAlgebra::new(&rat(1, 5)).unwrap();
        assert_eq!(a.p, QuadExt::rational(rat(4, 5)));
        assert!(a.require_irrational().is_err());
        let a = CurveAlgebra::new(&rat(1, 3)).unwrap();
        assert_eq!(a.p, QuadExt::from_ratios(0, 1, 2, 3, 2));
        let a = CurveAlgebra::new(&rat(1, 2)).unwrap();
        assert_eq!(a.d, 5);
        assert_eq!(a.gamma_bar, a.gamma.conjugate());
        assert!((&a.gamma * &a.gamma_bar).is_rational());
        assert!(CurveAlgebra::new(&rat(1, 1)).is_err());
    }

    #[test]
    fn closed_forms_at_zero() {
        for x in [0.5, 0.3, 0.8] {
            let c = common_distance_sq(x);
            assert!((closed_form_ad(x, 0.0).unwrap() - c).abs() < 1e-13);
            assert!((closed_form_af(x, 0.0).unwrap() - c).abs() < 1e-13);
        }
        assert!((closed_form_ad(0.5, 0.0).unwrap() - 12.0 / 11.0).abs() < 1e-14);
    }

    #[test]
    fn closed_forms_match_geometry() {
        for &(x, xi) in &[(0.5, 0.01), (0.5, -0.3), (0.25, 0.7), (0.9, -1.5)] {
            let ad = perturbed_distance_sq(x, Label::D, xi).unwrap();
            let af = perturbed_distance_sq(x, Label::F, xi).unwrap();
            assert!((closed_form_ad(x, xi).unwrap() - ad).abs() < 1e-12);
            assert!((closed_form_af(x, xi).unwrap() - af).abs() < 1e-12);
        }
    }

    #[test]
    fn rejects_bad_parameter() {
        assert!(closed_form_ad(1.0, 0.1).is_err());
        assert!(closed_form_af(0.0, 0.1).is_err());
    }
}
