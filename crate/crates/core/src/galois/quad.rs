//! Exact elements `a + b√d` of a real quadratic field.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num::{BigInt, BigRational, One, Signed, ToPrimitive, Zero};

/// `a + b√d` with rational `a`, `b` and square-free `d ≥ 1`. With `d = 1`
/// the element is rational and `b` is folded into `a`.
#[derive(Clone, Debug)]
pub struct QuadExt {
    a: BigRational,
    b: BigRational,
    d: u64,
}

pub fn rat(n: i64, m: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(m))
}

/// Write `n = k²·s` with `s` square-free.
pub fn square_free_decomposition(n: u64) -> (u64, u64) {
    assert!(n > 0, "square-free part of zero");
    let (mut k, mut s, mut rest) = (1u64, 1u64, n);
    let mut f = 2u64;
    while f * f <= rest {
        let mut e = 0;
        while rest % f == 0 {
            rest /= f;
            e += 1;
        }
        k *= f.pow(e / 2);
        if e % 2 == 1 {
            s *= f;
        }
        f += 1;
    }
    (k, s * rest)
}

/// Square-free part of a positive rational: the `s` with `r = (k/m)²·s`.
/// Returns `(k/m, s)`.
pub fn rational_square_free(r: &BigRational) -> (BigRational, u64) {
    assert!(r.is_positive(), "square-free part of a non-positive rational");
    let n = r.numer().to_u64().expect("numerator fits in u64");
    let m = r.denom().to_u64().expect("denominator fits in u64");
    let (k, s) = square_free_decomposition(n * m);
    (BigRational::new(BigInt::from(k), BigInt::from(m)), s)
}

impl QuadExt {
    pub fn new(a: BigRational, b: BigRational, d: u64) -> Self {
        assert!(d > 0, "field discriminant must be positive");
        let (k, s) = square_free_decomposition(d);
        let b = b * BigRational::from_integer(BigInt::from(k));
        if s == 1 {
            Self { a: a + b, b: BigRational::zero(), d: 1 }
        } else {
            Self { a, b, d: s }
        }
    }

    pub fn rational(a: BigRational) -> Self {
        Self { a, b: BigRational::zero(), d: 1 }
    }

    pub fn int(n: i64) -> Self {
        Self::rational(rat(n, 1))
    }

    /// `(an/ad) + (bn/bd)√d`.
    pub fn from_ratios(an: i64, ad: i64, bn: i64, bd: i64, d: u64) -> Self {
        Self::new(rat(an, ad), rat(bn, bd), d)
    }

    /// `√d`.
    pub fn sqrt(d: u64) -> Self {
        Self::new(BigRational::zero(), BigRational::one(), d)
    }

    pub fn zero() -> Self {
        Self::int(0)
    }

    pub fn a(&self) -> &BigRational {
        &self.a
    }

    pub fn b(&self) -> &BigRational {
        &self.b
    }

    /// The square-free radicand; 1 for rational elements.
    pub fn d(&self) -> u64 {
        if self.b.is_zero() {
            1
        } else {
            self.d
        }
    }

    pub fn is_rational(&self) -> bool {
        self.b.is_zero()
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    /// Galois conjugate `a − b√d`.
    pub fn conjugate(&self) -> Self {
        Self { a: self.a.clone(), b: -self.b.clone(), d: self.d }
    }

    pub fn value(&self) -> f64 {
        let a = self.a.to_f64().unwrap_or(f64::NAN);
        if self.b.is_zero() {
            return a;
        }
        a + self.b.to_f64().unwrap_or(f64::NAN) * (self.d as f64).sqrt()
    }

    /// `a² − d b²`.
    pub fn norm(&self) -> BigRational {
        &self.a * &self.a - &self.b * &self.b * BigRational::from_integer(BigInt::from(self.d))
    }

    /// Multiplicative inverse; `None` for zero.
    pub fn recip(&self) -> Option<Self> {
        let n = self.norm();
        if n.is_zero() {
            return None;
        }
        Some(Self { a: &self.a / &n, b: -&self.b / &n, d: self.d })
    }

    pub fn scale(&self, r: &BigRational) -> Self {
        Self { a: &self.a * r, b: &self.b * r, d: self.d }
    }

    fn common_d(&self, other: &Self) -> u64 {
        match (self.b.is_zero(), other.b.is_zero()) {
            (true, _) => other.d,
            (_, true) => self.d,
            _ => {
                assert_eq!(self.d, other.d, "elements of different quadratic fields");
                self.d
            }
        }
    }
}

impl PartialEq for QuadExt {
    fn eq(&self, other: &Self) -> bool {
        self.a == other.a && self.b == other.b && (self.b.is_zero() || self.d == other.d)
    }
}

impl Eq for QuadExt {}

impl Add<&QuadExt> for &QuadExt {
    type Output = QuadExt;
    fn add(self, rhs: &QuadExt) -> QuadExt {
        QuadExt { a: &self.a + &rhs.a, b: &self.b + &rhs.b, d: self.common_d(rhs) }
    }
}

impl Sub<&QuadExt> for &QuadExt {
    type Output = QuadExt;
    fn sub(self, rhs: &QuadExt) -> QuadExt {
        QuadExt { a: &self.a - &rhs.a, b: &self.b - &rhs.b, d: self.common_d(rhs) }
    }
}

impl Mul<&QuadExt> for &QuadExt {
    type Output = QuadExt;
    fn mul(self, rhs: &QuadExt) -> QuadExt {
        let d = self.common_d(rhs);
        let dr = BigRational::from_integer(BigInt::from(d));
        QuadExt { a: &self.a * &rhs.a + &self.b * &rhs.b * dr, b: &self.a * &rhs.b + &self.b * &rhs.a, d }
    }
}

impl Neg for &QuadExt {
    type Output = QuadExt;
    fn neg(self) -> QuadExt {
        QuadExt { a: -self.a.clone(), b: -self.b.clone(), d: self.d }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr<QuadExt> for QuadExt {
            type Output = QuadExt;
            fn $m(self, rhs: QuadExt) -> QuadExt {
                (&self).$m(&rhs)
            }
        }
        impl $tr<&QuadExt> for QuadExt {
            type Output = QuadExt;
            fn $m(self, rhs: &QuadExt) -> QuadExt {
                (&self).$m(rhs)
            }
        }
        impl $tr<QuadExt> for &QuadExt {
            type Output = QuadExt;
            fn $m(self, rhs: QuadExt) -> QuadExt {
                self.$m(&rhs)
            }
        }
    };
}

forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for QuadExt {
    type Output = QuadExt;
    fn neg(self) -> QuadExt {
        -&self
    }
}

impl fmt::Display for QuadExt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.b.is_zero() {
            return write!(f, "{}", self.a);
        }
        let sign = if self.b.is_negative() { '-' } else { '+' };
        let mag = self.b.abs();
        let radical = if mag.is_one() { format!("√{}", self.d) } else { format!("{mag}√{}", self.d) };
        if self.a.is_zero() {
            if self.b.is_negative() {
                write!(f, "-{radical}")
            } else {
                f.write_str(&radical)
            }
        } else {
            write!(f, "{} {sign} {radical}", self.a)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn square_free_parts() {
        assert_eq!(square_free_decomposition(180), (6, 5));
        assert_eq!(square_free_decomposition(8), (2, 2));
        assert_eq!(square_free_decomposition(144), (12, 1));
        assert_eq!(square_free_decomposition(7), (1, 7));
        assert_eq!(rational_square_free(&rat(45, 4)), (rat(3, 2), 5));
    }

    #[test]
    fn radicand_is_reduced() {
        let x = QuadExt::new(rat(1, 1), rat(1, 1), 20);
        assert_eq!(x, QuadExt::from_ratios(1, 1, 2, 1, 5));
        assert!(QuadExt::sqrt(16).is_rational());
        assert_eq!(QuadExt::sqrt(16), QuadExt::int(4));
    }

    #[test]
    fn golden_ratio_arithmetic() {
        let tau = QuadExt::from_ratios(1, 2, 1, 2, 5);
        let tau_bar = tau.conjugate();
        assert_eq!(&tau * &tau, &tau + &QuadExt::int(1));
        assert_eq!(&tau * &tau_bar, QuadExt::int(-1));
        assert_eq!(&tau + &tau_bar, QuadExt::int(1));
        assert!((tau.value() - 1.618_033_988_749_895).abs() < 1e-15);
        assert_eq!(tau.recip().unwrap(), &tau - &QuadExt::int(1));
    }

    #[test]
    fn conjugation_is_a_ring_map() {
        let x = QuadExt::from_ratios(3, 7, -2, 5, 2);
        let y = QuadExt::from_ratios(-1, 3, 4, 9, 2);
        assert_eq!((&x * &y).conjugate(), x.conjugate() * y.conjugate());
        assert_eq!((&x + &y).conjugate(), x.conjugate() + y.conjugate());
        assert_eq!(x.conjugate().conjugate(), x);
    }

    #[test]
    fn display() {
        assert_eq!(QuadExt::from_ratios(8, 11, -2, 11, 5).to_string(), "8/11 - 2/11√5");
        assert_eq!(QuadExt::sqrt(5).to_string(), "√5");
        assert_eq!(QuadExt::int(3).to_string(), "3");
    }
}
