//! Recognition of `a + b√d` from a floating-point value by lattice reduction.

use num::{BigInt, BigRational, Signed, ToPrimitive};

use crate::galois::quad::QuadExt;

/// Accepted size of the integer relation residual.
pub const RESIDUAL_TOLERANCE: f64 = 1e-9;
/// Stricter bound on the recomputed distance between candidate and value.
pub const CONFIRMATION_TOLERANCE: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq)]
pub struct Reconstruction {
    pub value: QuadExt,
    /// `|p + q√d + r·v| / |r|` for the integer relation found.
    pub residual: f64,
    /// `|a + b√d − v|` recomputed from the exact candidate.
    pub confirmation: f64,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn gram_schmidt(b: &[Vec<f64>]) -> (Vec<f64>, Vec<Vec<f64>>) {
    let n = b.len();
    let mut star: Vec<Vec<f64>> = Vec::with_capacity(n);
    let mut norms = vec![0.0; n];
    let mut mu = vec![vec![0.0; n]; n];
    for i in 0..n {
        let mut v = b[i].clone();
        for j in 0..i {
            mu[i][j] = dot(&b[i], &star[j]) / norms[j];
            for (vk, sk) in v.iter_mut().zip(&star[j]) {
                *vk -= mu[i][j] * sk;
            }
        }
        norms[i] = dot(&v, &v);
        star.push(v);
    }
    (norms, mu)
}

/// Lenstra–Lenstra–Lovász reduction of the rows of `b` with `δ = 3/4`.
pub fn lll(b: &mut [Vec<f64>]) {
    let n = b.len();
    let mut k = 1;
    let mut guard = 0;
    while k < n && guard < 10_000 {
        guard += 1;
        for j in (0..k).rev() {
            let (_, mu) = gram_schmidt(b);
            let q = mu[k][j].round();
            if q != 0.0 {
                let row = b[j].clone();
                for (x, y) in b[k].iter_mut().zip(&row) {
                    *x -= q * y;
                }
            }
        }
        let (norms, mu) = gram_schmidt(b);
        if norms[k] >= (0.75 - mu[k][k - 1] * mu[k][k - 1]) * norms[k - 1] {
            k += 1;
        } else {
            b.swap(k, k - 1);
            k = (k - 1).max(1);
        }
    }
}

fn ratio(n: f64, r: f64) -> Option<BigRational> {
    Some(BigRational::new(BigInt::from(n.round().to_i64()?), BigInt::from(r.round().to_i64()?)))
}

/// Find rationals `a`, `b` with denominators at most `max_den` and
/// `a + b√d ≈ value`. `d` must be square-free; `d = 1` searches ℚ. Among
/// the relations found over a range of lattice weights the one closest to
/// `value` wins.
pub fn reconstruct(value: f64, d: u64, max_den: u64) -> Option<Reconstruction> {
    if !value.is_finite() || d == 0 {
        return None;
    }
    let root = (d as f64).sqrt();
    let mut best: Option<Reconstruction> = None;
    for exp in 6..=13 {
        let w = 10f64.powi(exp);
        let mut basis: Vec<Vec<f64>> = if d == 1 {
            vec![vec![1.0, 0.0, w], vec![0.0, 1.0, w * value]]
        } else {
            vec![vec![1.0, 0.0, 0.0, w], vec![0.0, 1.0, 0.0, w * root], vec![0.0, 0.0, 1.0, w * value]]
        };
        lll(&mut basis);
        for row in &basis {
            let (p, q, r) = if d == 1 { (row[0], 0.0, row[1]) } else { (row[0], row[1], row[2]) };
            if r.round() == 0.0 {
                continue;
            }
            let (Some(a), Some(b)) = (ratio(-p, r), ratio(-q, r)) else { continue };
            let den_ok = |x: &BigRational| x.denom().to_u64().is_some_and(|v| v <= max_den);
            if !den_ok(&a) || !den_ok(&b) {
                continue;
            }
            let residual = (row[row.len() - 1] / w).abs() / r.abs();
            let cand = QuadExt::new(a, b, d);
            let confirmation = (cand.value() - value).abs();
            if residual < RESIDUAL_TOLERANCE && confirmation < CONFIRMATION_TOLERANCE {
                let better = best
                    .as_ref()
                    .is_none_or(|old| (confirmation, height(&cand)) < (old.confirmation, height(&old.value)));
                if better {
                    best = Some(Reconstruction { value: cand, residual, confirmation });
                }
            }
        }
    }
    best
}

fn height(x: &QuadExt) -> BigInt {
    [x.a(), x.b()].iter().map(|c| c.numer().abs().max(c.denom().clone())).max().unwrap()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::galois::quad::rat;

    #[test]
    fn golden_constants() {
        let beta = (8.0 - 2.0 * 5f64.sqrt()) / 11.0;
        let r = reconstruct(beta, 5, 100).unwrap();
        assert_eq!(r.value, QuadExt::from_ratios(8, 11, -2, 11, 5));
        assert!(r.residual < 1e-9 && r.confirmation < 1e-10);
    }

    #[test]
    fn rational_inputs() {
        assert_eq!(reconstruct(12.0 / 11.0, 5, 100).unwrap().value, QuadExt::rational(rat(12, 11)));
        assert_eq!(reconstruct(0.8, 1, 100).unwrap().value, QuadExt::rational(rat(4, 5)));
    }

    #[test]
    fn larger_denominators() {
        let v = -(4000.0 + 1800.0 * 2f64.sqrt()) / 2601.0;
        assert_eq!(reconstruct(v, 2, 10_000).unwrap().value, QuadExt::from_ratios(-4000, 2601, -1800, 2601, 2));
    }

    #[test]
    fn rejects_when_denominators_too_small() {
        assert!(reconstruct(std::f64::consts::PI, 5, 100).is_none());
        assert!(reconstruct(f64::NAN, 5, 100).is_none());
    }
}
