//! Exact Taylor coefficients of the squared distances at the record point,
//! in the record chart normalization, over the basis `(1, √5)`.
//!
//! Coefficients are indexed by the 18 slots `J_υ` of [`full_index`], so line A
//! carries coefficients too; the pinned chart simply drops its three slots.

use std::collections::BTreeMap;

use nalgebra::DMatrix;

use crate::calculus::{full_index, Angle};
use crate::configuration::{all_pairs, Label, Pair};
use crate::galois::quad::{rat, QuadExt};

pub const SLOTS: usize = 18;

/// Sorted slot indices; one for linear terms, two for quadratic ones.
pub type Monomial = Vec<usize>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoeffTable {
    pub order: usize,
    pub pair: Pair,
    /// Zero coefficients are never stored.
    pub coeffs: BTreeMap<Monomial, QuadExt>,
}

impl CoeffTable {
    fn new(order: usize, pair: Pair) -> Self {
        Self { order, pair, coeffs: BTreeMap::new() }
    }

    pub(crate) fn add(&mut self, mut key: Monomial, c: QuadExt) {
        assert_eq!(key.len(), self.order);
        key.sort_unstable();
        let entry = self.coeffs.entry(key.clone()).or_insert_with(QuadExt::zero);
        *entry = &*entry + &c;
        if entry.is_zero() {
            self.coeffs.remove(&key);
        }
    }

    pub fn get(&self, key: &[usize]) -> QuadExt {
        let mut k = key.to_vec();
        k.sort_unstable();
        self.coeffs.get(&k).cloned().unwrap_or_else(QuadExt::zero)
    }

    /// Order-1 table as an 18-vector.
    pub fn gradient(&self) -> Vec<f64> {
        assert_eq!(self.order, 1);
        let mut g = vec![0.0; SLOTS];
        for (k, c) in &self.coeffs {
            g[k[0]] = c.value();
        }
        g
    }

    /// Order-2 table as the 18×18 Hessian of the quadratic form.
    pub fn hessian(&self) -> DMatrix<f64> {
        assert_eq!(self.order, 2);
        let mut h = DMatrix::zeros(SLOTS, SLOTS);
        for (k, c) in &self.coeffs {
            let (i, j) = (k[0], k[1]);
            if i == j {
                h[(i, i)] = 2.0 * c.value();
            } else {
                h[(i, j)] = c.value();
                h[(j, i)] = c.value();
            }
        }
        h
    }

    /// Every coefficient conjugated.
    pub fn conjugate(&self) -> Self {
        Self {
            order: self.order,
            pair: self.pair,
            coeffs: self.coeffs.iter().map(|(k, c)| (k.clone(), c.conjugate())).collect(),
        }
    }
}

/// `(an + bn√5)/den`
fn q5(an: i64, bn: i64, den: i64) -> QuadExt {
    QuadExt::from_ratios(an, den, bn, den, 5)
}

fn tau() -> QuadExt {
    q5(1, 1, 2)
}

/// `β₁₁ = (8 − 2√5)/11`
fn beta() -> QuadExt {
    q5(8, -2, 11)
}

/// `γ₋₁₉ = −1 − 2√5`
fn gamma() -> QuadExt {
    q5(-1, -2, 1)
}

fn slot(label: Label, angle: Angle) -> usize {
    full_index(label, angle)
}

fn set_line(t: &mut CoeffTable, label: Label, c: [QuadExt; 3]) {
    for (angle, v) in Angle::ALL.into_iter().zip(c) {
        t.add(vec![slot(label, angle)], v);
    }
}

/// Per-line first-order coefficients `(κ, φ, δ)` of the `{AF, CE, BD}` triplet.
fn af_triplet_line() -> [QuadExt; 3] {
    let (b, t) = (beta(), tau());
    [&b * &b * &t * &t, &b * &t * &t * &t, b]
}

/// Per-line first-order coefficients of the `{CF, BE, AD}` triplet.
fn ad_triplet_line() -> [QuadExt; 3] {
    let (b, t) = (beta().conjugate(), tau().conjugate());
    [-(&b * &b * &t * &t), &b * &t * &t * &t, -b]
}

/// First-order coefficients of a six-plet pair `XY` on its two lines.
fn sixplet_lines() -> ([QuadExt; 3], [QuadExt; 3]) {
    let (t, g) = (tau(), gamma());
    let fifth = QuadExt::rational(rat(1, 5));
    let two = QuadExt::int(2);
    let x = [QuadExt::rational(rat(-1, 5)), -(&two * &t.conjugate() * &g * &fifth), &two * &t * &fifth];
    let y = [QuadExt::rational(rat(1, 5)), -(&two * &t * &g.conjugate() * &fifth), -(&two * &t.conjugate() * &fifth)];
    (x, y)
}

/// Per-line first-order coefficients of the `{AE, BF, CD}` triplet.
fn ae_triplet_line() -> [QuadExt; 3] {
    let s = QuadExt::rational(rat(6, 169));
    [&s * &q5(0, 2, 1), &s * &QuadExt::int(5), &s * &q5(0, -1, 1)]
}

/// Exact first differential `[d(pair)²]₁`.
pub fn order1(pair: Pair) -> CoeffTable {
    use Label::*;
    let mut t = CoeffTable::new(1, pair);
    let (p, q) = (pair.0, pair.1);
    match (p, q) {
        (A, F) | (C, E) | (B, D) => {
            set_line(&mut t, p, af_triplet_line());
            set_line(&mut t, q, af_triplet_line());
        }
        (C, F) | (B, E) | (A, D) => {
            set_line(&mut t, p, ad_triplet_line());
            set_line(&mut t, q, ad_triplet_line());
        }
        (A, E) | (B, F) | (C, D) => {
            set_line(&mut t, p, ae_triplet_line());
            set_line(&mut t, q, ae_triplet_line());
        }
        _ => {
            // the X role of each six-plet pair: AB, BC, CA, ED, FE, DF
            let (x_role, y_role) = match (p, q) {
                (A, B) => (A, B),
                (B, C) => (B, C),
                (A, C) => (C, A),
                (D, E) => (E, D),
                (E, F) => (F, E),
                (D, F) => (D, F),
                _ => unreachable!("every pair is in one class"),
            };
            let (x, y) = sixplet_lines();
            set_line(&mut t, x_role, x);
            set_line(&mut t, y_role, y);
        }
    }
    t
}

/// All fifteen first differentials, in lexicographic pair order.
pub fn order1_tables() -> Vec<CoeffTable> {
    all_pairs().into_iter().map(order1).collect()
}

/// Builder for quadratic forms written in terms of sums of slots.
struct Quadratic {
    table: CoeffTable,
}

type Linear = Vec<(usize, i64)>;

impl Quadratic {
    fn new(pair: Pair) -> Self {
        Self { table: CoeffTable::new(2, pair) }
    }

    /// Add `c · u · v`.
    fn product(&mut self, c: &QuadExt, u: &Linear, v: &Linear) -> &mut Self {
        for &(i, a) in u {
            for &(j, b) in v {
                self.table.add(vec![i, j], c * &QuadExt::int(a * b));
            }
        }
        self
    }

    fn square(&mut self, c: &QuadExt, u: &Linear) -> &mut Self {
        self.product(c, u, u)
    }

    fn scaled(&mut self, s: &QuadExt) -> CoeffTable {
        let mut out = CoeffTable::new(2, self.table.pair);
        for (k, c) in &self.table.coeffs {
            out.add(k.clone(), c * s);
        }
        out
    }
}

fn v(label: Label, angle: Angle) -> Linear {
    vec![(slot(label, angle), 1)]
}

fn sum(a: Label, b: Label, angle: Angle) -> Linear {
    vec![(slot(a, angle), 1), (slot(b, angle), 1)]
}

fn diff(a: Label, b: Label, angle: Angle) -> Linear {
    vec![(slot(a, angle), 1), (slot(b, angle), -1)]
}

fn neg(c: QuadExt) -> QuadExt {
    -c
}

/// Second differential of an `{AF, CE, BD}`-type pair given its nine
/// coefficients, or of its Galois partner when the lines are `(C, F)`.
fn triplet_order2(pair: Pair, u: Label, w: Label, c: [QuadExt; 9]) -> CoeffTable {
    use Angle::*;
    let mut q = Quadratic::new(pair);
    let [kk, dd, pp, pwpw, dwdw, kd, pd, dp, kp] = c;
    q.square(&kk, &sum(u, w, Kappa))
        .square(&dd, &v(u, Delta))
        .square(&dd, &v(w, Delta))
        .square(&pp, &v(u, Phi))
        .square(&pp, &v(w, Phi))
        .product(&pwpw, &v(u, Phi), &v(w, Phi))
        .product(&dwdw, &v(u, Delta), &v(w, Delta))
        .product(&kd, &sum(u, w, Kappa), &sum(u, w, Delta))
        .product(&pd, &v(u, Phi), &v(u, Delta))
        .product(&pd, &v(w, Phi), &v(w, Delta))
        .product(&dp, &v(u, Delta), &v(w, Phi))
        .product(&dp, &v(u, Phi), &v(w, Delta))
        .product(&kp, &sum(u, w, Kappa), &sum(u, w, Phi));
    q.table
}

/// `[d(BD)²]₂`.
pub fn order2_bd() -> CoeffTable {
    use Label::*;
    triplet_order2(
        Pair(B, D),
        B,
        D,
        [
            q5(2957, -1017, 127776),
            neg(q5(651, 236, 792)),
            q5(-97, 60, 528),
            q5(265, -3, 132),
            q5(219, 124, 198),
            q5(29, -109, 2904),
            q5(5, -48, 132),
            q5(181, 29, 132),
            q5(90, -17, 726),
        ],
    )
}

/// `[d(CF)²]₂`.
pub fn order2_cf() -> CoeffTable {
    use Label::*;
    triplet_order2(
        Pair(C, F),
        C,
        F,
        [
            q5(2957, 1017, 127776),
            neg(q5(651, -236, 792)),
            neg(q5(97, 60, 528)),
            q5(265, 3, 132),
            q5(219, -124, 198),
            q5(29, 109, 2904),
            neg(q5(5, 48, 132)),
            neg(q5(181, -29, 132)),
            neg(q5(90, 17, 726)),
        ],
    )
}

/// `[d(BC)²]₂`.
pub fn order2_bc() -> CoeffTable {
    use Angle::*;
    use Label::*;
    let dk = diff(B, C, Kappa);
    let t = tau();
    let mut q = Quadratic::new(Pair(B, C));
    q.square(&QuadExt::rational(rat(1, 32)), &dk)
        .square(&q5(133, 9, 16), &v(B, Phi))
        .square(&q5(133, -9, 16), &v(C, Phi))
        .product(&q5(27, -2, 8), &v(B, Phi), &dk)
        .product(&q5(27, 2, 8), &v(C, Phi), &dk)
        .product(&QuadExt::rational(rat(109, 4)), &v(B, Phi), &v(C, Phi))
        .product(&q5(19, 5, 4), &v(B, Delta), &v(C, Phi))
        .product(&neg(q5(19, -5, 4)), &v(B, Phi), &v(C, Delta))
        .product(&QuadExt::rational(rat(-53, 3)), &v(B, Delta), &v(C, Delta))
        .square(&neg(q5(103, 39, 24)), &v(B, Delta))
        .square(&neg(q5(103, -39, 24)), &v(C, Delta))
        .product(&neg(q5(43, 4, 2)), &v(B, Phi), &v(B, Delta))
        .product(&q5(43, -4, 2), &v(C, Phi), &v(C, Delta))
        .product(&(&QuadExt::rational(rat(7, 4)) * &t.conjugate()), &v(B, Delta), &dk)
        .product(&neg(&QuadExt::rational(rat(7, 4)) * &t), &v(C, Delta), &dk);
    q.scaled(&QuadExt::rational(rat(11, 150)))
}

/// `[d(BF)²]₂`.
pub fn order2_bf() -> CoeffTable {
    use Angle::*;
    use Label::*;
    let int = |n: i64| QuadExt::int(n);
    let r5 = |n: i64| q5(0, n, 1);
    let mut q = Quadratic::new(Pair(B, F));
    q.square(&int(209), &sum(B, F, Kappa))
        .product(&r5(560), &sum(B, F, Kappa), &sum(B, F, Phi))
        .square(&int(57445), &v(B, Phi))
        .square(&int(57445), &v(F, Phi))
        .product(&int(-115600), &v(B, Phi), &v(F, Phi))
        .product(&int(-404), &sum(B, F, Kappa), &sum(B, F, Delta))
        .product(&r5(5492), &v(B, Phi), &v(B, Delta))
        .product(&r5(5492), &v(F, Phi), &v(F, Delta))
        .product(&r5(-6208), &v(B, Phi), &v(F, Delta))
        .product(&r5(-6208), &v(B, Delta), &v(F, Phi))
        .square(&int(1466), &v(B, Delta))
        .square(&int(1466), &v(F, Delta))
        .product(&int(-968), &v(B, Delta), &v(F, Delta));
    q.scaled(&QuadExt::rational(rat(-11, 105456)))
}

/// The four exact second differentials: BD, CF, BC, BF.
pub fn order2_tables() -> Vec<CoeffTable> {
    vec![order2_bd(), order2_cf(), order2_bc(), order2_bf()]
}

/// Tables of the requested order.
pub fn tables(order: usize) -> Vec<CoeffTable> {
    match order {
        1 => order1_tables(),
        2 => order2_tables(),
        _ => Vec::new(),
    }
}

/// The exact second-order form on `E` at the record point in the coordinates
/// `w = (E_κ, −E_φ, B_δ, C_δ)`, for λ with six-plet weights 10.
pub fn phi_matrix() -> [[QuadExt; 4]; 4] {
    let mu1 = q5(2865, 1438, 1);
    let mu2 = q5(3530, 939, 1);
    let mu3 = q5(5335, 1878, 1);
    let r = |n: i64, d: i64| QuadExt::rational(rat(n, d));
    let m12 = q5(0, 5663, 60);
    let m13 = &r(-1, 30) * &mu1.conjugate();
    let m14 = &r(-1, 30) * &mu1;
    let m23 = &r(-7, 15) * &mu2.conjugate();
    let m24 = &r(7, 15) * &mu2;
    let m34 = QuadExt::int(700);
    let raw = [
        [r(-919, 24), m12.clone(), m13.clone(), m14.clone()],
        [m12, r(-18683, 6), m23.clone(), m24.clone()],
        [m13, m23, &r(-4, 15) * &mu3.conjugate(), m34.clone()],
        [m14, m24, m34, &r(-4, 15) * &mu3],
    ];
    let s = r(11, 9);
    raw.map(|row| row.map(|c| &s * &c))
}

pub fn phi_matrix_f64(m: &[[QuadExt; 4]; 4]) -> DMatrix<f64> {
    DMatrix::from_fn(4, 4, |i, j| m[i][j].value())
}

/// Eigenvalues of the exact form, from a 50-digit computation, ascending.
pub const PHI_EIGENVALUES: [f64; 4] =
    [-6_917.624_257_670_621, -290.400_957_670_306_1, -119.007_903_903_526_82, -3.193_732_607_397_924_7];

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn af_differential_matches_beta_pattern() {
        let t = order1(Pair(Label::A, Label::F));
        let g = t.gradient();
        let f = slot(Label::F, Angle::Kappa);
        assert!((g[f] - 0.269_285_885_413_233_6).abs() < 1e-15);
        assert!((g[f + 1] - 1.358_570_173_636_287).abs() < 1e-14);
        assert!((g[f + 2] - 0.320_714_913_181_856_4).abs() < 1e-15);
        assert!(t.coeffs.keys().all(|k| k[0] < 3 || k[0] >= 15));
    }

    #[test]
    fn bc_leading_coefficient() {
        let t = order2_bc();
        let bk = slot(Label::B, Angle::Kappa);
        assert_eq!(t.get(&[bk, bk]), QuadExt::rational(rat(11, 150 * 32)));
    }

    #[test]
    fn phi_is_symmetric() {
        let m = phi_matrix();
        for (i, row) in m.iter().enumerate() {
            for (j, entry) in row.iter().enumerate() {
                assert_eq!(entry, &m[j][i]);
            }
        }
        assert!((m[0][0].value() + 46.800_925_925_9).abs() < 1e-9);
    }
}
