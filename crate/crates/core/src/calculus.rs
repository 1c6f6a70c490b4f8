//! The 15-coordinate perturbation chart around a curve point and numerical
//! differentiation of functions on it.
//!
//! Line A is held fixed, which removes the rotational freedom. Every other
//! line `J` is displaced in its own family parameters:
//! `J(κ + θ_κ c_Jκ, φ + θ_φ c_Jφ, δ + θ_δ c_Jδ)`. Coordinates are ordered
//! `B_κ, B_φ, B_δ, C_κ, …, F_δ`.

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;

use crate::configuration::{curve_point, family_line, Configuration, CurvePoint, Label, Pair};
use crate::error::{Error, Result};
use crate::geometry::{distance_sq, TangentLine};

pub const CHART_DIM: usize = 15;

/// Gradient base step; one Richardson level uses `h` and `h/2`.
pub const GRADIENT_STEP: f64 = 1e-4;
/// Hessian base step; one Richardson level uses `h` and `h/2`.
pub const HESSIAN_STEP: f64 = 2e-3;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Angle {
    Kappa,
    Phi,
    Delta,
}

impl Angle {
    pub const ALL: [Angle; 3] = [Angle::Kappa, Angle::Phi, Angle::Delta];

    pub fn symbol(self) -> &'static str {
        match self {
            Angle::Kappa => "k",
            Angle::Phi => "p",
            Angle::Delta => "d",
        }
    }
}

/// Index of `J_υ` in the 15-coordinate chart. `None` for the pinned line A.
pub fn chart_index(label: Label, angle: Angle) -> Option<usize> {
    (label != Label::A).then(|| 3 * (label.index() - 1) + angle as usize)
}

/// Index of `J_υ` in the 18-coordinate space where A moves too.
pub fn full_index(label: Label, angle: Angle) -> usize {
    3 * label.index() + angle as usize
}

/// Coordinate label such as `"Bk"` for `B_κ`.
pub fn coordinate_name(index: usize) -> String {
    let label = Label::from_index(index / 3 + 1);
    format!("{label}{}", Angle::ALL[index % 3].symbol())
}

/// Scale factors turning chart coordinates into angle increments.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ChartNorms {
    pub kappa: f64,
    pub phi: f64,
    pub delta: f64,
}

impl ChartNorms {
    /// The normalization at the record point, under which the Taylor
    /// coefficients of the squared distances lie in ℚ[√5].
    pub fn record() -> Self {
        let (s3, s6, s11) = (3f64.sqrt(), 6f64.sqrt(), 11f64.sqrt());
        Self { kappa: 11.0 / (32.0 * s3), phi: 11.0 / (4.0 * s6), delta: 11.0 * s11 / 48.0 }
    }

    /// Normalization for a general curve point `0 < x < 1`: `θ_δ = p_x²/q_x`
    /// and unit scales for the other two angles.
    pub fn generic(x: f64) -> Result<Self> {
        if !(x > 0.0 && x < 1.0) {
            return Err(Error::ParameterOutOfRange(x.to_string()));
        }
        let p_sq = (1.0 + x) * (1.0 + 3.0 * x) / 3.0;
        let q = ((1.0 + x) / (3.0 * x * (1.0 - x) * (1.0 + 7.0 * x + 4.0 * x * x))).sqrt();
        Ok(Self { kappa: 1.0, phi: 1.0, delta: p_sq / q })
    }

    pub fn unit() -> Self {
        Self { kappa: 1.0, phi: 1.0, delta: 1.0 }
    }

    fn scale(&self, angle: Angle) -> f64 {
        match angle {
            Angle::Kappa => self.kappa,
            Angle::Phi => self.phi,
            Angle::Delta => self.delta,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PerturbationChart {
    pub base: CurvePoint,
    pub norms: ChartNorms,
}

impl PerturbationChart {
    pub fn new(base: CurvePoint, norms: ChartNorms) -> Self {
        Self { base, norms }
    }

    /// Chart at the record point with the record normalization.
    pub fn record() -> Self {
        Self::new(curve_point(0.5).expect("1/2 is on the curve"), ChartNorms::record())
    }

    /// Chart at curve parameter `x`: the record normalization at 1/2, the
    /// generic one elsewhere.
    pub fn at(x: f64) -> Result<Self> {
        let base = curve_point(x)?;
        let norms = if x == 0.5 { ChartNorms::record() } else { ChartNorms::generic(x)? };
        Ok(Self::new(base, norms))
    }

    /// Line `label` displaced by `(c_κ, c_φ, c_δ)` chart units.
    pub fn line(&self, label: Label, offsets: [f64; 3]) -> TangentLine {
        let b = &self.base;
        family_line(
            label,
            b.phi + self.norms.scale(Angle::Phi) * offsets[1],
            b.kappa + self.norms.scale(Angle::Kappa) * offsets[0],
            b.delta + self.norms.scale(Angle::Delta) * offsets[2],
        )
    }

    fn chart_offsets(label: Label, coords: &[f64]) -> [f64; 3] {
        match label {
            Label::A => [0.0; 3],
            _ => {
                let i = 3 * (label.index() - 1);
                [coords[i], coords[i + 1], coords[i + 2]]
            }
        }
    }

    pub fn embed(&self, coords: &[f64]) -> Configuration {
        assert_eq!(coords.len(), CHART_DIM);
        Configuration { lines: Label::ALL.map(|l| self.line(l, Self::chart_offsets(l, coords))) }
    }

    /// Embedding with 18 coordinates in which line A is displaced as well.
    pub fn embed_full(&self, coords: &[f64]) -> Configuration {
        assert_eq!(coords.len(), 18);
        Configuration {
            lines: Label::ALL.map(|l| {
                let i = 3 * l.index();
                self.line(l, [coords[i], coords[i + 1], coords[i + 2]])
            }),
        }
    }

    pub fn pair_distance_sq(&self, pair: Pair, coords: &[f64]) -> f64 {
        let u = self.line(pair.0, Self::chart_offsets(pair.0, coords));
        let v = self.line(pair.1, Self::chart_offsets(pair.1, coords));
        distance_sq(&u, &v)
    }

    pub fn pair_map(&self, pair: Pair) -> PairMap {
        PairMap::new(*self, pair)
    }
}

/// A real function on a chart.
pub trait ChartFunction: Send + Sync {
    fn dim(&self) -> usize;
    fn eval(&self, x: &[f64]) -> f64;
}

/// `F_pair(c) = d²(pair at embed(c)) − d²(pair at base)`.
#[derive(Clone, Copy, Debug)]
pub struct PairMap {
    pub chart: PerturbationChart,
    pub pair: Pair,
    base_value: f64,
}

impl PairMap {
    pub fn new(chart: PerturbationChart, pair: Pair) -> Self {
        let base_value = chart.pair_distance_sq(pair, &[0.0; CHART_DIM]);
        Self { chart, pair, base_value }
    }

    pub fn base_value(&self) -> f64 {
        self.base_value
    }
}

impl ChartFunction for PairMap {
    fn dim(&self) -> usize {
        CHART_DIM
    }

    fn eval(&self, x: &[f64]) -> f64 {
        self.chart.pair_distance_sq(self.pair, x) - self.base_value
    }
}

/// Squared-distance observable on the 18-coordinate space (A free).
#[derive(Clone, Copy, Debug)]
pub struct FullPairMap {
    pub chart: PerturbationChart,
    pub pair: Pair,
    base_value: f64,
}

impl FullPairMap {
    pub fn new(chart: PerturbationChart, pair: Pair) -> Self {
        let base_value = chart.pair_distance_sq(pair, &[0.0; CHART_DIM]);
        Self { chart, pair, base_value }
    }
}

impl ChartFunction for FullPairMap {
    fn dim(&self) -> usize {
        18
    }

    fn eval(&self, x: &[f64]) -> f64 {
        let off = |l: Label| {
            let i = 3 * l.index();
            [x[i], x[i + 1], x[i + 2]]
        };
        let u = self.chart.line(self.pair.0, off(self.pair.0));
        let v = self.chart.line(self.pair.1, off(self.pair.1));
        distance_sq(&u, &v) - self.base_value
    }
}

/// Adapter for closures.
pub struct FnMap<F> {
    dim: usize,
    f: F,
}

impl<F: Fn(&[f64]) -> f64 + Send + Sync> FnMap<F> {
    pub fn new(dim: usize, f: F) -> Self {
        Self { dim, f }
    }
}

impl<F: Fn(&[f64]) -> f64 + Send + Sync> ChartFunction for FnMap<F> {
    fn dim(&self) -> usize {
        self.dim
    }

    fn eval(&self, x: &[f64]) -> f64 {
        (self.f)(x)
    }
}

fn probe(map: &dyn ChartFunction, at: &[f64], shifts: &[(usize, f64)], id: usize) -> Result<f64> {
    let mut x = at.to_vec();
    for &(i, s) in shifts {
        x[i] += s;
    }
    let v = map.eval(&x);
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::NonfiniteEvaluation(id))
    }
}

fn check_dim(map: &dyn ChartFunction, at: &[f64]) -> Result<()> {
    if map.dim() != at.len() {
        return Err(Error::Dimension(format!("map has dimension {}, point has {}", map.dim(), at.len())));
    }
    Ok(())
}

/// Central-difference gradient with one Richardson level.
pub fn gradient(map: &dyn ChartFunction, at: &[f64]) -> Result<DVector<f64>> {
    gradient_with_step(map, at, GRADIENT_STEP)
}

pub fn gradient_with_step(map: &dyn ChartFunction, at: &[f64], h: f64) -> Result<DVector<f64>> {
    check_dim(map, at)?;
    let n = at.len();
    let mut g = DVector::zeros(n);
    for i in 0..n {
        let central = |step: f64| -> Result<f64> {
            let fp = probe(map, at, &[(i, step)], i)?;
            let fm = probe(map, at, &[(i, -step)], i)?;
            Ok((fp - fm) / (2.0 * step))
        };
        let coarse = central(h)?;
        let fine = central(h / 2.0)?;
        g[i] = (4.0 * fine - coarse) / 3.0;
    }
    Ok(g)
}

fn second_difference(map: &dyn ChartFunction, at: &[f64], i: usize, j: usize, h: f64) -> Result<f64> {
    let id = i * at.len() + j;
    if i == j {
        let fp = probe(map, at, &[(i, h)], id)?;
        let f0 = probe(map, at, &[], id)?;
        let fm = probe(map, at, &[(i, -h)], id)?;
        Ok((fp - 2.0 * f0 + fm) / (h * h))
    } else {
        let fpp = probe(map, at, &[(i, h), (j, h)], id)?;
        let fpm = probe(map, at, &[(i, h), (j, -h)], id)?;
        let fmp = probe(map, at, &[(i, -h), (j, h)], id)?;
        let fmm = probe(map, at, &[(i, -h), (j, -h)], id)?;
        Ok((fpp - fpm - fmp + fmm) / (4.0 * h * h))
    }
}

/// Symmetric central-difference Hessian with one Richardson level.
pub fn hessian(map: &dyn ChartFunction, at: &[f64]) -> Result<DMatrix<f64>> {
    hessian_with_step(map, at, HESSIAN_STEP)
}

pub fn hessian_with_step(map: &dyn ChartFunction, at: &[f64], h: f64) -> Result<DMatrix<f64>> {
    hessian_richardson(map, at, h, 1)
}

/// Hessian from second differences at `h, h/2, …, h/2^levels`, combined by
/// `levels` rounds of Richardson extrapolation. Entries are computed
/// independently, so the result does not depend on scheduling.
pub fn hessian_richardson(map: &dyn ChartFunction, at: &[f64], h: f64, levels: usize) -> Result<DMatrix<f64>> {
    check_dim(map, at)?;
    let n = at.len();
    let upper: Vec<(usize, usize)> = (0..n).flat_map(|i| (i..n).map(move |j| (i, j))).collect();
    let values = upper
        .par_iter()
        .map(|&(i, j)| {
            let mut table = (0..=levels)
                .map(|k| second_difference(map, at, i, j, h / f64::powi(2.0, k as i32)))
                .collect::<Result<Vec<f64>>>()?;
            richardson(&mut table);
            Ok(table[0])
        })
        .collect::<Result<Vec<f64>>>()?;
    let mut m = DMatrix::zeros(n, n);
    for (&(i, j), v) in upper.iter().zip(values) {
        m[(i, j)] = v;
        m[(j, i)] = v;
    }
    Ok(m)
}

/// In-place Richardson tableau for an even-order error expansion on a
/// halving step sequence; the extrapolated value ends up in `table[0]`.
pub fn richardson(table: &mut [f64]) {
    let n = table.len();
    for level in 1..n {
        let factor = f64::powi(4.0, level as i32);
        for k in 0..n - level {
            table[k] = (factor * table[k + 1] - table[k]) / (factor - 1.0);
        }
    }
}

/// Pointwise minimum of several chart functions.
pub struct MinOfMaps<'a> {
    pub maps: &'a [Box<dyn ChartFunction>],
}

impl ChartFunction for MinOfMaps<'_> {
    fn dim(&self) -> usize {
        self.maps.first().map_or(0, |m| m.dim())
    }

    fn eval(&self, x: &[f64]) -> f64 {
        self.maps.iter().map(|m| m.eval(x)).fold(f64::INFINITY, f64::min)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
pub enum DecayOrder {
    Linear,
    Quadratic,
    Other,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DecayProfile {
    pub slope: f64,
    pub intercept: f64,
    /// RMS residual of the log-log fit.
    pub residual: f64,
    pub order: DecayOrder,
    /// Whether the function decreased at every grid point.
    pub decreasing: bool,
}

/// Slope tolerance around 1 and 2 when classifying a decay.
pub const SLOPE_TOLERANCE: f64 = 0.1;
/// RMS residual of the log-log fit above which the profile is inconclusive.
pub const FIT_RESIDUAL_LIMIT: f64 = 0.05;

/// A decreasing geometric grid `t₀, t₀/2, …` with `len` entries.
pub fn halving_grid(start: f64, len: usize) -> Vec<f64> {
    (0..len).map(|k| start / f64::powi(2.0, k as i32)).collect()
}

/// Fit `log|f(t·dir) − f(0)|` against `log t` and classify the decay order.
pub fn directional_profile(map: &dyn ChartFunction, direction: &[f64], t_grid: &[f64]) -> Result<DecayProfile> {
    check_dim(map, direction)?;
    if direction.iter().all(|&v| v == 0.0) {
        return Err(Error::InvalidGrid("direction is zero"));
    }
    if t_grid.len() < 2 {
        return Err(Error::InvalidGrid("need at least two grid points"));
    }
    if t_grid.iter().any(|&t| !(t > 0.0 && t.is_finite())) {
        return Err(Error::InvalidGrid("grid values must be positive"));
    }
    if t_grid.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::InvalidGrid("grid must be strictly decreasing"));
    }
    let origin = vec![0.0; direction.len()];
    let f0 = map.eval(&origin);
    let mut decreasing = true;
    let mut pts = Vec::with_capacity(t_grid.len());
    for (k, &t) in t_grid.iter().enumerate() {
        let x: Vec<f64> = direction.iter().map(|d| d * t).collect();
        let delta = map.eval(&x) - f0;
        if !delta.is_finite() || delta == 0.0 {
            return Err(Error::NonfiniteEvaluation(k));
        }
        decreasing &= delta < 0.0;
        pts.push((t.ln(), delta.abs().ln()));
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let residual = (pts.iter().map(|p| (p.1 - intercept - slope * p.0).powi(2)).sum::<f64>() / n).sqrt();
    if residual > FIT_RESIDUAL_LIMIT {
        return Err(Error::Inconclusive { slope, residual });
    }
    let order = if (slope - 1.0).abs() <= SLOPE_TOLERANCE {
        DecayOrder::Linear
    } else if (slope - 2.0).abs() <= SLOPE_TOLERANCE {
        DecayOrder::Quadratic
    } else {
        DecayOrder::Other
    };
    Ok(DecayProfile { slope, intercept, residual, order, decreasing })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::configuration::pairwise;

    #[test]
    fn embed_zero_is_base_bit_for_bit() {
        for chart in [PerturbationChart::record(), PerturbationChart::at(0.3).unwrap()] {
            let base = chart.base.configuration();
            let emb = chart.embed(&[0.0; CHART_DIM]);
            assert_eq!(base, emb);
            assert_eq!(pairwise(&base), pairwise(&emb));
        }
    }

    #[test]
    fn pair_map_vanishes_at_origin() {
        let chart = PerturbationChart::record();
        for pair in crate::configuration::all_pairs() {
            assert_eq!(chart.pair_map(pair).eval(&[0.0; CHART_DIM]), 0.0);
        }
    }

    #[test]
    fn record_norms() {
        let n = ChartNorms::record();
        assert!((n.kappa - 0.198_464_155_033_934).abs() < 1e-12);
        assert!((n.phi - 1.122_682_798_775_623).abs() < 1e-12);
        assert!((n.delta - 0.760_059_847_789_779).abs() < 1e-12);
    }

    #[test]
    fn quadratic_map_hessian_is_exact() {
        let v = [0.3, -1.2, 0.7, 2.0];
        let c = 1.7;
        let f = FnMap::new(4, move |x: &[f64]| {
            let dot: f64 = x.iter().zip(v).map(|(a, b)| a * b).sum();
            c * dot * dot
        });
        let h = hessian(&f, &[0.1, 0.2, -0.3, 0.05]).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                assert!((h[(i, j)] - 2.0 * c * v[i] * v[j]).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn richardson_cancels_even_terms() {
        let f = |h: f64| 1.0 + 3.0 * h * h - 5.0 * h.powi(4);
        let mut t = [f(0.1), f(0.05), f(0.025)];
        richardson(&mut t);
        assert!((t[0] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn constant_map_has_zero_gradient() {
        let f = FnMap::new(3, |_: &[f64]| 4.2);
        let g = gradient(&f, &[1.0, 2.0, 3.0]).unwrap();
        assert!(g.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn nonfinite_probe_is_reported() {
        let f = FnMap::new(1, |x: &[f64]| if x[0] > 0.0 { f64::NAN } else { 0.0 });
        assert!(matches!(gradient(&f, &[0.0]), Err(Error::NonfiniteEvaluation(_))));
    }

    #[test]
    fn profile_rejects_bad_grids() {
        let f = FnMap::new(2, |x: &[f64]| -x[0].abs());
        assert!(directional_profile(&f, &[1.0, 0.0], &[]).is_err());
        assert!(directional_profile(&f, &[1.0, 0.0], &[1e-3, 2e-3]).is_err());
        assert!(directional_profile(&f, &[0.0, 0.0], &[1e-3, 1e-4]).is_err());
        let p = directional_profile(&f, &[1.0, 0.0], &halving_grid(1e-2, 6)).unwrap();
        assert_eq!(p.order, DecayOrder::Linear);
        assert!(p.decreasing);
    }

    #[test]
    fn coordinate_names() {
        assert_eq!(coordinate_name(0), "Bk");
        assert_eq!(coordinate_name(14), "Fd");
        assert_eq!(chart_index(Label::E, Angle::Phi), Some(10));
        assert_eq!(chart_index(Label::A, Angle::Phi), None);
    }
}
