//! Sufficient conditions for a sharp local maximum of `min(F₁, …, F_m)`.
//!
//! (A) the differentials `l_u = ∇F_u(0)` span an `(m−1)`-dimensional space
//! and their unique linear dependency `Σ λ_u l_u = 0` has all `λ_u > 0`;
//! (B) the form `Σ λ_u ∇²F_u(0)` is negative definite on the common null
//! space `E` of the differentials.

use std::fmt;

use nalgebra::{DMatrix, DVector, SymmetricEigen, SVD};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::calculus::{
    chart_index, gradient, hessian, hessian_richardson, Angle, ChartFunction, FnMap, MinOfMaps, PerturbationChart,
    CHART_DIM,
};
use crate::configuration::{common_distance_sq, min_distance, relevant_pairs, Label};
use crate::error::{Error, Result};

/// Relative singular-value threshold for the numerical rank.
pub const RANK_TOLERANCE: f64 = 1e-8;
/// Maximal spread of the map values at the certified point.
pub const LOCUS_TOLERANCE: f64 = 1e-10;

pub struct MinProblem {
    pub labels: Vec<String>,
    pub maps: Vec<Box<dyn ChartFunction>>,
    /// Value of each `F_u` before the common offset is removed. The point is
    /// on the equal-value locus when these agree.
    pub levels: Vec<f64>,
}

impl MinProblem {
    pub fn new(labels: Vec<String>, maps: Vec<Box<dyn ChartFunction>>, levels: Vec<f64>) -> Result<Self> {
        let dim = maps.first().map(|m| m.dim()).unwrap_or(0);
        if maps.is_empty() || labels.len() != maps.len() || levels.len() != maps.len() {
            return Err(Error::Dimension("labels, maps and levels must have one entry each".into()));
        }
        if maps.iter().any(|m| m.dim() != dim) {
            return Err(Error::Dimension("maps live on different charts".into()));
        }
        Ok(Self { labels, maps, levels })
    }

    /// The twelve relevant squared-distance maps on `chart`.
    pub fn relevant(chart: &PerturbationChart) -> Self {
        let pairs = relevant_pairs();
        let maps: Vec<_> = pairs.iter().map(|&p| chart.pair_map(p)).collect();
        Self {
            labels: pairs.iter().map(|p| p.to_string()).collect(),
            levels: maps.iter().map(|m| m.base_value()).collect(),
            maps: maps.into_iter().map(|m| Box::new(m) as Box<dyn ChartFunction>).collect(),
        }
    }

    pub fn record() -> Self {
        Self::relevant(&PerturbationChart::record())
    }

    /// `u₁ = −y + 3x²`, `u₂ = y − x²` in coordinates `(x, y)`.
    pub fn toy() -> Self {
        Self {
            labels: vec!["u1".into(), "u2".into()],
            maps: vec![
                Box::new(FnMap::new(2, |v: &[f64]| -v[1] + 3.0 * v[0] * v[0])),
                Box::new(FnMap::new(2, |v: &[f64]| v[1] - v[0] * v[0])),
            ],
            levels: vec![0.0, 0.0],
        }
    }

    /// Every map multiplied by `factor`.
    pub fn scaled(self, factor: f64) -> Self {
        Self {
            labels: self.labels,
            levels: self.levels.iter().map(|l| l * factor).collect(),
            maps: self
                .maps
                .into_iter()
                .map(|m| Box::new(FnMap::new(m.dim(), move |x: &[f64]| factor * m.eval(x))) as Box<dyn ChartFunction>)
                .collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.maps[0].dim()
    }

    pub fn len(&self) -> usize {
        self.maps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.maps.is_empty()
    }

    pub fn min_map(&self) -> MinOfMaps<'_> {
        MinOfMaps { maps: &self.maps }
    }

    pub fn gradients(&self, at: &[f64]) -> Result<DMatrix<f64>> {
        let mut g = DMatrix::zeros(self.len(), self.dim());
        for (u, map) in self.maps.iter().enumerate() {
            g.set_row(u, &gradient(map.as_ref(), at)?.transpose());
        }
        Ok(g)
    }

    pub fn hessians(&self, at: &[f64]) -> Result<Vec<DMatrix<f64>>> {
        self.maps.iter().map(|m| hessian(m.as_ref(), at)).collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    CertifiedSharpMax,
    FailedA,
    FailedB,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::CertifiedSharpMax => "CERTIFIED_SHARP_MAX",
            Verdict::FailedA => "FAILED_A",
            Verdict::FailedB => "FAILED_B",
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FailureA {
    RankDeficit,
    NotConvex,
}

impl fmt::Display for FailureA {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FailureA::RankDeficit => "rank deficit ≠ 1",
            FailureA::NotConvex => "dependency not convex",
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Relation {
    pub rank: usize,
    /// Descending.
    pub singular_values: Vec<f64>,
    /// The dependency scaled so that its first entry is 1. Present when the
    /// rank deficit is exactly one.
    pub lambda: Option<DVector<f64>>,
    pub convex: bool,
}

impl Relation {
    pub fn failure(&self) -> Option<FailureA> {
        match (&self.lambda, self.convex) {
            (None, _) => Some(FailureA::RankDeficit),
            (Some(_), false) => Some(FailureA::NotConvex),
            _ => None,
        }
    }

    /// `σ_rank / σ_{rank+1}`; infinite when the trailing value is exactly zero.
    pub fn sv_gap(&self) -> f64 {
        match (self.rank.checked_sub(1), self.singular_values.get(self.rank)) {
            (Some(i), Some(&next)) => self.singular_values[i] / next,
            _ => f64::INFINITY,
        }
    }
}

/// Singular values (descending) and the full right singular basis of `g`,
/// obtained by padding `g` with zero rows to a square matrix.
fn right_svd(g: &DMatrix<f64>) -> (Vec<f64>, DMatrix<f64>) {
    let (m, n) = g.shape();
    let size = m.max(n);
    let mut padded = DMatrix::zeros(size, size);
    padded.view_mut((0, 0), (m, n)).copy_from(g);
    let svd = SVD::new(padded, false, true);
    let vt = svd.v_t.unwrap();
    let mut order: Vec<usize> = (0..size).collect();
    order.sort_by(|&a, &b| svd.singular_values[b].total_cmp(&svd.singular_values[a]));
    let sv = order.iter().map(|&k| svd.singular_values[k]).collect();
    let v_sorted = DMatrix::from_fn(size, size, |r, c| vt[(order[c], r)]);
    (sv, v_sorted)
}

fn numerical_rank(sv: &[f64]) -> usize {
    let cut = RANK_TOLERANCE * sv.first().copied().unwrap_or(0.0);
    sv.iter().filter(|&&s| s > cut).count()
}

/// Rank of the `m × n` gradient matrix and its left-null vector.
pub fn relation(gradients: &DMatrix<f64>) -> Result<Relation> {
    let (m, n) = gradients.shape();
    if m > n || m == 0 {
        return Err(Error::Dimension(format!("relation needs 0 < m ≤ n, got {m}×{n}")));
    }
    // m ≤ n, so the thin decomposition already carries all m left vectors
    let svd = SVD::new(gradients.clone(), true, false);
    let u = svd.u.unwrap();
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&a, &b| svd.singular_values[b].total_cmp(&svd.singular_values[a]));
    let singular_values: Vec<f64> = order.iter().map(|&k| svd.singular_values[k]).collect();
    let rank = numerical_rank(&singular_values);
    if rank + 1 != m {
        return Ok(Relation { rank, singular_values, lambda: None, convex: false });
    }
    let raw: DVector<f64> = u.column(order[m - 1]).into_owned();
    let lambda = if raw[0].abs() > 1e-12 * raw.norm() {
        &raw / raw[0]
    } else {
        let s = raw.iter().copied().fold(0.0, |a: f64, b| if b.abs() > a.abs() { b } else { a });
        &raw / s
    };
    let convex = lambda.iter().all(|&v| v > 0.0);
    Ok(Relation { rank, singular_values, lambda: Some(lambda), convex })
}

/// Orthonormal basis (as columns) of the right null space.
pub fn null_space(gradients: &DMatrix<f64>) -> DMatrix<f64> {
    let n = gradients.ncols();
    let (sv, v) = right_svd(gradients);
    let rank = numerical_rank(&sv[..gradients.nrows().min(n)]);
    v.view((0, rank), (n, n - rank)).into_owned()
}

/// `Bᵀ (Σ λ_u H_u) B`.
pub fn restricted_form(lambda: &DVector<f64>, hessians: &[DMatrix<f64>], basis: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let n = basis.nrows();
    if hessians.len() != lambda.len() || hessians.iter().any(|h| h.shape() != (n, n)) {
        return Err(Error::Dimension("hessians do not match λ or the basis".into()));
    }
    let mut combined = DMatrix::zeros(n, n);
    for (l, h) in lambda.iter().zip(hessians) {
        combined += h * *l;
    }
    let form = basis.transpose() * combined * basis;
    Ok((&form + form.transpose()) * 0.5)
}

/// Eigenvalues in ascending order.
pub fn sorted_eigenvalues(m: &DMatrix<f64>) -> Vec<f64> {
    if m.is_empty() {
        return Vec::new();
    }
    let mut ev: Vec<f64> = SymmetricEigen::new(m.clone()).eigenvalues.iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    ev
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Margins {
    pub min_lambda: f64,
    pub max_eigenvalue: f64,
    pub sv_gap: f64,
}

#[derive(Clone, Debug)]
pub struct Certificate {
    pub labels: Vec<String>,
    pub gradients: DMatrix<f64>,
    pub relation: Relation,
    pub e_basis: DMatrix<f64>,
    pub restricted_form: DMatrix<f64>,
    pub eigenvalues: Vec<f64>,
    pub verdict: Verdict,
    pub failure: Option<FailureA>,
    pub margins: Margins,
}

impl Certificate {
    pub fn rank(&self) -> usize {
        self.relation.rank
    }

    pub fn lambda(&self) -> Option<&DVector<f64>> {
        self.relation.lambda.as_ref()
    }

    pub fn e_dim(&self) -> usize {
        self.e_basis.ncols()
    }

    /// `‖Σ λ_u ∇F_u‖ / ‖∇F‖`.
    pub fn dependency_residual(&self) -> Option<f64> {
        self.lambda().map(|l| (self.gradients.transpose() * l).norm() / (self.gradients.norm() * l.norm()))
    }
}

/// Run conditions (A) and (B) for `problem` at `at`.
pub fn certify(problem: &MinProblem, at: &[f64]) -> Result<Certificate> {
    let values: Vec<f64> = problem.maps.iter().zip(&problem.levels).map(|(m, l)| l + m.eval(at)).collect();
    let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !(hi - lo <= LOCUS_TOLERANCE) {
        return Err(Error::NotOnLocus(hi - lo));
    }

    let gradients = problem.gradients(at)?;
    let relation = relation(&gradients)?;
    let e_basis = null_space(&gradients);
    let sv_gap = relation.sv_gap();
    let failure = relation.failure();
    let min_lambda = relation.lambda.as_ref().map_or(f64::NAN, |l| l.iter().copied().fold(f64::INFINITY, f64::min));

    let (restricted_form, eigenvalues) = match &relation.lambda {
        Some(lambda) if failure.is_none() => {
            let h = problem.hessians(at)?;
            let form = restricted_form(lambda, &h, &e_basis)?;
            let ev = sorted_eigenvalues(&form);
            (form, ev)
        }
        _ => (DMatrix::zeros(0, 0), Vec::new()),
    };
    let max_eigenvalue = eigenvalues.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let verdict = if failure.is_some() {
        Verdict::FailedA
    } else if eigenvalues.iter().all(|&e| e < 0.0) {
        Verdict::CertifiedSharpMax
    } else {
        Verdict::FailedB
    };
    Ok(Certificate {
        labels: problem.labels.clone(),
        gradients,
        relation,
        e_basis,
        restricted_form,
        eigenvalues,
        verdict,
        failure,
        margins: Margins { min_lambda, max_eigenvalue, sv_gap },
    })
}

/// Basis of `E` parameterized by the coordinates `free`: column `j` is the
/// vector of `E` whose free coordinates are the `j`-th unit vector, the other
/// coordinates solved from `gradients · v = 0`.
pub fn free_coordinate_basis(gradients: &DMatrix<f64>, free: &[usize]) -> Result<DMatrix<f64>> {
    let n = gradients.ncols();
    if free.iter().any(|&i| i >= n) {
        return Err(Error::Dimension("free coordinate out of range".into()));
    }
    let dependent: Vec<usize> = (0..n).filter(|i| !free.contains(i)).collect();
    let g_dep = gradients.select_columns(&dependent);
    let svd = SVD::new(g_dep, true, true);
    let mut basis = DMatrix::zeros(n, free.len());
    for (j, &f) in free.iter().enumerate() {
        let rhs = -gradients.column(f);
        let y = svd.solve(&rhs, 1e-12).map_err(|e| Error::Dimension(e.to_string()))?;
        basis[(f, j)] = 1.0;
        for (k, &d) in dependent.iter().enumerate() {
            basis[(d, j)] = y[k];
        }
    }
    Ok(basis)
}

/// The record chart's free coordinates on `E` in the order `E_κ, E_φ, B_δ, C_δ`.
pub fn record_free_coordinates() -> [usize; 4] {
    [
        chart_index(Label::E, Angle::Kappa).unwrap(),
        chart_index(Label::E, Angle::Phi).unwrap(),
        chart_index(Label::B, Angle::Delta).unwrap(),
        chart_index(Label::C, Angle::Delta).unwrap(),
    ]
}

/// Step and Richardson depth used by [`record_phi`].
pub const PHI_STEP: f64 = 2e-3;
pub const PHI_LEVELS: usize = 2;

/// The second-order form `Φ(w) = Σ λ_u [F_u]₂` on `E` at the record point in
/// the coordinates `w = (E_κ, −E_φ, B_δ, C_δ)`, with λ scaled so that its
/// six-plet entries equal 10. Computed by differentiating
/// `w ↦ Σ λ_u F_u(B w)` directly in four variables.
pub fn record_phi(problem: &MinProblem, gradients: &DMatrix<f64>, lambda: &DVector<f64>) -> Result<DMatrix<f64>> {
    let mut basis = free_coordinate_basis(gradients, &record_free_coordinates())?;
    basis.column_mut(1).neg_mut();
    let weights: Vec<f64> = lambda.iter().map(|l| 10.0 * l / lambda[0]).collect();
    let maps = &problem.maps;
    let n = basis.nrows();
    let combined = FnMap::new(4, |w: &[f64]| {
        let x: Vec<f64> = (0..n).map(|r| (0..4).map(|c| basis[(r, c)] * w[c]).sum()).collect();
        maps.iter().zip(&weights).map(|(m, l)| l * m.eval(&x)).sum()
    });
    let h = hessian_richardson(&combined, &[0.0; 4], PHI_STEP, PHI_LEVELS)?;
    Ok(h * 0.5)
}

/// `min` over the fifteen squared distances minus the common squared
/// distance of the base curve point.
pub struct DistanceDrop {
    pub chart: PerturbationChart,
    level: f64,
}

impl DistanceDrop {
    pub fn new(chart: PerturbationChart) -> Self {
        Self { level: common_distance_sq(chart.base.x), chart }
    }
}

impl ChartFunction for DistanceDrop {
    fn dim(&self) -> usize {
        CHART_DIM
    }

    fn eval(&self, x: &[f64]) -> f64 {
        min_distance(&self.chart.embed(x)).powi(2) - self.level
    }
}

/// Unit direction number `index` of the stream keyed by `seed`.
pub fn sample_direction(seed: u64, index: u64, dim: usize) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    loop {
        let v: Vec<f64> = (0..dim).map(|_| rng.sample(StandardNormal)).collect();
        let norm = v.iter().map(|a| a * a).sum::<f64>().sqrt();
        if norm > 1e-12 {
            return v.into_iter().map(|a| a / norm).collect();
        }
    }
}

/// Random unit vector in the column span of an orthonormal `basis`.
pub fn sample_in_span(basis: &DMatrix<f64>, seed: u64, index: u64) -> Vec<f64> {
    let c = sample_direction(seed, index, basis.ncols());
    (basis * DVector::from_vec(c)).iter().copied().collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct SampleStats {
    pub n_samples: usize,
    pub seed: u64,
    pub threshold: f64,
    pub t_values: Vec<f64>,
    /// Largest `D` per t value.
    pub max_distance: Vec<f64>,
    /// Samples with `D ≥ threshold` per t value.
    pub violations: Vec<usize>,
}

impl SampleStats {
    pub fn total_violations(&self) -> usize {
        self.violations.iter().sum()
    }
}

/// Evaluate `D(embed(t·dir))` over `n_samples` seeded random unit directions.
/// A violation is a sample that does not fall below the base value of `D`.
pub fn perturb_sample(chart: &PerturbationChart, n_samples: usize, t_values: &[f64], seed: u64) -> SampleStats {
    let threshold = common_distance_sq(chart.base.x).sqrt();
    let per_sample: Vec<Vec<f64>> = (0..n_samples as u64)
        .into_par_iter()
        .map(|i| {
            let dir = sample_direction(seed, i, CHART_DIM);
            t_values
                .iter()
                .map(|t| {
                    let x: Vec<f64> = dir.iter().map(|d| d * t).collect();
                    min_distance(&chart.embed(&x))
                })
                .collect()
        })
        .collect();
    let mut max_distance = vec![f64::NEG_INFINITY; t_values.len()];
    let mut violations = vec![0; t_values.len()];
    for row in &per_sample {
        for (k, &d) in row.iter().enumerate() {
            max_distance[k] = max_distance[k].max(d);
            violations[k] += usize::from(!(d < threshold));
        }
    }
    SampleStats { n_samples, seed, threshold, t_values: t_values.to_vec(), max_distance, violations }
}

/// Values of `min(u₁, u₂)` along the curve `y = 2x²`, which runs inside the
/// region where both toy maps are positive.
pub fn toy_horn_values(problem: &MinProblem, xs: &[f64]) -> Vec<f64> {
    let f = problem.min_map();
    xs.iter().map(|&x| f.eval(&[x, 2.0 * x * x])).collect()
}
