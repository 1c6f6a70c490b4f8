//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit on any failure.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use sixcyl::calculus::{
    chart_index, directional_profile, full_index, halving_grid, Angle, DecayOrder, PerturbationChart,
};
use sixcyl::certificate::{
    certify, perturb_sample, record_phi, sample_direction, sample_in_span, sorted_eigenvalues, toy_horn_values,
    MinProblem, Verdict,
};
use sixcyl::configuration::{common_distance_sq, curve_point, min_distance, pairwise, relevant_pairs, Label};
use sixcyl::galois::quad::rat;
use sixcyl::galois::tables::{phi_matrix_f64, PHI_EIGENVALUES};
use sixcyl::galois::{
    closed_form, closed_form_ad, closed_form_af, curve_algebra::perturbed_distance_sq, field_check, order1, phi_matrix,
    symmetry_report, Field,
};
use sixcyl::geometry::radius_from_gap;

type Check = Result<String, String>;
type Criterion = (&'static str, fn() -> Check);

const SEED: u64 = 20_240_601;

fn ensure(ok: bool, detail: String) -> Check {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn grid_x(i: usize) -> f64 {
    if i == 100 {
        1.0
    } else {
        0.01 + 0.99 * i as f64 / 100.0
    }
}

fn curve_law() -> Check {
    let mut worst: f64 = 0.0;
    let mut worst_x = 0.0;
    let mut worst_psi: f64 = 0.0;
    let mut bad = Vec::new();
    for i in 0..=100 {
        let x = grid_x(i);
        let p = curve_point(x).map_err(|e| e.to_string())?;
        let report = pairwise(&p.configuration());
        let target = common_distance_sq(x);
        let err =
            relevant_pairs().iter().map(|&pair| (report.get(pair).distance_sq - target).abs()).fold(0.0, f64::max);
        if err > 1e-10 {
            bad.push(format!("{x}"));
        }
        if err > worst {
            worst = err;
            worst_x = x;
        }
        worst_psi = worst_psi.max(p.psi_residual().abs());
    }
    ensure(
        bad.is_empty() && worst_psi < 1e-12,
        format!(
            "max |d²−12x/(1+7x+4x²)| = {worst:.2e} at x={worst_x}, off at x ∈ [{}], max |Ψ| = {worst_psi:.2e}",
            bad.join(", ")
        ),
    )
}

fn record_values() -> Check {
    let d = min_distance(&curve_point(0.5).map_err(|e| e.to_string())?.configuration());
    let r = radius_from_gap(d).map_err(|e| e.to_string())?;
    let e_d = (d - (12.0f64 / 11.0).sqrt()).abs();
    let e_r = (r - (3.0 + 33f64.sqrt()) / 8.0).abs();
    let spacing = 12.0 * (r - 1.0);
    let e_s = (spacing - 1.116_843_972).abs();
    ensure(
        e_d < 1e-12 && e_r < 1e-12 && e_s < 1e-8,
        format!("D = {d:.15}, r = {r:.15}, 12(r−1) = {spacing:.10} (errors {e_d:.1e}, {e_r:.1e}, {e_s:.1e})"),
    )
}

fn differential_tables() -> Check {
    let problem = MinProblem::record();
    let g = problem.gradients(&[0.0; 15]).map_err(|e| e.to_string())?;
    let mut worst: f64 = 0.0;
    let mut count = 0;
    for (u, pair) in relevant_pairs().iter().enumerate() {
        let exact = order1(*pair).gradient();
        for label in &Label::ALL[1..] {
            for angle in [Angle::Kappa, Angle::Phi, Angle::Delta] {
                let c = chart_index(*label, angle).unwrap();
                worst = worst.max((g[(u, c)] - exact[full_index(*label, angle)]).abs());
                count += 1;
            }
        }
    }
    ensure(worst < 1e-7, format!("{count} coefficients, max deviation {worst:.2e}"))
}

fn condition_a() -> Check {
    let cert = certify(&MinProblem::record(), &[0.0; 15]).map_err(|e| e.to_string())?;
    let lambda = cert.lambda().ok_or("no dependency")?;
    let scaled: Vec<f64> = lambda.iter().map(|l| 10.0 * l / lambda[0]).collect();
    let s5 = 5f64.sqrt();
    let expected: Vec<f64> = [10.0; 6].into_iter().chain([23.0 + 3.0 * s5; 3]).chain([23.0 - 3.0 * s5; 3]).collect();
    let err = scaled.iter().zip(&expected).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    let gap = cert.relation.sv_gap();
    ensure(
        cert.rank() == 11 && gap >= 1e6 && err < 1e-8 && cert.relation.convex,
        format!("rank {}, σ₁₁/σ₁₂ = {gap:.2e}, λ deviation {err:.2e}", cert.rank()),
    )
}

fn condition_b() -> Check {
    let problem = MinProblem::record();
    let g = problem.gradients(&[0.0; 15]).map_err(|e| e.to_string())?;
    let cert = certify(&problem, &[0.0; 15]).map_err(|e| e.to_string())?;
    let lambda = cert.lambda().ok_or("no dependency")?;
    let phi = record_phi(&problem, &g, lambda).map_err(|e| e.to_string())?;
    let exact = phi_matrix_f64(&phi_matrix());
    let entry_err = (&phi - &exact).abs().max();
    let ev = sorted_eigenvalues(&phi);
    let exact_ev = sorted_eigenvalues(&exact);
    let ev_err = exact_ev.iter().zip(PHI_EIGENVALUES).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    let negative = ev.iter().all(|&e| e < 0.0) && cert.verdict == Verdict::CertifiedSharpMax;
    ensure(
        entry_err < 1e-5 && negative && ev_err < 1e-10,
        format!(
            "max |Φ_num − Φ| = {entry_err:.2e}, eigenvalues [{}], exact spectrum deviation {ev_err:.1e}",
            ev.iter().map(|e| format!("{e:.4}")).collect::<Vec<_>>().join(", ")
        ),
    )
}

fn sharp_max_sampling() -> Check {
    let stats = perturb_sample(&PerturbationChart::record(), 10_000, &[1e-2, 1e-3], SEED);
    ensure(
        stats.total_violations() == 0,
        format!(
            "10⁴ directions, violations {:?}, max D {:?} vs {:.10}",
            stats.violations, stats.max_distance, stats.threshold
        ),
    )
}

fn decay_dichotomy() -> Check {
    let problem = MinProblem::record();
    let cert = certify(&problem, &[0.0; 15]).map_err(|e| e.to_string())?;
    let f = problem.min_map();
    let grid = halving_grid(1e-3, 5);
    let (mut inside, mut outside) = (0, 0);
    let mut slopes_in = (f64::INFINITY, f64::NEG_INFINITY);
    let mut slopes_out = (f64::INFINITY, f64::NEG_INFINITY);
    for i in 0..20u64 {
        let v = sample_in_span(&cert.e_basis, SEED, i);
        let p = directional_profile(&f, &v, &grid).map_err(|e| e.to_string())?;
        inside += usize::from(p.order == DecayOrder::Quadratic && p.decreasing);
        slopes_in = (slopes_in.0.min(p.slope), slopes_in.1.max(p.slope));
        let w = sample_direction(SEED + 1, i, 15);
        let p = directional_profile(&f, &w, &grid).map_err(|e| e.to_string())?;
        outside += usize::from(p.order == DecayOrder::Linear && p.decreasing);
        slopes_out = (slopes_out.0.min(p.slope), slopes_out.1.max(p.slope));
    }
    ensure(
        inside == 20 && outside == 20,
        format!(
            "in E {inside}/20 order 2 (slopes {:.4}..{:.4}), off E {outside}/20 order 1 (slopes {:.4}..{:.4})",
            slopes_in.0, slopes_in.1, slopes_out.0, slopes_out.1
        ),
    )
}

fn toy() -> Check {
    let problem = MinProblem::toy();
    let cert = certify(&problem, &[0.0, 0.0]).map_err(|e| e.to_string())?;
    let horn = toy_horn_values(&problem, &[1e-1, 1e-2, 1e-3]);
    ensure(
        cert.verdict == Verdict::FailedB
            && cert.relation.convex
            && cert.eigenvalues.len() == 1
            && cert.eigenvalues[0] > 0.0
            && horn.iter().all(|&v| v > 0.0),
        format!("verdict {}, form {:?}, horn values {horn:?}", cert.verdict.as_str(), cert.eigenvalues),
    )
}

fn galois_exactness() -> Check {
    let r = symmetry_report();
    ensure(
        r.all_hold(),
        format!(
            "group order {}, (Π_ρΠ_ς)⁶ = id: {}, order-1 round trip {}, order-2 round trip {}",
            r.group_order, r.rho_sigma_sixth_power_is_identity, r.order1_round_trip, r.order2_round_trip
        ),
    )
}

fn closed_forms() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut worst: f64 = 0.0;
    let mut swap_exact = true;
    for _ in 0..20 {
        let x: f64 = rng.random_range(0.05..0.95);
        let xi: f64 = rng.random_range(-1.0..1.0);
        let ad = closed_form_ad(x, xi).map_err(|e| e.to_string())?;
        let af = closed_form_af(x, xi).map_err(|e| e.to_string())?;
        let gad = perturbed_distance_sq(x, Label::D, xi).map_err(|e| e.to_string())?;
        let gaf = perturbed_distance_sq(x, Label::F, xi).map_err(|e| e.to_string())?;
        worst = worst.max((ad - gad).abs()).max((af - gaf).abs());
        swap_exact &= closed_form(x, -xi, -1.0).map_err(|e| e.to_string())?.to_bits() == af.to_bits();
    }
    ensure(
        worst < 1e-12 && swap_exact,
        format!("20 samples, max deviation from geometry {worst:.2e}, swap exact: {swap_exact}"),
    )
}

fn field_membership() -> Check {
    let cases = [(rat(1, 2), Field::Quadratic(5)), (rat(1, 3), Field::Quadratic(2)), (rat(1, 5), Field::Rational)];
    let mut ok = true;
    let mut parts = Vec::new();
    for (x, expected) in cases {
        let r = field_check(&x, 1, 10_000).map_err(|e| e.to_string())?;
        let pass =
            r.all_reconstructed() && r.field == expected && r.max_residual() < 1e-9 && r.max_confirmation() < 1e-10;
        ok &= pass;
        parts.push(format!("x={}: {} (res {:.1e}, conf {:.1e})", r.x, r.field, r.max_residual(), r.max_confirmation()));
    }
    ensure(ok, parts.join("; "))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 11] = [
        ("curve law", curve_law),
        ("record values", record_values),
        ("first-order tables", differential_tables),
        ("condition (A)", condition_a),
        ("condition (B)", condition_b),
        ("sharp-max sampling", sharp_max_sampling),
        ("decay dichotomy", decay_dichotomy),
        ("toy problem", toy),
        ("galois exactness", galois_exactness),
        ("closed forms", closed_forms),
        ("field membership", field_membership),
    ];
    let mut failures = 0;
    for (k, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|_| Err("panicked".into()));
        let ms = start.elapsed().as_millis();
        match outcome {
            Ok(detail) => println!("PASS {:>2} {name}: {detail} [{ms} ms]", k + 1),
            Err(detail) => {
                failures += 1;
                println!("FAIL {:>2} {name}: {detail} [{ms} ms]", k + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failures, criteria.len());
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
