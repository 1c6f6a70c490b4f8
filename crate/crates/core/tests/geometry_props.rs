use std::f64::consts::PI;

use nalgebra::{Rotation3, Unit, Vector3};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use sixcyl::geometry::{distance, distance_sq, distance_sq_angles, frame_distance_sq, frame_of, TangentLine};

fn line() -> impl Strategy<Value = TangentLine> {
    (-1.5f64..1.5, -PI..PI, -PI..PI).prop_map(|(phi, kappa, delta)| TangentLine::new(phi, kappa, delta))
}

fn sin_sq(u: &TangentLine, v: &TangentLine) -> f64 {
    frame_of(u).direction.cross(&frame_of(v).direction).norm_squared()
}

#[test]
fn angle_formula_agrees_on_a_thousand_pairs() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut checked = 0;
    let mut worst: f64 = 0.0;
    while checked < 1000 {
        let mut draw =
            || TangentLine::new(rng.random_range(-1.4..1.4), rng.random_range(-PI..PI), rng.random_range(-1.4..1.4));
        let (u, v) = (draw(), draw());
        if sin_sq(&u, &v) < 1e-2 {
            continue;
        }
        let a = distance_sq(&u, &v);
        let b = distance_sq_angles(&u, &v).unwrap();
        worst = worst.max((a - b).abs());
        checked += 1;
    }
    assert!(worst < 1e-12, "worst {worst:e}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn symmetric_and_bounded(u in line(), v in line()) {
        let d = distance(&u, &v);
        prop_assert!((0.0..=2.0 + 1e-12).contains(&d));
        prop_assert!((d - distance(&v, &u)).abs() < 1e-12);
    }

    #[test]
    fn orientation_does_not_matter(u in line(), v in line()) {
        let d = distance_sq(&u, &v);
        prop_assert!((d - distance_sq(&u.reversed(), &v)).abs() < 1e-12);
        prop_assert!((d - distance_sq(&u, &v.reversed())).abs() < 1e-12);
    }

    #[test]
    fn rigid_rotations_preserve_distance(
        u in line(),
        v in line(),
        axis in (-1.0f64..1.0, -1.0f64..1.0, -1.0f64..1.0),
        angle in -PI..PI,
    ) {
        let axis = Vector3::new(axis.0, axis.1, axis.2);
        prop_assume!(axis.norm() > 1e-3);
        prop_assume!(sin_sq(&u, &v) > 1e-6);
        let m = Rotation3::from_axis_angle(&Unit::new_normalize(axis), angle).into_inner();
        let before = distance_sq(&u, &v);
        let after = frame_distance_sq(&frame_of(&u).transformed(&m), &frame_of(&v).transformed(&m));
        prop_assert!((before - after).abs() < 1e-11, "{before} vs {after}");
    }

    #[test]
    fn a_line_is_at_distance_zero_from_itself(u in line()) {
        prop_assert!(distance_sq(&u, &u) < 1e-24);
    }

    #[test]
    fn distance_never_exceeds_the_gap_between_tangency_points(u in line(), v in line()) {
        let gap = (frame_of(&v).point - frame_of(&u).point).norm();
        prop_assert!(distance(&u, &v) <= gap + 1e-12);
    }
}
