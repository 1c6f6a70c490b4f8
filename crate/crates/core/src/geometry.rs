//! Tangent lines to the unit sphere and the distances between them.
//!
//! A tangent line is given by the latitude `phi` and longitude `kappa` of its
//! tangency point together with a clock angle `delta`: the line direction is
//! the north-pointing tangent rotated by `delta` counterclockwise about the
//! radial axis, as seen from outside the sphere. Lines are unoriented, so
//! `delta` and `delta + π` describe the same line.
//!
//! All lengths are in units of the sphere radius.

use std::f64::consts::{PI, TAU};

use nalgebra::Vector3;

use crate::error::{Error, Result};

pub type Vec3 = Vector3<f64>;

/// Below this value of `‖ξ′ × ξ″‖²` two lines are treated as parallel.
pub const PARALLEL_EPS: f64 = 1e-12;

/// Smallest `|cos δ|` accepted by [`distance_sq_angles`].
pub const CLOCK_ANGLE_EPS: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TangentLine {
    /// Latitude in radians, `[-π/2, π/2]`.
    pub phi: f64,
    /// Longitude in radians.
    pub kappa: f64,
    /// Clock angle in radians.
    pub delta: f64,
}

/// Euclidean description of a tangent line: the tangency point and a unit
/// direction orthogonal to it.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LineFrame {
    pub point: Vec3,
    pub direction: Vec3,
}

impl TangentLine {
    pub const fn new(phi: f64, kappa: f64, delta: f64) -> Self {
        Self { phi, kappa, delta }
    }

    /// The same line with `kappa` reduced to `[0, 2π)` and `delta` to `[0, π)`.
    pub fn canonical(&self) -> Self {
        Self { phi: self.phi, kappa: self.kappa.rem_euclid(TAU), delta: self.delta.rem_euclid(PI) }
    }

    /// The same unoriented line described with the opposite direction.
    pub fn reversed(&self) -> Self {
        Self { delta: self.delta + PI, ..*self }
    }

    pub fn frame(&self) -> LineFrame {
        frame_of(self)
    }

    pub fn is_finite(&self) -> bool {
        self.phi.is_finite() && self.kappa.is_finite() && self.delta.is_finite()
    }
}

/// Tangency point and direction of `line`.
pub fn frame_of(line: &TangentLine) -> LineFrame {
    let (sp, cp) = line.phi.sin_cos();
    let (sk, ck) = line.kappa.sin_cos();
    let (sd, cd) = line.delta.sin_cos();
    let point = Vec3::new(cp * ck, cp * sk, sp);
    let north = Vec3::new(-sp * ck, -sp * sk, cp);
    let east_of_north = point.cross(&north);
    LineFrame { point, direction: north * cd + east_of_north * sd }
}

impl LineFrame {
    /// Apply a rotation (or any orthogonal map) to both the point and the direction.
    pub fn transformed(&self, m: &nalgebra::Matrix3<f64>) -> Self {
        Self { point: m * self.point, direction: m * self.direction }
    }
}

/// Squared distance between two lines given by their frames.
pub fn frame_distance_sq(u: &LineFrame, v: &LineFrame) -> f64 {
    let gap = v.point - u.point;
    let normal = u.direction.cross(&v.direction);
    let sin_sq = normal.norm_squared();
    if sin_sq < PARALLEL_EPS {
        let along = gap.dot(&u.direction);
        return (gap - u.direction * along).norm_squared();
    }
    let triple = normal.dot(&gap);
    triple * triple / sin_sq
}

/// Squared Euclidean distance between two tangent lines.
pub fn distance_sq(u: &TangentLine, v: &TangentLine) -> f64 {
    frame_distance_sq(&frame_of(u), &frame_of(v))
}

/// Euclidean distance between two tangent lines.
pub fn distance(u: &TangentLine, v: &TangentLine) -> f64 {
    distance_sq(u, v).sqrt()
}

/// Squared distance evaluated directly from the angle coordinates, without
/// building frames. Serves as an independent cross-check of [`distance_sq`].
pub fn distance_sq_angles(u: &TangentLine, v: &TangentLine) -> Result<f64> {
    for line in [u, v] {
        if line.delta.cos().abs() < CLOCK_ANGLE_EPS {
            return Err(Error::DegenerateClockAngle(line.delta));
        }
    }
    let (t1, t2) = (u.delta.tan(), v.delta.tan());
    let (s1, c1) = u.phi.sin_cos();
    let (s2, c2) = v.phi.sin_cos();
    let (sdk, cdk) = (u.kappa - v.kappa).sin_cos();

    let numer = (t1 + t2) * (c1 * c2 - cdk * (1.0 - s1 * s2)) - (1.0 - t1 * t2) * sdk * (s1 - s2);
    let denom_dot = c1 * c2 + cdk * (s1 * s2 + t1 * t2) + sdk * (t2 * s1 - t1 * s2);
    let denom = (1.0 + t1 * t1) * (1.0 + t2 * t2) - denom_dot * denom_dot;
    Ok(numer * numer / denom)
}

/// Radius of equal cylinders around two tangent lines at distance `gap`
/// that touch each other: `r = d / (2 - d)`.
pub fn radius_from_gap(gap: f64) -> Result<f64> {
    if !(0.0..2.0).contains(&gap) {
        return Err(Error::GapOutOfRange(gap));
    }
    Ok(gap / (2.0 - gap))
}
