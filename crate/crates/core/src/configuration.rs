//! The six-line configurations `C₆(φ, δ, κ)`, the extremal curve through
//! them, and the min-distance functional.
//!
//! Lines A, B, C sit at latitude `φ` and longitudes `π/6 + κ`, `5π/6 + κ`,
//! `3π/2 + κ`; lines D, E, F sit at latitude `−φ` and longitudes `π/2 − κ`,
//! `7π/6 − κ`, `11π/6 − κ`. All six share the clock angle `δ`. With this
//! orientation of `κ` the curve parameterization below places twelve of the
//! fifteen pairwise distances on a common value.

use std::f64::consts::PI;
use std::fmt;

use nalgebra::{Matrix3, Rotation3, Unit};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{distance_sq, frame_of, LineFrame, TangentLine, Vec3};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Label {
    A,
    B,
    C,
    D,
    E,
    F,
}

impl Label {
    pub const ALL: [Label; 6] = [Label::A, Label::B, Label::C, Label::D, Label::E, Label::F];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(i: usize) -> Label {
        Self::ALL[i]
    }

    /// +1 for the upper lines A, B, C and −1 for D, E, F.
    pub fn hemisphere(self) -> f64 {
        if self.index() < 3 {
            1.0
        } else {
            -1.0
        }
    }

    /// Longitude of the line in `C₆` (κ = 0).
    pub fn base_longitude(self) -> f64 {
        match self {
            Label::A => PI / 6.0,
            Label::B => 5.0 * PI / 6.0,
            Label::C => 3.0 * PI / 2.0,
            Label::D => PI / 2.0,
            Label::E => 7.0 * PI / 6.0,
            Label::F => 11.0 * PI / 6.0,
        }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

/// The line `label` of the family with its own parameters `(phi, kappa, delta)`.
pub fn family_line(label: Label, phi: f64, kappa: f64, delta: f64) -> TangentLine {
    let s = label.hemisphere();
    TangentLine::new(s * phi, label.base_longitude() + s * kappa, delta)
}

/// An unordered pair of distinct labels, stored with the smaller label first.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Pair(pub Label, pub Label);

impl Pair {
    pub fn new(a: Label, b: Label) -> Pair {
        assert_ne!(a, b, "a pair needs two distinct lines");
        if a < b {
            Pair(a, b)
        } else {
            Pair(b, a)
        }
    }

    pub fn parse(s: &str) -> Option<Pair> {
        let mut it = s.chars().map(|c| match c {
            'A' => Some(Label::A),
            'B' => Some(Label::B),
            'C' => Some(Label::C),
            'D' => Some(Label::D),
            'E' => Some(Label::E),
            'F' => Some(Label::F),
            _ => None,
        });
        let (a, b) = (it.next()??, it.next()??);
        if it.next().is_some() || a == b {
            return None;
        }
        Some(Pair::new(a, b))
    }

    pub fn class(self) -> DistanceClass {
        use Label::*;
        match (self.0, self.1) {
            (A, B) | (B, C) | (A, C) | (D, E) | (E, F) | (D, F) => DistanceClass::SixPlet,
            (A, D) | (B, E) | (C, F) => DistanceClass::AdTriplet,
            (A, F) | (B, D) | (C, E) => DistanceClass::AfTriplet,
            _ => DistanceClass::AeTriplet,
        }
    }

    pub fn map(self, perm: &[Label; 6]) -> Pair {
        Pair::new(perm[self.0.index()], perm[self.1.index()])
    }
}

impl fmt::Display for Pair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.0, self.1)
    }
}

/// The four orbits of line pairs under the dihedral symmetry of the family.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum DistanceClass {
    /// {AB, BC, CA, DE, EF, FD}
    SixPlet,
    /// {AD, BE, CF}
    AdTriplet,
    /// {AF, BD, CE}
    AfTriplet,
    /// {AE, BF, CD}; slack at the record point.
    AeTriplet,
}

impl DistanceClass {
    pub fn is_relevant(self) -> bool {
        self != DistanceClass::AeTriplet
    }
}

/// All fifteen pairs in lexicographic order.
pub fn all_pairs() -> [Pair; 15] {
    let mut out = [Pair(Label::A, Label::B); 15];
    let mut k = 0;
    for i in 0..6 {
        for j in i + 1..6 {
            out[k] = Pair(Label::from_index(i), Label::from_index(j));
            k += 1;
        }
    }
    out
}

/// The twelve relevant pairs, grouped as six-plet, {AF, CE, BD}, {CF, BE, AD}.
pub fn relevant_pairs() -> [Pair; 12] {
    use Label::*;
    [
        Pair(A, B),
        Pair(B, C),
        Pair(A, C),
        Pair(D, E),
        Pair(E, F),
        Pair(D, F),
        Pair(A, F),
        Pair(C, E),
        Pair(B, D),
        Pair(C, F),
        Pair(B, E),
        Pair(A, D),
    ]
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Configuration {
    pub lines: [TangentLine; 6],
}

impl Configuration {
    pub fn line(&self, label: Label) -> &TangentLine {
        &self.lines[label.index()]
    }

    pub fn distance_sq(&self, pair: Pair) -> f64 {
        distance_sq(self.line(pair.0), self.line(pair.1))
    }

    pub fn frames(&self) -> [LineFrame; 6] {
        self.lines.map(|l| frame_of(&l))
    }
}

/// `C₆(φ, δ, κ)`.
pub fn build_c6(phi: f64, delta: f64, kappa: f64) -> Result<Configuration> {
    if !(phi.abs() < PI / 2.0) {
        return Err(Error::PolarDegeneracy(phi.abs()));
    }
    Ok(Configuration { lines: Label::ALL.map(|l| family_line(l, phi, kappa, delta)) })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PairDistance {
    pub pair: Pair,
    pub class: DistanceClass,
    pub distance_sq: f64,
}

impl PairDistance {
    pub fn distance(&self) -> f64 {
        self.distance_sq.sqrt()
    }
}

/// The fifteen pairwise squared distances of a configuration, in
/// lexicographic pair order.
#[derive(Clone, Debug, PartialEq)]
pub struct DistanceReport {
    pub entries: Vec<PairDistance>,
}

impl DistanceReport {
    pub fn get(&self, pair: Pair) -> &PairDistance {
        self.entries.iter().find(|e| e.pair == pair).expect("report holds every pair")
    }

    pub fn class_values(&self, class: DistanceClass) -> Vec<f64> {
        self.entries.iter().filter(|e| e.class == class).map(|e| e.distance_sq).collect()
    }

    /// Max minus min of the squared distances within `class`.
    pub fn class_spread(&self, class: DistanceClass) -> f64 {
        spread(self.class_values(class))
    }

    /// Max minus min over the twelve relevant squared distances.
    pub fn relevant_spread(&self) -> f64 {
        spread(self.entries.iter().filter(|e| e.class.is_relevant()).map(|e| e.distance_sq))
    }

    pub fn min_sq(&self) -> f64 {
        self.entries.iter().map(|e| e.distance_sq).fold(f64::INFINITY, f64::min)
    }

    /// Sorted squared distances.
    pub fn multiset(&self) -> Vec<f64> {
        let mut v: Vec<f64> = self.entries.iter().map(|e| e.distance_sq).collect();
        v.sort_by(f64::total_cmp);
        v
    }
}

fn spread(values: impl IntoIterator<Item = f64>) -> f64 {
    let (lo, hi) = values.into_iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)));
    hi - lo
}

pub fn pairwise(config: &Configuration) -> DistanceReport {
    let frames = config.frames();
    let entries = all_pairs()
        .into_iter()
        .map(|pair| PairDistance {
            pair,
            class: pair.class(),
            distance_sq: crate::geometry::frame_distance_sq(&frames[pair.0.index()], &frames[pair.1.index()]),
        })
        .collect();
    DistanceReport { entries }
}

/// `D`: the smallest of the fifteen pairwise distances.
pub fn min_distance(config: &Configuration) -> f64 {
    pairwise(config).min_sq().sqrt()
}

/// A point of the extremal curve, parameterized by `x ∈ (0, 1]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CurvePoint {
    pub x: f64,
    pub phi: f64,
    pub delta: f64,
    pub kappa: f64,
    /// `sin φ`
    pub s: f64,
    /// `tan δ`
    pub t: f64,
}

impl CurvePoint {
    pub fn configuration(&self) -> Configuration {
        build_c6(self.phi, self.delta, self.kappa).expect("curve latitudes stay below the pole")
    }

    /// `Ψ` at this point, with `S²` and `T²` taken from their rational
    /// expressions in `x` rather than by squaring `s` and `t`. Near `x = 0`
    /// the cubic terms reach 1e5 and squaring rounded values costs several
    /// ulps of that.
    pub fn psi_residual(&self) -> f64 {
        let x = self.x;
        let quad = 1.0 + 7.0 * x + 4.0 * x * x;
        psi_reduced(4.0 * (1.0 - x) * x * (1.0 + x) / quad, (1.0 - x) * (1.0 + 3.0 * x) / (x * quad))
    }
}

/// Common value of the twelve relevant squared distances along the curve.
pub fn common_distance_sq(x: f64) -> f64 {
    12.0 * x / (1.0 + 7.0 * x + 4.0 * x * x)
}

pub fn curve_point(x: f64) -> Result<CurvePoint> {
    if !(x > 0.0 && x <= 1.0) {
        return Err(Error::ParameterOutOfRange(x.to_string()));
    }
    let quad = 1.0 + 7.0 * x + 4.0 * x * x;
    let s = 2.0 * ((1.0 - x) * x * (1.0 + x) / quad).sqrt();
    let t = ((1.0 - x) * (1.0 + 3.0 * x) / (x * quad)).sqrt();
    let kappa = ((x - 1.0) / ((1.0 + x) * (1.0 + 3.0 * x)).sqrt()).atan();
    Ok(CurvePoint { x, phi: s.asin(), delta: t.atan(), kappa, s, t })
}

/// Closed-form constants of the record configuration (curve parameter 1/2).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RecordConstants {
    pub x: f64,
    pub phi: f64,
    pub kappa: f64,
    pub delta: f64,
    pub min_distance: f64,
    pub radius: f64,
}

impl RecordConstants {
    pub fn get() -> Self {
        Self {
            x: 0.5,
            phi: (3.0f64 / 11.0).sqrt().asin(),
            kappa: -(1.0 / 15f64.sqrt()).atan(),
            delta: (5.0f64 / 11.0).sqrt().atan(),
            min_distance: (12.0f64 / 11.0).sqrt(),
            radius: (3.0 + 33f64.sqrt()) / 8.0,
        }
    }
}

/// `Ψ(S, T)`: the plane curve containing the image of the extremal curve.
pub fn psi_residual(s: f64, t: f64) -> f64 {
    psi_reduced(s * s, t * t)
}

/// `ψ(s, t)` with `s = S²`, `t = T²`.
pub fn psi_reduced(s: f64, t: f64) -> f64 {
    4.0 * s - 8.0 * t - 3.0 * s * s + 29.0 * s * t - 4.0 * t * t - 22.0 * s * s * t
        + 14.0 * s * t * t
        + 4.0 * s * s * s * t
        - 7.0 * s * s * t * t
        + s * t * t * t
}

/// The six elements of the dihedral symmetry group of every `C₆(φ, δ, κ)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum D3Element {
    Identity,
    /// Rotation by 120° about the z axis.
    RotZ120,
    /// Rotation by 240° about the z axis.
    RotZ240,
    /// Half-turn about the equatorial axis at longitude π/3: (A,D)(B,F)(C,E).
    HalfTurnPi3,
    /// Half-turn about the x axis: (A,F)(B,E)(C,D).
    HalfTurnX,
    /// Half-turn about the equatorial axis at longitude 5π/3: (A,E)(B,D)(C,F).
    HalfTurn5Pi3,
}

impl D3Element {
    pub const ALL: [D3Element; 6] = [
        D3Element::Identity,
        D3Element::RotZ120,
        D3Element::RotZ240,
        D3Element::HalfTurnPi3,
        D3Element::HalfTurnX,
        D3Element::HalfTurn5Pi3,
    ];

    pub fn rotation(self) -> Matrix3<f64> {
        let z = Vec3::z_axis();
        let equatorial = |lon: f64| Unit::new_normalize(Vec3::new(lon.cos(), lon.sin(), 0.0));
        let r = match self {
            D3Element::Identity => Rotation3::identity(),
            D3Element::RotZ120 => Rotation3::from_axis_angle(&z, 2.0 * PI / 3.0),
            D3Element::RotZ240 => Rotation3::from_axis_angle(&z, 4.0 * PI / 3.0),
            D3Element::HalfTurnPi3 => Rotation3::from_axis_angle(&equatorial(PI / 3.0), PI),
            D3Element::HalfTurnX => Rotation3::from_axis_angle(&Vec3::x_axis(), PI),
            D3Element::HalfTurn5Pi3 => Rotation3::from_axis_angle(&equatorial(5.0 * PI / 3.0), PI),
        };
        r.into_inner()
    }

    /// `perm[J]` is the label of the line that `J` is carried onto.
    pub fn permutation(self) -> [Label; 6] {
        use Label::*;
        match self {
            D3Element::Identity => [A, B, C, D, E, F],
            D3Element::RotZ120 => [B, C, A, E, F, D],
            D3Element::RotZ240 => [C, A, B, F, D, E],
            D3Element::HalfTurnPi3 => [D, F, E, A, C, B],
            D3Element::HalfTurnX => [F, E, D, C, B, A],
            D3Element::HalfTurn5Pi3 => [E, D, F, B, A, C],
        }
    }
}

/// Rotate every line of `config` by `element`. Line `J` of the result is the
/// image of line `J`; it coincides with line `element.permutation()[J]` of
/// the input when the input is a member of the family.
pub fn apply_d3(config: &Configuration, element: D3Element) -> Configuration {
    let m = element.rotation();
    Configuration { lines: config.lines.map(|l| line_from_frame(&frame_of(&l).transformed(&m))) }
}

/// Recover angle coordinates from a frame. Undefined at the poles, where any
/// longitude is returned.
pub fn line_from_frame(frame: &LineFrame) -> TangentLine {
    let p = frame.point;
    let phi = p.z.clamp(-1.0, 1.0).asin();
    let kappa = p.y.atan2(p.x);
    let (sp, cp) = phi.sin_cos();
    let (sk, ck) = kappa.sin_cos();
    let north = Vec3::new(-sp * ck, -sp * sk, cp);
    let east = p.cross(&north);
    let delta = frame.direction.dot(&east).atan2(frame.direction.dot(&north));
    TangentLine::new(phi, kappa, delta)
}

/// Largest deviation between two unoriented lines, measured on their frames.
pub fn line_deviation(u: &TangentLine, v: &TangentLine) -> f64 {
    let (fu, fv) = (frame_of(u), frame_of(v));
    let dp = (fu.point - fv.point).norm();
    let dd = (fu.direction - fv.direction).norm().min((fu.direction + fv.direction).norm());
    dp.max(dd)
}
