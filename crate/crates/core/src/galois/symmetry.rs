//! Signed label permutations, optionally composed with Galois conjugation,
//! acting on coefficient tables.

use std::collections::VecDeque;

use crate::calculus::{full_index, Angle};
use crate::configuration::Label;
use crate::galois::tables::{self, CoeffTable};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct SymmetryOp {
    /// `perm[J]` is the image of line `J`.
    pub perm: [Label; 6],
    /// Sign applied to the `κ`, `φ`, `δ` slots.
    pub signs: [i8; 3],
    pub conjugate: bool,
}

impl SymmetryOp {
    pub fn identity() -> Self {
        Self { perm: Label::ALL, signs: [1; 3], conjugate: false }
    }

    /// `Π_ϖ`: the relabeling (A,B,C)(D,E,F).
    pub fn varpi() -> Self {
        use Label::*;
        Self { perm: [B, C, A, E, F, D], ..Self::identity() }
    }

    /// `Π_ρ`: the relabeling (A,D)(B,F)(C,E).
    pub fn rho() -> Self {
        use Label::*;
        Self { perm: [D, F, E, A, C, B], ..Self::identity() }
    }

    /// `Π_ς = ι ∘ Π_ς°` with `ς = (B,C)(D,F)` and signs `(−, +, −)`.
    pub fn varsigma() -> Self {
        use Label::*;
        Self { perm: [A, C, B, F, E, D], signs: [-1, 1, -1], conjugate: true }
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(&self, other: &Self) -> Self {
        Self {
            perm: other.perm.map(|j| self.perm[j.index()]),
            signs: [0, 1, 2].map(|k| self.signs[k] * other.signs[k]),
            conjugate: self.conjugate ^ other.conjugate,
        }
    }

    pub fn pow(&self, n: u32) -> Self {
        (0..n).fold(Self::identity(), |acc, _| self.compose(&acc))
    }

    /// Image slot and sign of the 18-slot coordinate `slot`.
    pub fn map_slot(&self, slot: usize) -> (usize, i64) {
        let (label, angle) = (Label::from_index(slot / 3), Angle::ALL[slot % 3]);
        (full_index(self.perm[label.index()], angle), self.signs[slot % 3] as i64)
    }

    pub fn apply(&self, table: &CoeffTable) -> CoeffTable {
        let mut out = CoeffTable { order: table.order, pair: table.pair.map(&self.perm), coeffs: Default::default() };
        for (key, c) in &table.coeffs {
            let mut sign = 1;
            let image: Vec<usize> = key
                .iter()
                .map(|&s| {
                    let (t, sg) = self.map_slot(s);
                    sign *= sg;
                    t
                })
                .collect();
            let c = if self.conjugate { c.conjugate() } else { c.clone() };
            let c = if sign < 0 { -c } else { c };
            out.add(image, c);
        }
        out
    }
}

/// Closure of `generators` under composition.
pub fn generate_group(generators: &[SymmetryOp]) -> Vec<SymmetryOp> {
    let mut elems = vec![SymmetryOp::identity()];
    let mut queue = VecDeque::from([SymmetryOp::identity()]);
    while let Some(g) = queue.pop_front() {
        for s in generators {
            let h = s.compose(&g);
            if !elems.contains(&h) {
                elems.push(h);
                queue.push_back(h);
            }
        }
    }
    elems
}

/// `g(T) = T′` for every element `g` and every pair of tables with
/// `g(T).pair = T′.pair`, with exact coefficient equality.
pub fn round_trip_consistent(tables: &[CoeffTable], group: &[SymmetryOp]) -> bool {
    tables.iter().all(|t| {
        group.iter().all(|g| {
            let img = g.apply(t);
            tables.iter().filter(|u| u.pair == img.pair && u.order == img.order).all(|u| *u == img)
        })
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SymmetryReport {
    pub group_order: usize,
    pub rho_sigma_sixth_power_is_identity: bool,
    pub varpi_relation_holds: bool,
    pub order1_round_trip: bool,
    pub order2_round_trip: bool,
}

impl SymmetryReport {
    pub fn all_hold(&self) -> bool {
        self.group_order == 12
            && self.rho_sigma_sixth_power_is_identity
            && self.varpi_relation_holds
            && self.order1_round_trip
            && self.order2_round_trip
    }
}

/// Group structure and exact invariance of the stored tables.
pub fn symmetry_report() -> SymmetryReport {
    let (rho, sigma) = (SymmetryOp::rho(), SymmetryOp::varsigma());
    let rs = rho.compose(&sigma);
    let group = generate_group(&[SymmetryOp::varpi(), rho, sigma]);
    SymmetryReport {
        group_order: group.len(),
        rho_sigma_sixth_power_is_identity: rs.pow(6) == SymmetryOp::identity(),
        varpi_relation_holds: rs.compose(&rs) == SymmetryOp::varpi(),
        order1_round_trip: round_trip_consistent(&tables::order1_tables(), &group),
        order2_round_trip: round_trip_consistent(&tables::order2_tables(), &group),
    }
}
