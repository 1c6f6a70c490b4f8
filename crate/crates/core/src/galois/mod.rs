//! Exact coefficient tables, their hidden dihedral symmetry, and the field
//! of definition of the Taylor coefficients along the curve.

pub mod curve_algebra;
pub mod field;
pub mod quad;
pub mod reconstruct;
pub mod symmetry;
pub mod tables;

pub use curve_algebra::{closed_form, closed_form_ad, closed_form_af, CurveAlgebra};
pub use field::{field_check, Field, FieldReport};
pub use quad::QuadExt;
pub use reconstruct::{reconstruct, Reconstruction};
pub use symmetry::{generate_group, symmetry_report, SymmetryOp, SymmetryReport};
pub use tables::{order1, phi_matrix, tables, CoeffTable};
