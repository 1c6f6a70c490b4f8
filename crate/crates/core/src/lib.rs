#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod calculus;
pub mod certificate;
pub mod cli;
pub mod configuration;
pub mod error;
pub mod galois;
pub mod geometry;
