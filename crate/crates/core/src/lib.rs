// NaN inputs are rejected through negated comparisons throughout.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod geometry;
pub mod convexcal;
pub mod quadrature;
pub mod funcspace;
pub mod rmintegral;
pub mod recovery;
pub mod knots;
pub mod noisy;
pub mod cli;
pub mod selftest;
