//! Numerical laboratory for contact metric manifolds and their
//! (κ, μ)-curvature conditions.

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod chart;
pub mod expr;
pub mod homogeneous;
pub mod report;
pub mod samples;
pub mod tensor;
pub mod contact;
pub mod boeckx;
pub mod deform;
pub mod kmu;
pub mod registry;
pub mod constructions;
