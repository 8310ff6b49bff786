#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bifurcation;
pub mod commands;
pub mod config;
pub mod connectivity;
pub mod error;
pub mod field_sim;
pub mod gain;
pub mod grid;
pub mod homogeneous;
pub mod scalar;
