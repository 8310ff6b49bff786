//! Torus connectivity potentials and their cosine-basis spectrum.

mod modes;
mod potential;

pub use modes::{
    class_field, class_spread, cos_turns, format_mode, four_comp_factor, fourier_mode,
    h_stability_check, mode_table, norm_omega_sq, omega_field, theta, Exchangeable, ModeClass,
    ModeTableOptions,
};
pub use potential::{Potential, PotentialSpec};
