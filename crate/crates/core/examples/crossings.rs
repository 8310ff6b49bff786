//! Crossings and branch coefficients for the tanh-ring potential with the smooth gain.

use nfbif::bifurcation::{branch_coefficients, find_crossings, BranchOptions, CrossingOptions};
use nfbif::connectivity::{Potential, PotentialSpec};
use nfbif::gain::GainFunction;
use nfbif::homogeneous::ModelParams;

fn main() -> nfbif::error::Result<()> {
    let w = Potential::from_spec(&PotentialSpec::standard_tanh_ring(1.0), 1.0, 2, 128)?;
    let params = ModelParams::new(1.0, 2, 3.0, 10.0, GainFunction::standard_smooth(), w.w0())?;
    let set = find_crossings(&w, &params, &CrossingOptions::new(8, 1e4))?;
    println!(
        "kappa_c = {:.6}, psi limit = {:.6}",
        set.kappa_c, set.psi_limit
    );
    for pt in set.crossings.iter().take(5) {
        let bc = branch_coefficients(pt, &params, Some(&w), BranchOptions::default())?;
        println!(
            "{:<14} kappa* = {:9.4} dim = {} ok = {} K1 = {:.4e} K2 = {:.4e} kappa'' = {:.4e} ({:?})",
            pt.class.label(),
            pt.kappa_star,
            pt.kernel_dim,
            pt.flags.all_ok(),
            bc.k1,
            bc.k2,
            bc.kappa_pp0,
            bc.label
        );
        if let Some(fd) = bc.kappa_pp0_fd {
            println!("    finite-difference kappa'' = {fd:.4e}");
        }
        if let Some(r) = &bc.reduced {
            println!("    reduced kappa'' = {:.4e} ({:?})", r.kappa_pp0, r.label);
        }
        for warn in &bc.warnings {
            println!("    warning: {warn}");
        }
    }
    Ok(())
}
