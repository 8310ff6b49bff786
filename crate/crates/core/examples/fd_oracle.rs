//! Finite-difference Fréchet derivatives of the mean functional against the closed forms.

use nfbif::bifurcation::{
    find_crossings, kernel_dimension, response_derivatives, CrossingOptions, FdOracle,
};
use nfbif::connectivity::{norm_omega_sq, Potential, PotentialSpec};
use nfbif::gain::GainFunction;
use nfbif::homogeneous::{solve_rho_bar_inf, ModelParams};

fn main() -> nfbif::error::Result<()> {
    let w = Potential::from_spec(&PotentialSpec::standard_tanh_ring(1.0), 1.0, 2, 128)?;
    let params = ModelParams::new(1.0, 2, 3.0, 10.0, GainFunction::standard_smooth(), w.w0())?;
    let set = find_crossings(&w, &params, &CrossingOptions::new(6, 1e3))?;
    let oracle = FdOracle::new(&params, &w)?;
    for kappa in [40.0, 55.0, 80.0] {
        let (_, table) = kernel_dimension(&params, kappa, &set.classes)?;
        for (class, ev) in set
            .classes
            .iter()
            .zip(&table)
            .filter(|(c, _)| c.ratio > 2.0)
        {
            let d1 = oracle.derivative(kappa, &class.members, 1)?;
            let d2 = oracle.derivative(kappa, &class.members, 2)?;
            let d3 = oracle.derivative(kappa, &class.members, 3)?;
            let st = solve_rho_bar_inf(&params, kappa)?;
            let (_, _, n3) = response_derivatives(&st, &params)?;
            let c = class.conv_eigenvalue(params.l);
            let cubic = -n3 * c.powi(3) * norm_omega_sq(&class.members, params.l);
            println!(
                "kappa {kappa:5.1} {:<14} D1 {d1:+.8e} (lambda {:+.8e})  D2 {d2:+.2e}  D3 {d3:+.6e} (closed {cubic:+.6e})",
                class.label(),
                ev.lambda
            );
        }
    }
    Ok(())
}
