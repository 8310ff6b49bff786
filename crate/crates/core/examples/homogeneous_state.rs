//! Homogeneous stationary state across κ, its closed form below κ_c and its large-κ limit.

use nfbif::gain::GainFunction;
use nfbif::homogeneous::{asymptotic_limits, kappa_c, solve_rho_bar_inf, ModelParams};

fn main() -> nfbif::error::Result<()> {
    let params = ModelParams::new(1.0, 2, 3.0, 10.0, GainFunction::Relu, -20.0)?;
    let kc = kappa_c(&params);
    println!("kappa_c = {kc:.6}");
    println!(
        "{:>12} {:>14} {:>14} {:>14} {:>14} closed",
        "kappa", "rho_bar", "phi0", "rho(0)", "d rho/d kappa"
    );
    for i in 0..=16 {
        let kappa = 0.1 * 10f64.powf(i as f64 / 4.0);
        let st = solve_rho_bar_inf(&params, kappa)?;
        println!(
            "{:12.4e} {:14.8e} {:14.8e} {:14.8e} {:14.6e} {}",
            kappa,
            st.rho_bar_inf,
            st.phi0,
            st.rho_inf_at_zero,
            st.d_rho_bar_d_kappa,
            st.closed_form
        );
    }
    let (rho_star, phi_star) = asymptotic_limits(&params)?;
    println!(
        "rho* = {rho_star:.10} (ReLU prediction B/(L^d + |W0|) = {:.10}), Phi* = {phi_star:.6}",
        3.0 / 21.0
    );
    Ok(())
}
