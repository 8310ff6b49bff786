//! Discrete homogeneous steady state and its fixed-point residual under one step.

use nfbif::connectivity::{Potential, PotentialSpec};
use nfbif::field_sim::{deviation_sup, Scheme, SimConfig, SimSpec, Simulator};
use nfbif::gain::GainFunction;
use nfbif::homogeneous::{solve_rho_bar_inf, ModelParams};

fn main() -> nfbif::error::Result<()> {
    let nx = 64;
    let w = Potential::from_spec(&PotentialSpec::standard_tanh_ring(1.0), 1.0, 2, nx)?;
    let params = ModelParams::new(1.0, 2, 3.0, 10.0, GainFunction::standard_smooth(), w.w0())?;
    for scheme in [Scheme::Explicit, Scheme::ImplicitS] {
        let mut spec = SimSpec::new(55.0, 0.0);
        spec.nx = nx;
        spec.scheme = scheme;
        let sim = Simulator::new(SimConfig::new(&params, w.clone(), &spec)?)?;
        let cont = solve_rho_bar_inf(&sim.config().params, 55.0)?;
        let h = sim.homogeneous();
        let st = sim.discrete_steady_state();
        let start = std::time::Instant::now();
        let next = sim.step(&st)?;
        let elapsed = start.elapsed();
        let drift: f64 = st
            .rho
            .iter()
            .zip(&next.rho)
            .fold(0.0, |m, (a, b)| m.max((a - b).abs()));
        println!(
            "{scheme:?}: dt = {:.4e} ms, centre = {:.12}, discrete mean = {:.12} (continuum {:.12}), \
             step residual = {drift:.3e}, mean drift = {:.3e}, step time = {elapsed:?}",
            sim.config().dt,
            h.phi,
            h.rho_bar,
            cont.rho_bar_inf,
            deviation_sup(&sim.rho_bar(&next), h.rho_bar),
        );
    }
    Ok(())
}
