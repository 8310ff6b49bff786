//! Time evolution from a point perturbation of the homogeneous state.
//!
//! Usage: `time_evolution [kappa] [t_end_ms] [dt_ms]` (defaults 55, 2400, 0.5). The perturbed
//! site's Gaussian centre is shifted by 1e-13.

use nfbif::connectivity::{Potential, PotentialSpec};
use nfbif::field_sim::{InitSpec, PointTarget, Scheme, SimConfig, SimSpec, Simulator};
use nfbif::gain::GainFunction;
use nfbif::homogeneous::ModelParams;

fn main() -> nfbif::error::Result<()> {
    let args: Vec<f64> = std::env::args()
        .skip(1)
        .filter_map(|a| a.parse().ok())
        .collect();
    let kappa = args.first().copied().unwrap_or(55.0);
    let t_end = args.get(1).copied().unwrap_or(2400.0);
    let dt = args.get(2).copied().unwrap_or(0.5);
    let nx = 64;
    let w = Potential::from_spec(&PotentialSpec::standard_tanh_ring(1.0), 1.0, 2, nx)?;
    let params = ModelParams::new(1.0, 2, 3.0, 10.0, GainFunction::standard_smooth(), w.w0())?;
    let mut spec = SimSpec::new(kappa, t_end);
    spec.nx = nx;
    spec.scheme = Scheme::ImplicitS;
    spec.dt = Some(dt);
    spec.record_interval = Some(20.0);
    spec.init = InitSpec::HomogeneousPlusPointPerturbation {
        amplitude: 1e-13,
        site: None,
        on: PointTarget::Centre,
    };
    let sim = Simulator::new(SimConfig::new(&params, w, &spec)?)?;
    let out = sim.run(&[40.0, 220.0, 1500.0, 1810.0, 2190.0, 2400.0])?;
    for r in &out.timeseries {
        println!(
            "t = {:7.1}  deviation = {:.4e}  dominant = {:?}  hexagonality = {:.4}",
            r.t, r.deviation_l2, r.dominant, r.hexagonality
        );
    }
    println!("{:#?}", out.summary);
    Ok(())
}
