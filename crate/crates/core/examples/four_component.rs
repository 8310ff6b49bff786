//! Four-component factor and the shifted crossings for north/west/south/east shifts.

use nfbif::bifurcation::{find_crossings, CrossingOptions};
use nfbif::connectivity::{four_comp_factor, ModeTableOptions, Potential, PotentialSpec};
use nfbif::gain::GainFunction;
use nfbif::homogeneous::ModelParams;

fn main() -> nfbif::error::Result<()> {
    let quarter = vec![vec![0.25], vec![-0.25], vec![0.25], vec![-0.25]];
    println!(
        "factor of k = 1 under quarter shifts: {}",
        four_comp_factor(&[1], &quarter, 1.0)
    );
    let w = Potential::from_spec(&PotentialSpec::standard_tanh_ring(1.0), 1.0, 2, 128)?;
    let params = ModelParams::new(1.0, 2, 3.0, 10.0, GainFunction::standard_smooth(), w.w0())?;
    for r in [0.0, 0.05] {
        let shifts = vec![vec![0.0, r], vec![-r, 0.0], vec![0.0, -r], vec![r, 0.0]];
        let mut opts = CrossingOptions::new(8, 1e4);
        opts.modes = ModeTableOptions {
            shifts: Some(shifts),
            ..Default::default()
        };
        let set = find_crossings(&w, &params, &opts)?;
        println!("shift length {r}:");
        for pt in set.crossings.iter().take(4) {
            println!(
                "  {:<14} factor {:.6} kappa* {:.4}",
                pt.class.label(),
                pt.class.four_comp_factor,
                pt.kappa_star
            );
        }
    }
    Ok(())
}
