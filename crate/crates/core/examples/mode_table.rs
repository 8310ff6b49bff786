//! Fourier mode table of the anisotropic tanh-ring potential, with and without permutation classes.

use nfbif::commands::mode_csv;
use nfbif::connectivity::{mode_table, Exchangeable, ModeTableOptions, Potential, PotentialSpec};

fn main() -> nfbif::error::Result<()> {
    for a in [1.0, 2.0] {
        let w = Potential::from_spec(&PotentialSpec::standard_tanh_ring(a), 1.0, 2, 128)?;
        println!(
            "a = {a}: W0 = {:.6}, exchangeable = {}",
            w.w0(),
            w.is_exchangeable()
        );
        let opts = ModeTableOptions {
            exchangeable: Exchangeable::Auto,
            shifts: None,
        };
        let classes = mode_table(&w, 6, &opts)?;
        print!("{}", mode_csv(&classes[..6]));
    }
    Ok(())
}
