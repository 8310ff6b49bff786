//! Tabulate f, g, h and the derivatives of g over η.

use nfbif::scalar::{f_eta, g_eta, g_prime, g_second, h_eta, EtaValue};

fn main() -> nfbif::error::Result<()> {
    println!(
        "{:>8} {:>14} {:>14} {:>14} {:>14} {:>14}",
        "eta", "f", "g", "h", "g'", "g''"
    );
    for i in 0..=20 {
        let eta = EtaValue::new(0.25 * i as f64)?;
        println!(
            "{:8.3} {:14.6e} {:14.6e} {:14.6e} {:14.6e} {:14.6e}",
            eta.get(),
            f_eta(eta),
            g_eta(eta),
            h_eta(eta),
            g_prime(eta),
            g_second(eta)
        );
    }
    let zero = EtaValue::new(0.0)?;
    println!(
        "g(0) - (1 - 2/pi) = {:e}",
        g_eta(zero) - (1.0 - 2.0 / std::f64::consts::PI)
    );
    Ok(())
}
