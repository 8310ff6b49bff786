//! Load a JSON run configuration and print its bifurcation report.
//!
//! Usage: `run_config <config.json> [key=value ...]`.

use std::path::PathBuf;

use nfbif::commands::{cmd_bifurcations, to_json};
use nfbif::config::RunConfig;
use nfbif::error::Error;

fn main() -> nfbif::error::Result<()> {
    let mut args = std::env::args().skip(1);
    let path = PathBuf::from(
        args.next()
            .ok_or_else(|| Error::Config("usage: run_config <config.json>".into()))?,
    );
    let overrides: Vec<String> = args.collect();
    let cfg = RunConfig::load(&path, &overrides)?;
    print!("{}", to_json(&cmd_bifurcations(&cfg)?)?);
    Ok(())
}
