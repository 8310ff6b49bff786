//! Write the tangent patterns of the leading crossings and their superpositions as CSV grids.
//!
//! Usage: `patterns [output_dir]` (default `patterns_out`).

use std::path::PathBuf;

use nfbif::bifurcation::PatternPreset;
use nfbif::commands::cmd_pattern;
use nfbif::error::Error;

fn main() -> nfbif::error::Result<()> {
    let dir = PathBuf::from(
        std::env::args()
            .nth(1)
            .unwrap_or_else(|| "patterns_out".into()),
    );
    std::fs::create_dir_all(&dir).map_err(|source| Error::Io {
        path: dir.display().to_string(),
        source,
    })?;
    let presets = [
        ("class_0_4", PatternPreset::ClassK { k: vec![0, 4] }),
        ("class_1_4", PatternPreset::ClassK { k: vec![1, 4] }),
        ("mode_3_3", PatternPreset::ModeK { k: vec![3, 3] }),
        ("superpose_2nd_3rd", PatternPreset::Superpose2nd3rd),
        ("superpose_1st_3rd", PatternPreset::Superpose1st3rd),
        ("superpose_1st_2nd", PatternPreset::Superpose1st2nd),
        ("hex", PatternPreset::Hex),
    ];
    for (name, preset) in presets {
        let path = dir.join(format!("{name}.csv"));
        std::fs::write(&path, cmd_pattern(&preset, 128, 2, 1.0)?).map_err(|source| Error::Io {
            path: path.display().to_string(),
            source,
        })?;
        println!("wrote {}", path.display());
    }
    Ok(())
}
