//! Round trip through the measurement files: a synthesized sweep is delayed
//! by a fiber link, written as raw CSV with its reference trace, ingested
//! and de-embedded.

use std::f64::consts::PI;
use std::path::Path;

use num_complex::Complex64;
use ris_mimo::channel::{ChannelMatrix, FrequencySweep};
use ris_mimo::io::{export_sweep, ingest_sweep, parse_scenario, reference_to_csv, write_atomic, ReferenceTrace, VLOS_SCENARIO};
use ris_mimo::ris::RisConfig;
use ris_mimo::synthesize;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let scn = parse_scenario(VLOS_SCENARIO, Path::new("vlos.toml"))?.scenario;
    let truth = synthesize(&scn, Some(&RisConfig::uniform(32, 32, 0)))?;

    let tau = 2.5e-6;
    let fiber = |f: f64| Complex64::from_polar(0.3, -2.0 * PI * f * tau);
    let raw = FrequencySweep::new(
        "raw",
        truth
            .matrices
            .iter()
            .map(|m| ChannelMatrix::new(m.entries.map(|h| h * fiber(m.frequency)), m.frequency))
            .collect::<ris_mimo::Result<_>>()?,
    )?;

    let dir = std::env::temp_dir().join(format!("ris-mimo-deembed-{}", std::process::id()));
    std::fs::create_dir_all(&dir)?;
    let raw_path = dir.join("raw.csv");
    let ref_path = dir.join("reference.csv");
    export_sweep(&raw, &raw_path)?;
    let trace = ReferenceTrace {
        frequencies: raw.frequencies(),
        values: raw.frequencies().iter().map(|&f| fiber(f)).collect(),
    };
    write_atomic(&ref_path, reference_to_csv(&trace).as_bytes())?;

    let calibrated = ingest_sweep(&raw_path, Some(&ref_path))?;
    let residual = calibrated
        .matrices
        .iter()
        .zip(&truth.matrices)
        .flat_map(|(a, b)| a.entries.iter().zip(b.entries.iter()).map(|(x, y)| (x - y).norm() / y.norm().max(1e-300)))
        .fold(0.0, f64::max);
    println!("files written under {}", dir.display());
    println!("{} frequencies, worst relative residual after de-embedding {residual:.2e}", calibrated.len());
    Ok(())
}
