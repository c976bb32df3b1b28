//! Effective rank of textbook matrices and of the Zone-A channel with and
//! without the dominant reflected path.

use std::path::Path;

use nalgebra::DVector;
use num_complex::Complex64;
use ris_mimo::channel::CMatrix;
use ris_mimo::io::{parse_scenario, ZONE_A_SCENARIO};
use ris_mimo::metrics::{effective_rank, SingularSpectrum};
use ris_mimo::{optimize, Synthesizer};

fn main() -> ris_mimo::Result<()> {
    let diag = |v: &[f64]| CMatrix::from_diagonal(&DVector::from_iterator(v.len(), v.iter().map(|&x| Complex64::new(x, 0.0))));
    for values in [&[1.0, 1.0, 1.0, 1.0][..], &[2.0, 1.0], &[1.0, 0.3, 0.1, 0.01], &[1.0, 0.0, 0.0, 0.0]] {
        println!("diag{values:?}: effective rank {:.4}", effective_rank(&diag(values))?);
    }

    let loaded = parse_scenario(ZONE_A_SCENARIO, Path::new("zone_a.toml"))?;
    let scn = &loaded.scenario;
    let synth = Synthesizer::new(scn)?;
    let best = optimize(scn, &loaded.swarm)?.best_config;
    for (label, sweep) in [("reference", synth.sweep(None)?), ("optimized", synth.sweep(Some(&best))?)] {
        let mid = &sweep.matrices[sweep.len() / 2];
        let spec = SingularSpectrum::of(&mid.entries);
        let rel: Vec<String> = spec.values.iter().map(|s| format!("{:.3}", s / spec.largest())).collect();
        println!(
            "{label}: singular values / max at {:.3} GHz [{}], effective rank {:.3}",
            mid.frequency / 1e9,
            rel.join(", "),
            effective_rank(&mid.entries)?
        );
    }
    Ok(())
}
