//! Water-filling capacity of the Zone-A channel against transmit power,
//! before and after optimization, with the EIRP-limited operating point.

use std::path::Path;

use ris_mimo::io::{parse_scenario, ZONE_A_SCENARIO};
use ris_mimo::metrics::{capacity_curve, eirp_to_tx_power};
use ris_mimo::{optimize, Synthesizer};

fn main() -> ris_mimo::Result<()> {
    let loaded = parse_scenario(ZONE_A_SCENARIO, Path::new("zone_a.toml"))?;
    let scn = &loaded.scenario;
    let bandwidth = scn.band.bandwidth();
    let noise = scn.noise.power_w(bandwidth);
    let limit = eirp_to_tx_power(44.0, bandwidth, 20.4)?;
    println!("EIRP-limited transmit power: {limit:.1} dBm over {:.0} MHz", bandwidth / 1e6);

    let synth = Synthesizer::new(scn)?;
    let best = optimize(scn, &loaded.swarm)?.best_config;
    let powers: Vec<f64> = (0..=8).map(|k| 5.0 * k as f64).chain([limit]).collect();
    let before = capacity_curve(&synth.sweep(None)?, &powers, noise, bandwidth)?;
    let after = capacity_curve(&synth.sweep(Some(&best))?, &powers, noise, bandwidth)?;
    println!("{:>8} {:>14} {:>14}", "P [dBm]", "before [Mb/s]", "after [Mb/s]");
    for ((p, b), a) in powers.iter().zip(&before.capacities_bps).zip(&after.capacities_bps) {
        println!("{p:>8.1} {:>14.1} {:>14.1}", b / 1e6, a / 1e6);
    }
    Ok(())
}
