//! Horizontal-cut patterns of a 16 × 16 tile lit from 120°, steered across
//! the 45°..135° range, plus the unprogrammed (specular) surface.

use ris_mimo::geometry::{Pose, Vec3};
use ris_mimo::ris::{angle_grid, beam_pattern, far_field_steering, peak_angle, RisConfig, RisPanel};

fn main() -> ris_mimo::Result<()> {
    let tile = RisPanel::tile(Pose::at(Vec3::zeros()));
    let f = 3.5e9;
    let grid = angle_grid(0.0, 180.0, 0.1);

    let uniform = beam_pattern(&tile, &RisConfig::uniform(16, 16, 0), 120.0, &grid, f)?;
    println!("uniform surface peak: {:.1} deg", peak_angle(&grid, &uniform).unwrap());

    for steer in [45.0, 60.0, 75.0, 90.0, 105.0, 120.0, 135.0] {
        let config = far_field_steering(&tile, 120.0, steer, f);
        let pattern = beam_pattern(&tile, &config, 120.0, &grid, f)?;
        let peak = peak_angle(&grid, &pattern).unwrap();
        // level of the commanded direction relative to the pattern peak
        let at_target = pattern[(steer / 0.1_f64).round() as usize];
        println!("steer {steer:>5.1} deg: peak {peak:>5.1} deg, commanded direction at {at_target:>6.2} dB");
    }
    Ok(())
}
