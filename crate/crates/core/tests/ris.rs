mod common;

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use ris_mimo::geometry::{cartesian_to_spherical, path_length, Polarization, SphericalCoord, Vec3};
use ris_mimo::ris::{
    angle_grid, beam_pattern, desired_phase_between, far_field_steering, peak_angle, phase_profile_for_focus,
    reradiated_field, reradiated_field_continuous, Endpoint, FocusTarget, RisConfig, RisPanel,
};

use common::*;

/// (quantized, continuous) field magnitudes for a focus from `src` to `obs`.
fn quantized_vs_continuous(panel: &RisPanel, config: &RisConfig, src: &Endpoint, obs: &Endpoint, f: f64) -> (f64, f64) {
    let phases: Vec<f64> = (0..panel.len()).map(|i| desired_phase_between(panel, i, src, obs, f)).collect();
    let q = reradiated_field(panel, config, src, obs, f, Polarization::Vertical).unwrap().norm();
    let c = reradiated_field_continuous(panel, &phases, src, obs, f).unwrap().norm();
    (q, c)
}

fn front_point(rng: &mut ChaCha8Rng) -> Vec3 {
    let r = rng.random_range(5.0..200.0);
    let theta = rng.random_range(60f64..120.0).to_radians();
    let phi = rng.random_range(15f64..165.0).to_radians();
    // panel_at_origin has local axes equal to global axes up to the x/y swap
    let s = SphericalCoord { r, theta, phi };
    ris_mimo::geometry::spherical_to_cartesian(&s, &panel_at_origin().pose)
}

#[test]
fn quantization_never_gains_and_respects_one_bit_bound() {
    let panel = panel_at_origin();
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let one_bit = 10.0 * (2.0 / PI).powi(2).log10();
    for _ in 0..100 {
        let (tx, rx) = (front_point(&mut rng), front_point(&mut rng));
        let f = rng.random_range(3.3e9..3.7e9);
        let target = FocusTarget {
            tx_position: tx,
            rx_coord: cartesian_to_spherical(&rx, &panel.pose).unwrap(),
            flip: rng.random(),
            frequency: f,
        };
        let config = phase_profile_for_focus(&panel, &target).unwrap();
        let (q, c) = quantized_vs_continuous(&panel, &config, &Endpoint::Point(tx), &Endpoint::Point(rx), f);
        assert!(q <= c * (1.0 + 1e-12));
        let loss_db = 20.0 * (q / c).log10();
        assert!(loss_db >= one_bit - 1.0, "loss {loss_db:.2} dB");
    }
}

#[test]
fn tile_steering_loss_within_one_bit_budget() {
    let tile = RisPanel::tile(panel_at_origin().pose);
    let f = 3.5e9;
    let config = far_field_steering(&tile, 120.0, 90.0, f);
    let src = Endpoint::Direction(tile.azimuth_direction(120.0));
    let obs = Endpoint::Direction(tile.azimuth_direction(90.0));
    let (q, c) = quantized_vs_continuous(&tile, &config, &src, &obs, f);
    assert!(20.0 * (q / c).log10() >= -(3.92 + 1.0));
}

#[test]
fn zone_a_focus_peaks_at_commanded_azimuth() {
    let scn = zone_a().scenario;
    let panel = scn.ris.clone();
    let f = 3.6e9;
    let tx = scn.tx_array.pose.origin();
    let target = FocusTarget {
        tx_position: tx,
        rx_coord: SphericalCoord::from_degrees(20.0, 90.0, 60.0).unwrap(),
        flip: false,
        frequency: f,
    };
    let config = phase_profile_for_focus(&panel, &target).unwrap();
    let incidence = cartesian_to_spherical(&tx, &panel.pose).unwrap().phi.to_degrees();
    let grid = angle_grid(0.0, 180.0, 0.1);
    let pattern = beam_pattern(&panel, &config, incidence, &grid, f).unwrap();
    let peak = peak_angle(&grid, &pattern).unwrap();
    assert!((peak - 60.0).abs() <= 3.0, "peak {peak}° for incidence {incidence:.1}°");
}

#[test]
fn beam_pattern_flip_symmetry() {
    let tile = RisPanel::tile(panel_at_origin().pose);
    let grid = angle_grid(0.0, 180.0, 1.0);
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for _ in 0..50 {
        let bits: Vec<u8> = (0..tile.len()).map(|_| rng.random_range(0..2)).collect();
        let c = RisConfig::from_bits(16, 16, bits).unwrap();
        let a = beam_pattern(&tile, &c, 120.0, &grid, 3.5e9).unwrap();
        let b = beam_pattern(&tile, &c.flipped(), 120.0, &grid, 3.5e9).unwrap();
        // compared in linear power: dB amplifies rounding in deep nulls
        let lin = |db: f64| 10f64.powf(db / 10.0);
        assert!(a.iter().zip(&b).all(|(x, y)| (lin(*x) - lin(*y)).abs() <= 1e-9));
        assert_eq!(a.iter().cloned().fold(f64::MIN, f64::max), 0.0);
    }
}

#[test]
fn zone_a_tx_is_175_m_from_ris() {
    let scn = zone_a().scenario;
    let d = path_length(&scn.tx_array.pose.origin(), &scn.ris.pose.origin());
    assert!((d - 175.0).abs() < 0.5, "{d}");
}

fn tile_peak(steer: f64) -> f64 {
    let tile = RisPanel::tile(panel_at_origin().pose);
    let grid = angle_grid(0.0, 180.0, 0.1);
    let config = far_field_steering(&tile, 120.0, steer, 3.5e9);
    peak_angle(&grid, &beam_pattern(&tile, &config, 120.0, &grid, 3.5e9).unwrap()).unwrap()
}

#[test]
fn tile_steering_hits_interior_targets() {
    for steer in [60.0, 75.0, 90.0, 105.0, 120.0] {
        let peak = tile_peak(steer);
        assert!((peak - steer).abs() <= 3.0, "{steer}° -> {peak}°");
    }
}

/// 45° shares its 1-bit profile with the mirror lobe near 73°, and 135°
/// lands about 4° low; see the README.
#[test]
#[ignore = "unattainable with a real-valued 1-bit aperture"]
fn tile_steering_hits_every_target() {
    for steer in [45.0, 135.0] {
        let peak = tile_peak(steer);
        assert!((peak - steer).abs() <= 3.0, "{steer}° -> {peak}°");
    }
}
