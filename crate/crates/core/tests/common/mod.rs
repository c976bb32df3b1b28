#![allow(dead_code)]

use std::path::Path;

use ris_mimo::channel::{Band, DirectPath, NoiseSpec, ScatterModel, Scenario};
use ris_mimo::geometry::{AntennaArray, Vec3};
use ris_mimo::io::{parse_scenario, LoadedScenario, VLOS_SCENARIO, ZONE_A_SCENARIO};
use ris_mimo::ris::{panel_pose, RisPanel};

pub fn zone_a() -> LoadedScenario {
    parse_scenario(ZONE_A_SCENARIO, Path::new("zone_a.toml")).unwrap()
}

pub fn vlos() -> LoadedScenario {
    parse_scenario(VLOS_SCENARIO, Path::new("vlos.toml")).unwrap()
}

pub fn band(center_hz: f64) -> Band {
    Band {
        lo_hz: center_hz - 25e6,
        hi_hz: center_hz + 25e6,
        n_points: 11,
        label: "test".into(),
    }
}

/// Isotropic single-port endpoints, no scatter, direct path as given.
pub fn point_scenario(tx: Vec3, rx: Vec3, ris: RisPanel, direct: bool, center_hz: f64) -> Scenario {
    Scenario {
        name: "points".into(),
        tx_array: AntennaArray::isotropic_point(tx),
        rx_array: AntennaArray::isotropic_point(rx),
        ris,
        direct: DirectPath {
            enabled: direct,
            blockage_db: 0.0,
        },
        scatter: ScatterModel::default(),
        noise: NoiseSpec::default(),
        band: band(center_hz),
    }
}

/// Broadside-facing 32 × 32 panel at the origin with its normal along +y.
pub fn panel_at_origin() -> RisPanel {
    RisPanel::full(panel_pose(Vec3::zeros(), 90.0))
}
