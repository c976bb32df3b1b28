use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::channel::{Band, DirectPath, NoiseSpec, ScatterCluster, ScatterModel, Scenario};
use crate::error::{Error, Result};
use crate::geometry::{AntennaArray, ArrayElement, ElementPattern, Polarization, Pose, Vec3, DEFAULT_BACKLOBE_DB};
use crate::pso::{FlipMode, SearchBounds, SwarmConfig};
use crate::ris::{panel_pose, RisPanel, UnitCell, DEFAULT_COLS, DEFAULT_PITCH_M, DEFAULT_ROWS, DESIGN_BAND_HZ};

pub const SCHEMA_VERSION: u32 = 1;

/// Bundled Zone-A-like street scenario.
pub const ZONE_A_SCENARIO: &str = include_str!("../../scenarios/zone_a.toml");

/// Reflected path only, receiver in the far field of the surface.
pub const VLOS_SCENARIO: &str = include_str!("../../scenarios/vlos.toml");

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ArrayDoc {
    pub origin_m: [f64; 3],
    pub boresight_azimuth_deg: f64,
    pub downtilt_deg: Option<f64>,
    pub pattern: String,
    pub peak_gain_dbi: Option<f64>,
    pub az_beamwidth_deg: Option<f64>,
    pub el_beamwidth_deg: Option<f64>,
    pub backlobe_db: Option<f64>,
    pub element_offsets_m: Vec<[f64; 3]>,
    pub polarizations: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RisDoc {
    pub origin_m: [f64; 3],
    pub normal_azimuth_deg: f64,
    pub rows: Option<usize>,
    pub cols: Option<usize>,
    pub pitch_m: Option<f64>,
    pub element_exponent: Option<f64>,
    pub loss_db: Option<f64>,
    pub design_band_hz: Option<[f64; 2]>,
    pub strict_band: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClusterDoc {
    pub power_db: f64,
    pub delay_ns: f64,
    pub delay_spread_ns: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PropagationDoc {
    pub direct_enabled: Option<bool>,
    pub blockage_db: Option<f64>,
    pub scatter_seed: Option<u64>,
    pub clusters: Option<Vec<ClusterDoc>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BandDoc {
    pub freq_lo_hz: f64,
    pub freq_hi_hz: f64,
    pub n_points: Option<usize>,
    pub label: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoiseDoc {
    pub psd_dbm_per_hz: Option<f64>,
    pub noise_figure_db: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PsoDoc {
    pub swarm_size: Option<usize>,
    pub iterations: Option<usize>,
    pub inertia: Option<f64>,
    pub cognitive: Option<f64>,
    pub social: Option<f64>,
    pub initial_velocity: Option<f64>,
    pub max_velocity: Option<f64>,
    pub stall_iterations: Option<usize>,
    pub seed: Option<u64>,
    pub r_bounds_m: Option<[f64; 2]>,
    pub theta_bounds_deg: Option<[f64; 2]>,
    pub phi_bounds_deg: Option<[f64; 2]>,
    pub fitness_points: Option<usize>,
    /// `search`, `off` or `on`.
    pub flip: Option<String>,
}

/// Typed scenario document. After [`parse_scenario`] every optional field is
/// populated, so serializing it gives the canonical form.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioDoc {
    pub schema_version: u32,
    pub name: Option<String>,
    pub tx_array: ArrayDoc,
    pub rx_array: ArrayDoc,
    pub ris: RisDoc,
    pub propagation: Option<PropagationDoc>,
    pub band: BandDoc,
    pub noise: Option<NoiseDoc>,
    pub pso: Option<PsoDoc>,
}

#[derive(Debug, Clone)]
pub struct LoadedScenario {
    pub doc: ScenarioDoc,
    pub scenario: Scenario,
    pub swarm: SwarmConfig,
}

// (key, required)
type Keys = &'static [(&'static str, bool)];

const TOP_KEYS: Keys = &[
    ("schema_version", true),
    ("name", false),
    ("tx_array", true),
    ("rx_array", true),
    ("ris", true),
    ("propagation", false),
    ("band", true),
    ("noise", false),
    ("pso", false),
];
const ARRAY_KEYS: Keys = &[
    ("origin_m", true),
    ("boresight_azimuth_deg", true),
    ("downtilt_deg", false),
    ("pattern", true),
    ("peak_gain_dbi", false),
    ("az_beamwidth_deg", false),
    ("el_beamwidth_deg", false),
    ("backlobe_db", false),
    ("element_offsets_m", true),
    ("polarizations", true),
];
const RIS_KEYS: Keys = &[
    ("origin_m", true),
    ("normal_azimuth_deg", true),
    ("rows", false),
    ("cols", false),
    ("pitch_m", false),
    ("element_exponent", false),
    ("loss_db", false),
    ("design_band_hz", false),
    ("strict_band", false),
];
const PROPAGATION_KEYS: Keys = &[
    ("direct_enabled", false),
    ("blockage_db", false),
    ("scatter_seed", false),
    ("clusters", false),
];
const CLUSTER_KEYS: Keys = &[("power_db", true), ("delay_ns", true), ("delay_spread_ns", false)];
const BAND_KEYS: Keys = &[("freq_lo_hz", true), ("freq_hi_hz", true), ("n_points", false), ("label", false)];
const NOISE_KEYS: Keys = &[("psd_dbm_per_hz", false), ("noise_figure_db", false)];
const PSO_KEYS: Keys = &[
    ("swarm_size", false),
    ("iterations", false),
    ("inertia", false),
    ("cognitive", false),
    ("social", false),
    ("initial_velocity", false),
    ("max_velocity", false),
    ("stall_iterations", false),
    ("seed", false),
    ("r_bounds_m", false),
    ("theta_bounds_deg", false),
    ("phi_bounds_deg", false),
    ("fitness_points", false),
    ("flip", false),
];

fn check_keys(table: &toml::Table, keys: Keys, prefix: &str, problems: &mut Vec<String>) {
    for &(key, required) in keys {
        if required && !table.contains_key(key) {
            problems.push(format!("missing key `{prefix}{key}`"));
        }
    }
    for key in table.keys() {
        if !keys.iter().any(|(k, _)| k == key) {
            problems.push(format!("unknown key `{prefix}{key}`"));
        }
    }
}

fn check_section(root: &toml::Table, name: &str, keys: Keys, problems: &mut Vec<String>) {
    match root.get(name) {
        None => {}
        Some(toml::Value::Table(t)) => {
            check_keys(t, keys, &format!("{name}."), problems);
            if name == "propagation" {
                if let Some(toml::Value::Array(clusters)) = t.get("clusters") {
                    for (i, c) in clusters.iter().enumerate() {
                        match c {
                            toml::Value::Table(ct) => {
                                check_keys(ct, CLUSTER_KEYS, &format!("propagation.clusters[{i}]."), problems)
                            }
                            _ => problems.push(format!("`propagation.clusters[{i}]` must be a table")),
                        }
                    }
                }
            }
        }
        Some(_) => problems.push(format!("`{name}` must be a table")),
    }
}

/// Every missing or unknown key in one pass.
fn schema_problems(root: &toml::Table) -> Vec<String> {
    let mut problems = Vec::new();
    for &(key, required) in TOP_KEYS {
        if required && !root.contains_key(key) {
            let what = if key == "schema_version" { "key" } else { "section" };
            problems.push(format!("missing {what} `{key}`"));
        }
    }
    for key in root.keys() {
        if !TOP_KEYS.iter().any(|(k, _)| k == key) {
            problems.push(format!("unknown key `{key}`"));
        }
    }
    check_section(root, "tx_array", ARRAY_KEYS, &mut problems);
    check_section(root, "rx_array", ARRAY_KEYS, &mut problems);
    check_section(root, "ris", RIS_KEYS, &mut problems);
    check_section(root, "propagation", PROPAGATION_KEYS, &mut problems);
    check_section(root, "band", BAND_KEYS, &mut problems);
    check_section(root, "noise", NOISE_KEYS, &mut problems);
    check_section(root, "pso", PSO_KEYS, &mut problems);
    problems
}

fn line_of(text: &str, offset: usize) -> usize {
    text[..offset.min(text.len())].bytes().filter(|&b| b == b'\n').count() + 1
}

fn toml_error(text: &str, path: &Path, e: toml::de::Error) -> Error {
    let line = e.span().map_or(0, |s| line_of(text, s.start));
    Error::Parse {
        path: path.to_path_buf(),
        line,
        message: e.message().to_string(),
    }
}

/// Fills `slot` with `value` when absent and logs the default.
fn fill<T: std::fmt::Debug>(slot: &mut Option<T>, key: &str, value: T) {
    if slot.is_none() {
        log::info!("scenario default {key} = {value:?}");
        *slot = Some(value);
    }
}

fn fill_array(doc: &mut ArrayDoc, prefix: &str) {
    fill(&mut doc.downtilt_deg, &format!("{prefix}.downtilt_deg"), 0.0);
    if doc.pattern == "sector" {
        fill(&mut doc.backlobe_db, &format!("{prefix}.backlobe_db"), DEFAULT_BACKLOBE_DB);
    }
}

impl ScenarioDoc {
    fn apply_defaults(&mut self, fallback_name: &str) {
        fill(&mut self.name, "name", fallback_name.to_string());
        fill_array(&mut self.tx_array, "tx_array");
        fill_array(&mut self.rx_array, "rx_array");

        let r = &mut self.ris;
        fill(&mut r.rows, "ris.rows", DEFAULT_ROWS);
        fill(&mut r.cols, "ris.cols", DEFAULT_COLS);
        fill(&mut r.pitch_m, "ris.pitch_m", DEFAULT_PITCH_M);
        fill(&mut r.element_exponent, "ris.element_exponent", 1.0);
        fill(&mut r.loss_db, "ris.loss_db", 0.0);
        fill(&mut r.design_band_hz, "ris.design_band_hz", [DESIGN_BAND_HZ.0, DESIGN_BAND_HZ.1]);
        fill(&mut r.strict_band, "ris.strict_band", false);

        let p = self.propagation.get_or_insert_with(Default::default);
        fill(&mut p.direct_enabled, "propagation.direct_enabled", true);
        fill(&mut p.blockage_db, "propagation.blockage_db", 0.0);
        fill(&mut p.scatter_seed, "propagation.scatter_seed", 0);
        fill(&mut p.clusters, "propagation.clusters", Vec::new());
        for (i, c) in p.clusters.iter_mut().flatten().enumerate() {
            fill(&mut c.delay_spread_ns, &format!("propagation.clusters[{i}].delay_spread_ns"), 0.0);
        }

        fill(&mut self.band.n_points, "band.n_points", 11);
        let label = format!("{}-{} GHz", self.band.freq_lo_hz / 1e9, self.band.freq_hi_hz / 1e9);
        fill(&mut self.band.label, "band.label", label);

        let noise_default = NoiseSpec::default();
        let n = self.noise.get_or_insert_with(Default::default);
        fill(&mut n.psd_dbm_per_hz, "noise.psd_dbm_per_hz", noise_default.psd_dbm_per_hz);
        fill(&mut n.noise_figure_db, "noise.noise_figure_db", noise_default.noise_figure_db);

        let sw = SwarmConfig::default();
        let b = sw.bounds;
        let s = self.pso.get_or_insert_with(Default::default);
        fill(&mut s.swarm_size, "pso.swarm_size", sw.swarm_size);
        fill(&mut s.iterations, "pso.iterations", sw.iterations);
        fill(&mut s.inertia, "pso.inertia", sw.inertia);
        fill(&mut s.cognitive, "pso.cognitive", sw.cognitive);
        fill(&mut s.social, "pso.social", sw.social);
        fill(&mut s.initial_velocity, "pso.initial_velocity", sw.initial_velocity);
        fill(&mut s.max_velocity, "pso.max_velocity", sw.max_velocity);
        fill(&mut s.stall_iterations, "pso.stall_iterations", sw.stall_iterations);
        fill(&mut s.seed, "pso.seed", sw.seed);
        fill(&mut s.r_bounds_m, "pso.r_bounds_m", [b.r_m.0, b.r_m.1]);
        fill(
            &mut s.theta_bounds_deg,
            "pso.theta_bounds_deg",
            [b.theta_rad.0.to_degrees().round(), b.theta_rad.1.to_degrees().round()],
        );
        fill(
            &mut s.phi_bounds_deg,
            "pso.phi_bounds_deg",
            [b.phi_rad.0.to_degrees().round(), b.phi_rad.1.to_degrees().round()],
        );
        fill(&mut s.flip, "pso.flip", "search".to_string());
    }
}

fn finite_check(problems: &mut Vec<String>, key: &str, values: &[f64]) {
    if values.iter().any(|v| !v.is_finite()) {
        problems.push(format!("`{key}` must be finite"));
    }
}

fn parse_polarization(s: &str) -> Option<Polarization> {
    match s {
        "V" => Some(Polarization::Vertical),
        "H" => Some(Polarization::Horizontal),
        _ => None,
    }
}

fn build_array(doc: &ArrayDoc, prefix: &str, problems: &mut Vec<String>) -> Option<AntennaArray> {
    finite_check(problems, &format!("{prefix}.origin_m"), &doc.origin_m);
    finite_check(problems, &format!("{prefix}.boresight_azimuth_deg"), &[doc.boresight_azimuth_deg]);
    let need = |v: Option<f64>, key: &str, problems: &mut Vec<String>| -> f64 {
        match v {
            Some(x) if x.is_finite() => x,
            Some(_) => {
                problems.push(format!("`{prefix}.{key}` must be finite"));
                0.0
            }
            None => {
                problems.push(format!("missing key `{prefix}.{key}` (required by pattern `{}`)", doc.pattern));
                0.0
            }
        }
    };
    let forbid = |v: Option<f64>, key: &str, problems: &mut Vec<String>| {
        if v.is_some() {
            problems.push(format!("`{prefix}.{key}` is not used by pattern `{}`", doc.pattern));
        }
    };
    let pattern = match doc.pattern.as_str() {
        "sector" => {
            let peak = need(doc.peak_gain_dbi, "peak_gain_dbi", problems);
            let az = need(doc.az_beamwidth_deg, "az_beamwidth_deg", problems);
            let el = need(doc.el_beamwidth_deg, "el_beamwidth_deg", problems);
            if !(az > 0.0 && el > 0.0) {
                problems.push(format!("`{prefix}` beamwidths must be > 0"));
            }
            ElementPattern::Sector {
                peak_gain_dbi: peak,
                az_beamwidth_deg: az,
                el_beamwidth_deg: el,
                backlobe_db: doc.backlobe_db.unwrap_or(DEFAULT_BACKLOBE_DB),
            }
        }
        "dipole" => {
            let peak = need(doc.peak_gain_dbi, "peak_gain_dbi", problems);
            forbid(doc.az_beamwidth_deg, "az_beamwidth_deg", problems);
            forbid(doc.el_beamwidth_deg, "el_beamwidth_deg", problems);
            forbid(doc.backlobe_db, "backlobe_db", problems);
            ElementPattern::Dipole { peak_gain_dbi: peak }
        }
        "isotropic" => {
            forbid(doc.peak_gain_dbi, "peak_gain_dbi", problems);
            forbid(doc.az_beamwidth_deg, "az_beamwidth_deg", problems);
            forbid(doc.el_beamwidth_deg, "el_beamwidth_deg", problems);
            forbid(doc.backlobe_db, "backlobe_db", problems);
            ElementPattern::Isotropic
        }
        other => {
            problems.push(format!(
                "`{prefix}.pattern` must be one of sector, dipole, isotropic (got {other:?})"
            ));
            return None;
        }
    };
    if doc.element_offsets_m.is_empty() {
        problems.push(format!("`{prefix}.element_offsets_m` must not be empty"));
    }
    if doc.element_offsets_m.len() != doc.polarizations.len() {
        problems.push(format!(
            "`{prefix}.polarizations` has {} entries but `{prefix}.element_offsets_m` has {}",
            doc.polarizations.len(),
            doc.element_offsets_m.len()
        ));
    }
    let mut elements = Vec::new();
    for (i, (off, pol)) in doc.element_offsets_m.iter().zip(&doc.polarizations).enumerate() {
        finite_check(problems, &format!("{prefix}.element_offsets_m[{i}]"), off);
        match parse_polarization(pol) {
            Some(polarization) => elements.push(ArrayElement {
                offset: Vec3::new(off[0], off[1], off[2]),
                polarization,
            }),
            None => problems.push(format!("`{prefix}.polarizations[{i}]` must be \"V\" or \"H\" (got {pol:?})")),
        }
    }
    let tilt = doc.downtilt_deg.unwrap_or(0.0);
    let origin = Vec3::new(doc.origin_m[0], doc.origin_m[1], doc.origin_m[2]);
    let pose = Pose::facing(origin, doc.boresight_azimuth_deg, tilt);
    AntennaArray::new(pose, elements, pattern).ok()
}

fn deg_pair(v: [f64; 2]) -> (f64, f64) {
    (v[0].to_radians(), v[1].to_radians())
}

fn build(doc: &ScenarioDoc) -> Result<(Scenario, SwarmConfig)> {
    let mut problems = Vec::new();
    if doc.schema_version != SCHEMA_VERSION {
        problems.push(format!(
            "unsupported schema_version {} (expected {SCHEMA_VERSION})",
            doc.schema_version
        ));
    }
    let tx = build_array(&doc.tx_array, "tx_array", &mut problems);
    let rx = build_array(&doc.rx_array, "rx_array", &mut problems);

    let r = &doc.ris;
    finite_check(&mut problems, "ris.origin_m", &r.origin_m);
    let pose = panel_pose(Vec3::new(r.origin_m[0], r.origin_m[1], r.origin_m[2]), r.normal_azimuth_deg);
    let [band_lo, band_hi] = r.design_band_hz.unwrap_or([DESIGN_BAND_HZ.0, DESIGN_BAND_HZ.1]);
    let mut ris = RisPanel::new(
        r.rows.unwrap_or(DEFAULT_ROWS),
        r.cols.unwrap_or(DEFAULT_COLS),
        r.pitch_m.unwrap_or(DEFAULT_PITCH_M),
        pose,
    )
    .map_err(|e| problems.push(format!("[ris] {e}")))
    .ok();
    if let Some(panel) = ris.as_mut() {
        panel.unit_cells = [UnitCell::with_loss_db(r.loss_db.unwrap_or(0.0)); 2];
        panel.element_exponent = r.element_exponent.unwrap_or(1.0);
        panel.design_band_hz = (band_lo, band_hi);
        panel.strict_band = r.strict_band.unwrap_or(false);
        if let Err(e) = panel.validate() {
            problems.push(format!("[ris] {e}"));
        }
    }

    let p = doc.propagation.clone().unwrap_or_default();
    let blockage_db = p.blockage_db.unwrap_or(0.0);
    finite_check(&mut problems, "propagation.blockage_db", &[blockage_db]);
    let mut clusters = Vec::new();
    for (i, c) in p.clusters.iter().flatten().enumerate() {
        let spread = c.delay_spread_ns.unwrap_or(0.0);
        finite_check(&mut problems, &format!("propagation.clusters[{i}]"), &[c.power_db, c.delay_ns, spread]);
        if c.delay_ns < 0.0 || spread < 0.0 {
            problems.push(format!("`propagation.clusters[{i}]` delays must be >= 0"));
        }
        clusters.push(ScatterCluster {
            power_db: c.power_db,
            delay_ns: c.delay_ns,
            delay_spread_ns: spread,
        });
    }

    let b = &doc.band;
    let band = Band {
        lo_hz: b.freq_lo_hz,
        hi_hz: b.freq_hi_hz,
        n_points: b.n_points.unwrap_or(11),
        label: b.label.clone().unwrap_or_default(),
    };
    if !(band.lo_hz > 0.0 && band.lo_hz < band.hi_hz && band.hi_hz.is_finite()) {
        problems.push("band requires 0 < freq_lo_hz < freq_hi_hz".into());
    }
    if band.n_points < 2 {
        problems.push("`band.n_points` must be >= 2".into());
    }

    let n = doc.noise.clone().unwrap_or_default();
    let noise_default = NoiseSpec::default();
    let noise = NoiseSpec {
        psd_dbm_per_hz: n.psd_dbm_per_hz.unwrap_or(noise_default.psd_dbm_per_hz),
        noise_figure_db: n.noise_figure_db.unwrap_or(noise_default.noise_figure_db),
    };
    finite_check(&mut problems, "noise", &[noise.psd_dbm_per_hz, noise.noise_figure_db]);

    let s = doc.pso.clone().unwrap_or_default();
    let d = SwarmConfig::default();
    let flip_mode = match s.flip.as_deref().unwrap_or("search") {
        "search" => FlipMode::Search,
        "off" => FlipMode::Fixed(false),
        "on" => FlipMode::Fixed(true),
        other => {
            problems.push(format!("`pso.flip` must be one of search, off, on (got {other:?})"));
            FlipMode::Search
        }
    };
    let swarm = SwarmConfig {
        swarm_size: s.swarm_size.unwrap_or(d.swarm_size),
        iterations: s.iterations.unwrap_or(d.iterations),
        inertia: s.inertia.unwrap_or(d.inertia),
        cognitive: s.cognitive.unwrap_or(d.cognitive),
        social: s.social.unwrap_or(d.social),
        initial_velocity: s.initial_velocity.unwrap_or(d.initial_velocity),
        max_velocity: s.max_velocity.unwrap_or(d.max_velocity),
        bounds: SearchBounds {
            r_m: s.r_bounds_m.map_or(d.bounds.r_m, |v| (v[0], v[1])),
            theta_rad: s.theta_bounds_deg.map_or(d.bounds.theta_rad, deg_pair),
            phi_rad: s.phi_bounds_deg.map_or(d.bounds.phi_rad, deg_pair),
        },
        seed: s.seed.unwrap_or(d.seed),
        stall_iterations: s.stall_iterations.unwrap_or(d.stall_iterations),
        fitness_points: s.fitness_points,
        flip_mode,
    };
    if let Err(e) = swarm.validate() {
        problems.push(format!("[pso] {e}"));
    }

    match (tx, rx, ris) {
        (Some(tx_array), Some(rx_array), Some(ris)) if problems.is_empty() => {
            let scn = Scenario {
                name: doc.name.clone().unwrap_or_default(),
                tx_array,
                rx_array,
                ris,
                direct: DirectPath {
                    enabled: p.direct_enabled.unwrap_or(true),
                    blockage_db,
                },
                scatter: ScatterModel {
                    clusters,
                    seed: p.scatter_seed.unwrap_or(0),
                },
                noise,
                band,
            };
            scn.validate()?;
            Ok((scn, swarm))
        }
        _ => {
            if problems.is_empty() {
                problems.push("antenna arrays need at least one element".into());
            }
            Err(Error::Schema(problems))
        }
    }
}

/// Parses and validates scenario text; `path` is only used in diagnostics.
pub fn parse_scenario(text: &str, path: &Path) -> Result<LoadedScenario> {
    let root: toml::Table = toml::from_str(text).map_err(|e| toml_error(text, path, e))?;
    let problems = schema_problems(&root);
    if !problems.is_empty() {
        return Err(Error::Schema(problems));
    }
    let mut doc: ScenarioDoc = toml::from_str(text).map_err(|e| toml_error(text, path, e))?;
    let fallback = path.file_stem().map_or("scenario".into(), |s| s.to_string_lossy().into_owned());
    doc.apply_defaults(&fallback);
    let (scenario, swarm) = build(&doc)?;
    Ok(LoadedScenario { doc, scenario, swarm })
}

pub fn load_scenario_file(path: &Path) -> Result<LoadedScenario> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_scenario(&text, path)
}

pub fn load_scenario(path: &Path) -> Result<Scenario> {
    load_scenario_file(path).map(|l| l.scenario)
}

/// Canonical text form of a scenario document.
pub fn save_scenario(doc: &ScenarioDoc) -> Result<String> {
    toml::to_string(doc).map_err(|e| Error::invalid(format!("cannot serialize scenario: {e}")))
}
