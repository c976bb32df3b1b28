//! 1-bit RIS panel model: phase-profile synthesis and the element-sum
//! re-radiation forward model.
//!
//! Each unit cell re-radiates with amplitude
//! `cos^q(θ_in) · cos^q(θ_out) · Γ(bit) · exp(-jk (d_in + d_out))`,
//! with an extra `1 / d` factor for every endpoint that is a point rather
//! than a far-field direction. Far-field path lengths are measured from a
//! reference plane through the panel center.

use std::f64::consts::PI;
use std::fmt::Write as _;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::geometry::{spherical_to_cartesian, Polarization, Pose, SphericalCoord, Vec3};

pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

pub fn wavenumber(freq_hz: f64) -> f64 {
    2.0 * PI * freq_hz / SPEED_OF_LIGHT
}

pub fn wavelength(freq_hz: f64) -> f64 {
    SPEED_OF_LIGHT / freq_hz
}

/// Complex reflection coefficient of one unit cell for bit 0 and bit 1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnitCell {
    pub gamma: [Complex64; 2],
}

impl Default for UnitCell {
    fn default() -> Self {
        Self {
            gamma: [Complex64::new(1.0, 0.0), Complex64::new(-1.0, 0.0)],
        }
    }
}

impl UnitCell {
    /// Lossless antipodal states scaled by a magnitude loss in dB.
    pub fn with_loss_db(loss_db: f64) -> Self {
        let a = 10f64.powf(-loss_db / 20.0);
        let d = Self::default();
        Self {
            gamma: [d.gamma[0] * a, d.gamma[1] * a],
        }
    }

    pub fn reflection(&self, bit: u8) -> Complex64 {
        self.gamma[usize::from(bit & 1)]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RisPanel {
    pub rows: usize,
    pub cols: usize,
    pub pitch: f64,
    pub pose: Pose,
    /// Indexed by [`Polarization::index`].
    pub unit_cells: [UnitCell; 2],
    /// Element pattern exponent `q`.
    pub element_exponent: f64,
    pub design_band_hz: (f64, f64),
    /// Reject focus targets outside `design_band_hz`.
    pub strict_band: bool,
}

pub const DEFAULT_ROWS: usize = 32;
pub const DEFAULT_COLS: usize = 32;
pub const DEFAULT_PITCH_M: f64 = 0.96 / 32.0;
pub const DESIGN_BAND_HZ: (f64, f64) = (3.2e9, 3.8e9);

/// Pose of a vertical panel whose broadside normal points along compass
/// azimuth `normal_azimuth_deg`.
pub fn panel_pose(origin: Vec3, normal_azimuth_deg: f64) -> Pose {
    Pose::facing(origin, normal_azimuth_deg - 90.0, 0.0)
}

impl RisPanel {
    pub fn new(rows: usize, cols: usize, pitch: f64, pose: Pose) -> Result<Self> {
        let panel = Self {
            rows,
            cols,
            pitch,
            pose,
            unit_cells: [UnitCell::default(); 2],
            element_exponent: 1.0,
            design_band_hz: DESIGN_BAND_HZ,
            strict_band: false,
        };
        panel.validate()?;
        Ok(panel)
    }

    /// Full 32 × 32 surface (0.96 m square).
    pub fn full(pose: Pose) -> Self {
        Self::new(DEFAULT_ROWS, DEFAULT_COLS, DEFAULT_PITCH_M, pose).expect("valid defaults")
    }

    /// One 16 × 16 tile of the full surface.
    pub fn tile(pose: Pose) -> Self {
        Self::new(16, 16, DEFAULT_PITCH_M, pose).expect("valid defaults")
    }

    pub fn validate(&self) -> Result<()> {
        if self.rows * self.cols == 0 {
            return Err(Error::invalid("RIS panel needs at least one element"));
        }
        if !(self.pitch.is_finite() && self.pitch > 0.0) {
            return Err(Error::invalid("RIS pitch must be > 0"));
        }
        for cell in &self.unit_cells {
            if cell.gamma.iter().any(|g| !(g.norm() <= 1.0 + 1e-12)) {
                return Err(Error::invalid("unit-cell reflection magnitude exceeds 1"));
            }
        }
        if !(self.element_exponent.is_finite() && self.element_exponent >= 0.0) {
            return Err(Error::invalid("element exponent must be >= 0"));
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.rows * self.cols
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Element center in the panel frame; row 0 is the top edge.
    pub fn element_local(&self, idx: usize) -> Vec3 {
        let (m, n) = (idx / self.cols, idx % self.cols);
        Vec3::new(
            (n as f64 - (self.cols as f64 - 1.0) / 2.0) * self.pitch,
            0.0,
            ((self.rows as f64 - 1.0) / 2.0 - m as f64) * self.pitch,
        )
    }

    pub fn element_position(&self, idx: usize) -> Vec3 {
        self.pose.point_to_global(&self.element_local(idx))
    }

    pub fn element_positions(&self) -> Vec<Vec3> {
        (0..self.len()).map(|i| self.element_position(i)).collect()
    }

    pub fn normal(&self) -> Vec3 {
        self.pose.axes()[1]
    }

    /// `cos^q` of the angle between the panel normal and `dir`, zero behind
    /// the panel.
    pub fn element_factor(&self, dir: &Vec3) -> f64 {
        let c = self.normal().dot(dir);
        if c <= 0.0 {
            0.0
        } else {
            c.powf(self.element_exponent)
        }
    }

    /// Global unit direction for a horizontal-cut azimuth in the panel frame
    /// (90° is broadside).
    pub fn azimuth_direction(&self, azimuth_deg: f64) -> Vec3 {
        let (s, c) = azimuth_deg.to_radians().sin_cos();
        self.pose.dir_to_global(&Vec3::new(c, s, 0.0))
    }

    fn check_config(&self, config: &RisConfig) -> Result<()> {
        if config.rows != self.rows || config.cols != self.cols {
            return Err(Error::DimensionMismatch {
                expected: format!("{}x{}", self.rows, self.cols),
                actual: format!("{}x{}", config.rows, config.cols),
            });
        }
        Ok(())
    }
}

/// Source or observer of the re-radiated field.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Endpoint {
    Point(Vec3),
    /// Far-field unit direction (global frame) pointing away from the panel.
    Direction(Vec3),
}

impl Endpoint {
    fn path(&self, element: &Vec3, panel_origin: &Vec3) -> f64 {
        match self {
            Endpoint::Point(p) => (p - element).norm(),
            Endpoint::Direction(u) => -u.dot(&(element - panel_origin)),
        }
    }

    fn spreading(&self, path: f64) -> f64 {
        match self {
            Endpoint::Point(_) => 1.0 / path,
            Endpoint::Direction(_) => 1.0,
        }
    }

    fn direction_from(&self, element: &Vec3) -> Vec3 {
        match self {
            Endpoint::Point(p) => (p - element).normalize(),
            Endpoint::Direction(u) => *u,
        }
    }
}

/// Per-element, per-polarization 1-bit state. Bits are stored row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RisConfig {
    pub rows: usize,
    pub cols: usize,
    bits: [Vec<u8>; 2],
}

impl RisConfig {
    pub fn uniform(rows: usize, cols: usize, bit: u8) -> Self {
        let b = vec![bit & 1; rows * cols];
        Self {
            rows,
            cols,
            bits: [b.clone(), b],
        }
    }

    /// Same profile on both polarizations.
    pub fn from_bits(rows: usize, cols: usize, bits: Vec<u8>) -> Result<Self> {
        Self::from_polarized(rows, cols, bits.clone(), bits)
    }

    pub fn from_polarized(rows: usize, cols: usize, v: Vec<u8>, h: Vec<u8>) -> Result<Self> {
        for b in [&v, &h] {
            if b.len() != rows * cols {
                return Err(Error::DimensionMismatch {
                    expected: format!("{} bits", rows * cols),
                    actual: format!("{} bits", b.len()),
                });
            }
            if b.iter().any(|&x| x > 1) {
                return Err(Error::invalid("RIS bits must be 0 or 1"));
            }
        }
        Ok(Self {
            rows,
            cols,
            bits: [v, h],
        })
    }

    pub fn bits(&self, pol: Polarization) -> &[u8] {
        &self.bits[pol.index()]
    }

    pub fn bit(&self, pol: Polarization, idx: usize) -> u8 {
        self.bits[pol.index()][idx]
    }

    /// Every bit inverted: a global 180° shift of the re-radiated field.
    pub fn flipped(&self) -> Self {
        let inv = |b: &Vec<u8>| b.iter().map(|x| x ^ 1).collect::<Vec<_>>();
        Self {
            rows: self.rows,
            cols: self.cols,
            bits: [inv(&self.bits[0]), inv(&self.bits[1])],
        }
    }

    /// Text grid: one block of `rows` lines of `0`/`1` per polarization,
    /// V first, each block introduced by a `# pol` comment line.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (label, bits) in ["V", "H"].iter().zip(&self.bits) {
            if !out.is_empty() {
                out.push('\n');
            }
            let _ = writeln!(out, "# pol {label}");
            for row in bits.chunks(self.cols) {
                out.extend(row.iter().map(|&b| if b == 1 { '1' } else { '0' }));
                out.push('\n');
            }
        }
        out
    }

    /// Parses [`RisConfig::to_text`] output. A single block applies to both
    /// polarizations.
    pub fn from_text(text: &str) -> Result<Self> {
        let mut blocks: Vec<Vec<&str>> = vec![Vec::new()];
        for line in text.lines() {
            let line = line.trim();
            if line.starts_with('#') {
                continue;
            }
            if line.is_empty() {
                if !blocks.last().unwrap().is_empty() {
                    blocks.push(Vec::new());
                }
                continue;
            }
            blocks.last_mut().unwrap().push(line);
        }
        blocks.retain(|b| !b.is_empty());
        if blocks.is_empty() || blocks.len() > 2 {
            return Err(Error::invalid(format!(
                "config grid needs 1 or 2 polarization blocks, found {}",
                blocks.len()
            )));
        }
        let rows = blocks[0].len();
        let cols = blocks[0][0].len();
        let mut parsed = Vec::new();
        for block in &blocks {
            if block.len() != rows {
                return Err(Error::invalid("polarization blocks differ in row count"));
            }
            let mut bits = Vec::with_capacity(rows * cols);
            for (r, line) in block.iter().enumerate() {
                if line.len() != cols {
                    return Err(Error::invalid(format!(
                        "config grid row {r} has {} columns, expected {cols}",
                        line.len()
                    )));
                }
                for ch in line.chars() {
                    bits.push(match ch {
                        '0' => 0,
                        '1' => 1,
                        other => {
                            return Err(Error::invalid(format!(
                                "unexpected character {other:?} in config grid"
                            )))
                        }
                    });
                }
            }
            parsed.push(bits);
        }
        let v = parsed.remove(0);
        let h = parsed.pop().unwrap_or_else(|| v.clone());
        Self::from_polarized(rows, cols, v, h)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FocusTarget {
    pub tx_position: Vec3,
    /// Receiver location in the panel frame.
    pub rx_coord: SphericalCoord,
    pub flip: bool,
    pub frequency: f64,
}

/// Round-trip phase `k (d_tx + d_rx)` at element `idx`, wrapped to `[0, 2π)`.
/// This is the phase the element state has to cancel.
pub fn desired_phase(panel: &RisPanel, element_idx: usize, tx: &Vec3, rx: &Vec3, freq_hz: f64) -> f64 {
    desired_phase_between(
        panel,
        element_idx,
        &Endpoint::Point(*tx),
        &Endpoint::Point(*rx),
        freq_hz,
    )
}

pub fn desired_phase_between(
    panel: &RisPanel,
    element_idx: usize,
    source: &Endpoint,
    target: &Endpoint,
    freq_hz: f64,
) -> f64 {
    let p = panel.element_position(element_idx);
    let o = panel.pose.origin();
    let d = source.path(&p, &o) + target.path(&p, &o);
    (wavenumber(freq_hz) * d).rem_euclid(2.0 * PI)
}

/// Nearest of the two states {0, π}; ties at π/2 go to state 1.
pub fn quantize_phase(phi: f64) -> u8 {
    let w = phi.rem_euclid(2.0 * PI);
    u8::from((PI / 2.0..3.0 * PI / 2.0).contains(&w))
}

/// Quantized phase-conjugate profile steering `source` onto `target`,
/// identical on both polarizations.
pub fn steering_config(
    panel: &RisPanel,
    source: &Endpoint,
    target: &Endpoint,
    freq_hz: f64,
    flip: bool,
) -> RisConfig {
    let bits: Vec<u8> = (0..panel.len())
        .map(|i| quantize_phase(desired_phase_between(panel, i, source, target, freq_hz)) ^ u8::from(flip))
        .collect();
    RisConfig {
        rows: panel.rows,
        cols: panel.cols,
        bits: [bits.clone(), bits],
    }
}

pub fn phase_profile_for_focus(panel: &RisPanel, target: &FocusTarget) -> Result<RisConfig> {
    if !(target.rx_coord.r > 0.0) {
        return Err(Error::invalid(format!(
            "focus radius must be > 0, got {}",
            target.rx_coord.r
        )));
    }
    let (lo, hi) = panel.design_band_hz;
    if panel.strict_band && !(lo..=hi).contains(&target.frequency) {
        return Err(Error::invalid(format!(
            "focus frequency {} Hz outside design band [{lo}, {hi}] Hz",
            target.frequency
        )));
    }
    let rx = spherical_to_cartesian(&target.rx_coord, &panel.pose);
    Ok(steering_config(
        panel,
        &Endpoint::Point(target.tx_position),
        &Endpoint::Point(rx),
        target.frequency,
        target.flip,
    ))
}

/// Far-field steering profile for a horizontal-cut incidence and steering
/// azimuth, both in the panel frame.
pub fn far_field_steering(panel: &RisPanel, incidence_deg: f64, steer_deg: f64, freq_hz: f64) -> RisConfig {
    steering_config(
        panel,
        &Endpoint::Direction(panel.azimuth_direction(incidence_deg)),
        &Endpoint::Direction(panel.azimuth_direction(steer_deg)),
        freq_hz,
        false,
    )
}

fn field_sum(
    panel: &RisPanel,
    source: &Endpoint,
    observer: &Endpoint,
    freq_hz: f64,
    coefficient: impl Fn(usize) -> Complex64,
) -> Complex64 {
    let k = wavenumber(freq_hz);
    let o = panel.pose.origin();
    let mut acc = Complex64::new(0.0, 0.0);
    for idx in 0..panel.len() {
        let p = panel.element_position(idx);
        let d_in = source.path(&p, &o);
        let d_out = observer.path(&p, &o);
        let amp = panel.element_factor(&source.direction_from(&p))
            * panel.element_factor(&observer.direction_from(&p))
            * source.spreading(d_in)
            * observer.spreading(d_out);
        acc += coefficient(idx) * Complex64::from_polar(amp, -k * (d_in + d_out));
    }
    acc
}

/// Coherent element sum of the field re-radiated from `source` towards
/// `observer` for one polarization.
pub fn reradiated_field(
    panel: &RisPanel,
    config: &RisConfig,
    source: &Endpoint,
    observer: &Endpoint,
    freq_hz: f64,
    pol: Polarization,
) -> Result<Complex64> {
    panel.check_config(config)?;
    let cell = panel.unit_cells[pol.index()];
    let bits = config.bits(pol);
    Ok(field_sum(panel, source, observer, freq_hz, |i| cell.reflection(bits[i])))
}

/// Same forward model with an unquantized unit-magnitude profile
/// `exp(j phases[i])`.
pub fn reradiated_field_continuous(
    panel: &RisPanel,
    phases: &[f64],
    source: &Endpoint,
    observer: &Endpoint,
    freq_hz: f64,
) -> Result<Complex64> {
    if phases.len() != panel.len() {
        return Err(Error::DimensionMismatch {
            expected: format!("{} phases", panel.len()),
            actual: format!("{} phases", phases.len()),
        });
    }
    Ok(field_sum(panel, source, observer, freq_hz, |i| {
        Complex64::from_polar(1.0, phases[i])
    }))
}

/// Normalized far-field bistatic pattern (dB, peak 0) over a horizontal cut
/// for a plane wave arriving from azimuth `incidence_deg`. Angles are panel
/// azimuths in degrees, 90° broadside. Uses the V polarization.
pub fn beam_pattern(
    panel: &RisPanel,
    config: &RisConfig,
    incidence_deg: f64,
    angle_grid_deg: &[f64],
    freq_hz: f64,
) -> Result<Vec<f64>> {
    let power = pattern_power(panel, config, incidence_deg, angle_grid_deg, freq_hz)?;
    let peak = power.iter().cloned().fold(0.0, f64::max);
    if !(peak > 0.0) {
        return Err(Error::Numeric("beam pattern is identically zero".into()));
    }
    Ok(power.iter().map(|p| 10.0 * (p / peak).log10()).collect())
}

/// Unnormalized `|field|²` over the grid, as used by [`beam_pattern`].
pub fn pattern_power(
    panel: &RisPanel,
    config: &RisConfig,
    incidence_deg: f64,
    angle_grid_deg: &[f64],
    freq_hz: f64,
) -> Result<Vec<f64>> {
    if angle_grid_deg.is_empty() {
        return Err(Error::invalid("beam pattern angle grid is empty"));
    }
    if let Some(a) = angle_grid_deg.iter().find(|a| !(0.0..=180.0).contains(*a)) {
        return Err(Error::invalid(format!("pattern angle {a}° outside [0°, 180°]")));
    }
    if !(0.0..=180.0).contains(&incidence_deg) {
        return Err(Error::invalid(format!(
            "incidence angle {incidence_deg}° outside [0°, 180°]"
        )));
    }
    let source = Endpoint::Direction(panel.azimuth_direction(incidence_deg));
    angle_grid_deg
        .iter()
        .map(|&a| {
            let obs = Endpoint::Direction(panel.azimuth_direction(a));
            reradiated_field(panel, config, &source, &obs, freq_hz, Polarization::Vertical)
                .map(|e| e.norm_sqr())
        })
        .collect()
}

/// Grid angle holding the pattern maximum (first one on ties).
pub fn peak_angle(angle_grid_deg: &[f64], pattern: &[f64]) -> Option<f64> {
    pattern
        .iter()
        .enumerate()
        .fold(None, |best: Option<(usize, f64)>, (i, &v)| match best {
            Some((_, bv)) if bv >= v => best,
            _ => Some((i, v)),
        })
        .map(|(i, _)| angle_grid_deg[i])
}

/// Uniform angle grid from `start` to `stop` inclusive.
pub fn angle_grid(start_deg: f64, stop_deg: f64, step_deg: f64) -> Vec<f64> {
    let n = ((stop_deg - start_deg) / step_deg + 1e-9).floor() as usize;
    (0..=n).map(|i| start_deg + i as f64 * step_deg).collect()
}
