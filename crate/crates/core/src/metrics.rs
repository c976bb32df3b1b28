//! MIMO figures of merit: total channel gain, effective rank, water-filling
//! and equal-power capacity, and the EIRP helper.

use std::fmt::Write as _;

use nalgebra::SVD;

use crate::channel::{CMatrix, FrequencySweep};
use crate::error::{Error, Result};

/// Singular values below this fraction of the largest are treated as zero.
pub const RANK_TOLERANCE: f64 = 1e-12;

/// Singular values in descending order.
#[derive(Debug, Clone, PartialEq)]
pub struct SingularSpectrum {
    pub values: Vec<f64>,
}

impl SingularSpectrum {
    pub fn of(h: &CMatrix) -> Self {
        let svd = SVD::new(h.clone(), false, false);
        let mut values: Vec<f64> = svd.singular_values.iter().map(|s| s.max(0.0)).collect();
        values.sort_by(|a, b| b.total_cmp(a));
        Self { values }
    }

    pub fn largest(&self) -> f64 {
        self.values.first().copied().unwrap_or(0.0)
    }
}

/// `Tr(H Hᴴ)`, the squared Frobenius norm.
pub fn channel_gain(h: &CMatrix) -> f64 {
    h.iter().map(|x| x.norm_sqr()).sum()
}

fn require_nonempty(sweep: &FrequencySweep) -> Result<()> {
    if sweep.is_empty() {
        return Err(Error::invalid("sweep has no frequency points"));
    }
    Ok(())
}

/// Arithmetic mean of [`channel_gain`] over the sweep.
pub fn band_gain(sweep: &FrequencySweep) -> Result<f64> {
    require_nonempty(sweep)?;
    let total: f64 = sweep.matrices.iter().map(|m| channel_gain(&m.entries)).sum();
    Ok(total / sweep.len() as f64)
}

/// Exponential of the Shannon entropy of the ℓ1-normalized singular values.
pub fn effective_rank(h: &CMatrix) -> Result<f64> {
    spectrum_effective_rank(&SingularSpectrum::of(h))
}

pub fn spectrum_effective_rank(spec: &SingularSpectrum) -> Result<f64> {
    let top = spec.largest();
    if !(top > 0.0) {
        return Err(Error::Numeric("effective rank of an all-zero matrix".into()));
    }
    let kept: Vec<f64> = spec
        .values
        .iter()
        .copied()
        .filter(|&s| s > RANK_TOLERANCE * top)
        .collect();
    let norm: f64 = kept.iter().sum();
    let entropy: f64 = kept
        .iter()
        .map(|&s| {
            let p = s / norm;
            -p * p.ln()
        })
        .sum();
    Ok(entropy.exp().clamp(1.0, kept.len() as f64))
}

pub fn mean_effective_rank(sweep: &FrequencySweep) -> Result<f64> {
    require_nonempty(sweep)?;
    let mut total = 0.0;
    for m in &sweep.matrices {
        total += effective_rank(&m.entries)?;
    }
    Ok(total / sweep.len() as f64)
}

#[derive(Debug, Clone, PartialEq)]
pub struct WaterFilling {
    pub capacity_bps: f64,
    pub water_level: f64,
    /// Power per eigenmode, aligned with the descending singular values.
    pub powers: Vec<f64>,
}

fn check_power_noise(p_total: f64, noise_power: f64) -> Result<()> {
    if !(p_total > 0.0 && p_total.is_finite()) {
        return Err(Error::invalid(format!("total power must be > 0, got {p_total}")));
    }
    if !(noise_power > 0.0 && noise_power.is_finite()) {
        return Err(Error::invalid(format!("noise power must be > 0, got {noise_power}")));
    }
    Ok(())
}

/// Capacity-optimal allocation of `p_total` over the eigenmodes of `h`.
///
/// The water level is bracketed by bisection to isolate the active set and
/// then solved in closed form on that set, so the allocation sums to
/// `p_total` up to rounding.
pub fn waterfilling(h: &CMatrix, p_total: f64, noise_power: f64, bandwidth_hz: f64) -> Result<WaterFilling> {
    check_power_noise(p_total, noise_power)?;
    let spec = SingularSpectrum::of(h);
    let top = spec.largest();
    let n_modes = spec.values.len();
    // noise-to-gain floor of each usable mode
    let floors: Vec<f64> = spec
        .values
        .iter()
        .filter(|&&s| s > RANK_TOLERANCE * top && s > 0.0)
        .map(|s| noise_power / (s * s))
        .collect();
    if floors.is_empty() {
        return Ok(WaterFilling {
            capacity_bps: 0.0,
            water_level: 0.0,
            powers: vec![0.0; n_modes],
        });
    }

    let filled = |mu: f64| floors.iter().map(|f| (mu - f).max(0.0)).sum::<f64>();
    let (mut lo, mut hi) = (floors[0], p_total + floors[floors.len() - 1]);
    while hi - lo > 1e-12 * hi {
        let mid = 0.5 * (lo + hi);
        if filled(mid) < p_total {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let mut active = floors.iter().filter(|&&f| f < hi).count().max(1);
    let mut mu;
    loop {
        mu = (p_total + floors[..active].iter().sum::<f64>()) / active as f64;
        if active > 1 && mu <= floors[active - 1] {
            active -= 1;
        } else {
            break;
        }
    }

    let mut powers = vec![0.0; n_modes];
    let mut capacity = 0.0;
    for (i, f) in floors[..active].iter().enumerate() {
        powers[i] = mu - f;
        capacity += (1.0 + powers[i] / f).log2();
    }
    Ok(WaterFilling {
        capacity_bps: bandwidth_hz * capacity,
        water_level: mu,
        powers,
    })
}

pub fn waterfilling_capacity(h: &CMatrix, p_total: f64, noise_power: f64, bandwidth_hz: f64) -> Result<f64> {
    waterfilling(h, p_total, noise_power, bandwidth_hz).map(|w| w.capacity_bps)
}

/// Capacity with `p_total` split evenly over the `Nt` transmit ports.
pub fn equal_power_capacity(h: &CMatrix, p_total: f64, noise_power: f64, bandwidth_hz: f64) -> Result<f64> {
    check_power_noise(p_total, noise_power)?;
    let per_port = p_total / h.ncols() as f64;
    let spec = SingularSpectrum::of(h);
    Ok(bandwidth_hz
        * spec
            .values
            .iter()
            .map(|s| (1.0 + per_port * s * s / noise_power).log2())
            .sum::<f64>())
}

/// Total EIRP in dBm for a limit quoted per 5 MHz.
pub fn eirp_total_dbm(eirp_dbm_per_5mhz: f64, bandwidth_hz: f64) -> Result<f64> {
    if !(bandwidth_hz > 0.0) {
        return Err(Error::invalid(format!("bandwidth must be > 0, got {bandwidth_hz}")));
    }
    Ok(eirp_dbm_per_5mhz + 10.0 * (bandwidth_hz / 5e6).log10())
}

/// Conducted transmit power allowed by a per-5 MHz EIRP limit.
pub fn eirp_to_tx_power(eirp_dbm_per_5mhz: f64, bandwidth_hz: f64, antenna_gain_dbi: f64) -> Result<f64> {
    Ok(eirp_total_dbm(eirp_dbm_per_5mhz, bandwidth_hz)? - antenna_gain_dbi)
}

pub fn dbm_to_watts(dbm: f64) -> f64 {
    10f64.powf((dbm - 30.0) / 10.0)
}

#[derive(Debug, Clone, PartialEq)]
pub struct CapacityCurve {
    pub tx_powers_dbm: Vec<f64>,
    pub capacities_bps: Vec<f64>,
    pub bandwidth_hz: f64,
}

/// Band capacity vs transmit power: per-frequency water-filling averaged
/// over the sweep.
pub fn capacity_curve(
    sweep: &FrequencySweep,
    tx_powers_dbm: &[f64],
    noise_power_w: f64,
    bandwidth_hz: f64,
) -> Result<CapacityCurve> {
    require_nonempty(sweep)?;
    let capacities_bps = tx_powers_dbm
        .iter()
        .map(|&p| band_capacity(sweep, dbm_to_watts(p), noise_power_w, bandwidth_hz))
        .collect::<Result<Vec<_>>>()?;
    Ok(CapacityCurve {
        tx_powers_dbm: tx_powers_dbm.to_vec(),
        capacities_bps,
        bandwidth_hz,
    })
}

pub fn band_capacity(sweep: &FrequencySweep, p_total_w: f64, noise_power_w: f64, bandwidth_hz: f64) -> Result<f64> {
    require_nonempty(sweep)?;
    let mut total = 0.0;
    for m in &sweep.matrices {
        total += waterfilling_capacity(&m.entries, p_total_w, noise_power_w, bandwidth_hz)?;
    }
    Ok(total / sweep.len() as f64)
}

#[derive(Debug, Clone, PartialEq)]
pub struct MetricsReport {
    pub label: String,
    pub frequencies: Vec<f64>,
    pub gains: Vec<f64>,
    pub effective_ranks: Vec<f64>,
    pub band_gain: f64,
    pub mean_effective_rank: f64,
    pub tx_power_dbm: f64,
    pub noise_power_w: f64,
    pub capacity_at_tx_power_bps: f64,
    pub curve: CapacityCurve,
}

impl MetricsReport {
    pub fn compute(
        label: impl Into<String>,
        sweep: &FrequencySweep,
        tx_power_dbm: f64,
        noise_power_w: f64,
        bandwidth_hz: f64,
        curve_powers_dbm: &[f64],
    ) -> Result<Self> {
        require_nonempty(sweep)?;
        let gains = sweep.matrices.iter().map(|m| channel_gain(&m.entries)).collect();
        let effective_ranks = sweep
            .matrices
            .iter()
            .map(|m| effective_rank(&m.entries))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            label: label.into(),
            frequencies: sweep.frequencies(),
            gains,
            effective_ranks,
            band_gain: band_gain(sweep)?,
            mean_effective_rank: mean_effective_rank(sweep)?,
            tx_power_dbm,
            noise_power_w,
            capacity_at_tx_power_bps: band_capacity(sweep, dbm_to_watts(tx_power_dbm), noise_power_w, bandwidth_hz)?,
            curve: capacity_curve(sweep, curve_powers_dbm, noise_power_w, bandwidth_hz)?,
        })
    }

    /// Flat `key = value` report.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "label = {}", self.label);
        let _ = writeln!(s, "n_frequencies = {}", self.frequencies.len());
        let _ = writeln!(s, "band_gain_linear = {:e}", self.band_gain);
        let _ = writeln!(s, "band_gain_db = {:.4}", 10.0 * self.band_gain.log10());
        let _ = writeln!(s, "mean_effective_rank = {:.6}", self.mean_effective_rank);
        let _ = writeln!(s, "bandwidth_hz = {}", self.curve.bandwidth_hz);
        let _ = writeln!(s, "noise_power_w = {:e}", self.noise_power_w);
        let _ = writeln!(s, "tx_power_dbm = {:.4}", self.tx_power_dbm);
        let _ = writeln!(s, "capacity_bps = {:.6e}", self.capacity_at_tx_power_bps);
        s
    }

    /// `freq_hz,gain_db,erank` rows.
    pub fn gain_csv(&self) -> String {
        let mut s = String::from("freq_hz,gain_db,erank\n");
        for ((f, g), r) in self.frequencies.iter().zip(&self.gains).zip(&self.effective_ranks) {
            let _ = writeln!(s, "{f},{:.6},{:.6}", 10.0 * g.log10(), r);
        }
        s
    }

    /// `power_dbm,capacity_bps` rows.
    pub fn capacity_csv(&self) -> String {
        let mut s = String::from("power_dbm,capacity_bps\n");
        for (p, c) in self.curve.tx_powers_dbm.iter().zip(&self.curve.capacities_bps) {
            let _ = writeln!(s, "{p},{c:.6e}");
        }
        s
    }
}
