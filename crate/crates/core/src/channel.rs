//! Frequency-domain MIMO channel synthesis.
//!
//! A scenario's channel is the entrywise sum of three mechanisms:
//! an attenuated direct path, the RIS cascade and a sparse set of
//! stochastic scatter clusters. Cross-polarized pairs couple only through
//! scatter.

use std::f64::consts::PI;

use log::warn;
use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp, StandardNormal};

use crate::error::{Error, Result};
use crate::geometry::{cartesian_to_spherical, AntennaArray, SphericalCoord, Vec3};
use crate::ris::{wavelength, wavenumber, RisConfig, RisPanel, SPEED_OF_LIGHT};

pub type CMatrix = DMatrix<Complex64>;

/// Nr × Nt complex voltage gains at one frequency.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelMatrix {
    pub entries: CMatrix,
    pub frequency: f64,
}

impl ChannelMatrix {
    pub fn new(entries: CMatrix, frequency: f64) -> Result<Self> {
        if entries.nrows() == 0 || entries.ncols() == 0 {
            return Err(Error::invalid("channel matrix must be at least 1x1"));
        }
        if !entries.iter().all(|h| h.re.is_finite() && h.im.is_finite()) {
            return Err(Error::Numeric("channel matrix has non-finite entries".into()));
        }
        Ok(Self { entries, frequency })
    }

    pub fn nr(&self) -> usize {
        self.entries.nrows()
    }

    pub fn nt(&self) -> usize {
        self.entries.ncols()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FrequencySweep {
    pub label: String,
    pub matrices: Vec<ChannelMatrix>,
}

impl FrequencySweep {
    pub fn new(label: impl Into<String>, matrices: Vec<ChannelMatrix>) -> Result<Self> {
        if let Some(first) = matrices.first() {
            let dims = (first.nr(), first.nt());
            for pair in matrices.windows(2) {
                if !(pair[1].frequency > pair[0].frequency) {
                    return Err(Error::NonAscending(pair[1].frequency));
                }
            }
            if let Some(m) = matrices.iter().find(|m| (m.nr(), m.nt()) != dims) {
                return Err(Error::DimensionMismatch {
                    expected: format!("{}x{}", dims.0, dims.1),
                    actual: format!("{}x{}", m.nr(), m.nt()),
                });
            }
        }
        Ok(Self {
            label: label.into(),
            matrices,
        })
    }

    pub fn frequencies(&self) -> Vec<f64> {
        self.matrices.iter().map(|m| m.frequency).collect()
    }

    pub fn len(&self) -> usize {
        self.matrices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.matrices.is_empty()
    }

    /// (Nr, Nt), or `None` for an empty sweep.
    pub fn dims(&self) -> Option<(usize, usize)> {
        self.matrices.first().map(|m| (m.nr(), m.nt()))
    }

    /// Entrywise sum of two sweeps on the same grid.
    pub fn add(&self, other: &FrequencySweep) -> Result<FrequencySweep> {
        if self.frequencies() != other.frequencies() || self.dims() != other.dims() {
            return Err(Error::invalid("sweeps differ in grid or dimensions"));
        }
        let matrices = self
            .matrices
            .iter()
            .zip(&other.matrices)
            .map(|(a, b)| ChannelMatrix {
                entries: &a.entries + &b.entries,
                frequency: a.frequency,
            })
            .collect();
        Ok(FrequencySweep {
            label: self.label.clone(),
            matrices,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DirectPath {
    pub enabled: bool,
    pub blockage_db: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScatterCluster {
    /// Mean entry power relative to the unblocked direct path.
    pub power_db: f64,
    pub delay_ns: f64,
    pub delay_spread_ns: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ScatterModel {
    pub clusters: Vec<ScatterCluster>,
    pub seed: u64,
}

/// Sub-rays drawn per cluster.
pub const RAYS_PER_CLUSTER: usize = 8;

struct Ray {
    delay_s: f64,
    gains: CMatrix,
}

/// Frequency-independent draw of every scatter ray.
pub struct ScatterRealization {
    rays: Vec<Ray>,
    nr: usize,
    nt: usize,
}

impl ScatterModel {
    /// Draws the ray set. Each cluster uses its own ChaCha stream so the
    /// result does not depend on evaluation order.
    pub fn realize(&self, reference_power: f64, nr: usize, nt: usize) -> ScatterRealization {
        let mut rays = Vec::with_capacity(self.clusters.len() * RAYS_PER_CLUSTER);
        for (c, cluster) in self.clusters.iter().enumerate() {
            let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
            rng.set_stream(c as u64);
            let ray_power = reference_power * 10f64.powf(cluster.power_db / 10.0) / RAYS_PER_CLUSTER as f64;
            let sigma = (ray_power / 2.0).sqrt();
            let spread = (cluster.delay_spread_ns > 0.0)
                .then(|| Exp::new(1.0 / cluster.delay_spread_ns).expect("positive rate"));
            for _ in 0..RAYS_PER_CLUSTER {
                let excess = spread.as_ref().map_or(0.0, |e| e.sample(&mut rng));
                let delay_s = (cluster.delay_ns + excess) * 1e-9;
                let gains = CMatrix::from_fn(nr, nt, |_, _| {
                    let re: f64 = rng.sample(StandardNormal);
                    let im: f64 = rng.sample(StandardNormal);
                    Complex64::new(re * sigma, im * sigma)
                });
                rays.push(Ray { delay_s, gains });
            }
        }
        ScatterRealization { rays, nr, nt }
    }
}

impl ScatterRealization {
    pub fn at(&self, freq_hz: f64) -> CMatrix {
        let mut h = CMatrix::zeros(self.nr, self.nt);
        for ray in &self.rays {
            let rot = Complex64::from_polar(1.0, -2.0 * PI * freq_hz * ray.delay_s);
            h += &ray.gains * rot;
        }
        h
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseSpec {
    pub psd_dbm_per_hz: f64,
    pub noise_figure_db: f64,
}

impl Default for NoiseSpec {
    fn default() -> Self {
        Self {
            psd_dbm_per_hz: -174.0,
            noise_figure_db: 5.0,
        }
    }
}

impl NoiseSpec {
    /// Noise power per receive branch in watts over `bandwidth_hz`.
    pub fn power_w(&self, bandwidth_hz: f64) -> f64 {
        let dbm = self.psd_dbm_per_hz + self.noise_figure_db + 10.0 * bandwidth_hz.log10();
        10f64.powf((dbm - 30.0) / 10.0)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Band {
    pub lo_hz: f64,
    pub hi_hz: f64,
    pub n_points: usize,
    pub label: String,
}

impl Band {
    pub fn frequencies(&self) -> Vec<f64> {
        self.grid(self.n_points)
    }

    /// `n` evenly spaced points spanning the band (band center when n = 1).
    pub fn grid(&self, n: usize) -> Vec<f64> {
        match n {
            0 => Vec::new(),
            1 => vec![self.center()],
            _ => {
                let step = (self.hi_hz - self.lo_hz) / (n - 1) as f64;
                (0..n).map(|i| self.lo_hz + step * i as f64).collect()
            }
        }
    }

    pub fn center(&self) -> f64 {
        0.5 * (self.lo_hz + self.hi_hz)
    }

    pub fn bandwidth(&self) -> f64 {
        self.hi_hz - self.lo_hz
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub name: String,
    pub tx_array: AntennaArray,
    pub rx_array: AntennaArray,
    pub ris: RisPanel,
    pub direct: DirectPath,
    pub scatter: ScatterModel,
    pub noise: NoiseSpec,
    pub band: Band,
}

impl Scenario {
    pub fn validate(&self) -> Result<()> {
        if !(self.band.lo_hz > 0.0 && self.band.lo_hz < self.band.hi_hz) {
            return Err(Error::invalid(format!(
                "band must satisfy 0 < freq_lo_hz < freq_hi_hz, got [{}, {}]",
                self.band.lo_hz, self.band.hi_hz
            )));
        }
        if self.band.n_points < 2 {
            return Err(Error::invalid("band needs at least 2 frequency points"));
        }
        if self.tx_array.is_empty() || self.rx_array.is_empty() {
            return Err(Error::invalid("antenna arrays need at least one element"));
        }
        if !self.direct.blockage_db.is_finite() {
            return Err(Error::invalid("blockage must be finite"));
        }
        for c in &self.scatter.clusters {
            if !(c.power_db.is_finite() && c.delay_ns.is_finite() && c.delay_ns >= 0.0)
                || !(c.delay_spread_ns.is_finite() && c.delay_spread_ns >= 0.0)
            {
                return Err(Error::invalid("scatter cluster parameters must be finite and delays >= 0"));
            }
        }
        self.ris.validate()
    }

    pub fn nr(&self) -> usize {
        self.rx_array.len()
    }

    pub fn nt(&self) -> usize {
        self.tx_array.len()
    }

    /// Mean unblocked direct-path entry power at band center, ignoring
    /// polarization. Scatter cluster powers are relative to this.
    pub fn reference_direct_power(&self) -> f64 {
        let lambda = wavelength(self.band.center());
        let mut acc = 0.0;
        for i in 0..self.nr() {
            let rx = self.rx_array.element_position(i);
            for j in 0..self.nt() {
                let tx = self.tx_array.element_position(j);
                let d = (rx - tx).norm();
                let g = self.tx_array.gain_towards(j, &rx) * self.rx_array.gain_towards(i, &tx);
                acc += g * (lambda / (4.0 * PI * d)).powi(2);
            }
        }
        acc / (self.nr() * self.nt()) as f64
    }

    /// Receiver array center in the RIS frame.
    pub fn rx_coord_in_ris_frame(&self) -> Result<SphericalCoord> {
        cartesian_to_spherical(&self.rx_array.pose.origin(), &self.ris.pose)
    }

    /// Longest geometric path (direct or via any RIS element).
    pub fn max_path_length(&self) -> f64 {
        let mut d_max: f64 = 0.0;
        let corners = [0, self.ris.cols - 1, self.ris.len() - self.ris.cols, self.ris.len() - 1];
        for i in 0..self.nr() {
            let rx = self.rx_array.element_position(i);
            for j in 0..self.nt() {
                let tx = self.tx_array.element_position(j);
                d_max = d_max.max((rx - tx).norm());
                for &c in &corners {
                    let p = self.ris.element_position(c);
                    d_max = d_max.max((tx - p).norm() + (p - rx).norm());
                }
            }
        }
        d_max
    }

    /// Largest grid spacing for which adjacent-point phase changes of every
    /// geometric path stay below π.
    pub fn max_unambiguous_spacing_hz(&self) -> f64 {
        SPEED_OF_LIGHT / (2.0 * self.max_path_length())
    }

    /// Swaps transmitter and receiver arrays.
    pub fn transposed(&self) -> Scenario {
        let mut s = self.clone();
        std::mem::swap(&mut s.tx_array, &mut s.rx_array);
        s
    }
}

fn co_pol(scn: &Scenario, i: usize, j: usize) -> bool {
    scn.rx_array.polarization(i) == scn.tx_array.polarization(j)
}

/// Friis direct path with flat blockage loss. Zero when the path is disabled.
pub fn direct_channel(scn: &Scenario, freq_hz: f64) -> CMatrix {
    let (nr, nt) = (scn.nr(), scn.nt());
    if !scn.direct.enabled {
        return CMatrix::zeros(nr, nt);
    }
    let k = wavenumber(freq_hz);
    let lambda = wavelength(freq_hz);
    let block = 10f64.powf(-scn.direct.blockage_db / 20.0);
    CMatrix::from_fn(nr, nt, |i, j| {
        if !co_pol(scn, i, j) {
            return Complex64::new(0.0, 0.0);
        }
        let rx = scn.rx_array.element_position(i);
        let tx = scn.tx_array.element_position(j);
        let d = (rx - tx).norm();
        let g = (scn.tx_array.gain_towards(j, &rx) * scn.rx_array.gain_towards(i, &tx)).sqrt();
        Complex64::from_polar(g * lambda / (4.0 * PI * d) * block, -k * d)
    })
}

pub fn scatter_channel(scn: &Scenario, freq_hz: f64) -> CMatrix {
    if scn.scatter.clusters.is_empty() {
        return CMatrix::zeros(scn.nr(), scn.nt());
    }
    scn.scatter
        .realize(scn.reference_direct_power(), scn.nr(), scn.nt())
        .at(freq_hz)
}

pub fn ris_cascade(scn: &Scenario, config: &RisConfig, freq_hz: f64) -> Result<CMatrix> {
    let synth = Synthesizer::with_frequencies(scn, vec![freq_hz])?;
    synth.cascade(config).map(|mut v| v.remove(0))
}

/// Per-element cascade weights of one co-polarized (rx, tx) pair.
struct PairWeights {
    rx: usize,
    tx: usize,
    pol: usize,
    weights: Vec<Complex64>,
    total: Complex64,
}

/// Precomputes every configuration-independent term of a scenario on a
/// fixed frequency grid, so that repeated evaluations for different RIS
/// configurations only pay for the cascade sum.
pub struct Synthesizer<'a> {
    scn: &'a Scenario,
    freqs: Vec<f64>,
    direct: Vec<CMatrix>,
    scatter: Vec<CMatrix>,
    pairs: Vec<Vec<PairWeights>>,
}

impl<'a> Synthesizer<'a> {
    pub fn new(scn: &'a Scenario) -> Result<Self> {
        Self::with_frequencies(scn, scn.band.frequencies())
    }

    pub fn with_frequencies(scn: &'a Scenario, freqs: Vec<f64>) -> Result<Self> {
        scn.validate()?;
        if freqs.is_empty() {
            return Err(Error::invalid("frequency grid is empty"));
        }
        if freqs.len() > 1 {
            let spacing = freqs[1] - freqs[0];
            if spacing >= scn.max_unambiguous_spacing_hz() {
                warn!(
                    "grid spacing {spacing:.0} Hz does not resolve path phase (limit {:.0} Hz)",
                    scn.max_unambiguous_spacing_hz()
                );
            }
        }
        let direct = freqs.iter().map(|&f| direct_channel(scn, f)).collect();
        let scatter = if scn.scatter.clusters.is_empty() {
            freqs.iter().map(|_| CMatrix::zeros(scn.nr(), scn.nt())).collect()
        } else {
            let real = scn.scatter.realize(scn.reference_direct_power(), scn.nr(), scn.nt());
            freqs.iter().map(|&f| real.at(f)).collect()
        };
        let pairs = freqs.iter().map(|&f| cascade_weights(scn, f)).collect();
        Ok(Self {
            scn,
            freqs,
            direct,
            scatter,
            pairs,
        })
    }

    pub fn frequencies(&self) -> &[f64] {
        &self.freqs
    }

    fn check(&self, config: &RisConfig) -> Result<()> {
        let ris = &self.scn.ris;
        if config.rows != ris.rows || config.cols != ris.cols {
            return Err(Error::DimensionMismatch {
                expected: format!("{}x{}", ris.rows, ris.cols),
                actual: format!("{}x{}", config.rows, config.cols),
            });
        }
        Ok(())
    }

    fn cascade_entry(&self, pw: &PairWeights, ones: &[Vec<usize>; 2]) -> Complex64 {
        let cell = self.scn.ris.unit_cells[pw.pol];
        let (g0, g1) = (cell.gamma[0], cell.gamma[1]);
        let mut s1 = Complex64::new(0.0, 0.0);
        for &n in &ones[pw.pol] {
            s1 += pw.weights[n];
        }
        g0 * (pw.total - s1) + g1 * s1
    }

    fn ones(config: &RisConfig) -> [Vec<usize>; 2] {
        use crate::geometry::Polarization::{Horizontal, Vertical};
        let idx = |pol| {
            config
                .bits(pol)
                .iter()
                .enumerate()
                .filter_map(|(i, &b)| (b == 1).then_some(i))
                .collect()
        };
        [idx(Vertical), idx(Horizontal)]
    }

    /// RIS-only contribution at every grid frequency.
    pub fn cascade(&self, config: &RisConfig) -> Result<Vec<CMatrix>> {
        self.check(config)?;
        let ones = Self::ones(config);
        Ok(self
            .pairs
            .iter()
            .map(|pairs| {
                let mut h = CMatrix::zeros(self.scn.nr(), self.scn.nt());
                for pw in pairs {
                    h[(pw.rx, pw.tx)] = self.cascade_entry(pw, &ones);
                }
                h
            })
            .collect())
    }

    /// Full channel (direct + scatter + optional RIS) over the grid.
    pub fn sweep(&self, config: Option<&RisConfig>) -> Result<FrequencySweep> {
        let cascade = match config {
            Some(c) => Some(self.cascade(c)?),
            None => None,
        };
        let mut matrices = Vec::with_capacity(self.freqs.len());
        for (k, &f) in self.freqs.iter().enumerate() {
            let mut h = &self.direct[k] + &self.scatter[k];
            if let Some(c) = &cascade {
                h += &c[k];
            }
            matrices.push(ChannelMatrix::new(h, f)?);
        }
        FrequencySweep::new(self.scn.band.label.clone(), matrices)
    }

    /// Band-mean `Tr(H Hᴴ)` without materializing the sweep.
    pub fn band_gain(&self, config: Option<&RisConfig>) -> Result<f64> {
        let ones = match config {
            Some(c) => {
                self.check(c)?;
                Some(Self::ones(c))
            }
            None => None,
        };
        let mut total = 0.0;
        for k in 0..self.freqs.len() {
            let mut h = &self.direct[k] + &self.scatter[k];
            if let Some(ones) = &ones {
                for pw in &self.pairs[k] {
                    h[(pw.rx, pw.tx)] += self.cascade_entry(pw, ones);
                }
            }
            total += h.iter().map(|x| x.norm_sqr()).sum::<f64>();
        }
        Ok(total / self.freqs.len() as f64)
    }
}

fn cascade_weights(scn: &Scenario, freq_hz: f64) -> Vec<PairWeights> {
    let ris = &scn.ris;
    let k = wavenumber(freq_hz);
    let scale = (wavelength(freq_hz) / (4.0 * PI)).powi(2);
    let elements = ris.element_positions();
    let tx_pos: Vec<Vec3> = (0..scn.nt()).map(|j| scn.tx_array.element_position(j)).collect();
    let rx_pos: Vec<Vec3> = (0..scn.nr()).map(|i| scn.rx_array.element_position(i)).collect();
    let mut out = Vec::new();
    for (i, rx) in rx_pos.iter().enumerate() {
        for (j, tx) in tx_pos.iter().enumerate() {
            if !co_pol(scn, i, j) {
                continue;
            }
            let weights: Vec<Complex64> = elements
                .iter()
                .map(|p| {
                    let (v1, v2) = (p - tx, rx - p);
                    let (d1, d2) = (v1.norm(), v2.norm());
                    let g = (scn.tx_array.gain_towards(j, p) * scn.rx_array.gain_towards(i, p)).sqrt();
                    let a = ris.element_factor(&(-v1 / d1)) * ris.element_factor(&(v2 / d2));
                    Complex64::from_polar(g * scale * a / (d1 * d2), -k * (d1 + d2))
                })
                .collect();
            let total = weights.iter().sum();
            out.push(PairWeights {
                rx: i,
                tx: j,
                pol: scn.rx_array.polarization(i).index(),
                weights,
                total,
            });
        }
    }
    out
}

/// Channel sweep over the scenario band; `None` gives the reference
/// (no RIS) case.
pub fn synthesize(scn: &Scenario, config: Option<&RisConfig>) -> Result<FrequencySweep> {
    Synthesizer::new(scn)?.sweep(config)
}
