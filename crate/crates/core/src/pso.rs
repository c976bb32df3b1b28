//! Particle swarm beam search over the receiver's spherical coordinates in
//! the RIS frame plus a binary "flip" dimension that inverts every bit of
//! the resulting profile.
//!
//! Continuous dimensions follow the inertia-weight PSO update with position
//! clamping. The flip dimension keeps its own velocity; at each step it
//! toggles with probability `|2·sigmoid(v) - 1|`, so a particle at rest
//! never changes branch.

use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::channel::{Scenario, Synthesizer};
use crate::error::{Error, Result};
use crate::geometry::SphericalCoord;
use crate::ris::{phase_profile_for_focus, FocusTarget, RisConfig};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SearchParams {
    pub rx_coord: SphericalCoord,
    pub flip: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SearchBounds {
    pub r_m: (f64, f64),
    pub theta_rad: (f64, f64),
    pub phi_rad: (f64, f64),
}

impl Default for SearchBounds {
    fn default() -> Self {
        Self {
            r_m: (5.0, 300.0),
            theta_rad: (60f64.to_radians(), 120f64.to_radians()),
            phi_rad: (0.0, 180f64.to_radians()),
        }
    }
}

impl SearchBounds {
    fn as_array(&self) -> [(f64, f64); 3] {
        [self.r_m, self.theta_rad, self.phi_rad]
    }

    pub fn contains(&self, p: &SearchParams) -> bool {
        let x = [p.rx_coord.r, p.rx_coord.theta, p.rx_coord.phi];
        self.as_array()
            .iter()
            .zip(x)
            .all(|(&(lo, hi), v)| v >= lo && v <= hi)
    }

    fn validate(&self) -> Result<()> {
        let [r, t, p] = self.as_array();
        if !(r.0 > 0.0 && r.0 <= r.1) {
            return Err(Error::invalid("radius bounds must satisfy 0 < r_min <= r_max"));
        }
        if !(t.0 >= 0.0 && t.0 <= t.1 && t.1 <= std::f64::consts::PI) {
            return Err(Error::invalid("polar bounds must lie within [0, π]"));
        }
        if !(p.0 <= p.1 && p.0 >= -std::f64::consts::PI && p.1 <= std::f64::consts::PI) {
            return Err(Error::invalid("azimuth bounds must lie within [-π, π]"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FlipMode {
    Search,
    Fixed(bool),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SwarmConfig {
    pub swarm_size: usize,
    pub iterations: usize,
    pub inertia: f64,
    pub cognitive: f64,
    pub social: f64,
    /// Initial velocity half-width as a fraction of each dimension's range.
    pub initial_velocity: f64,
    /// Velocity limit as a fraction of each dimension's range.
    pub max_velocity: f64,
    pub bounds: SearchBounds,
    pub seed: u64,
    /// Stop after this many iterations without a global-best improvement.
    pub stall_iterations: usize,
    /// Frequency points used by the fitness; `None` uses the scenario band grid.
    pub fitness_points: Option<usize>,
    pub flip_mode: FlipMode,
}

impl Default for SwarmConfig {
    fn default() -> Self {
        Self {
            swarm_size: 24,
            iterations: 60,
            inertia: 0.72,
            cognitive: 1.49,
            social: 1.49,
            initial_velocity: 0.25,
            max_velocity: 0.2,
            bounds: SearchBounds::default(),
            seed: 0,
            stall_iterations: 15,
            fitness_points: None,
            flip_mode: FlipMode::Search,
        }
    }
}

impl SwarmConfig {
    pub fn validate(&self) -> Result<()> {
        if self.swarm_size == 0 {
            return Err(Error::invalid("swarm_size must be >= 1"));
        }
        if !(0.0..=1.0).contains(&self.inertia) {
            return Err(Error::invalid("inertia must lie in [0, 1]"));
        }
        if !(self.cognitive >= 0.0 && self.social >= 0.0) {
            return Err(Error::invalid("acceleration coefficients must be >= 0"));
        }
        if !(self.initial_velocity >= 0.0 && self.max_velocity > 0.0) {
            return Err(Error::invalid("velocity fractions must satisfy initial >= 0, max > 0"));
        }
        if self.fitness_points == Some(0) {
            return Err(Error::invalid("fitness_points must be >= 1"));
        }
        self.bounds.validate()
    }
}

/// Scores search parameters against one scenario. Configuration-independent
/// channel terms are computed once.
pub struct FitnessEvaluator<'a> {
    scn: &'a Scenario,
    synth: Synthesizer<'a>,
    focus_frequency: f64,
}

impl<'a> FitnessEvaluator<'a> {
    pub fn new(scn: &'a Scenario, fitness_points: Option<usize>) -> Result<Self> {
        let freqs = match fitness_points {
            Some(n) => scn.band.grid(n),
            None => scn.band.frequencies(),
        };
        Ok(Self {
            scn,
            synth: Synthesizer::with_frequencies(scn, freqs)?,
            focus_frequency: scn.band.center(),
        })
    }

    pub fn config_for(&self, p: &SearchParams) -> Result<RisConfig> {
        phase_profile_for_focus(
            &self.scn.ris,
            &FocusTarget {
                tx_position: self.scn.tx_array.pose.origin(),
                rx_coord: p.rx_coord,
                flip: p.flip,
                frequency: self.focus_frequency,
            },
        )
    }

    /// Band-mean channel gain (linear) of the profile focused at `p`.
    pub fn evaluate(&self, p: &SearchParams) -> Result<f64> {
        self.synth.band_gain(Some(&self.config_for(p)?))
    }
}

pub fn fitness(scn: &Scenario, p: &SearchParams) -> Result<f64> {
    FitnessEvaluator::new(scn, None)?.evaluate(p)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Particle {
    /// (r, theta, phi)
    pub position: [f64; 3],
    pub flip: bool,
    /// Continuous velocities followed by the flip velocity.
    pub velocity: [f64; 4],
    pub fitness: f64,
    pub best_position: [f64; 3],
    pub best_flip: bool,
    pub best_fitness: f64,
}

impl Particle {
    fn params(position: &[f64; 3], flip: bool) -> SearchParams {
        SearchParams {
            rx_coord: SphericalCoord {
                r: position[0],
                theta: position[1],
                phi: position[2],
            },
            flip,
        }
    }

    pub fn current(&self) -> SearchParams {
        Self::params(&self.position, self.flip)
    }

    pub fn best(&self) -> SearchParams {
        Self::params(&self.best_position, self.best_flip)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SwarmState {
    pub particles: Vec<Particle>,
    pub best_position: [f64; 3],
    pub best_flip: bool,
    pub best_fitness: f64,
    pub evaluations: usize,
}

impl SwarmState {
    /// Uniform positions within bounds, Bernoulli(0.5) flips, uniform
    /// continuous velocities within `±initial_velocity` of each range.
    pub fn initialize(eval: &FitnessEvaluator<'_>, cfg: &SwarmConfig, rng: &mut impl Rng) -> Result<Self> {
        let bounds = cfg.bounds.as_array();
        let mut particles = Vec::with_capacity(cfg.swarm_size);
        for _ in 0..cfg.swarm_size {
            let mut position = [0.0; 3];
            for (x, &(lo, hi)) in position.iter_mut().zip(&bounds) {
                *x = lo + (hi - lo) * rng.random::<f64>();
            }
            let mut velocity = [0.0; 4];
            for (v, &(lo, hi)) in velocity.iter_mut().zip(&bounds) {
                *v = cfg.initial_velocity * (hi - lo) * (2.0 * rng.random::<f64>() - 1.0);
            }
            let coin = rng.random::<bool>();
            let flip = match cfg.flip_mode {
                FlipMode::Search => coin,
                FlipMode::Fixed(f) => f,
            };
            particles.push(Particle {
                position,
                flip,
                velocity,
                fitness: f64::NEG_INFINITY,
                best_position: position,
                best_flip: flip,
                best_fitness: f64::NEG_INFINITY,
            });
        }
        let mut state = Self {
            best_position: particles[0].position,
            best_flip: particles[0].flip,
            best_fitness: f64::NEG_INFINITY,
            particles,
            evaluations: 0,
        };
        state.evaluate_and_refresh(eval)?;
        Ok(state)
    }

    /// Builds a state from explicit particles; personal bests are taken as
    /// given and the global best is the best of them.
    pub fn from_particles(particles: Vec<Particle>) -> Result<Self> {
        let best = particles
            .iter()
            .fold(None::<&Particle>, |acc, p| match acc {
                Some(b) if b.best_fitness >= p.best_fitness => Some(b),
                _ => Some(p),
            })
            .ok_or_else(|| Error::invalid("swarm needs at least one particle"))?;
        Ok(Self {
            best_position: best.best_position,
            best_flip: best.best_flip,
            best_fitness: best.best_fitness,
            particles,
            evaluations: 0,
        })
    }

    pub fn best(&self) -> SearchParams {
        Particle::params(&self.best_position, self.best_flip)
    }

    fn evaluate_and_refresh(&mut self, eval: &FitnessEvaluator<'_>) -> Result<()> {
        for p in &mut self.particles {
            p.fitness = eval.evaluate(&p.current())?;
            self.evaluations += 1;
        }
        // reduction in fixed particle order
        for p in &mut self.particles {
            if p.fitness > p.best_fitness {
                p.best_fitness = p.fitness;
                p.best_position = p.position;
                p.best_flip = p.flip;
            }
            if p.best_fitness > self.best_fitness {
                self.best_fitness = p.best_fitness;
                self.best_position = p.best_position;
                self.best_flip = p.best_flip;
            }
        }
        Ok(())
    }

    /// One PSO iteration: move every particle, then re-evaluate and refresh
    /// personal and global bests.
    pub fn step(&mut self, eval: &FitnessEvaluator<'_>, cfg: &SwarmConfig, rng: &mut impl Rng) -> Result<()> {
        let bounds = cfg.bounds.as_array();
        let (gpos, gflip) = (self.best_position, self.best_flip);
        for p in &mut self.particles {
            for d in 0..3 {
                let (u1, u2): (f64, f64) = (rng.random(), rng.random());
                let v = cfg.inertia * p.velocity[d]
                    + cfg.cognitive * u1 * (p.best_position[d] - p.position[d])
                    + cfg.social * u2 * (gpos[d] - p.position[d]);
                let (lo, hi) = bounds[d];
                let vmax = cfg.max_velocity * (hi - lo);
                let v = v.clamp(-vmax, vmax);
                let x = p.position[d] + v;
                if x < lo || x > hi {
                    p.position[d] = x.clamp(lo, hi);
                    p.velocity[d] = 0.0;
                } else {
                    p.position[d] = x;
                    p.velocity[d] = v;
                }
            }
            let (u1, u2, u3): (f64, f64, f64) = (rng.random(), rng.random(), rng.random());
            let bit = |b: bool| f64::from(u8::from(b));
            let v = cfg.inertia * p.velocity[3]
                + cfg.cognitive * u1 * (bit(p.best_flip) - bit(p.flip))
                + cfg.social * u2 * (bit(gflip) - bit(p.flip));
            p.velocity[3] = v;
            if let FlipMode::Search = cfg.flip_mode {
                let toggle = (2.0 * sigmoid(v) - 1.0).abs();
                if u3 < toggle {
                    p.flip = !p.flip;
                }
            }
        }
        self.evaluate_and_refresh(eval)
    }
}

fn sigmoid(v: f64) -> f64 {
    1.0 / (1.0 + (-v).exp())
}

#[derive(Debug, Clone, PartialEq)]
pub struct OptimizationResult {
    pub best_params: SearchParams,
    pub best_config: RisConfig,
    pub best_fitness: f64,
    /// Global-best fitness after initialization and after every iteration.
    pub fitness_trace: Vec<f64>,
    /// Cumulative fitness evaluations aligned with `fitness_trace`.
    pub evaluation_trace: Vec<usize>,
    pub evaluations: usize,
}

impl OptimizationResult {
    /// `iteration,gbest_gain_db,evaluations` rows; iteration 0 is the
    /// initial swarm.
    pub fn trace_csv(&self) -> String {
        let mut s = String::from("iteration,gbest_gain_db,evaluations\n");
        for (i, (g, e)) in self.fitness_trace.iter().zip(&self.evaluation_trace).enumerate() {
            let _ = writeln!(s, "{i},{:.6},{e}", 10.0 * g.log10());
        }
        s
    }

    /// Key-value header followed by the 0/1 configuration grid.
    pub fn to_text(&self) -> String {
        let c = &self.best_params.rx_coord;
        let mut s = String::new();
        let _ = writeln!(s, "# best_r_m = {}", c.r);
        let _ = writeln!(s, "# best_theta_deg = {}", c.theta.to_degrees());
        let _ = writeln!(s, "# best_phi_deg = {}", c.phi.to_degrees());
        let _ = writeln!(s, "# flip = {}", self.best_params.flip);
        let _ = writeln!(s, "# best_gain_db = {:.6}", 10.0 * self.best_fitness.log10());
        let _ = writeln!(s, "# evaluations = {}", self.evaluations);
        s.push_str(&self.best_config.to_text());
        s
    }
}

pub fn optimize(scn: &Scenario, cfg: &SwarmConfig) -> Result<OptimizationResult> {
    cfg.validate()?;
    let eval = FitnessEvaluator::new(scn, cfg.fitness_points)?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut state = SwarmState::initialize(&eval, cfg, &mut rng)?;
    let mut trace = vec![state.best_fitness];
    let mut evals = vec![state.evaluations];
    let mut stall = 0;
    for _ in 0..cfg.iterations {
        let before = state.best_fitness;
        state.step(&eval, cfg, &mut rng)?;
        trace.push(state.best_fitness);
        evals.push(state.evaluations);
        if state.best_fitness > before {
            stall = 0;
        } else {
            stall += 1;
            if cfg.stall_iterations > 0 && stall >= cfg.stall_iterations {
                break;
            }
        }
    }
    let best_params = state.best();
    Ok(OptimizationResult {
        best_config: eval.config_for(&best_params)?,
        best_params,
        best_fitness: state.best_fitness,
        fitness_trace: trace,
        evaluation_trace: evals,
        evaluations: state.evaluations,
    })
}
