//! Simulation toolkit for MIMO links assisted by a 1-bit reconfigurable
//! intelligent surface.
//!
//! The crate covers the surface forward model and beam patterns ([`ris`]),
//! wideband channel synthesis ([`channel`]), link metrics ([`metrics`]),
//! particle-swarm beam search ([`pso`]) and the file formats and command line
//! front end ([`io`], [`cli`]).

// `!(x > 0.0)` is how NaN is rejected alongside the range check.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod channel;
pub mod cli;
pub mod error;
pub mod geometry;
pub mod io;
pub mod metrics;
pub mod pso;
pub mod ris;

pub use channel::{synthesize, ChannelMatrix, FrequencySweep, Scenario, Synthesizer};
pub use error::{Error, Result};
pub use geometry::{AntennaArray, Polarization, Pose, SphericalCoord, Vec3};
pub use metrics::{band_gain, channel_gain, effective_rank, waterfilling};
pub use pso::{optimize, OptimizationResult, SearchParams, SwarmConfig};
pub use ris::{RisConfig, RisPanel};
