//! Coordinate frames, spherical coordinates and antenna element patterns.
//!
//! Global frame: x east, y north, z up, all lengths in meters.
//!
//! Spherical coordinates are expressed in a local frame as `(r, theta, phi)`
//! with `theta` the polar angle from local +z and `phi` the azimuth from
//! local +x towards local +y.
//!
//! Antenna arrays use local +x as boresight and local +z as "up". A RIS
//! panel uses local +y as its broadside normal with local +z along the
//! panel's vertical edge, so `theta = 90°, phi = 90°` is broadside.

use std::f64::consts::PI;

use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Vec3 = Vector3<f64>;

const ORTHO_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SphericalCoord {
    pub r: f64,
    pub theta: f64,
    pub phi: f64,
}

impl SphericalCoord {
    /// Builds a coordinate, wrapping `phi` into `[-π, π)`.
    pub fn new(r: f64, theta: f64, phi: f64) -> Result<Self> {
        if !(r.is_finite() && r > 0.0) {
            return Err(Error::invalid(format!("spherical radius must be > 0, got {r}")));
        }
        if !(0.0..=PI).contains(&theta) {
            return Err(Error::invalid(format!(
                "polar angle must lie in [0, π], got {theta}"
            )));
        }
        if !phi.is_finite() {
            return Err(Error::invalid("azimuth must be finite"));
        }
        Ok(Self {
            r,
            theta,
            phi: wrap_azimuth(phi),
        })
    }

    pub fn from_degrees(r: f64, theta_deg: f64, phi_deg: f64) -> Result<Self> {
        Self::new(r, theta_deg.to_radians(), phi_deg.to_radians())
    }

    /// Unit vector in the local frame.
    pub fn unit_local(&self) -> Vec3 {
        let (st, ct) = self.theta.sin_cos();
        let (sp, cp) = self.phi.sin_cos();
        Vec3::new(st * cp, st * sp, ct)
    }
}

fn wrap_azimuth(phi: f64) -> f64 {
    let w = (phi + PI).rem_euclid(2.0 * PI) - PI;
    // rem_euclid can round up to exactly 2π for tiny negative inputs
    if w >= PI {
        w - 2.0 * PI
    } else {
        w
    }
}

/// A right-handed orthonormal frame placed at `origin`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Pose {
    origin: Vec3,
    x_axis: Vec3,
    y_axis: Vec3,
    z_axis: Vec3,
}

impl Pose {
    pub fn new(origin: Vec3, x_axis: Vec3, y_axis: Vec3, z_axis: Vec3) -> Result<Self> {
        if !origin.iter().all(|c| c.is_finite()) {
            return Err(Error::invalid("pose origin must be finite"));
        }
        for (name, a) in [("x", &x_axis), ("y", &y_axis), ("z", &z_axis)] {
            if (a.norm() - 1.0).abs() > ORTHO_TOL {
                return Err(Error::invalid(format!("pose {name} axis is not unit norm")));
            }
        }
        if x_axis.dot(&y_axis).abs() > ORTHO_TOL
            || y_axis.dot(&z_axis).abs() > ORTHO_TOL
            || x_axis.dot(&z_axis).abs() > ORTHO_TOL
        {
            return Err(Error::invalid("pose axes are not mutually orthogonal"));
        }
        if (x_axis.cross(&y_axis) - z_axis).norm() > ORTHO_TOL {
            return Err(Error::invalid("pose axes are not right-handed"));
        }
        Ok(Self {
            origin,
            x_axis,
            y_axis,
            z_axis,
        })
    }

    pub fn identity() -> Self {
        Self::at(Vec3::zeros())
    }

    /// Global axes translated to `origin`.
    pub fn at(origin: Vec3) -> Self {
        Self {
            origin,
            x_axis: Vec3::x(),
            y_axis: Vec3::y(),
            z_axis: Vec3::z(),
        }
    }

    /// Frame whose local +x points along compass azimuth `azimuth_deg`
    /// (counter-clockwise from global +x), tilted down by `downtilt_deg`.
    pub fn facing(origin: Vec3, azimuth_deg: f64, downtilt_deg: f64) -> Self {
        let (sa, ca) = azimuth_deg.to_radians().sin_cos();
        let (se, ce) = (-downtilt_deg).to_radians().sin_cos();
        let x_axis = Vec3::new(ce * ca, ce * sa, se);
        let y_axis = Vec3::new(-sa, ca, 0.0);
        let z_axis = x_axis.cross(&y_axis);
        Self {
            origin,
            x_axis,
            y_axis,
            z_axis,
        }
    }

    pub fn origin(&self) -> Vec3 {
        self.origin
    }

    pub fn axes(&self) -> [Vec3; 3] {
        [self.x_axis, self.y_axis, self.z_axis]
    }

    pub fn point_to_global(&self, local: &Vec3) -> Vec3 {
        self.origin + self.dir_to_global(local)
    }

    pub fn dir_to_global(&self, local: &Vec3) -> Vec3 {
        self.x_axis * local.x + self.y_axis * local.y + self.z_axis * local.z
    }

    pub fn point_to_local(&self, global: &Vec3) -> Vec3 {
        self.dir_to_local(&(global - self.origin))
    }

    pub fn dir_to_local(&self, global: &Vec3) -> Vec3 {
        Vec3::new(
            self.x_axis.dot(global),
            self.y_axis.dot(global),
            self.z_axis.dot(global),
        )
    }
}

pub fn spherical_to_cartesian(s: &SphericalCoord, frame: &Pose) -> Vec3 {
    frame.point_to_global(&(s.unit_local() * s.r))
}

/// Inverse of [`spherical_to_cartesian`]. Fails when `p` coincides with the
/// frame origin.
pub fn cartesian_to_spherical(p: &Vec3, frame: &Pose) -> Result<SphericalCoord> {
    let local = frame.point_to_local(p);
    let r = local.norm();
    let theta = (local.z / r).clamp(-1.0, 1.0).acos();
    SphericalCoord::new(r, theta, local.y.atan2(local.x))
}

pub fn path_length(a: &Vec3, b: &Vec3) -> f64 {
    (a - b).norm()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Polarization {
    #[serde(rename = "V")]
    Vertical,
    #[serde(rename = "H")]
    Horizontal,
}

impl Polarization {
    pub fn index(self) -> usize {
        match self {
            Polarization::Vertical => 0,
            Polarization::Horizontal => 1,
        }
    }
}

/// Element radiation pattern shared by every element of an array.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ElementPattern {
    /// Cellular sector model, parabolic in dB:
    /// `G = peak - min(12 (az/az_bw)^2 + 12 (el/el_bw)^2, -backlobe_db)`.
    Sector {
        peak_gain_dbi: f64,
        az_beamwidth_deg: f64,
        el_beamwidth_deg: f64,
        backlobe_db: f64,
    },
    /// `G = peak * cos^2(elevation)`.
    Dipole { peak_gain_dbi: f64 },
    Isotropic,
}

pub const DEFAULT_BACKLOBE_DB: f64 = -30.0;

impl ElementPattern {
    pub fn sector(peak_gain_dbi: f64, az_beamwidth_deg: f64, el_beamwidth_deg: f64) -> Self {
        ElementPattern::Sector {
            peak_gain_dbi,
            az_beamwidth_deg,
            el_beamwidth_deg,
            backlobe_db: DEFAULT_BACKLOBE_DB,
        }
    }

    /// Linear power gain for a unit direction given in the array's local frame.
    pub fn gain_local(&self, dir: &Vec3) -> f64 {
        match *self {
            ElementPattern::Isotropic => 1.0,
            ElementPattern::Dipole { peak_gain_dbi } => {
                let sin_el = dir.z.clamp(-1.0, 1.0);
                db_to_linear(peak_gain_dbi) * (1.0 - sin_el * sin_el)
            }
            ElementPattern::Sector {
                peak_gain_dbi,
                az_beamwidth_deg,
                el_beamwidth_deg,
                backlobe_db,
            } => {
                let az = dir.y.atan2(dir.x).to_degrees();
                let el = dir.z.clamp(-1.0, 1.0).asin().to_degrees();
                let rolloff =
                    12.0 * (az / az_beamwidth_deg).powi(2) + 12.0 * (el / el_beamwidth_deg).powi(2);
                db_to_linear(peak_gain_dbi - rolloff.min(-backlobe_db))
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ArrayElement {
    /// Offset from the array origin, local frame.
    pub offset: Vec3,
    pub polarization: Polarization,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AntennaArray {
    pub pose: Pose,
    pub elements: Vec<ArrayElement>,
    pub pattern: ElementPattern,
}

impl AntennaArray {
    pub fn new(pose: Pose, elements: Vec<ArrayElement>, pattern: ElementPattern) -> Result<Self> {
        if elements.is_empty() {
            return Err(Error::invalid("antenna array needs at least one element"));
        }
        Ok(Self {
            pose,
            elements,
            pattern,
        })
    }

    /// A single isotropic, vertically polarized element at `origin`.
    pub fn isotropic_point(origin: Vec3) -> Self {
        Self {
            pose: Pose::at(origin),
            elements: vec![ArrayElement {
                offset: Vec3::zeros(),
                polarization: Polarization::Vertical,
            }],
            pattern: ElementPattern::Isotropic,
        }
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn element_position(&self, idx: usize) -> Vec3 {
        self.pose.point_to_global(&self.elements[idx].offset)
    }

    pub fn polarization(&self, idx: usize) -> Polarization {
        self.elements[idx].polarization
    }

    /// Linear gain of element `idx` towards the global point `target`.
    pub fn gain_towards(&self, idx: usize, target: &Vec3) -> f64 {
        let d = target - self.element_position(idx);
        let n = d.norm();
        if n == 0.0 {
            return self.pattern.gain_local(&Vec3::x());
        }
        self.pattern.gain_local(&self.pose.dir_to_local(&(d / n)))
    }
}

/// Linear power gain of `array`'s element `element_idx` in the global unit
/// direction `direction`.
pub fn pattern_gain(array: &AntennaArray, element_idx: usize, direction: &Vec3) -> Result<f64> {
    if element_idx >= array.len() {
        return Err(Error::invalid(format!(
            "element index {element_idx} out of range for {}-element array",
            array.len()
        )));
    }
    if (direction.norm() - 1.0).abs() > 1e-6 {
        return Err(Error::invalid(format!(
            "direction must be unit norm (|d| = {})",
            direction.norm()
        )));
    }
    Ok(array.pattern.gain_local(&array.pose.dir_to_local(direction)))
}

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

pub fn linear_to_db(x: f64) -> f64 {
    10.0 * x.log10()
}
