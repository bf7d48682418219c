//! Platform geometry: vertex construction, Rodrigues-parameter rotations and
//! inverse kinematics (leg lengths) of the semi-regular Stewart-Gough
//! platform.
//!
//! The fixed-platform circumradius is normalised to 1, so every length in the
//! crate is dimensionless. Angles are radians throughout.

use nalgebra::{Matrix3, Vector3};
use serde::{Deserialize, Serialize};

use crate::error::{Result, SfsError};

/// Guard against architecture singularity (`gamma_f == gamma_m`).
pub const EPS_ARCH: f64 = 1e-9;
/// Guard against coincident spherical-joint centres.
pub const EPS_LEG: f64 = 1e-9;

const TWO_THIRDS_PI: f64 = 2.0 * std::f64::consts::FRAC_PI_3;

/// Shape parameters of a semi-regular Stewart-Gough platform.
///
/// `r_m` is the moving-platform circumradius relative to the fixed platform
/// (whose radius is 1). `gamma_f` and `gamma_m` are the half-angles
/// subtended at the platform centres by the vertex pair adjacent to the
/// X-axis (fixed) and x-axis (moving).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Architecture {
    r_m: f64,
    gamma_f: f64,
    gamma_m: f64,
}

impl Architecture {
    /// Validated constructor. Rejects out-of-range parameters and the
    /// architecture-singular case `sin(gamma_f - gamma_m) == 0`.
    pub fn new(r_m: f64, gamma_f: f64, gamma_m: f64) -> Result<Self> {
        if !(r_m.is_finite() && gamma_f.is_finite() && gamma_m.is_finite()) {
            return Err(SfsError::Domain("architecture parameters must be finite".into()));
        }
        if r_m <= 0.0 {
            return Err(SfsError::Domain(format!("r_m must be positive, got {r_m}")));
        }
        if gamma_f <= 0.0 || gamma_f >= TWO_THIRDS_PI {
            return Err(SfsError::Domain(format!(
                "gamma_f must lie in (0, 2*pi/3), got {gamma_f}"
            )));
        }
        if gamma_m <= 0.0 || gamma_m >= TWO_THIRDS_PI {
            return Err(SfsError::Domain(format!(
                "gamma_m must lie in (0, 2*pi/3), got {gamma_m}"
            )));
        }
        let s = (gamma_f - gamma_m).sin().abs();
        if s <= EPS_ARCH {
            return Err(SfsError::ArchitectureSingular(s));
        }
        Ok(Self { r_m, gamma_f, gamma_m })
    }

    /// Construct without validation. Intended for tests that probe the
    /// behaviour of singular architectures.
    pub fn new_unchecked(r_m: f64, gamma_f: f64, gamma_m: f64) -> Self {
        Self { r_m, gamma_f, gamma_m }
    }

    pub fn r_m(&self) -> f64 {
        self.r_m
    }

    pub fn gamma_f(&self) -> f64 {
        self.gamma_f
    }

    pub fn gamma_m(&self) -> f64 {
        self.gamma_m
    }

    /// `sin(gamma_f - gamma_m)`, the factor whose vanishing marks an
    /// architecture singularity.
    pub fn sin_gamma(&self) -> f64 {
        (self.gamma_f - self.gamma_m).sin()
    }
}

/// Moving-platform pose: position of the platform centroid in the fixed
/// frame plus orientation as a Rodrigues vector `c = k tan(phi/2)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Pose {
    pub position: Vector3<f64>,
    pub rodrigues: Vector3<f64>,
}

impl Pose {
    pub fn new(position: Vector3<f64>, rodrigues: Vector3<f64>) -> Result<Self> {
        if !(position.iter().all(|v| v.is_finite()) && rodrigues.iter().all(|v| v.is_finite())) {
            return Err(SfsError::Domain("pose components must be finite".into()));
        }
        Ok(Self { position, rodrigues })
    }

    /// Rotation angle `phi = 2 atan(||c||)`, always in `[0, pi)`.
    pub fn angle(&self) -> f64 {
        2.0 * self.rodrigues.norm().atan()
    }
}

/// Platform vertices: `fixed[i]` in the fixed frame (unit circumradius),
/// `moving[i]` in the moving frame (circumradius `r_m`). All third
/// components are zero.
#[derive(Debug, Clone, PartialEq)]
pub struct PlatformVertices {
    pub fixed: [Vector3<f64>; 6],
    pub moving: [Vector3<f64>; 6],
}

fn vertex_angles(gamma: f64) -> [f64; 6] {
    [
        -gamma,
        gamma,
        TWO_THIRDS_PI - gamma,
        TWO_THIRDS_PI + gamma,
        2.0 * TWO_THIRDS_PI - gamma,
        2.0 * TWO_THIRDS_PI + gamma,
    ]
}

/// Vertex positions from the paired-angle layout: fixed-platform vertices at
/// `{-gamma_f, gamma_f, 2pi/3 -+ gamma_f, 4pi/3 -+ gamma_f}` measured CCW
/// from the X-axis, moving platform analogous with `gamma_m`.
pub fn platform_vertices(arch: &Architecture) -> PlatformVertices {
    let bf = vertex_angles(arch.gamma_f());
    let bm = vertex_angles(arch.gamma_m());
    let mut fixed = [Vector3::zeros(); 6];
    let mut moving = [Vector3::zeros(); 6];
    for i in 0..6 {
        fixed[i] = Vector3::new(bf[i].cos(), bf[i].sin(), 0.0);
        moving[i] = arch.r_m() * Vector3::new(bm[i].cos(), bm[i].sin(), 0.0);
    }
    PlatformVertices { fixed, moving }
}

/// Rotation matrix of the Rodrigues vector `c`:
/// `R = I + 2/(1 + c.c) (C + C^2)` with `C` the skew matrix of `c`.
pub fn rotation_from_rodrigues(c: &Vector3<f64>) -> Matrix3<f64> {
    let skew = Matrix3::new(0.0, -c.z, c.y, c.z, 0.0, -c.x, -c.y, c.x, 0.0);
    let scale = 2.0 / (1.0 + c.dot(c));
    Matrix3::identity() + scale * (skew + skew * skew)
}

/// Rodrigues vector of the rotation by `phi` about the unit axis `k`:
/// `c = k tan(phi/2)`.
pub fn rodrigues_from_axis_angle(k: &Vector3<f64>, phi: f64) -> Result<Vector3<f64>> {
    if (k.norm() - 1.0).abs() > 1e-10 {
        return Err(SfsError::Domain(format!("axis must be unit, norm {}", k.norm())));
    }
    if !(phi > 0.0 && phi < std::f64::consts::PI) {
        return Err(SfsError::Domain(format!("angle must lie in (0, pi), got {phi}")));
    }
    Ok(k * (0.5 * phi).tan())
}

/// Inverse kinematics: the six leg lengths `l_i = ||p + R t_i - b_i||`.
pub fn leg_lengths(arch: &Architecture, pose: &Pose) -> Result<[f64; 6]> {
    let verts = platform_vertices(arch);
    let rot = rotation_from_rodrigues(&pose.rodrigues);
    let mut lengths = [0.0; 6];
    for i in 0..6 {
        let l = (pose.position + rot * verts.moving[i] - verts.fixed[i]).norm();
        if l < EPS_LEG {
            return Err(SfsError::DegenerateLeg { index: i, length: l });
        }
        lengths[i] = l;
    }
    Ok(lengths)
}
