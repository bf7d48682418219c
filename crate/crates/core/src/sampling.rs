//! Orientation-workspace discretisation: the workspace is the ball of
//! radius `tan(phi_max / 2)` in Rodrigues-parameter space, sampled as
//! equal-area direction sets on the unit sphere crossed with a uniform grid
//! of rotation angles.

use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

use crate::error::{Result, SfsError};

/// Discretisation parameters: rotation angles `phi_min, phi_min + delta_phi,
/// ..., <= phi_max` (radians), each shell carrying about
/// `per_shell_target` directions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WorkspaceSpec {
    pub phi_min: f64,
    pub phi_max: f64,
    pub delta_phi: f64,
    pub per_shell_target: usize,
}

impl WorkspaceSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.phi_min > 0.0 && self.phi_min <= self.phi_max && self.phi_max < std::f64::consts::PI)
        {
            return Err(SfsError::Domain(format!(
                "need 0 < phi_min <= phi_max < pi, got [{}, {}]",
                self.phi_min, self.phi_max
            )));
        }
        if !(self.delta_phi > 0.0) {
            return Err(SfsError::Domain("delta_phi must be positive".into()));
        }
        if self.per_shell_target == 0 {
            return Err(SfsError::Domain("per_shell_target must be positive".into()));
        }
        Ok(())
    }

    /// Shell angles, endpoints inclusive up to floating-point slack.
    pub fn shell_phis(&self) -> Vec<f64> {
        let mut phis = Vec::new();
        let mut k = 0usize;
        loop {
            let phi = self.phi_min + k as f64 * self.delta_phi;
            if phi > self.phi_max + 1e-12 {
                break;
            }
            phis.push(phi);
            k += 1;
        }
        phis
    }
}

/// One rotation-angle shell: common angle plus its unit direction set.
#[derive(Debug, Clone, PartialEq)]
pub struct Shell {
    pub phi: f64,
    pub directions: Vec<Vector3<f64>>,
}

impl Shell {
    /// Rodrigues vector of direction `i`: `c = k tan(phi/2)`.
    pub fn rodrigues(&self, i: usize) -> Vector3<f64> {
        self.directions[i] * (0.5 * self.phi).tan()
    }
}

/// The discretised orientation workspace.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleSet {
    pub shells: Vec<Shell>,
}

impl SampleSet {
    pub fn total(&self) -> usize {
        self.shells.iter().map(|s| s.directions.len()).sum()
    }

    /// Flat shell-major iteration as `(shell_index, phi, direction, c)`.
    pub fn iter_samples(&self) -> impl Iterator<Item = (usize, f64, Vector3<f64>, Vector3<f64>)> + '_ {
        self.shells.iter().enumerate().flat_map(|(si, shell)| {
            let t = (0.5 * shell.phi).tan();
            shell
                .directions
                .iter()
                .map(move |k| (si, shell.phi, *k, k * t))
        })
    }
}

/// Deterministic near-uniform placement of about `n_target` points on the
/// unit sphere: split the polar angle into equal-area bands, place points at
/// even azimuthal spacing within each band in proportion to its
/// circumference.
pub fn regular_sphere_points(n_target: usize) -> Vec<Vector3<f64>> {
    use std::f64::consts::PI;
    if n_target == 1 {
        return vec![Vector3::new(0.0, 0.0, 1.0)];
    }
    let area = 4.0 * PI / n_target as f64;
    let d = area.sqrt();
    let m_theta = (PI / d).round().max(1.0) as usize;
    let d_theta = PI / m_theta as f64;
    let d_phi = area / d_theta;
    let mut pts = Vec::with_capacity(n_target + n_target / 50 + 8);
    for m in 0..m_theta {
        let theta = PI * (m as f64 + 0.5) / m_theta as f64;
        let m_phi = ((2.0 * PI * theta.sin() / d_phi).round()).max(1.0) as usize;
        for j in 0..m_phi {
            let phi = 2.0 * PI * j as f64 / m_phi as f64;
            pts.push(Vector3::new(
                theta.sin() * phi.cos(),
                theta.sin() * phi.sin(),
                theta.cos(),
            ));
        }
    }
    pts
}

/// Build the sample set: every shell shares the same direction set.
pub fn sample_workspace(spec: &WorkspaceSpec) -> Result<SampleSet> {
    spec.validate()?;
    let directions = regular_sphere_points(spec.per_shell_target);
    let shells = spec
        .shell_phis()
        .into_iter()
        .map(|phi| Shell { phi, directions: directions.clone() })
        .collect();
    Ok(SampleSet { shells })
}
