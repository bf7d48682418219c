//! Run configuration: a JSON file naming the architectures, the workspace
//! discretisation, the neutral height and the solver tolerances. The
//! bundled default reproduces the reference four-architecture study.

use serde::{Deserialize, Serialize};
use sfs_core::{Architecture, OracleGrid, SolverParams, WorkspaceSpec};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NamedArchitecture {
    pub name: String,
    pub r_m: f64,
    pub gamma_f: f64,
    pub gamma_m: f64,
}

impl NamedArchitecture {
    pub fn build(&self) -> Result<Architecture, sfs_core::SfsError> {
        Architecture::new(self.r_m, self.gamma_f, self.gamma_m)
    }
}

/// Workspace discretisation in degrees, as exposed at the CLI boundary.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WorkspaceConfig {
    pub phi_min_deg: f64,
    pub phi_max_deg: f64,
    pub delta_phi_deg: f64,
    pub per_shell_target: usize,
}

impl WorkspaceConfig {
    pub fn to_spec(&self) -> WorkspaceSpec {
        let rad = |d: f64| d.to_radians();
        WorkspaceSpec {
            phi_min: rad(self.phi_min_deg),
            phi_max: rad(self.phi_max_deg),
            delta_phi: rad(self.delta_phi_deg),
            per_shell_target: self.per_shell_target,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    pub imag_tol: f64,
    pub residual_tol: f64,
    pub oracle: OracleConfig,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OracleConfig {
    pub half_width: f64,
    pub resolution: f64,
    pub max_expansions: usize,
}

impl SolverConfig {
    pub fn to_params(&self) -> SolverParams {
        SolverParams {
            imag_tol: self.imag_tol,
            residual_tol: self.residual_tol,
            oracle: OracleGrid {
                half_width: self.oracle.half_width,
                resolution: self.oracle.resolution,
                max_expansions: self.oracle.max_expansions,
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutputConfig {
    pub directory: String,
    pub dump_samples: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub architectures: Vec<NamedArchitecture>,
    pub workspace: WorkspaceConfig,
    pub z0: f64,
    pub solver: SolverConfig,
    pub output: OutputConfig,
}

/// Bundled default configuration (also shipped as `default.cfg`).
pub const DEFAULT_CONFIG: &str = include_str!("../default.cfg");

impl RunConfig {
    pub fn bundled() -> Self {
        serde_json::from_str(DEFAULT_CONFIG).expect("bundled config must parse")
    }

    pub fn validate(&self) -> Result<(), String> {
        if self.architectures.is_empty() {
            return Err("config must list at least one architecture".into());
        }
        for a in &self.architectures {
            a.build().map_err(|e| format!("architecture {}: {e}", a.name))?;
        }
        self.workspace.to_spec().validate().map_err(|e| e.to_string())?;
        if !(self.z0 > 0.0) {
            return Err(format!("z0 must be positive, got {}", self.z0));
        }
        let s = &self.solver;
        if !(s.imag_tol > 0.0 && s.residual_tol > 0.0) {
            return Err("solver tolerances must be positive".into());
        }
        s.to_params().oracle.validate().map_err(|e| e.to_string())?;
        Ok(())
    }

    pub fn find_arch(&self, name: &str) -> Option<&NamedArchitecture> {
        self.architectures.iter().find(|a| a.name == name)
    }
}
