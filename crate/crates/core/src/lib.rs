//! Largest singularity-free sphere (SFS) of semi-regular Stewart-Gough
//! platform manipulators.
//!
//! For a fixed orientation the gain-singularity locus is a cubic surface in
//! the platform position; the SFS radius is the distance from the neutral
//! position to that surface, computed analytically through polynomial
//! elimination. Sweeping the radius over a discretised orientation
//! workspace and taking the minimum gives the workspace-level radius `r2`
//! used to compare architectures.

pub mod error;
pub mod geometry;
pub mod poly;
pub mod sampling;
pub mod solver;
pub mod surface;
pub mod sweep;

pub use error::{Result, SfsError};
pub use geometry::{
    leg_lengths, platform_vertices, rodrigues_from_axis_angle, rotation_from_rodrigues,
    Architecture, PlatformVertices, Pose,
};
pub use sampling::{regular_sphere_points, sample_workspace, SampleSet, Shell, WorkspaceSpec};
pub use solver::{
    closest_point, oracle_distance, sfs_radius, sfs_radius_on_surface, ClosestPoint, OracleGrid,
    OracleOutcome, SfsResult, SfsStatus, SolverParams,
};
pub use surface::{
    extract_cubic, scaled_g_value, wrench_determinant, wrench_matrix, CubicSurface,
    NeutralAxisCubic, MONOMIALS,
};
pub use sweep::{compare, ranking, sweep, ArgminSample, SweepResult};
