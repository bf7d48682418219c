use thiserror::Error;

/// Errors produced by geometry validation, surface extraction and the
/// sphere solvers.
#[derive(Debug, Clone, Error)]
pub enum SfsError {
    #[error("parameter out of range: {0}")]
    Domain(String),

    /// gamma_f == gamma_m (up to tolerance) makes the manipulator singular
    /// at every pose.
    #[error("architecture singular: |sin(gamma_f - gamma_m)| = {0:.3e}")]
    ArchitectureSingular(f64),

    /// A leg length collapsed below tolerance; the spherical joint centres
    /// coincide and the pose is degenerate.
    #[error("degenerate leg {index}: length {length:.3e}")]
    DegenerateLeg { index: usize, length: f64 },

    #[error("coefficient extraction system ill-conditioned (estimate {0:.3e})")]
    IllConditioned(f64),

    /// The sphere centre lies on the singularity surface; the radius is zero.
    #[error("centre lies on the singularity surface")]
    CenterOnSurface,

    /// The eigen-solver failed to converge after all shift retries.
    #[error("eigenvalue iteration failed to converge")]
    EigenFailure,

    /// The analytic solver found no contact point but the grid oracle did.
    /// This is a hard error: a silently missing contact could inflate the
    /// reported singularity-free radius.
    #[error("solver incomplete: analytic pass found {solver:?}, oracle found {oracle:.6}")]
    SolverIncomplete { solver: Option<f64>, oracle: f64 },

    /// The grid oracle exhausted its expansions without locating any
    /// surface point.
    #[error("oracle inconclusive after {0} expansions")]
    OracleInconclusive(usize),

    #[error("sweep failed on {count} samples; first at index {first_index}: {first_error}")]
    SweepFailed {
        count: usize,
        first_index: usize,
        first_error: String,
    },
}

pub type Result<T> = std::result::Result<T, SfsError>;
