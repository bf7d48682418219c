//! Workspace sweep: per-sample SFS radii over a discretised orientation
//! workspace, reduced to the workspace radius `r2 = min_j r_j` with
//! per-shell and cumulative-minimum curves.
//!
//! The map over samples is embarrassingly parallel; the reduction is a
//! sequential pass over the ordered per-sample radii, so results are
//! bitwise-identical for any worker count.

use std::time::Instant;

use nalgebra::Vector3;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Result, SfsError};
use crate::geometry::Architecture;
use crate::sampling::SampleSet;
use crate::solver::{sfs_radius, SfsStatus, SolverParams};

/// The sample attaining the workspace minimum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ArgminSample {
    pub index: usize,
    pub phi: f64,
    pub direction: [f64; 3],
    pub c: [f64; 3],
}

/// Output of [`sweep`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub r2: f64,
    pub argmin: ArgminSample,
    /// `(phi, min radius within the shell)` per shell, ascending phi.
    pub per_shell_min: Vec<(f64, f64)>,
    /// `(phi, min radius over shells <= phi)`, nonincreasing by construction.
    pub cumulative_min: Vec<(f64, f64)>,
    pub n_samples: usize,
    /// Pure compute time of the per-sample map, seconds.
    pub compute_time_s: f64,
    /// Total wall time including reduction, seconds.
    pub wall_time_s: f64,
    /// Samples whose tangent point sat on a singular point of the surface.
    pub degenerate_count: usize,
    /// Per-sample radii in shell-major sample order (omitted from
    /// serialized summaries).
    #[serde(skip)]
    pub radii: Vec<f64>,
}

impl SweepResult {
    /// The deterministic numeric payload, for bitwise comparison across
    /// worker counts (timings excluded).
    pub fn numeric_view(&self) -> (f64, ArgminSample, &[(f64, f64)], &[(f64, f64)], usize) {
        (
            self.r2,
            self.argmin,
            &self.per_shell_min,
            &self.cumulative_min,
            self.n_samples,
        )
    }
}

/// Sweep all samples with centre `p0 = [0, 0, z0]`. `threads == 0` uses the
/// global rayon pool. Any solver failure aborts the sweep: a skipped sample
/// could hide the true minimum.
pub fn sweep(
    arch: &Architecture,
    samples: &SampleSet,
    z0: f64,
    params: &SolverParams,
    threads: usize,
) -> Result<SweepResult> {
    if !(z0 > 0.0) {
        return Err(SfsError::Domain(format!("z0 must be positive, got {z0}")));
    }
    let flat: Vec<(usize, f64, Vector3<f64>, Vector3<f64>)> = samples.iter_samples().collect();
    if flat.is_empty() {
        return Err(SfsError::Domain("empty sample set".into()));
    }
    let start = Instant::now();
    let p0 = Vector3::new(0.0, 0.0, z0);
    let compute = || {
        flat.par_iter()
            .with_min_len(8)
            .map(|(_, _, _, c)| sfs_radius(arch, c, &p0, params))
            .collect::<Vec<_>>()
    };
    let results = if threads == 0 {
        compute()
    } else {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .map_err(|e| SfsError::Domain(format!("thread pool: {e}")))?
            .install(compute)
    };
    let compute_time_s = start.elapsed().as_secs_f64();

    let mut failures = Vec::new();
    let mut radii = Vec::with_capacity(results.len());
    let mut degenerate_count = 0usize;
    for (idx, res) in results.into_iter().enumerate() {
        match res {
            Ok(r) => {
                if r.status == SfsStatus::NoRealContact {
                    failures.push((idx, "no real contact point".to_string()));
                    radii.push(f64::INFINITY);
                } else {
                    if r.degenerate_gradient {
                        degenerate_count += 1;
                    }
                    radii.push(r.radius);
                }
            }
            Err(e) => {
                failures.push((idx, e.to_string()));
                radii.push(f64::INFINITY);
            }
        }
    }
    if let Some((first_index, first_error)) = failures.first().cloned() {
        return Err(SfsError::SweepFailed { count: failures.len(), first_index, first_error });
    }

    let mut per_shell_min = Vec::with_capacity(samples.shells.len());
    let mut cumulative_min = Vec::with_capacity(samples.shells.len());
    let mut best = f64::INFINITY;
    let mut best_index = 0usize;
    let mut running = f64::INFINITY;
    let mut offset = 0usize;
    for shell in &samples.shells {
        let n = shell.directions.len();
        let mut shell_min = f64::INFINITY;
        for (j, &r) in radii[offset..offset + n].iter().enumerate() {
            if r < shell_min {
                shell_min = r;
            }
            if r < best {
                best = r;
                best_index = offset + j;
            }
        }
        running = running.min(shell_min);
        per_shell_min.push((shell.phi, shell_min));
        cumulative_min.push((shell.phi, running));
        offset += n;
    }

    let (_, phi, k, c) = flat[best_index];
    Ok(SweepResult {
        r2: best,
        argmin: ArgminSample {
            index: best_index,
            phi,
            direction: [k.x, k.y, k.z],
            c: [c.x, c.y, c.z],
        },
        per_shell_min,
        cumulative_min,
        n_samples: flat.len(),
        compute_time_s,
        wall_time_s: start.elapsed().as_secs_f64(),
        degenerate_count,
        radii,
    })
}

/// Sweep several architectures over the same sample set; one result per
/// architecture in input order.
pub fn compare(
    archs: &[Architecture],
    samples: &SampleSet,
    z0: f64,
    params: &SolverParams,
    threads: usize,
) -> Result<Vec<SweepResult>> {
    if archs.is_empty() {
        return Err(SfsError::Domain("empty architecture list".into()));
    }
    archs
        .iter()
        .map(|arch| sweep(arch, samples, z0, params, threads))
        .collect()
}

/// Indices into `results` sorted by descending r2 (best first).
pub fn ranking(results: &[SweepResult]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..results.len()).collect();
    idx.sort_by(|&a, &b| results[b].r2.total_cmp(&results[a].r2).then(a.cmp(&b)));
    idx
}
