//! Largest singularity-free sphere for a fixed orientation.
//!
//! The radius is the global minimum distance from the centre `p0` to the
//! cubic surface `g = 0`. The first-order system `p - p0 = lambda grad g`,
//! `g(p) = 0` is reduced by eliminating `(x, y)` (linear in them for fixed
//! `lambda, z`) to two bivariate polynomials in `(lambda, z)`, whose common
//! roots are found through a Sylvester matrix polynomial in `z` and a
//! companion-pencil eigenproblem. Every candidate is Newton-polished and
//! certified; a brute-force grid oracle arbitrates whenever the analytic
//! pass comes back empty.

use nalgebra::{Matrix4, Vector3, Vector4};
use serde::{Deserialize, Serialize};

use crate::error::{Result, SfsError};
use crate::geometry::Architecture;
use crate::poly::{cubic_real_roots, eval_poly, sylvester_matrix_poly, matrix_poly_roots, univariate_roots, BivPoly};
use crate::surface::{extract_cubic, CubicSurface};

/// Outcome classification of an SFS computation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SfsStatus {
    /// Positive radius, tangency certified.
    Safe,
    /// The centre lies on the singularity surface; radius 0.
    CenterOnSurface,
    /// No real contact point found by solver or oracle.
    NoRealContact,
}

/// Result of [`sfs_radius`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SfsResult {
    pub center: [f64; 3],
    pub radius: f64,
    pub tangent_point: Option<[f64; 3]>,
    pub orientation: [f64; 3],
    pub status: SfsStatus,
    /// Gradient norm below threshold at the tangent point: the surface is
    /// singular there and the parallelism certificate does not apply.
    pub degenerate_gradient: bool,
}

/// Brute-force verification grid around the sphere centre.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OracleGrid {
    pub half_width: f64,
    pub resolution: f64,
    pub max_expansions: usize,
}

impl Default for OracleGrid {
    fn default() -> Self {
        Self { half_width: 4.0, resolution: 0.01, max_expansions: 4 }
    }
}

impl OracleGrid {
    pub fn validate(&self) -> Result<()> {
        if !(self.resolution > 0.0) {
            return Err(SfsError::Domain("oracle resolution must be positive".into()));
        }
        if self.half_width < self.resolution {
            return Err(SfsError::Domain("oracle half_width must be >= resolution".into()));
        }
        Ok(())
    }
}

/// Tolerances of the analytic closest-point solver.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverParams {
    /// Relative imaginary-part threshold accepting an eigenvalue as real.
    pub imag_tol: f64,
    /// Relative residual threshold for `|g|` at accepted candidates.
    pub residual_tol: f64,
    pub oracle: OracleGrid,
}

impl Default for SolverParams {
    fn default() -> Self {
        Self { imag_tol: 1e-6, residual_tol: 1e-8, oracle: OracleGrid::default() }
    }
}

/// A certified contact-point candidate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClosestPoint {
    pub point: Vector3<f64>,
    pub distance: f64,
    pub degenerate_gradient: bool,
}

/// Linear-system coefficients of g in (x, y) at fixed z:
/// `g_x = A x + B y + C`, `g_y = B x + D y + E`.
fn xy_coeffs(a: &[f64; 16], z: f64) -> (f64, f64, f64, f64, f64) {
    (
        2.0 * a[0] * z + 2.0 * a[1],
        a[2] * z + a[3],
        a[4] * z * z + a[5] * z + a[6],
        2.0 * a[7] * z + 2.0 * a[8],
        a[9] * z * z + a[10] * z + a[11],
    )
}

/// Build the two eliminated bivariate polynomials `P(lambda, z)` and
/// `Q(lambda, z)` whose common real roots carry all regular critical points
/// of the distance.
fn build_pq(a: &[f64; 16], p0: &Vector3<f64>) -> (BivPoly, BivPoly) {
    let (x0, y0, z0) = (p0.x, p0.y, p0.z);
    let zp = |c: &[f64]| BivPoly::in_z(c);
    let big_a = zp(&[2.0 * a[1], 2.0 * a[0]]);
    let big_b = zp(&[a[3], a[2]]);
    let big_c = zp(&[a[6], a[5], a[4]]);
    let big_d = zp(&[2.0 * a[8], 2.0 * a[7]]);
    let big_e = zp(&[a[11], a[10], a[9]]);
    let one = BivPoly::constant(1.0);

    let one_m_la = one.sub(&big_a.mul_lam());
    let one_m_ld = one.sub(&big_d.mul_lam());
    let lam_b = big_b.mul_lam();
    let delta = one_m_la.mul(&one_m_ld).sub(&lam_b.mul(&lam_b));
    let x0_lc = zp(&[x0]).add(&big_c.mul_lam());
    let y0_le = zp(&[y0]).add(&big_e.mul_lam());
    let nx = x0_lc.mul(&one_m_ld).add(&lam_b.mul(&y0_le));
    let ny = y0_le.mul(&one_m_la).add(&lam_b.mul(&x0_lc));

    let nx2 = nx.mul(&nx);
    let ny2 = ny.mul(&ny);
    let nxny = nx.mul(&ny);
    let nxd = nx.mul(&delta);
    let nyd = ny.mul(&delta);
    let d2 = delta.mul(&delta);

    // P = Delta^2 g(Nx/Delta, Ny/Delta, z)
    let p = zp(&[a[1], a[0]])
        .mul(&nx2)
        .add(&zp(&[a[3], a[2]]).mul(&nxny))
        .add(&big_c.mul(&nxd))
        .add(&zp(&[a[8], a[7]]).mul(&ny2))
        .add(&big_e.mul(&nyd))
        .add(&zp(&[a[15], a[14], a[13], a[12]]).mul(&d2));

    // Delta^2 g_z(Nx/Delta, Ny/Delta, z)
    let gz = nx2
        .scale(a[0])
        .add(&nxny.scale(a[2]))
        .add(&zp(&[a[5], 2.0 * a[4]]).mul(&nxd))
        .add(&ny2.scale(a[7]))
        .add(&zp(&[a[10], 2.0 * a[9]]).mul(&nyd))
        .add(&zp(&[a[14], 2.0 * a[13], 3.0 * a[12]]).mul(&d2));

    // Q = (z - z0) Delta^2 - lambda Delta^2 g_z
    let q = zp(&[-z0, 1.0]).mul(&d2).sub(&gz.mul_lam());
    (p, q)
}

fn newton_polish(
    surface_n: &CubicSurface,
    p0: &Vector3<f64>,
    mut p: Vector3<f64>,
    mut lam: f64,
) -> (Vector3<f64>, f64) {
    for _ in 0..40 {
        let g = surface_n.evaluate(&p);
        let gr = surface_n.gradient(&p);
        let f = Vector4::new(
            p.x - p0.x - lam * gr.x,
            p.y - p0.y - lam * gr.y,
            p.z - p0.z - lam * gr.z,
            g,
        );
        let hess = surface_n.hessian(&p);
        let mut j = Matrix4::zeros();
        j.view_mut((0, 0), (3, 3))
            .copy_from(&(nalgebra::Matrix3::identity() - lam * hess));
        j[(0, 3)] = -gr.x;
        j[(1, 3)] = -gr.y;
        j[(2, 3)] = -gr.z;
        j[(3, 0)] = gr.x;
        j[(3, 1)] = gr.y;
        j[(3, 2)] = gr.z;
        let step = match j.lu().solve(&f) {
            Some(s) => s,
            None => break,
        };
        p -= Vector3::new(step.x, step.y, step.z);
        lam -= step.w;
        if step.norm() < 1e-13 * (1.0 + p.norm()) {
            break;
        }
    }
    (p, lam)
}

struct CandidateSet<'a> {
    surface_n: &'a CubicSurface,
    p0: Vector3<f64>,
    residual_tol: f64,
    accepted: Vec<ClosestPoint>,
}

impl CandidateSet<'_> {
    /// Polish a raw candidate, then keep it only if it lies on the surface
    /// and the contact direction is parallel to the gradient. Gradient
    /// degeneracy (surface singular point) skips the parallelism check.
    fn consider(&mut self, raw: Vector3<f64>, lam: f64) {
        let (p, _) = newton_polish(self.surface_n, &self.p0, raw, lam);
        self.consider_polished(p);
    }

    fn consider_polished(&mut self, p: Vector3<f64>) {
        if !p.iter().all(|v| v.is_finite()) {
            return;
        }
        let g = self.surface_n.evaluate(&p);
        if g.abs() > self.residual_tol * p.norm().max(1.0).powi(3) {
            return;
        }
        let gr = self.surface_n.gradient(&p);
        let d = p - self.p0;
        let dn = d.norm();
        let gn = gr.norm();
        let degenerate = gn <= 1e-8;
        if !degenerate && d.cross(&gr).norm() > 1e-6 * dn * gn {
            return;
        }
        for c in &self.accepted {
            if (c.point - p).norm() < 1e-7 * (1.0 + p.norm()) {
                return;
            }
        }
        self.accepted.push(ClosestPoint { point: p, distance: dn, degenerate_gradient: degenerate });
    }
}

fn near_real(re: f64, im: f64, tol: f64) -> bool {
    im.abs() <= tol * (1.0 + re.abs())
}

/// All real critical points of the distance from `p0` to the surface,
/// sorted by distance. Completeness is what makes the minimum global; an
/// empty return here must be arbitrated by the oracle (see
/// [`closest_point`]).
fn critical_points(
    surface: &CubicSurface,
    p0: &Vector3<f64>,
    params: &SolverParams,
) -> Result<Vec<ClosestPoint>> {
    let scale = surface.max_abs_coeff();
    let mut an = *surface.coeffs();
    for c in &mut an {
        *c /= scale;
    }
    let surface_n = CubicSurface::from_coeffs(an)?;

    // Eliminate from a deterministically perturbed centre: if p0 sits
    // exactly on a symmetry axis of the surface, P and Q pick up a common
    // factor and the resultant degenerates. Candidates are polished against
    // the exact centre afterwards, so generic instances are unaffected.
    let eps = 1e-6 * (1.0 + p0.norm());
    let p0e = p0 + eps * Vector3::new(0.636894, -0.421422, 0.271927);
    // perturbation complexifies near-degenerate root pairs by O(sqrt(eps));
    // accept them and let the polish-plus-residual filters decide
    let imag_floor = eps.sqrt();

    let (p, q) = build_pq(&an, &p0e);
    let tol = 1e-13 * p.max_abs().max(q.max_abs());
    let p = p.trim_lam(tol);
    let q = q.trim_lam(tol);

    let mut set = CandidateSet {
        surface_n: &surface_n,
        p0: *p0,
        residual_tol: params.residual_tol,
        accepted: Vec::new(),
    };

    let back_substitute =
        |set: &mut CandidateSet, z: f64, lam: f64| {
            let (ca, cb, cc, cd, ce) = xy_coeffs(&an, z);
            let delta = (1.0 - lam * ca) * (1.0 - lam * cd) - lam * lam * cb * cb;
            if delta.abs() < 1e-12 {
                return;
            }
            let nx = (p0e.x + lam * cc) * (1.0 - lam * cd) + lam * cb * (p0e.y + lam * ce);
            let ny = (p0e.y + lam * ce) * (1.0 - lam * ca) + lam * cb * (p0e.x + lam * cc);
            set.consider(Vector3::new(nx / delta, ny / delta, z), lam);
        };

    let lam_roots_at = |poly: &BivPoly, z: f64| -> Result<Vec<f64>> {
        let coeffs = poly.lam_poly_at(z);
        Ok(univariate_roots(&coeffs)?
            .into_iter()
            .filter(|l| l.im.abs() <= (1e-6 * (1.0 + l.re.abs())).max(imag_floor))
            .map(|l| l.re)
            .collect())
    };

    if p.lam_degree() >= 1 && q.lam_degree() >= 1 {
        let mats = sylvester_matrix_poly(&p, &q);
        let zs = matrix_poly_roots(&mats, p0.z)?;
        for zc in zs {
            if !(zc.re.is_finite() && zc.im.is_finite()) {
                continue;
            }
            if zc.im.abs() > (params.imag_tol * (1.0 + zc.re.abs())).max(imag_floor) {
                continue;
            }
            let z = zc.re;
            for lam in lam_roots_at(&p, z)?.into_iter().chain(lam_roots_at(&q, z)?) {
                back_substitute(&mut set, z, lam);
            }
        }
    } else {
        // one polynomial is lambda-free (degenerate surfaces such as
        // planes): its z-roots pair with lambda roots of the other
        for (this, other) in [(&p, &q), (&q, &p)] {
            if this.lam_degree() != 0 {
                continue;
            }
            for zc in univariate_roots(this.lam_coeff(0))? {
                if !near_real(zc.re, zc.im, 1e-6) {
                    continue;
                }
                for lam in lam_roots_at(other, zc.re)? {
                    back_substitute(&mut set, zc.re, lam);
                }
            }
        }
    }

    // surface singular points (grad g = 0 on g = 0) satisfy no finite-lambda
    // first-order system; add them from g_x = g_y = 0 as rationals in z
    singular_point_candidates(&an, &mut set)?;

    let mut out = set.accepted;
    out.sort_by(|a, b| a.distance.total_cmp(&b.distance));
    Ok(out)
}

/// Candidates with `grad g = 0`: solve the linear system `g_x = g_y = 0` for
/// `(x, y)` as rationals in `z`, clear denominators from `g_z = 0`, and keep
/// the real roots that also satisfy `g = 0`.
fn singular_point_candidates(an: &[f64; 16], set: &mut CandidateSet) -> Result<()> {
    let zp = |c: &[f64]| BivPoly::in_z(c);
    let big_a = zp(&[2.0 * an[1], 2.0 * an[0]]);
    let big_b = zp(&[an[3], an[2]]);
    let big_c = zp(&[an[6], an[5], an[4]]);
    let big_d = zp(&[2.0 * an[8], 2.0 * an[7]]);
    let big_e = zp(&[an[11], an[10], an[9]]);
    let det = big_a.mul(&big_d).sub(&big_b.mul(&big_b));
    let nx = big_b.mul(&big_e).sub(&big_c.mul(&big_d));
    let ny = big_b.mul(&big_c).sub(&big_a.mul(&big_e));
    // det^2 g_z(nx/det, ny/det, z)
    let gz = nx
        .mul(&nx)
        .scale(an[0])
        .add(&nx.mul(&ny).scale(an[2]))
        .add(&zp(&[an[5], 2.0 * an[4]]).mul(&nx).mul(&det))
        .add(&ny.mul(&ny).scale(an[7]))
        .add(&zp(&[an[10], 2.0 * an[9]]).mul(&ny).mul(&det))
        .add(&zp(&[an[14], 2.0 * an[13], 3.0 * an[12]]).mul(&det).mul(&det));
    for zc in univariate_roots(gz.lam_coeff(0))? {
        if !near_real(zc.re, zc.im, 1e-6) {
            continue;
        }
        let z = zc.re;
        let dv = eval_poly(det.lam_coeff(0), z);
        if dv.abs() < 1e-10 {
            continue;
        }
        let x = eval_poly(nx.lam_coeff(0), z) / dv;
        let y = eval_poly(ny.lam_coeff(0), z) / dv;
        set.consider_polished(Vector3::new(x, y, z));
    }
    Ok(())
}

/// Global closest point on the surface from `p0`. An empty analytic
/// candidate set is arbitrated by the oracle: if the oracle finds a surface
/// point the solver is incomplete (hard error); if the oracle also finds
/// nothing the search is inconclusive.
pub fn closest_point(
    surface: &CubicSurface,
    p0: &Vector3<f64>,
    params: &SolverParams,
) -> Result<ClosestPoint> {
    let cands = critical_points(surface, p0, params)?;
    match cands.first() {
        Some(best) => Ok(*best),
        None => match oracle_distance(surface, p0, &params.oracle) {
            Ok(o) => Err(SfsError::SolverIncomplete { solver: None, oracle: o.distance }),
            Err(e) => Err(e),
        },
    }
}

/// Full SFS computation: extract the surface, check the centre, find the
/// contact point.
pub fn sfs_radius(
    arch: &Architecture,
    c: &Vector3<f64>,
    p0: &Vector3<f64>,
    params: &SolverParams,
) -> Result<SfsResult> {
    let surface = extract_cubic(arch, c)?;
    sfs_radius_on_surface(&surface, c, p0, params)
}

/// SFS computation on an already-extracted surface.
pub fn sfs_radius_on_surface(
    surface: &CubicSurface,
    c: &Vector3<f64>,
    p0: &Vector3<f64>,
    params: &SolverParams,
) -> Result<SfsResult> {
    let g0 = surface.evaluate(p0);
    if g0.abs() <= params.residual_tol * surface.max_abs_coeff() * p0.norm().max(1.0).powi(3) {
        return Ok(SfsResult {
            center: [p0.x, p0.y, p0.z],
            radius: 0.0,
            tangent_point: Some([p0.x, p0.y, p0.z]),
            orientation: [c.x, c.y, c.z],
            status: SfsStatus::CenterOnSurface,
            degenerate_gradient: false,
        });
    }
    match closest_point(surface, p0, params) {
        Ok(best) => Ok(SfsResult {
            center: [p0.x, p0.y, p0.z],
            radius: best.distance,
            tangent_point: Some([best.point.x, best.point.y, best.point.z]),
            orientation: [c.x, c.y, c.z],
            status: SfsStatus::Safe,
            degenerate_gradient: best.degenerate_gradient,
        }),
        Err(SfsError::OracleInconclusive(_)) => Ok(SfsResult {
            center: [p0.x, p0.y, p0.z],
            radius: f64::INFINITY,
            tangent_point: None,
            orientation: [c.x, c.y, c.z],
            status: SfsStatus::NoRealContact,
            degenerate_gradient: false,
        }),
        Err(e) => Err(e),
    }
}

/// Nearest surface point found by the grid oracle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleOutcome {
    pub distance: f64,
    pub point: Vector3<f64>,
}

/// Brute-force minimum distance: scan an (x, y) grid around the centre,
/// solve the exact cubic in z at each node, track the nearest root point.
/// The box doubles (up to `max_expansions`) until the minimiser is interior
/// by at least one grid step.
pub fn oracle_distance(
    surface: &CubicSurface,
    p0: &Vector3<f64>,
    grid: &OracleGrid,
) -> Result<OracleOutcome> {
    grid.validate()?;
    let mut hw = grid.half_width;
    for expansion in 0..=grid.max_expansions {
        let mut best: Option<OracleOutcome> = None;
        let steps = (2.0 * hw / grid.resolution).round() as i64;
        for ix in 0..=steps {
            let x = p0.x - hw + ix as f64 * grid.resolution;
            for iy in 0..=steps {
                let y = p0.y - hw + iy as f64 * grid.resolution;
                let [c3, c2, c1, c0] = surface.z_cubic(x, y);
                let (roots, n) = cubic_real_roots(c3, c2, c1, c0);
                for &z in &roots[..n] {
                    let d = (Vector3::new(x, y, z) - p0).norm();
                    if best.map_or(true, |b| d < b.distance) {
                        best = Some(OracleOutcome { distance: d, point: Vector3::new(x, y, z) });
                    }
                }
            }
        }
        if let Some(b) = best {
            let interior = (b.point.x - p0.x).abs() <= hw - grid.resolution
                && (b.point.y - p0.y).abs() <= hw - grid.resolution;
            if interior {
                return Ok(b);
            }
            if expansion == grid.max_expansions {
                // boundary minimiser after the last allowed expansion: still
                // a valid upper bound on the distance
                return Ok(b);
            }
        } else if expansion == grid.max_expansions {
            return Err(SfsError::OracleInconclusive(grid.max_expansions));
        }
        hw *= 2.0;
    }
    Err(SfsError::OracleInconclusive(grid.max_expansions))
}
