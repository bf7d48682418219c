//! Wrench transmission matrix and the cubic singularity surface.
//!
//! For a fixed orientation, `det(H) = 0` reduces (after clearing the leg
//! lengths and a constant factor) to a cubic polynomial `g(x, y, z) = 0` in
//! the platform position. The 16 coefficients are recovered exactly by a
//! linear solve over the monomial basis at fixed low-discrepancy sample
//! points.

use nalgebra::{Matrix6, SMatrix, SVector, Vector3, Vector6};
use once_cell::sync::Lazy;
use serde::{Deserialize, Serialize};

use crate::error::{Result, SfsError};
use crate::geometry::{
    leg_lengths, platform_vertices, rotation_from_rodrigues, Architecture, Pose, EPS_ARCH,
};

/// Monomial exponents `(i, j, k)` for `x^i y^j z^k`, in coefficient-index
/// order 0..15.
pub const MONOMIALS: [(u32, u32, u32); 16] = [
    (2, 0, 1),
    (2, 0, 0),
    (1, 1, 1),
    (1, 1, 0),
    (1, 0, 2),
    (1, 0, 1),
    (1, 0, 0),
    (0, 2, 1),
    (0, 2, 0),
    (0, 1, 2),
    (0, 1, 1),
    (0, 1, 0),
    (0, 0, 3),
    (0, 0, 2),
    (0, 0, 1),
    (0, 0, 0),
];

/// Wrench transmission matrix: column i is
/// `(1/l_i) [p + R t_i - b_i ; (R t_i) x (p - b_i)]`.
pub fn wrench_matrix(arch: &Architecture, pose: &Pose) -> Result<Matrix6<f64>> {
    let verts = platform_vertices(arch);
    let rot = rotation_from_rodrigues(&pose.rodrigues);
    let lengths = leg_lengths(arch, pose)?;
    let mut h = Matrix6::zeros();
    for i in 0..6 {
        let rt = rot * verts.moving[i];
        let leg = pose.position + rt - verts.fixed[i];
        let moment = rt.cross(&(pose.position - verts.fixed[i]));
        let col = Vector6::new(leg.x, leg.y, leg.z, moment.x, moment.y, moment.z) / lengths[i];
        h.set_column(i, &col);
    }
    Ok(h)
}

/// Determinant of the wrench matrix; zero iff the pose is gain-singular.
pub fn wrench_determinant(arch: &Architecture, pose: &Pose) -> Result<f64> {
    Ok(wrench_matrix(arch, pose)?.determinant())
}

/// Value of the scaled determinant polynomial
/// `g(p) = det(H) l_1..l_6 / ((3 r_m c0)^3 sin(gamma_f - gamma_m))`,
/// with `c0 = 1 + c.c`. A cubic polynomial in `p` for fixed `c`.
pub fn scaled_g_value(arch: &Architecture, c: &Vector3<f64>, p: &Vector3<f64>) -> Result<f64> {
    let sin_gamma = arch.sin_gamma();
    if sin_gamma.abs() <= EPS_ARCH {
        return Err(SfsError::ArchitectureSingular(sin_gamma.abs()));
    }
    let pose = Pose::new(*p, *c)?;
    let lengths = leg_lengths(arch, &pose)?;
    let det = wrench_matrix(arch, &pose)?.determinant();
    let c0 = 1.0 + c.dot(c);
    let scale = (3.0 * arch.r_m() * c0).powi(3) * sin_gamma;
    Ok(det * lengths.iter().product::<f64>() / scale)
}

/// Cubic singularity surface for one orientation: the 16 coefficients of g
/// in [`MONOMIALS`] order, with optional generating parameters kept for
/// provenance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CubicSurface {
    coeffs: [f64; 16],
    origin: Option<(Architecture, [f64; 3])>,
}

/// Restriction of g to the Z-axis: `g(0,0,z) = a12 z^3 + a13 z^2 + a14 z + a15`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NeutralAxisCubic(pub [f64; 4]);

impl CubicSurface {
    /// Surface from raw coefficients (no generating parameters).
    pub fn from_coeffs(coeffs: [f64; 16]) -> Result<Self> {
        if coeffs.iter().all(|&c| c == 0.0) {
            return Err(SfsError::Domain("all-zero coefficient vector".into()));
        }
        if !coeffs.iter().all(|c| c.is_finite()) {
            return Err(SfsError::Domain("coefficients must be finite".into()));
        }
        Ok(Self { coeffs, origin: None })
    }

    pub fn coeffs(&self) -> &[f64; 16] {
        &self.coeffs
    }

    /// Generating architecture and Rodrigues vector, when extracted.
    pub fn origin(&self) -> Option<(&Architecture, Vector3<f64>)> {
        self.origin
            .as_ref()
            .map(|(arch, c)| (arch, Vector3::new(c[0], c[1], c[2])))
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.coeffs.iter().fold(0.0f64, |m, c| m.max(c.abs()))
    }

    pub fn evaluate(&self, p: &Vector3<f64>) -> f64 {
        let a = &self.coeffs;
        let (x, y, z) = (p.x, p.y, p.z);
        (a[0] * z + a[1]) * x * x
            + (a[2] * z + a[3]) * x * y
            + (a[4] * z * z + a[5] * z + a[6]) * x
            + (a[7] * z + a[8]) * y * y
            + (a[9] * z * z + a[10] * z + a[11]) * y
            + ((a[12] * z + a[13]) * z + a[14]) * z
            + a[15]
    }

    pub fn gradient(&self, p: &Vector3<f64>) -> Vector3<f64> {
        let a = &self.coeffs;
        let (x, y, z) = (p.x, p.y, p.z);
        let gx = 2.0 * (a[0] * z + a[1]) * x + (a[2] * z + a[3]) * y + a[4] * z * z + a[5] * z + a[6];
        let gy = (a[2] * z + a[3]) * x + 2.0 * (a[7] * z + a[8]) * y + a[9] * z * z + a[10] * z + a[11];
        let gz = a[0] * x * x
            + a[2] * x * y
            + (2.0 * a[4] * z + a[5]) * x
            + a[7] * y * y
            + (2.0 * a[9] * z + a[10]) * y
            + (3.0 * a[12] * z + 2.0 * a[13]) * z
            + a[14];
        Vector3::new(gx, gy, gz)
    }

    /// Hessian of g (symmetric; g is cubic so entries are linear in p).
    pub fn hessian(&self, p: &Vector3<f64>) -> nalgebra::Matrix3<f64> {
        let a = &self.coeffs;
        let (x, y, z) = (p.x, p.y, p.z);
        let gxx = 2.0 * (a[0] * z + a[1]);
        let gxy = a[2] * z + a[3];
        let gxz = 2.0 * a[0] * x + a[2] * y + 2.0 * a[4] * z + a[5];
        let gyy = 2.0 * (a[7] * z + a[8]);
        let gyz = a[2] * x + 2.0 * a[7] * y + 2.0 * a[9] * z + a[10];
        let gzz = 2.0 * a[4] * x + 2.0 * a[9] * y + 6.0 * a[12] * z + 2.0 * a[13];
        nalgebra::Matrix3::new(gxx, gxy, gxz, gxy, gyy, gyz, gxz, gyz, gzz)
    }

    /// Coefficients `[c3, c2, c1, c0]` of g as a cubic in z at fixed (x, y).
    pub fn z_cubic(&self, x: f64, y: f64) -> [f64; 4] {
        let a = &self.coeffs;
        [
            a[12],
            a[4] * x + a[9] * y + a[13],
            a[0] * x * x + a[2] * x * y + a[5] * x + a[7] * y * y + a[10] * y + a[14],
            a[1] * x * x + a[3] * x * y + a[6] * x + a[8] * y * y + a[11] * y + a[15],
        ]
    }

    pub fn neutral_axis_cubic(&self) -> NeutralAxisCubic {
        NeutralAxisCubic([self.coeffs[12], self.coeffs[13], self.coeffs[14], self.coeffs[15]])
    }

    /// The neutral position `[0,0,z0]` is safe iff `|g(0,0,z0)|` exceeds
    /// `tol * max|a_i| * max(1, z0)^3`.
    pub fn is_neutral_position_safe(&self, z0: f64, tol: f64) -> bool {
        let NeutralAxisCubic([c3, c2, c1, c0]) = self.neutral_axis_cubic();
        let v = ((c3 * z0 + c2) * z0 + c1) * z0 + c0;
        v.abs() > tol * self.max_abs_coeff() * z0.abs().max(1.0).powi(3)
    }
}

/// Radical-inverse (van der Corput) value of index `i` in base `base`.
fn radical_inverse(mut i: u32, base: u32) -> f64 {
    let mut f = 1.0;
    let mut r = 0.0;
    while i > 0 {
        f /= base as f64;
        r += f * (i % base) as f64;
        i /= base;
    }
    r
}

/// 16 Halton sample points (bases 2, 3, 5; indices `offset+1 ..= offset+16`)
/// scaled to the box `[-2, 2]^2 x [0.5, 4.5]`.
fn sample_points(offset: u32) -> [Vector3<f64>; 16] {
    let mut pts = [Vector3::zeros(); 16];
    for (i, pt) in pts.iter_mut().enumerate() {
        let idx = offset + i as u32 + 1;
        *pt = Vector3::new(
            4.0 * radical_inverse(idx, 2) - 2.0,
            4.0 * radical_inverse(idx, 3) - 2.0,
            4.0 * radical_inverse(idx, 5) + 0.5,
        );
    }
    pts
}

struct ExtractionBasis {
    points: [Vector3<f64>; 16],
    inverse: SMatrix<f64, 16, 16>,
    condition: f64,
}

fn build_basis(offset: u32) -> ExtractionBasis {
    let points = sample_points(offset);
    let mut vander = SMatrix::<f64, 16, 16>::zeros();
    for (r, p) in points.iter().enumerate() {
        for (c, &(i, j, k)) in MONOMIALS.iter().enumerate() {
            vander[(r, c)] = p.x.powi(i as i32) * p.y.powi(j as i32) * p.z.powi(k as i32);
        }
    }
    let inverse = vander
        .lu()
        .try_inverse()
        .unwrap_or_else(|| SMatrix::from_element(f64::INFINITY));
    let norm1 = |m: &SMatrix<f64, 16, 16>| {
        (0..16)
            .map(|c| m.column(c).iter().map(|v| v.abs()).sum::<f64>())
            .fold(0.0f64, f64::max)
    };
    let condition = norm1(&vander) * norm1(&inverse);
    ExtractionBasis { points, inverse, condition }
}

static PRIMARY_BASIS: Lazy<ExtractionBasis> = Lazy::new(|| build_basis(0));
static FALLBACK_BASIS: Lazy<ExtractionBasis> = Lazy::new(|| build_basis(16));

const COND_LIMIT: f64 = 1e10;

/// Extract the 16 surface coefficients by solving the 16x16 monomial system
/// at fixed low-discrepancy points. Exact for g (a cubic), up to the
/// conditioning of the fixed system.
pub fn extract_cubic(arch: &Architecture, c: &Vector3<f64>) -> Result<CubicSurface> {
    let basis: &ExtractionBasis = if PRIMARY_BASIS.condition <= COND_LIMIT {
        &PRIMARY_BASIS
    } else if FALLBACK_BASIS.condition <= COND_LIMIT {
        &FALLBACK_BASIS
    } else {
        return Err(SfsError::IllConditioned(
            PRIMARY_BASIS.condition.min(FALLBACK_BASIS.condition),
        ));
    };
    let mut rhs = SVector::<f64, 16>::zeros();
    for (i, p) in basis.points.iter().enumerate() {
        rhs[i] = scaled_g_value(arch, c, p)?;
    }
    let sol = basis.inverse * rhs;
    let mut coeffs = [0.0; 16];
    coeffs.copy_from_slice(sol.as_slice());
    Ok(CubicSurface {
        coeffs,
        origin: Some((*arch, [c.x, c.y, c.z])),
    })
}

/// Extraction on the alternate deterministic point set, for cross-checking.
pub fn extract_cubic_alternate(arch: &Architecture, c: &Vector3<f64>) -> Result<CubicSurface> {
    let basis = &*FALLBACK_BASIS;
    if basis.condition > COND_LIMIT {
        return Err(SfsError::IllConditioned(basis.condition));
    }
    let mut rhs = SVector::<f64, 16>::zeros();
    for (i, p) in basis.points.iter().enumerate() {
        rhs[i] = scaled_g_value(arch, c, p)?;
    }
    let sol = basis.inverse * rhs;
    let mut coeffs = [0.0; 16];
    coeffs.copy_from_slice(sol.as_slice());
    Ok(CubicSurface {
        coeffs,
        origin: Some((*arch, [c.x, c.y, c.z])),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn srspm1() -> Architecture {
        Architecture::new(0.5, 0.5328, 0.7073).unwrap()
    }

    fn reference_c() -> Vector3<f64> {
        Vector3::new(0.0639, 0.1107, 0.2597)
    }

    fn random_pose(rng: &mut ChaCha8Rng) -> Pose {
        Pose::new(
            Vector3::new(
                rng.gen_range(-1.0..1.0),
                rng.gen_range(-1.0..1.0),
                rng.gen_range(1.5..3.5),
            ),
            Vector3::new(
                rng.gen_range(-0.2..0.2),
                rng.gen_range(-0.2..0.2),
                rng.gen_range(-0.2..0.2),
            ),
        )
        .unwrap()
    }

    #[test]
    fn wrench_columns_unit_leg_part() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let arch = srspm1();
        for _ in 0..20 {
            let pose = random_pose(&mut rng);
            let h = wrench_matrix(&arch, &pose).unwrap();
            for i in 0..6 {
                let s = Vector3::new(h[(0, i)], h[(1, i)], h[(2, i)]);
                assert_abs_diff_eq!(s.norm(), 1.0, epsilon = 1e-10);
            }
        }
    }

    #[test]
    fn architecture_singular_determinant_vanishes() {
        let arch = Architecture::new_unchecked(0.5, 0.6, 0.6);
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..10 {
            let pose = random_pose(&mut rng);
            let h = wrench_matrix(&arch, &pose).unwrap();
            let scale: f64 = (0..6).map(|i| h.column(i).norm()).product();
            assert!(h.determinant().abs() < 1e-9 * scale.max(1.0));
        }
    }

    #[test]
    fn wrench_matrix_matches_direct_assembly() {
        let arch = srspm1();
        let pose = Pose::new(Vector3::new(0.0, 0.0, 2.5), Vector3::zeros()).unwrap();
        let h = wrench_matrix(&arch, &pose).unwrap();
        let verts = platform_vertices(&arch);
        for i in 0..6 {
            let rt = verts.moving[i];
            let leg = pose.position + rt - verts.fixed[i];
            let l = leg.norm();
            let m = rt.cross(&(pose.position - verts.fixed[i]));
            for r in 0..3 {
                assert_abs_diff_eq!(h[(r, i)], leg[r] / l, epsilon = 1e-15);
                assert_abs_diff_eq!(h[(r + 3, i)], m[r] / l, epsilon = 1e-15);
            }
        }
        assert!(wrench_determinant(&arch, &pose).unwrap().abs() > 1e-6);
    }

    #[test]
    fn neutral_center_reference_case_nonsingular() {
        let arch = srspm1();
        let pose = Pose::new(Vector3::new(0.0, 0.0, 2.5), reference_c()).unwrap();
        assert!(wrench_determinant(&arch, &pose).unwrap().abs() > 1e-8);
    }

    #[test]
    fn determinant_vanishes_on_extracted_surface() {
        let arch = srspm1();
        let c = reference_c();
        let surf = extract_cubic(&arch, &c).unwrap();
        // surface point from the exact cubic in z at (x, y) = (0.3, -0.2)
        let [c3, c2, c1, c0] = surf.z_cubic(0.3, -0.2);
        let (roots, n) = crate::poly::cubic_real_roots(c3, c2, c1, c0);
        assert!(n > 0);
        let p = Vector3::new(0.3, -0.2, roots[0]);
        assert!(surf.evaluate(&p).abs() < 1e-9 * surf.max_abs_coeff());
        let pose = Pose::new(p, c).unwrap();
        let h = wrench_matrix(&arch, &pose).unwrap();
        let scale: f64 = (0..6).map(|i| h.column(i).norm()).product();
        assert!(h.determinant().abs() < 1e-8 * scale.max(1.0));
    }

    #[test]
    fn scaled_g_zero_orientation_scale_factor() {
        // c = 0: c0 = 1, so g = det(H) l1..l6 / (27 r_m^3 sin gamma)
        let arch = srspm1();
        let p = Vector3::new(0.4, -0.3, 2.2);
        let pose = Pose::new(p, Vector3::zeros()).unwrap();
        let det = wrench_determinant(&arch, &pose).unwrap();
        let prod: f64 = leg_lengths(&arch, &pose).unwrap().iter().product();
        let expect = det * prod / (27.0 * 0.5f64.powi(3) * arch.sin_gamma());
        assert_abs_diff_eq!(
            scaled_g_value(&arch, &Vector3::zeros(), &p).unwrap(),
            expect,
            epsilon = 1e-12 * expect.abs().max(1.0)
        );
    }

    #[test]
    fn extraction_held_out_residual() {
        let arch = srspm1();
        let c = reference_c();
        let surf = extract_cubic(&arch, &c).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..200 {
            let p = Vector3::new(
                rng.gen_range(-2.0..2.0),
                rng.gen_range(-2.0..2.0),
                rng.gen_range(0.5..4.5),
            );
            let direct = scaled_g_value(&arch, &c, &p).unwrap();
            let poly = surf.evaluate(&p);
            assert!(
                (direct - poly).abs() <= 1e-8 * direct.abs().max(1e-12),
                "residual too large at {p:?}: {direct} vs {poly}"
            );
        }
    }

    #[test]
    fn extraction_deterministic() {
        let arch = srspm1();
        let a = extract_cubic(&arch, &reference_c()).unwrap();
        let b = extract_cubic(&arch, &reference_c()).unwrap();
        assert_eq!(a.coeffs(), b.coeffs());
    }

    #[test]
    fn extraction_alternate_point_set_agrees() {
        let arch = srspm1();
        let a = extract_cubic(&arch, &reference_c()).unwrap();
        let b = extract_cubic_alternate(&arch, &reference_c()).unwrap();
        let scale = a.max_abs_coeff();
        for i in 0..16 {
            assert!((a.coeffs()[i] - b.coeffs()[i]).abs() <= 1e-8 * scale);
        }
    }

    #[test]
    fn evaluate_gradient_trivial_cases() {
        let mut coeffs = [0.0; 16];
        coeffs[14] = 1.0;
        let plane = CubicSurface::from_coeffs(coeffs).unwrap();
        assert_abs_diff_eq!(plane.evaluate(&Vector3::new(1.0, 2.0, 3.0)), 3.0);
        assert_eq!(plane.gradient(&Vector3::new(1.0, 2.0, 3.0)), Vector3::new(0.0, 0.0, 1.0));

        let mut coeffs = [0.0; 16];
        coeffs[15] = 7.5;
        coeffs[0] = 1.0;
        let s = CubicSurface::from_coeffs(coeffs).unwrap();
        assert_abs_diff_eq!(s.evaluate(&Vector3::zeros()), 7.5);
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let arch = srspm1();
        let surf = extract_cubic(&arch, &reference_c()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let h = 1e-6;
        for _ in 0..100 {
            let p = Vector3::new(
                rng.gen_range(-2.0..2.0),
                rng.gen_range(-2.0..2.0),
                rng.gen_range(0.5..4.5),
            );
            let grad = surf.gradient(&p);
            for k in 0..3 {
                let mut hi = p;
                let mut lo = p;
                hi[k] += h;
                lo[k] -= h;
                let fd = (surf.evaluate(&hi) - surf.evaluate(&lo)) / (2.0 * h);
                let scale = grad[k].abs().max(1.0);
                assert!((grad[k] - fd).abs() <= 1e-6 * scale, "component {k} at {p:?}");
            }
        }
    }

    #[test]
    fn hessian_matches_finite_difference_gradient() {
        let arch = srspm1();
        let surf = extract_cubic(&arch, &reference_c()).unwrap();
        let p = Vector3::new(0.3, -0.7, 2.1);
        let hess = surf.hessian(&p);
        let h = 1e-6;
        for k in 0..3 {
            let mut hi = p;
            let mut lo = p;
            hi[k] += h;
            lo[k] -= h;
            let fd = (surf.gradient(&hi) - surf.gradient(&lo)) / (2.0 * h);
            for r in 0..3 {
                assert!((hess[(r, k)] - fd[r]).abs() < 1e-5);
            }
        }
    }

    #[test]
    fn neutral_axis_cubic_and_safety() {
        let mut coeffs = [0.0; 16];
        coeffs[12] = 1.0;
        coeffs[15] = -8.0;
        let s = CubicSurface::from_coeffs(coeffs).unwrap();
        assert_eq!(s.neutral_axis_cubic().0, [1.0, 0.0, 0.0, -8.0]);
        assert!(!s.is_neutral_position_safe(2.0, 1e-8));
        assert!(s.is_neutral_position_safe(2.5, 1e-8));
        assert!(!s.is_neutral_position_safe(2.5, f64::INFINITY));

        let arch = srspm1();
        let surf = extract_cubic(&arch, &reference_c()).unwrap();
        assert!(surf.is_neutral_position_safe(2.5, 1e-8));
    }

    #[test]
    fn three_fold_symmetry_pointwise() {
        // c' = Rz(2pi/3) c produces the surface rotated by 2pi/3 about Z.
        let arch = srspm1();
        let c = reference_c();
        let rz = rotation_from_rodrigues(&Vector3::new(
            0.0,
            0.0,
            std::f64::consts::FRAC_PI_3.tan(),
        ));
        let c2 = rz * c;
        let s1 = extract_cubic(&arch, &c).unwrap();
        let s2 = extract_cubic(&arch, &c2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..50 {
            let p = Vector3::new(
                rng.gen_range(-2.0..2.0),
                rng.gen_range(-2.0..2.0),
                rng.gen_range(0.5..4.5),
            );
            let v1 = s1.evaluate(&p);
            let v2 = s2.evaluate(&(rz * p));
            assert!((v1 - v2).abs() <= 1e-8 * v1.abs().max(1e-9));
        }
    }

    #[test]
    fn from_coeffs_rejects_zero_vector() {
        assert!(matches!(
            CubicSurface::from_coeffs([0.0; 16]),
            Err(SfsError::Domain(_))
        ));
    }

    #[test]
    fn basis_is_well_conditioned() {
        assert!(PRIMARY_BASIS.condition < 1e6);
        assert!(FALLBACK_BASIS.condition < 1e6);
    }
}
