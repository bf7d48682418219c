//! Polynomial utilities: robust real cubic roots, dense univariate roots via
//! companion eigenvalues, and a small bivariate polynomial type used by the
//! elimination-based closest-point solver together with a matrix-polynomial
//! eigen solver.

use nalgebra::{Complex, DMatrix};

use crate::error::{Result, SfsError};

/// Real roots of `c3 z^3 + c2 z^2 + c1 z + c0`, handling degenerate leading
/// coefficients. Returns the roots in the fixed-size buffer plus a count.
pub fn cubic_real_roots(c3: f64, c2: f64, c1: f64, c0: f64) -> ([f64; 3], usize) {
    let mut out = [0.0; 3];
    let scale = c3.abs().max(c2.abs()).max(c1.abs()).max(c0.abs());
    if scale == 0.0 {
        return (out, 0);
    }
    if c3.abs() < 1e-14 * scale {
        // quadratic fallback
        if c2.abs() < 1e-14 * scale {
            if c1.abs() < 1e-14 * scale {
                return (out, 0);
            }
            out[0] = -c0 / c1;
            return (out, 1);
        }
        let disc = c1 * c1 - 4.0 * c2 * c0;
        if disc < 0.0 {
            return (out, 0);
        }
        let q = -0.5 * (c1 + c1.signum() * disc.sqrt());
        let (r0, r1) = if q != 0.0 { (q / c2, c0 / q) } else { (0.0, 0.0) };
        out[0] = r0;
        out[1] = r1;
        return (out, 2);
    }
    let a = c2 / c3;
    let b = c1 / c3;
    let c = c0 / c3;
    let p = b - a * a / 3.0;
    let q = 2.0 * a * a * a / 27.0 - a * b / 3.0 + c;
    let shift = -a / 3.0;
    let disc = 0.25 * q * q + p * p * p / 27.0;
    if disc > 0.0 {
        let sq = disc.sqrt();
        let u = (-0.5 * q + sq).cbrt();
        let v = (-0.5 * q - sq).cbrt();
        out[0] = u + v + shift;
        (out, 1)
    } else {
        // three real roots (p <= 0 here)
        let m = 2.0 * (-p / 3.0).max(0.0).sqrt();
        if m == 0.0 {
            out[0] = shift;
            return (out, 1);
        }
        let arg = (3.0 * q / (p * m)).clamp(-1.0, 1.0);
        let theta = arg.acos() / 3.0;
        for (i, slot) in out.iter_mut().enumerate() {
            *slot = m * (theta - 2.0 * std::f64::consts::PI * i as f64 / 3.0).cos() + shift;
        }
        (out, 3)
    }
}

/// All complex roots of a dense univariate polynomial given in ascending
/// order, via the balanced companion matrix. Tiny leading coefficients are
/// trimmed relative to the largest one.
pub fn univariate_roots(coeffs: &[f64]) -> Result<Vec<Complex<f64>>> {
    let scale = coeffs.iter().fold(0.0f64, |m, c| m.max(c.abs()));
    if scale == 0.0 {
        return Ok(Vec::new());
    }
    let mut deg = coeffs.len() - 1;
    while deg > 0 && coeffs[deg].abs() < 1e-12 * scale {
        deg -= 1;
    }
    if deg == 0 {
        return Ok(Vec::new());
    }
    if deg == 1 {
        return Ok(vec![Complex::new(-coeffs[0] / coeffs[1], 0.0)]);
    }
    let lead = coeffs[deg];
    let mut companion = DMatrix::<f64>::zeros(deg, deg);
    for i in 1..deg {
        companion[(i, i - 1)] = 1.0;
    }
    for i in 0..deg {
        companion[(i, deg - 1)] = -coeffs[i] / lead;
    }
    complex_eigenvalues(&companion)
}

/// Complex eigenvalues via the real Schur decomposition, with a bounded
/// iteration count so the sweep cannot hang on a pathological matrix.
pub fn complex_eigenvalues(m: &DMatrix<f64>) -> Result<Vec<Complex<f64>>> {
    let schur = nalgebra::linalg::Schur::try_new(m.clone(), 1e-14, 200 * m.nrows())
        .ok_or(SfsError::EigenFailure)?;
    Ok(schur.complex_eigenvalues().iter().copied().collect())
}

/// Dense bivariate polynomial in `(lambda, z)`, stored as
/// `c[lambda_degree][z_degree]`.
#[derive(Debug, Clone, PartialEq)]
pub struct BivPoly {
    pub c: Vec<Vec<f64>>,
}

impl BivPoly {
    /// Polynomial in `z` only (lambda-degree zero), ascending coefficients.
    pub fn in_z(coeffs: &[f64]) -> Self {
        Self { c: vec![coeffs.to_vec()] }
    }

    pub fn constant(v: f64) -> Self {
        Self { c: vec![vec![v]] }
    }

    pub fn lam_degree(&self) -> usize {
        self.c.len() - 1
    }

    pub fn z_degree(&self) -> usize {
        self.c.iter().map(|row| row.len()).max().unwrap_or(1) - 1
    }

    pub fn max_abs(&self) -> f64 {
        self.c
            .iter()
            .flat_map(|row| row.iter())
            .fold(0.0f64, |m, v| m.max(v.abs()))
    }

    /// Multiply by `lambda`.
    pub fn mul_lam(&self) -> Self {
        let mut c = Vec::with_capacity(self.c.len() + 1);
        c.push(vec![0.0]);
        c.extend(self.c.iter().cloned());
        Self { c }
    }

    pub fn add(&self, other: &Self) -> Self {
        let rows = self.c.len().max(other.c.len());
        let mut c = vec![Vec::new(); rows];
        for (i, row) in c.iter_mut().enumerate() {
            let a = self.c.get(i).map(|r| r.as_slice()).unwrap_or(&[]);
            let b = other.c.get(i).map(|r| r.as_slice()).unwrap_or(&[]);
            let cols = a.len().max(b.len()).max(1);
            row.resize(cols, 0.0);
            for (j, slot) in row.iter_mut().enumerate() {
                *slot = a.get(j).copied().unwrap_or(0.0) + b.get(j).copied().unwrap_or(0.0);
            }
        }
        Self { c }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(-1.0))
    }

    pub fn scale(&self, s: f64) -> Self {
        Self {
            c: self
                .c
                .iter()
                .map(|row| row.iter().map(|v| v * s).collect())
                .collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        let rows = self.c.len() + other.c.len() - 1;
        let cols = (self.c.iter().map(|r| r.len()).max().unwrap_or(1))
            + (other.c.iter().map(|r| r.len()).max().unwrap_or(1))
            - 1;
        let mut c = vec![vec![0.0; cols]; rows];
        for (i, ra) in self.c.iter().enumerate() {
            for (j, &a) in ra.iter().enumerate() {
                if a == 0.0 {
                    continue;
                }
                for (k, rb) in other.c.iter().enumerate() {
                    for (l, &b) in rb.iter().enumerate() {
                        c[i + k][j + l] += a * b;
                    }
                }
            }
        }
        Self { c }
    }

    /// Drop trailing lambda rows whose coefficients are all below `tol`.
    pub fn trim_lam(&self, tol: f64) -> Self {
        let mut last = self.c.len();
        while last > 1
            && self.c[last - 1].iter().all(|v| v.abs() <= tol)
        {
            last -= 1;
        }
        Self { c: self.c[..last].to_vec() }
    }

    /// Coefficients in `z` of the `lambda^k` term, ascending.
    pub fn lam_coeff(&self, k: usize) -> &[f64] {
        &self.c[k]
    }

    /// Evaluate the lambda-coefficients at a fixed `z`, producing the
    /// univariate polynomial in lambda (ascending).
    pub fn lam_poly_at(&self, z: f64) -> Vec<f64> {
        self.c.iter().map(|row| eval_poly(row, z)).collect()
    }

    pub fn eval(&self, lam: f64, z: f64) -> f64 {
        let mut acc = 0.0;
        let mut lp = 1.0;
        for row in &self.c {
            acc += lp * eval_poly(row, z);
            lp *= lam;
        }
        acc
    }
}

/// Horner evaluation of an ascending-coefficient polynomial.
pub fn eval_poly(coeffs: &[f64], x: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c)
}

/// Sylvester matrix of two polynomials in `lambda` with z-polynomial
/// coefficients, returned as the coefficient matrices `S_k` of the matrix
/// polynomial `S(z) = sum_k S_k z^k`.
pub fn sylvester_matrix_poly(p: &BivPoly, q: &BivPoly) -> Vec<DMatrix<f64>> {
    let m = p.lam_degree();
    let n = q.lam_degree();
    let size = m + n;
    let zdeg = p.z_degree().max(q.z_degree());
    let mut mats = vec![DMatrix::<f64>::zeros(size, size); zdeg + 1];
    for r in 0..n {
        for j in 0..=m {
            // entry (r, r + j) holds the coefficient of lambda^(m - j) in p
            for (k, &v) in p.lam_coeff(m - j).iter().enumerate() {
                mats[k][(r, r + j)] = v;
            }
        }
    }
    for r in 0..m {
        for j in 0..=n {
            for (k, &v) in q.lam_coeff(n - j).iter().enumerate() {
                mats[k][(n + r, r + j)] = v;
            }
        }
    }
    mats
}

/// Roots of `det(sum_k S_k z^k) = 0` via companion linearisation of the
/// matrix polynomial and shift-inverted eigenvalues. Infinite roots of the
/// pencil map to `mu == 0` and are dropped. Retries over a fixed shift list
/// when the shifted pencil is singular or the eigen iteration fails.
pub fn matrix_poly_roots(mats: &[DMatrix<f64>], shift_center: f64) -> Result<Vec<Complex<f64>>> {
    let scale = mats
        .iter()
        .map(|m| m.amax())
        .fold(0.0f64, f64::max);
    if scale == 0.0 {
        return Ok(Vec::new());
    }
    let mut top = mats.len() - 1;
    while top > 0 && mats[top].amax() < 1e-13 * scale {
        top -= 1;
    }
    if top == 0 {
        return Ok(Vec::new());
    }
    let n = mats[0].nrows();
    let dim = n * top;
    let mut a = DMatrix::<f64>::zeros(dim, dim);
    let mut b = DMatrix::<f64>::zeros(dim, dim);
    for i in 0..top - 1 {
        for j in 0..n {
            a[(i * n + j, (i + 1) * n + j)] = 1.0;
            b[(i * n + j, i * n + j)] = 1.0;
        }
    }
    for k in 0..top {
        a.view_mut(((top - 1) * n, k * n), (n, n))
            .copy_from(&(-(&mats[k]) / scale));
    }
    b.view_mut(((top - 1) * n, (top - 1) * n), (n, n))
        .copy_from(&(&mats[top] / scale));

    // offsets are arbitrary irrational-looking values so a shift landing on a
    // root of det S(z) can be escaped by retrying
    const SHIFT_OFFSETS: [f64; 3] = [0.437_215_789, -1.236_069_77, 2.718_281_83];
    let mut last_err = SfsError::EigenFailure;
    for &offset in &SHIFT_OFFSETS {
        let sigma = shift_center + offset;
        let shifted = &a - sigma * &b;
        let lu = shifted.lu();
        let m = match lu.solve(&b) {
            Some(m) => m,
            None => continue,
        };
        match complex_eigenvalues(&m) {
            Ok(mus) => {
                let roots = mus
                    .into_iter()
                    .filter(|mu| mu.norm() > 1e-12)
                    .map(|mu| Complex::new(sigma, 0.0) + 1.0 / mu)
                    .collect();
                return Ok(roots);
            }
            Err(e) => last_err = e,
        }
    }
    Err(last_err)
}
