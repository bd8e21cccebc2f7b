//! Dense complex linear algebra helpers shared by the model and the solvers.
//!
//! Matrices are `nalgebra` column-major; products of anything larger than a
//! handful of rows go through `matrixmultiply`'s complex kernel.

use nalgebra::{Cholesky, DMatrix, DVector, Dyn};
use num_complex::Complex64;

pub type C64 = Complex64;
pub type CMat = DMatrix<C64>;
pub type CVec = DVector<C64>;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);

/// `a * b` through the blocked complex GEMM kernel.
pub fn matmul(a: &CMat, b: &CMat) -> CMat {
    assert_eq!(a.ncols(), b.nrows(), "matmul: inner dimensions differ");
    let (m, k, n) = (a.nrows(), a.ncols(), b.ncols());
    let mut c = CMat::zeros(m, n);
    if m == 0 || n == 0 || k == 0 {
        return c;
    }
    // SAFETY: Complex64 is #[repr(C)] { re, im }, layout-identical to [f64; 2].
    // All three buffers are dense column-major with the strides given here.
    unsafe {
        matrixmultiply::zgemm(
            matrixmultiply::CGemmOption::Standard,
            matrixmultiply::CGemmOption::Standard,
            m,
            k,
            n,
            [1.0, 0.0],
            a.as_ptr() as *const [f64; 2],
            1,
            m as isize,
            b.as_ptr() as *const [f64; 2],
            1,
            k as isize,
            [0.0, 0.0],
            c.as_mut_ptr() as *mut [f64; 2],
            1,
            m as isize,
        );
    }
    c
}

/// `(m + mᴴ) / 2`
pub fn hermitian_part(m: &CMat) -> CMat {
    (m + m.adjoint()) * C64::new(0.5, 0.0)
}

/// Largest entrywise deviation from Hermitian symmetry.
pub fn hermitian_defect(m: &CMat) -> f64 {
    let n = m.nrows();
    let mut worst = 0.0_f64;
    for j in 0..n {
        for i in 0..=j {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

/// `Tr(a b)` without forming the product.
pub fn trace_product(a: &CMat, b: &CMat) -> C64 {
    debug_assert_eq!(a.ncols(), b.nrows());
    debug_assert_eq!(a.nrows(), b.ncols());
    let mut acc = ZERO;
    for i in 0..a.nrows() {
        for k in 0..a.ncols() {
            acc += a[(i, k)] * b[(k, i)];
        }
    }
    acc
}

/// `Re(xᴴ q x)`
pub fn quad_form(q: &CMat, x: &CVec) -> f64 {
    let qx = q * x;
    x.dotc(&qx).re
}

pub fn frobenius_sq(m: &CMat) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum()
}

/// `ln det(m)` for a Hermitian positive definite matrix, via Cholesky.
pub fn log_det_hpd(m: &CMat) -> Option<f64> {
    let chol = cholesky_lower(m)?;
    let l = chol.l_dirty();
    Some(2.0 * (0..m.nrows()).map(|i| l[(i, i)].re.ln()).sum::<f64>())
}

/// Inverse of a Hermitian positive definite matrix, `None` if the Cholesky
/// factorization breaks down.
pub fn inverse_hpd(m: &CMat) -> Option<CMat> {
    let chol = cholesky_lower(m)?;
    let inv = chol.inverse();
    Some(hermitian_part(&inv))
}

/// Cholesky factor (lower) of a Hermitian matrix, `None` if not positive definite.
pub fn cholesky_lower(m: &CMat) -> Option<Cholesky<C64, Dyn>> {
    let chol = Cholesky::new(m.clone())?;
    let l = chol.l_dirty();
    // The complex square root of a negative pivot comes back almost purely
    // imaginary with a rounding-sized real part, so check both parts.
    for i in 0..m.nrows() {
        let d = l[(i, i)];
        if !(d.re > 0.0) || !d.re.is_finite() || d.im.abs() > 1e-8 * d.re {
            return None;
        }
    }
    Some(chol)
}

/// Eigenvalues of a Hermitian matrix in ascending order.
pub fn hermitian_eigenvalues(m: &CMat) -> Vec<f64> {
    let mut ev: Vec<f64> = hermitian_part(m)
        .symmetric_eigenvalues()
        .iter()
        .copied()
        .collect();
    ev.sort_by(|a, b| a.total_cmp(b));
    ev
}

/// Smallest eigenvalue of a Hermitian matrix.
pub fn min_eigenvalue(m: &CMat) -> f64 {
    hermitian_eigenvalues(m).first().copied().unwrap_or(0.0)
}

/// Entrywise projection onto the unit circle; zero entries map to 1.
pub fn unit_modulus(v: &CVec) -> CVec {
    v.map(|z| {
        let r = z.norm();
        if r > 0.0 && r.is_finite() {
            z / r
        } else {
            ONE
        }
    })
}

/// `diag(d) * m`
pub fn scale_rows(d: &CVec, m: &CMat) -> CMat {
    let mut out = m.clone();
    for (i, mut row) in out.row_iter_mut().enumerate() {
        row *= d[i];
    }
    out
}

/// Real inner product `Re(aᴴ b)` on complex vectors.
pub fn real_inner(a: &CVec, b: &CVec) -> f64 {
    a.dotc(b).re
}

pub fn from_polar(r: f64, theta: f64) -> C64 {
    C64::from_polar(r, theta)
}
