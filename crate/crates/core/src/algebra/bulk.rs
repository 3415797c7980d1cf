use alloc::format;

use crate::linalg::{commutator, Mat};
use crate::mpa::build_q_oscillator_rep;
use crate::{Error, Result};

/// `x0` times the truncated q-oscillator pair, returned as `(D0, D1)`.
/// Satisfies `D1 D0 - q D0 D1 = x0 (D0 + D1)` away from the last rows.
pub fn bulk_pair(q: f64, m: usize, x0: f64) -> Result<(Mat, Mat)> {
    let (d0, d1) = build_q_oscillator_rep(q, m)?;
    Ok((d0 * x0, d1 * x0))
}

/// A truncated pair with `D1 D0 - D0 D1 = x0 (D0 + D1)`: `D1 = x0 N + c`
/// and `D0 = S - D1` with `S` a weighted lowering of the number basis.
pub fn ssep_bulk_pair(m: usize, x0: f64) -> Result<(Mat, Mat)> {
    if m < 2 {
        return Err(Error::InvalidParameter(format!("truncation must be at least 2, got {m}")));
    }
    let d1 = Mat::from_fn(m, m, |i, j| if i == j { x0 * i as f64 + 0.5 } else { 0.0 });
    let s = Mat::from_fn(m, m, |i, j| if i == j + 1 { libm::sqrt(i as f64) } else { 0.0 });
    Ok((s - &d1, d1))
}

/// Affine shifts that remove the `gamma`-type scalars of the bulk pair.
/// For `q != 1`: `D0 + x0 q^{-1/2} / (q^{1/2} - q^{-1/2})` and
/// `D1 - x1 q^{-1/2} / (q^{1/2} - q^{-1/2})`; at `q = 1`: `D0 + x0`,
/// `D1 - x1`.
pub fn shift_generators(d0: &Mat, d1: &Mat, q: f64, x0: f64) -> Result<(Mat, Mat)> {
    if !(q > 0.0) {
        return Err(Error::InvalidParameter(format!("shift needs q > 0, got {q}")));
    }
    let x1 = -x0;
    let n = d0.nrows();
    let id = Mat::identity(n, n);
    let (c0, c1) = if q == 1.0 {
        (x0, -x1)
    } else {
        let r = libm::sqrt(q);
        let u = 1.0 / (r * (r - 1.0 / r));
        (x0 * u, -x1 * u)
    };
    Ok((d0 + &id * c0, d1 + &id * c1))
}

/// Matrices of the `q = 0` algebra with constants `a`, `b`.
#[derive(Debug, Clone)]
pub struct TasepAlgebraData {
    pub a: f64,
    pub b: f64,
    pub e1: f64,
    pub e2: f64,
    pub z: f64,
    /// Tridiagonal `D = D0 + D1 + e1`.
    pub d: Mat,
    /// Diagonal `D* = [D1, D0]`.
    pub d_star: Mat,
    /// `D1 = sqrt(ab)` times the raising shift, `D0` its transpose, so
    /// that `D1 D0 = ab` away from the last row.
    pub d0: Mat,
    pub d1: Mat,
}

pub fn tasep_algebra_data(a: f64, b: f64, m: usize) -> Result<TasepAlgebraData> {
    if m < 4 {
        return Err(Error::InvalidParameter(format!("truncation must be at least 4, got {m}")));
    }
    if !(a * b > 0.0) {
        return Err(Error::InvalidParameter(format!("need ab > 0, got a = {a}, b = {b}")));
    }
    let z = a * b;
    let g = libm::sqrt(z);
    let d1 = Mat::from_fn(m, m, |i, j| if j == i + 1 { g } else { 0.0 });
    let d0 = d1.transpose();
    let e1 = a + b;
    let d = &d0 + &d1 + Mat::identity(m, m) * e1;
    let d_star = commutator(&d1, &d0);
    Ok(TasepAlgebraData { a, b, e1, e2: z, z, d, d_star, d0, d1 })
}

/// The unshifted bidiagonal pair with `D1 D0 = D1 + D0`.
pub fn tasep_bidiagonal(m: usize) -> Result<(Mat, Mat)> {
    build_q_oscillator_rep(0.0, m)
}
