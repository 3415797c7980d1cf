//! Laguerre and Meixner-Pollaczek polynomials, Gauss-Laguerre quadrature
//! and the maps from boundary rates to polynomial parameters.

use alloc::format;
use alloc::vec::Vec;

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use crate::{Error, Result};

/// `L_n^{(lambda)}(x)` by the three-term recurrence
/// `(n+1) L_{n+1} = (2n + lambda + 1 - x) L_n - (n + lambda) L_{n-1}`.
pub fn laguerre_eval(n: usize, lambda: f64, x: f64) -> f64 {
    let (mut prev, mut cur) = (0.0, 1.0);
    for k in 0..n {
        let kf = k as f64;
        let next = ((2.0 * kf + lambda + 1.0 - x) * cur - (kf + lambda) * prev) / (kf + 1.0);
        prev = cur;
        cur = next;
    }
    cur
}

/// Nodes and weights of `n`-point generalized Gauss-Laguerre quadrature
/// for the weight `x^lambda e^{-x}` (Golub-Welsch).
pub fn gauss_laguerre(n: usize, lambda: f64) -> Result<(Vec<f64>, Vec<f64>)> {
    if !(lambda > -1.0) {
        return Err(Error::InvalidParameter(format!("lambda must exceed -1, got {lambda}")));
    }
    if n == 0 {
        return Err(Error::InvalidParameter("quadrature needs at least one node".into()));
    }
    let jacobi = DMatrix::from_fn(n, n, |i, j| {
        if i == j {
            2.0 * i as f64 + lambda + 1.0
        } else if i + 1 == j || j + 1 == i {
            let k = i.max(j) as f64;
            libm::sqrt(k * (k + lambda))
        } else {
            0.0
        }
    });
    let eig = SymmetricEigen::new(jacobi);
    let mu0 = libm::tgamma(lambda + 1.0);
    let mut pairs: Vec<(f64, f64)> = (0..n)
        .map(|k| {
            let v0 = eig.eigenvectors[(0, k)];
            (eig.eigenvalues[k], mu0 * v0 * v0)
        })
        .collect();
    pairs.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap_or(core::cmp::Ordering::Equal));
    Ok(pairs.into_iter().unzip())
}

/// `Gamma(n + lambda + 1) / n!`, the squared norm of `L_n^{(lambda)}`.
pub fn laguerre_norm(n: usize, lambda: f64) -> f64 {
    libm::exp(libm::lgamma(n as f64 + lambda + 1.0) - libm::lgamma(n as f64 + 1.0))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrthogonalityCheck {
    pub integral: f64,
    pub expected: f64,
    pub deviation: f64,
}

/// `int_0^inf e^{-x} x^lambda L_m L_n dx` by quadrature, against
/// `delta_{mn} Gamma(n + lambda + 1) / n!`.
pub fn laguerre_orthogonality_check(m: usize, n: usize, lambda: f64) -> Result<OrthogonalityCheck> {
    if m > 40 || n > 40 {
        return Err(Error::InvalidParameter(format!("degrees up to 40 are supported, got {m}, {n}")));
    }
    let nodes = (m + n) / 2 + 2;
    let (x, w) = gauss_laguerre(nodes, lambda)?;
    let integral =
        x.iter().zip(&w).map(|(&xi, &wi)| wi * laguerre_eval(m, lambda, xi) * laguerre_eval(n, lambda, xi)).sum();
    let expected = if m == n { laguerre_norm(n, lambda) } else { 0.0 };
    Ok(OrthogonalityCheck { integral, expected, deviation: (integral - expected).abs() })
}

/// Gram matrix of the normalized `l_n = L_n / sqrt(norm_n)` for
/// `n = 0..=nmax`; the identity up to quadrature error.
pub fn normalized_gram(nmax: usize, lambda: f64) -> Result<DMatrix<f64>> {
    let (x, w) = gauss_laguerre(nmax + 2, lambda)?;
    let vals: Vec<Vec<f64>> = (0..=nmax)
        .map(|n| {
            let s = libm::sqrt(laguerre_norm(n, lambda));
            x.iter().map(|&xi| laguerre_eval(n, lambda, xi) / s).collect()
        })
        .collect();
    Ok(DMatrix::from_fn(nmax + 1, nmax + 1, |i, j| {
        w.iter().enumerate().map(|(k, wk)| wk * vals[i][k] * vals[j][k]).sum()
    }))
}

/// `lambda = (alpha + beta + gamma + delta) / ((alpha + gamma)(beta + delta)) - 1`.
pub fn lambda_from_rates(alpha: f64, beta: f64, gamma: f64, delta: f64) -> Result<f64> {
    let (l, r) = (alpha + gamma, beta + delta);
    if !(l > 0.0) || !(r > 0.0) {
        return Err(Error::Degenerate(format!("lambda needs alpha + gamma > 0 and beta + delta > 0, got {l} and {r}")));
    }
    Ok((alpha + beta + gamma + delta) / (l * r) - 1.0)
}

/// Root branch of [`kappa`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    Plus,
    Minus,
}

/// Roots of `nu k^2 + (nu - tau - (1 - q)) k - tau = 0`. With
/// `flip_tau` the second argument enters with the opposite sign.
pub fn kappa(nu: f64, tau: f64, q: f64, branch: Branch, flip_tau: bool) -> Result<f64> {
    if nu == 0.0 {
        return Err(Error::Degenerate("kappa needs nu != 0".into()));
    }
    let tau = if flip_tau { -tau } else { tau };
    let b = nu - tau - (1.0 - q);
    let disc = libm::sqrt(b * b + 4.0 * nu * tau);
    let sign = match branch {
        Branch::Plus => 1.0,
        Branch::Minus => -1.0,
    };
    Ok((-b + sign * disc) / (2.0 * nu))
}

/// Askey-Wilson parameters of the boundary rates:
/// `a = kappa+(alpha, gamma)`, `b = kappa+(beta, delta)`,
/// `c = kappa-(alpha, gamma)`, `d = kappa-(beta, delta)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AwParameters {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

pub fn aw_parameters(q: f64, alpha: f64, beta: f64, gamma: f64, delta: f64) -> Result<AwParameters> {
    Ok(AwParameters {
        a: kappa(alpha, gamma, q, Branch::Plus, false)?,
        b: kappa(beta, delta, q, Branch::Plus, false)?,
        c: kappa(alpha, gamma, q, Branch::Minus, false)?,
        d: kappa(beta, delta, q, Branch::Minus, false)?,
    })
}

fn pochhammer(a: Complex64, k: usize) -> Complex64 {
    (0..k).fold(Complex64::new(1.0, 0.0), |acc, j| acc * (a + j as f64))
}

/// `P_n^{(mu)}(x; phi) = (2mu)_n / n! e^{i n phi} 2F1(-n, mu + ix; 2mu; 1 - e^{-2i phi})`,
/// evaluated as the terminating series.
pub fn meixner_pollaczek_eval(n: usize, mu: f64, x: f64, phi: f64) -> Result<Complex64> {
    if n > 30 {
        return Err(Error::InvalidParameter(format!("degree up to 30 is supported, got {n}")));
    }
    if !(mu > 0.0) || !(phi > 0.0 && phi < core::f64::consts::PI) {
        return Err(Error::InvalidParameter(format!("need mu > 0 and 0 < phi < pi, got {mu}, {phi}")));
    }
    let z = Complex64::new(1.0, 0.0) - Complex64::from_polar(1.0, -2.0 * phi);
    let a = Complex64::new(mu, x);
    let c = Complex64::new(2.0 * mu, 0.0);
    let mut term = Complex64::new(1.0, 0.0);
    let mut sum = term;
    for k in 0..n {
        let kf = k as f64;
        term = term * (kf - n as f64) * (a + kf) / ((c + kf) * (kf + 1.0)) * z;
        sum += term;
    }
    let pre = pochhammer(c, n) / libm::tgamma(n as f64 + 1.0) * Complex64::from_polar(1.0, n as f64 * phi);
    Ok(pre * sum)
}

/// The same polynomial from its three-term recurrence.
pub fn meixner_pollaczek_recurrence(n: usize, mu: f64, x: f64, phi: f64) -> f64 {
    let (s, c) = (libm::sin(phi), libm::cos(phi));
    let (mut prev, mut cur) = (0.0, 1.0);
    for k in 0..n {
        let kf = k as f64;
        let next = (2.0 * (x * s + (kf + mu) * c) * cur - (kf + 2.0 * mu - 1.0) * prev) / (kf + 1.0);
        prev = cur;
        cur = next;
    }
    cur
}

/// `|P_n^{((lambda+1)/2)}(-x / (2 phi); phi) - L_n^{(lambda)}(x)|`.
pub fn laguerre_limit_error(n: usize, lambda: f64, x: f64, phi: f64) -> Result<f64> {
    let p = meixner_pollaczek_eval(n, (lambda + 1.0) / 2.0, -x / (2.0 * phi), phi)?;
    Ok((p - Complex64::new(laguerre_eval(n, lambda, x), 0.0)).norm())
}
