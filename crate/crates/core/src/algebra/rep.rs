use alloc::format;
use alloc::vec::Vec;

use crate::linalg::{commutator, diag, max_abs, Mat};
use crate::process::ProcessParams;
use crate::{Error, Result};

/// Boundary rates of the chain, without the length.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rates {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub delta: f64,
}

impl Rates {
    pub fn new(alpha: f64, beta: f64, gamma: f64, delta: f64) -> Self {
        Rates { alpha, beta, gamma, delta }
    }
}

impl From<&ProcessParams> for Rates {
    fn from(p: &ProcessParams) -> Self {
        Rates::new(p.alpha, p.beta, p.gamma, p.delta)
    }
}

/// Spin-`j` representation of `U_q(su(2))` on the basis `m = -j..j`
/// (ascending). `A+ e_m = e_{m+1}` and `A- e_{m+1} = h_{m+1} e_m`.
#[derive(Debug, Clone)]
pub struct UqSu2Rep {
    pub two_j: usize,
    pub q: f64,
    pub weights: Vec<f64>,
    pub n: Mat,
    pub a_plus: Mat,
    pub a_minus: Mat,
    pub casimir: f64,
}

fn q_number(m: f64, q: f64) -> f64 {
    if q == 1.0 {
        2.0 * m
    } else {
        (libm::pow(q, m) - libm::pow(q, -m)) / (libm::sqrt(q) - 1.0 / libm::sqrt(q))
    }
}

/// `(q^{N-1/2} + q^{-N+1/2}) / (q^{1/2} - q^{-1/2})^2` at weight `m`, or
/// `m (m - 1)` at `q = 1`.
fn casimir_shift(m: f64, q: f64) -> f64 {
    if q == 1.0 {
        m * (m - 1.0)
    } else {
        let s = libm::sqrt(q) - 1.0 / libm::sqrt(q);
        (libm::pow(q, m - 0.5) + libm::pow(q, -m + 0.5)) / (s * s)
    }
}

pub fn build_uq_su2_rep(j: f64, q: f64) -> Result<UqSu2Rep> {
    let two_j = libm::round(2.0 * j);
    if !(two_j >= 1.0) || (2.0 * j - two_j).abs() > 1e-12 {
        return Err(Error::InvalidParameter(format!("spin must be a positive half-integer, got {j}")));
    }
    if !(q > 0.0) || !q.is_finite() {
        return Err(Error::InvalidParameter(format!("q must be positive, got {q}")));
    }
    let two_j = two_j as usize;
    let dim = two_j + 1;
    let weights: Vec<f64> = (0..dim).map(|i| i as f64 - two_j as f64 / 2.0).collect();
    let mut h = Vec::with_capacity(dim);
    h.push(0.0);
    for i in 0..dim - 1 {
        h.push(h[i] + q_number(weights[i], q));
    }
    let mut a_plus = Mat::zeros(dim, dim);
    let mut a_minus = Mat::zeros(dim, dim);
    for i in 0..dim - 1 {
        a_plus[(i + 1, i)] = 1.0;
        a_minus[(i, i + 1)] = h[i + 1];
    }
    let casimir = h[0] - casimir_shift(weights[0], q);
    Ok(UqSu2Rep { two_j, q, n: diag(&weights), weights, a_plus, a_minus, casimir })
}

impl UqSu2Rep {
    pub fn spin(&self) -> f64 {
        self.two_j as f64 / 2.0
    }

    pub fn dim(&self) -> usize {
        self.two_j + 1
    }

    /// `q^{e N}`.
    pub fn q_pow(&self, e: f64) -> Mat {
        let v: Vec<f64> = self.weights.iter().map(|m| libm::pow(self.q, e * m)).collect();
        diag(&v)
    }

    /// `A+ A- - (q^{N-1/2} + q^{-N+1/2}) / (q^{1/2} - q^{-1/2})^2`.
    pub fn casimir_matrix(&self) -> Mat {
        let shift: Vec<f64> = self.weights.iter().map(|&m| casimir_shift(m, self.q)).collect();
        &self.a_plus * &self.a_minus - diag(&shift)
    }

    /// Largest deviations of `[N, A+] = A+`, `[N, A-] = -A-`, the
    /// `[A-, A+]` relation and of the Casimir from a scalar.
    pub fn invariant_residuals(&self) -> [f64; 4] {
        let up = max_abs(&(commutator(&self.n, &self.a_plus) - &self.a_plus));
        let down = max_abs(&(commutator(&self.n, &self.a_minus) + &self.a_minus));
        let qn: Vec<f64> = self.weights.iter().map(|&m| q_number(m, self.q)).collect();
        let comm = max_abs(&(commutator(&self.a_minus, &self.a_plus) - diag(&qn)));
        let cas = max_abs(&(self.casimir_matrix() - Mat::identity(self.dim(), self.dim()) * self.casimir));
        [up, down, comm, cas]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Provenance {
    Pasep,
    Ssep,
    User,
}

/// The boundary operators `A` (right) and `A*` (left).
#[derive(Debug, Clone)]
pub struct BoundaryPair {
    pub a: Mat,
    pub a_star: Mat,
    pub provenance: Provenance,
}

impl BoundaryPair {
    pub fn new(a: Mat, a_star: Mat) -> Result<Self> {
        if !a.is_square() || a.shape() != a_star.shape() {
            return Err(Error::DimensionMismatch(format!(
                "boundary operators must be square of equal size, got {:?} and {:?}",
                a.shape(),
                a_star.shape()
            )));
        }
        Ok(BoundaryPair { a, a_star, provenance: Provenance::User })
    }
}

pub fn build_boundary_ops_pasep(rep: &UqSu2Rep, rates: &Rates, x0: f64) -> Result<BoundaryPair> {
    let q = rep.q;
    if !(q > 0.0 && q < 1.0) {
        return Err(Error::InvalidParameter(format!("boundary operators need 0 < q < 1, got {q}")));
    }
    let Rates { alpha, beta, gamma, delta } = *rates;
    let x1 = -x0;
    let r = libm::sqrt(1.0 - q);
    let sq = libm::sqrt(q);
    let (h, hi) = (rep.q_pow(0.5), rep.q_pow(-0.5));
    let a = &h * &rep.a_plus * (-x1 * beta / r)
        - &rep.a_minus * &h * (x0 * delta / r)
        - rep.q_pow(1.0) * ((x1 * beta * sq + x0 * delta) / (1.0 - q));
    let a_star = &hi * &rep.a_plus * (x0 * alpha / r)
        + &rep.a_minus * &hi * (x1 * gamma / r)
        + rep.q_pow(-1.0) * ((x0 * alpha / sq + x1 * gamma) / (1.0 - q));
    Ok(BoundaryPair { a, a_star, provenance: Provenance::Pasep })
}

/// `A = -x1 beta A+ - x0 delta A- - (x1 beta + x0 delta) N` and
/// `A* = x0 alpha A+ + x1 gamma A- + (x0 alpha + x1 gamma) N`.
pub fn build_boundary_ops_ssep(rep: &UqSu2Rep, rates: &Rates, x0: f64) -> Result<BoundaryPair> {
    if rep.q != 1.0 {
        return Err(Error::InvalidParameter(format!("symmetric boundary operators need q = 1, got {}", rep.q)));
    }
    let Rates { alpha, beta, gamma, delta } = *rates;
    let x1 = -x0;
    let a = &rep.a_plus * (-x1 * beta) - &rep.a_minus * (x0 * delta) - &rep.n * (x1 * beta + x0 * delta);
    let a_star = &rep.a_plus * (x0 * alpha) + &rep.a_minus * (x1 * gamma) + &rep.n * (x0 * alpha + x1 * gamma);
    Ok(BoundaryPair { a, a_star, provenance: Provenance::Ssep })
}

/// `B^R = beta D1 - delta D0 = A - x1 beta - x0 delta` and
/// `B^L = alpha D0 - gamma D1 = A* + x0 alpha + x1 gamma`.
pub fn ssep_boundary_operators(pair: &BoundaryPair, rates: &Rates, x0: f64) -> (Mat, Mat) {
    let x1 = -x0;
    let n = pair.a.nrows();
    let id = Mat::identity(n, n);
    let br = &pair.a - &id * (x1 * rates.beta + x0 * rates.delta);
    let bl = &pair.a_star + &id * (x0 * rates.alpha + x1 * rates.gamma);
    (br, bl)
}
