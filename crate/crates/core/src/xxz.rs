//! The generator as a non-Hermitian XXZ chain with boundary fields,
//! `Gamma = -sqrt(q) U_mu^{-1} H U_mu`.

use alloc::format;
use alloc::vec::Vec;

use nalgebra::{Complex, DMatrix};

use crate::linalg::{self, Mat};
use crate::process::{build_generator, ProcessParams};
use crate::{Error, Result};

/// Largest chain accepted by the dense spectral comparison.
pub const DENSE_DIAG_CAP: usize = 10;

/// Which spin state encodes an occupied site, and in which order sites
/// enter the tensor product.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BasisConvention {
    pub occupied_is_down: bool,
    pub reversed_sites: bool,
}

impl BasisConvention {
    pub const ALL: [BasisConvention; 4] = [
        BasisConvention { occupied_is_down: true, reversed_sites: false },
        BasisConvention { occupied_is_down: true, reversed_sites: true },
        BasisConvention { occupied_is_down: false, reversed_sites: false },
        BasisConvention { occupied_is_down: false, reversed_sites: true },
    ];

    /// Spin-basis index of a configuration index.
    pub fn spin_index(&self, config: usize, sites: usize) -> usize {
        let mut out = 0usize;
        for i in 0..sites {
            // bit for site i+1 in configuration order
            let occ = (config >> (sites - 1 - i)) & 1;
            let down = if self.occupied_is_down { occ } else { 1 - occ };
            let slot = if self.reversed_sites { i } else { sites - 1 - i };
            out |= down << slot;
        }
        out
    }
}

/// Spin-basis data. Basis vector 0 of each factor is spin up
/// (`sigma^z = +1`) and site 1 is the leftmost factor.
#[derive(Debug, Clone)]
pub struct XxzModel {
    pub params: ProcessParams,
    pub mu: f64,
    pub delta_q: f64,
    pub h: f64,
    pub b1: Mat,
    pub bl: Mat,
    /// Diagonal of `U_mu`.
    pub u_mu: Vec<f64>,
    pub hamiltonian: Mat,
}

fn sz() -> Mat {
    Mat::from_row_slice(2, 2, &[1.0, 0.0, 0.0, -1.0])
}

fn s_plus() -> Mat {
    Mat::from_row_slice(2, 2, &[0.0, 1.0, 0.0, 0.0])
}

fn s_minus() -> Mat {
    Mat::from_row_slice(2, 2, &[0.0, 0.0, 1.0, 0.0])
}

/// `op` acting on `site` (1-based) of an `sites`-fold product.
fn embed(op: &Mat, site: usize, sites: usize) -> Mat {
    let mut m = Mat::identity(1, 1);
    for k in 1..=sites {
        m = if k == site { linalg::kron(&m, op) } else { linalg::kron(&m, &Mat::identity(2, 2)) };
    }
    m
}

/// `Delta_q = -(q^{1/2} + q^{-1/2}) / 2`.
pub fn anisotropy(q: f64) -> f64 {
    -(libm::sqrt(q) + 1.0 / libm::sqrt(q)) / 2.0
}

/// `h = (q^{1/2} - q^{-1/2}) / 2`.
pub fn boundary_field(q: f64) -> f64 {
    (libm::sqrt(q) - 1.0 / libm::sqrt(q)) / 2.0
}

pub fn build_xxz(params: &ProcessParams, mu: f64) -> Result<XxzModel> {
    params.validate()?;
    let q = params.q;
    if q == 0.0 {
        return Err(Error::Unsupported("the spin-chain form needs q > 0".into()));
    }
    if mu == 0.0 || !mu.is_finite() {
        return Err(Error::InvalidParameter(format!("mu must be finite and nonzero, got {mu}")));
    }
    if params.sites > DENSE_DIAG_CAP {
        return Err(Error::Capacity { sites: params.sites, cap: DENSE_DIAG_CAP });
    }
    let l = params.sites;
    let n = 1usize << l;
    let rq = libm::sqrt(q);
    let (a, b, g, d) = (params.alpha, params.beta, params.gamma, params.delta);
    let delta_q = anisotropy(q);
    let h = boundary_field(q);

    let id2 = Mat::identity(2, 2);
    let b1 = (&id2 * (a + g) + sz() * (a - g) - s_minus() * (2.0 * a * mu) - s_plus() * (2.0 * g / mu)) / (2.0 * rq);
    let ql = libm::pow(q, (l as f64 - 1.0) / 2.0);
    let bl = (&id2 * (b + d) - sz() * (b - d) - s_minus() * (2.0 * d * mu * ql) - s_plus() * (2.0 * b / (mu * ql)))
        / (2.0 * rq);

    let mut ham = DMatrix::zeros(n, n);
    let zs: Vec<Mat> = (1..=l).map(|i| embed(&sz(), i, l)).collect();
    let ps: Vec<Mat> = (1..=l).map(|i| embed(&s_plus(), i, l)).collect();
    let ms: Vec<Mat> = (1..=l).map(|i| embed(&s_minus(), i, l)).collect();
    for i in 0..l.saturating_sub(1) {
        // sigma^x sigma^x + sigma^y sigma^y = 2 (sigma^+ sigma^- + sigma^- sigma^+)
        let hop = (&ps[i] * &ms[i + 1] + &ms[i] * &ps[i + 1]) * 2.0;
        let term = hop - &zs[i] * &zs[i + 1] * delta_q + (&zs[i + 1] - &zs[i]) * h + Mat::identity(n, n) * delta_q;
        ham -= term * 0.5;
    }
    ham += embed(&b1, 1, l) + embed(&bl, l, l);

    let mut u_mu = alloc::vec![1.0; n];
    for (s, u) in u_mu.iter_mut().enumerate() {
        for i in 1..=l {
            if (s >> (l - i)) & 1 == 1 {
                *u *= mu * libm::pow(rq, i as f64 - 1.0);
            }
        }
    }
    Ok(XxzModel { params: *params, mu, delta_q, h, b1, bl, u_mu, hamiltonian: ham })
}

impl XxzModel {
    /// `-sqrt(q) U^{-1} H U` in the spin basis.
    pub fn similar_generator(&self) -> Mat {
        let rq = libm::sqrt(self.params.q);
        let n = self.u_mu.len();
        Mat::from_fn(n, n, |i, j| -rq * self.hamiltonian[(i, j)] * self.u_mu[j] / self.u_mu[i])
    }

    /// Spectrum of `-sqrt(q) H`.
    pub fn spectrum(&self) -> Vec<Complex<f64>> {
        linalg::sorted_spectrum(&(&self.hamiltonian * -libm::sqrt(self.params.q)))
    }
}

/// Outcome of comparing the generator with the spin chain.
#[derive(Debug, Clone)]
pub struct SimilarityReport {
    pub residual: f64,
    pub convention: BasisConvention,
    /// Residual under each of [`BasisConvention::ALL`].
    pub residuals: [f64; 4],
    pub generator_spectrum: Vec<Complex<f64>>,
    pub hamiltonian_spectrum: Vec<Complex<f64>>,
    pub spectrum_distance: f64,
}

/// `max |Gamma + sqrt(q) U^{-1} H U|` under the best of the four basis
/// conventions, together with both spectra.
pub fn similarity_residual(params: &ProcessParams, mu: f64) -> Result<SimilarityReport> {
    let model = build_xxz(params, mu)?;
    let gamma = build_generator(params)?.to_dense();
    let m = model.similar_generator();
    let n = gamma.nrows();
    let l = params.sites;
    let mut residuals = [0.0; 4];
    for (k, conv) in BasisConvention::ALL.iter().enumerate() {
        let map: Vec<usize> = (0..n).map(|s| conv.spin_index(s, l)).collect();
        let mut worst = 0.0f64;
        for s in 0..n {
            for t in 0..n {
                worst = worst.max((gamma[(t, s)] - m[(map[t], map[s])]).abs());
            }
        }
        residuals[k] = worst;
    }
    let best = (0..4)
        .min_by(|&i, &j| residuals[i].partial_cmp(&residuals[j]).unwrap_or(core::cmp::Ordering::Equal))
        .unwrap_or(0);
    let generator_spectrum = linalg::sorted_spectrum(&gamma);
    let hamiltonian_spectrum = model.spectrum();
    let spectrum_distance = linalg::spectrum_distance(&generator_spectrum, &hamiltonian_spectrum);
    Ok(SimilarityReport {
        residual: residuals[best],
        convention: BasisConvention::ALL[best],
        residuals,
        generator_spectrum,
        hamiltonian_spectrum,
        spectrum_distance,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn anisotropy_values() {
        assert_eq!(anisotropy(1.0), -1.0);
        assert_eq!(boundary_field(1.0), 0.0);
        assert!((anisotropy(0.25) + 1.25).abs() < 1e-15);
        assert!((boundary_field(0.25) + 0.75).abs() < 1e-15);
    }

    #[test]
    fn two_sites_similarity() {
        let p = ProcessParams::new(0.5, 0.3, 0.4, 0.1, 0.2, 2).unwrap();
        let r = similarity_residual(&p, 1.0).unwrap();
        assert!(r.residual < 1e-12, "{:?}", r.residuals);
        assert_eq!(r.convention, BasisConvention { occupied_is_down: true, reversed_sites: false });
        assert!(r.spectrum_distance < 1e-10);
    }

    #[test]
    fn left_block_independent_of_length() {
        let a = build_xxz(&ProcessParams::new(0.5, 0.3, 0.4, 0.1, 0.2, 2).unwrap(), 1.5).unwrap();
        let b = build_xxz(&ProcessParams::new(0.5, 0.3, 0.4, 0.1, 0.2, 4).unwrap(), 1.5).unwrap();
        assert_eq!(a.b1, b.b1);
        assert!(linalg::max_abs(&(&a.bl - &b.bl)) > 1e-3);
    }

    #[test]
    fn zero_q_rejected() {
        let p = ProcessParams::tasep(1.0, 1.0, 2).unwrap();
        assert!(matches!(build_xxz(&p, 1.0), Err(Error::Unsupported(_))));
    }
}
