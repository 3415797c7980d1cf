//! Matrix-product evaluation of stationary weights,
//! `P(s) = <w|D_{s_1} ... D_{s_L}|v> / Z_L`.
//!
//! The operators satisfy `D1 D0 - q D0 D1 = D0 + D1` with boundary
//! conditions `(beta D1 - delta D0)|v> = |v>` and
//! `<w|(alpha D0 - gamma D1) = <w|`. Two evaluators are provided: the
//! truncated q-oscillator representation ([`MpaRep`]) and exact normal
//! ordering ([`NormalOrdering`]), which stays usable as `q -> 1` where the
//! truncated boundary vectors overflow.

mod normal;
mod ssep;

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::linalg::Mat;
use crate::process::{profile_from_probs, Configuration, Method, ObservableReport, ProcessParams};
use crate::{Error, Result};

pub use normal::{NormalOrdering, NormalPoly};
pub use ssep::{ssep_closed_forms, SsepClosedForm};

/// The pair `(x0, x1)` with `x0 + x1 = 0` in
/// `D1 D0 - q D0 D1 = x0 D1 - x1 D0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Convention {
    pub x0: f64,
    pub x1: f64,
}

impl Convention {
    /// `x0 = 1`, `x1 = -1`: `D1 D0 - q D0 D1 = D0 + D1` with unit boundary
    /// eigenvalues. With this choice every current measurement equals
    /// `Z_{L-1} / Z_L`.
    pub const ADOPTED: Convention = Convention { x0: 1.0, x1: -1.0 };

    pub fn new(x0: f64) -> Self {
        Convention { x0, x1: -x0 }
    }
}

/// Superdiagonal `sqrt(1 - q^n)`, `n = 1..m-1`, of the q-oscillator.
fn oscillator_entries(q: f64, m: usize) -> Vec<f64> {
    (1..m).map(|n| libm::sqrt(1.0 - libm::pow(q, n as f64))).collect()
}

/// `D1 = (I + a) / (1 - q)` and `D0 = (I + a^T) / (1 - q)`, returned as
/// `(D0, D1)`.
pub fn build_q_oscillator_rep(q: f64, m: usize) -> Result<(Mat, Mat)> {
    if !(0.0..1.0).contains(&q) {
        return Err(Error::Unsupported(format!(
            "q-oscillator representation needs 0 <= q < 1, got {q}; use the closed forms at q = 1 and reflect_params for q > 1"
        )));
    }
    if m < 2 {
        return Err(Error::InvalidParameter(format!("truncation must be at least 2, got {m}")));
    }
    let s = oscillator_entries(q, m);
    let c = 1.0 / (1.0 - q);
    let d1 = Mat::from_fn(m, m, |i, j| {
        if i == j {
            c
        } else if j == i + 1 {
            c * s[i]
        } else {
            0.0
        }
    });
    Ok((d1.transpose(), d1))
}

const OVERFLOW: f64 = 1e250;

/// Boundary vectors `(w, v)` of length `m` from the three-term
/// recursions of the boundary conditions, normalized by `w_0 = v_0 = 1`.
pub fn boundary_vectors(params: &ProcessParams, m: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    params.validate()?;
    let ProcessParams { q, alpha, beta, gamma, delta, .. } = *params;
    if !(0.0..1.0).contains(&q) {
        return Err(Error::Unsupported(format!("boundary recursion needs 0 <= q < 1, got {q}")));
    }
    if alpha <= 0.0 || beta <= 0.0 {
        return Err(Error::Degenerate(
            "boundary recursion pivots on alpha and beta; use the exact solver when either vanishes".into(),
        ));
    }
    let s = oscillator_entries(q, m + 1);
    let recurse = |nu: f64, tau: f64| -> Result<Vec<f64>> {
        let mut x = vec![0.0; m];
        x[0] = 1.0;
        if tau == 0.0 {
            // geometric up to the q-factorial: x_n = r^n / sqrt((q;q)_n)
            let r = (1.0 - q - nu) / nu;
            for n in 1..m {
                x[n] = x[n - 1] * r / s[n - 1];
            }
        } else {
            for n in 0..m - 1 {
                let prev = if n > 0 { tau * s[n - 1] * x[n - 1] } else { 0.0 };
                x[n + 1] = ((1.0 - q - nu + tau) * x[n] + prev) / (nu * s[n]);
            }
        }
        if let Some(n) = x.iter().position(|v| !v.is_finite() || v.abs() > OVERFLOW) {
            return Err(Error::NonConvergent(format!(
                "boundary vector component {n} overflows at q={q}; outside the convergent regime of the truncated representation"
            )));
        }
        Ok(x)
    };
    Ok((recurse(alpha, gamma)?, recurse(beta, delta)?))
}

/// Truncated q-oscillator representation with its boundary vectors.
#[derive(Debug, Clone)]
pub struct MpaRep {
    pub q: f64,
    pub dim: usize,
    /// Superdiagonal of `a`.
    pub osc: Vec<f64>,
    pub w: Vec<f64>,
    pub v: Vec<f64>,
    pub convention: Convention,
}

impl MpaRep {
    pub fn new(params: &ProcessParams, m: usize) -> Result<Self> {
        if m < 2 {
            return Err(Error::InvalidParameter(format!("truncation must be at least 2, got {m}")));
        }
        let (w, v) = boundary_vectors(params, m)?;
        Ok(MpaRep { q: params.q, dim: m, osc: oscillator_entries(params.q, m), w, v, convention: Convention::ADOPTED })
    }

    pub fn d0(&self) -> Mat {
        build_q_oscillator_rep(self.q, self.dim).map(|p| p.0).unwrap_or_else(|_| Mat::zeros(0, 0))
    }

    pub fn d1(&self) -> Mat {
        build_q_oscillator_rep(self.q, self.dim).map(|p| p.1).unwrap_or_else(|_| Mat::zeros(0, 0))
    }

    /// `D_bit x`.
    pub fn apply(&self, occupied: bool, x: &[f64]) -> Vec<f64> {
        let c = 1.0 / (1.0 - self.q);
        let m = self.dim;
        (0..m)
            .map(|n| {
                let off = if occupied {
                    if n + 1 < m {
                        self.osc[n] * x[n + 1]
                    } else {
                        0.0
                    }
                } else if n > 0 {
                    self.osc[n - 1] * x[n - 1]
                } else {
                    0.0
                };
                c * (x[n] + off)
            })
            .collect()
    }

    fn apply_c(&self, x: &[f64]) -> Vec<f64> {
        let a = self.apply(false, x);
        let b = self.apply(true, x);
        a.iter().zip(b).map(|(p, q)| p + q).collect()
    }

    fn dot_w(&self, x: &[f64]) -> f64 {
        self.w.iter().zip(x).map(|(a, b)| a * b).sum()
    }

    /// `Z_0 ... Z_l`.
    pub fn partition_functions(&self, l: usize) -> Vec<f64> {
        let mut x = self.v.clone();
        let mut z = vec![self.dot_w(&x)];
        for _ in 0..l {
            x = self.apply_c(&x);
            z.push(self.dot_w(&x));
        }
        z
    }

    /// Unnormalized weight of `word`, `word[0]` being site 1.
    pub fn weight(&self, word: &[bool]) -> f64 {
        let mut x = self.v.clone();
        for &s in word.iter().rev() {
            x = self.apply(s, &x);
        }
        self.dot_w(&x)
    }

    /// Weights of all configurations in configuration-index order.
    pub fn all_weights(&self, sites: usize) -> Vec<f64> {
        (0..1usize << sites)
            .map(|s| {
                let c = Configuration::from_index(s, sites);
                let word: Vec<bool> = (1..=sites).map(|i| c.occupied(i)).collect();
                self.weight(&word)
            })
            .collect()
    }

    /// `<w|C^{i-1} D1 C^{L-i}|v>` for `i = 1..=L`.
    pub fn density_weights(&self, sites: usize) -> Vec<f64> {
        let mut right = vec![self.v.clone()];
        for _ in 1..sites {
            let next = self.apply_c(right.last().unwrap_or(&self.v));
            right.push(next);
        }
        (1..=sites)
            .map(|i| {
                let mut x = self.apply(true, &right[sites - i]);
                for _ in 1..i {
                    x = self.apply_c(&x);
                }
                self.dot_w(&x)
            })
            .collect()
    }

    /// Interior-block residual of the bulk relation, relative to the
    /// largest operand entry.
    pub fn bulk_residual(&self) -> f64 {
        let (d0, d1) = (self.d0(), self.d1());
        let lhs = &d1 * &d0 - &d0 * &d1 * self.q;
        let rhs = &d0 + &d1;
        let scale = crate::linalg::max_abs(&crate::linalg::interior(&(&d1 * &d0), 1));
        crate::linalg::max_abs(&crate::linalg::interior(&(lhs - rhs), 1)) / scale
    }

    /// Residuals of the two boundary conditions on the leading `M - 1`
    /// components, relative to the largest component involved.
    pub fn boundary_residuals(&self, params: &ProcessParams) -> (f64, f64) {
        let m = self.dim - 1;
        let d1v = self.apply(true, &self.v);
        let d0v = self.apply(false, &self.v);
        let rv =
            (0..m).map(|n| (params.beta * d1v[n] - params.delta * d0v[n] - self.v[n]).abs()).fold(0.0f64, f64::max);
        let sv = self.v[..m].iter().fold(1.0f64, |a, b| a.max(b.abs()));
        let (d0, d1) = (self.d0(), self.d1());
        let w = nalgebra::DVector::from_vec(self.w.clone());
        let wl = (d0.transpose() * &w) * params.alpha - (d1.transpose() * &w) * params.gamma;
        let rw = (0..m).map(|n| (wl[n] - self.w[n]).abs()).fold(0.0f64, f64::max);
        let sw = self.w[..m].iter().fold(1.0f64, |a, b| a.max(b.abs()));
        (rw / sw, rv / sv)
    }
}

/// Partition functions at a converged truncation.
#[derive(Debug, Clone, PartialEq)]
pub struct PartitionFunctions {
    /// `Z_0 ... Z_L`.
    pub z: Vec<f64>,
    /// Truncation at which the values were taken.
    pub dim: usize,
    /// Largest relative change of any `Z_k` in the last doubling.
    pub relative_error: f64,
    /// `(M, relative change)` for each doubling.
    pub history: Vec<(usize, f64)>,
}

impl PartitionFunctions {
    /// `Z_1 ... Z_L`.
    pub fn values(&self) -> &[f64] {
        &self.z[1..]
    }

    pub fn current(&self) -> f64 {
        let l = self.z.len() - 1;
        self.z[l - 1] / self.z[l]
    }
}

/// Default largest truncation.
pub const DEFAULT_M_MAX: usize = 4096;

/// Initial truncation `max(4L, 16)`.
pub fn initial_truncation(sites: usize) -> usize {
    (4 * sites).max(16)
}

fn relative_change(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| if *y == 0.0 { (x - y).abs() } else { ((x - y) / y).abs() }).fold(0.0f64, |m, v| {
        if v.is_nan() {
            f64::INFINITY
        } else {
            m.max(v)
        }
    })
}

/// `Z_k = <w|(D0 + D1)^k|v>` with the truncation doubled until the
/// relative change drops below `tol`.
pub fn partition_functions(params: &ProcessParams, tol: f64, m_max: usize) -> Result<PartitionFunctions> {
    Ok(converge(params, tol, m_max)?.1)
}

fn converge(params: &ProcessParams, tol: f64, m_max: usize) -> Result<(MpaRep, PartitionFunctions)> {
    let l = params.sites;
    let mut m = initial_truncation(l).min(m_max.max(2));
    let mut rep = MpaRep::new(params, m)?;
    let mut z = rep.partition_functions(l);
    let mut history = Vec::new();
    loop {
        let m2 = 2 * m;
        if m2 > m_max {
            let last = history.last().map_or(f64::NAN, |h: &(usize, f64)| h.1);
            return Err(Error::NonConvergent(format!(
                "partition functions not converged by M={m} (m_max {m_max}); last relative change {last:e}"
            )));
        }
        let rep2 = MpaRep::new(params, m2)?;
        let z2 = rep2.partition_functions(l);
        if z2.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonConvergent(format!("partition functions overflow at M={m2}")));
        }
        let err = relative_change(&z, &z2);
        history.push((m2, err));
        m = m2;
        rep = rep2;
        z = z2;
        if err < tol {
            return Ok((rep, PartitionFunctions { z, dim: m, relative_error: err, history }));
        }
    }
}

/// Choice of evaluator.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MpaMethod {
    /// Truncated q-oscillator representation only.
    Truncated,
    /// Normal ordering only.
    NormalOrdering,
    /// Truncated representation, falling back to normal ordering when the
    /// truncation does not converge or at `q = 1`.
    Auto,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MpaOptions {
    pub tol: f64,
    pub m_max: usize,
    pub method: MpaMethod,
    /// Per-configuration probabilities are produced up to this length.
    pub max_probability_sites: usize,
}

impl Default for MpaOptions {
    fn default() -> Self {
        MpaOptions { tol: 1e-12, m_max: DEFAULT_M_MAX, method: MpaMethod::Auto, max_probability_sites: 16 }
    }
}

impl MpaOptions {
    pub fn with_tol(tol: f64) -> Self {
        MpaOptions { tol, ..Default::default() }
    }
}

/// Parameters of the spatially mirrored chain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Reflected {
    pub params: ProcessParams,
    /// Site `i` of the mirror is site `L + 1 - i` of the original.
    pub sites_reversed: bool,
    /// Occupations are not complemented by this map.
    pub particles_flipped: bool,
    /// Mirror rates are the original ones divided by this factor.
    pub time_scale: f64,
}

/// Left-right reversal for `q > 1`: hops to the left become hops to the
/// right, and dividing every rate by `q` restores unit right-hop rate.
/// The new rates are `q' = 1/q`, `alpha' = delta/q`, `beta' = gamma/q`,
/// `gamma' = beta/q`, `delta' = alpha/q`.
pub fn reflect_params(params: &ProcessParams) -> Result<Reflected> {
    params.validate()?;
    if !(params.q > 1.0) {
        return Err(Error::InvalidParameter(format!("reflection is for q > 1, got {}", params.q)));
    }
    let q = params.q;
    Ok(Reflected {
        params: ProcessParams {
            q: 1.0 / q,
            alpha: params.delta / q,
            beta: params.gamma / q,
            gamma: params.beta / q,
            delta: params.alpha / q,
            sites: params.sites,
        },
        sites_reversed: true,
        particles_flipped: false,
        time_scale: q,
    })
}

/// Maps observables of the mirror back to the original chain.
pub fn unreflect(report: ObservableReport, original: &ProcessParams, mirror: &Reflected) -> ObservableReport {
    let l = original.sites;
    let mut densities = report.densities;
    densities.reverse();
    let s = mirror.time_scale;
    let mut currents: Vec<f64> = report.currents.iter().map(|j| -s * j).collect();
    currents.reverse();
    let probabilities = report.probabilities.map(|p| {
        let mut out = vec![0.0; p.len()];
        for (idx, w) in p.iter().enumerate() {
            let c = Configuration::from_index(idx, l);
            let mut r = Configuration::empty(l);
            for i in 1..=l {
                r.set(l + 1 - i, c.occupied(i));
            }
            out[r.index()] = *w;
        }
        out
    });
    ObservableReport { params: *original, current: -s * report.current, currents, densities, probabilities, ..report }
}

/// Stationary observables from the matrix-product weights.
pub fn mpa_observables(params: &ProcessParams, opts: &MpaOptions) -> Result<ObservableReport> {
    params.validate()?;
    if params.q > 1.0 {
        let mirror = reflect_params(params)?;
        let report = mpa_observables(&mirror.params, opts)?;
        return Ok(unreflect(report, params, &mirror));
    }
    let l = params.sites;
    let use_normal = match opts.method {
        MpaMethod::NormalOrdering => true,
        MpaMethod::Truncated => {
            if params.q >= 1.0 {
                return Err(Error::Unsupported(
                    "the truncated representation needs q < 1; use the closed forms or normal ordering".into(),
                ));
            }
            false
        }
        MpaMethod::Auto => params.q >= 1.0,
    };
    if !use_normal {
        match converge(params, opts.tol, opts.m_max) {
            Ok((rep, pf)) => {
                let z_l = pf.z[l];
                let probabilities = (l <= opts.max_probability_sites)
                    .then(|| rep.all_weights(l).iter().map(|w| w / z_l).collect::<Vec<f64>>());
                let densities = rep.density_weights(l).iter().map(|w| w / z_l).collect();
                return Ok(report(params, pf.z, densities, probabilities, pf.relative_error));
            }
            Err(e @ Error::NonConvergent(_)) if opts.method == MpaMethod::Truncated => return Err(e),
            Err(Error::NonConvergent(_)) => {}
            Err(e) => return Err(e),
        }
    }
    let no = NormalOrdering::new(params, l)?;
    let z = no.partition_functions();
    let z_l = z[l];
    let probabilities =
        (l <= opts.max_probability_sites).then(|| no.all_weights(l).iter().map(|w| w / z_l).collect::<Vec<f64>>());
    let densities = no.density_weights(l).iter().map(|w| w / z_l).collect();
    Ok(report(params, z, densities, probabilities, no.consistency))
}

fn report(
    params: &ProcessParams,
    z: Vec<f64>,
    densities: Vec<f64>,
    probabilities: Option<Vec<f64>>,
    error: f64,
) -> ObservableReport {
    let l = params.sites;
    let current = z[l - 1] / z[l];
    let currents = match &probabilities {
        Some(p) => profile_from_probs(params, p).1,
        None => Vec::new(),
    };
    ObservableReport {
        method: Method::Mpa,
        params: *params,
        partition_functions: z[1..].to_vec(),
        current,
        currents,
        densities,
        probabilities,
        error,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::max_abs;
    use crate::process::exact_observables;

    #[test]
    fn bidiagonal_at_zero_q() {
        let (d0, d1) = build_q_oscillator_rep(0.0, 4).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                let up = if i == j || j == i + 1 { 1.0 } else { 0.0 };
                let lo = if i == j || i == j + 1 { 1.0 } else { 0.0 };
                assert_eq!(d1[(i, j)], up);
                assert_eq!(d0[(i, j)], lo);
            }
        }
    }

    #[test]
    fn oscillator_entries_at_half() {
        let s = oscillator_entries(0.5, 3);
        assert!((s[0] - 0.5f64.sqrt()).abs() < 1e-15);
        assert!((s[1] - 0.75f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn interior_bulk_relation() {
        for q in [0.0, 0.3, 0.8] {
            let (d0, d1) = build_q_oscillator_rep(q, 12).unwrap();
            let r = &d1 * &d0 - &d0 * &d1 * q - &d0 - &d1;
            assert!(max_abs(&crate::linalg::interior(&r, 1)) < 1e-13);
        }
        assert!(build_q_oscillator_rep(1.0, 4).is_err());
    }

    #[test]
    fn tasep_boundary_vectors() {
        let p = ProcessParams::tasep(1.0, 1.0, 3).unwrap();
        let (w, v) = boundary_vectors(&p, 6).unwrap();
        assert_eq!(w, vec![1.0, 0.0, 0.0, 0.0, 0.0, 0.0]);
        assert_eq!(v, w);
        let p = ProcessParams::tasep(0.5, 0.5, 3).unwrap();
        let (w, v) = boundary_vectors(&p, 5).unwrap();
        assert_eq!(w, vec![1.0; 5]);
        assert_eq!(v, vec![1.0; 5]);
        let p = ProcessParams::tasep(0.4, 0.7, 3).unwrap();
        let (w, v) = boundary_vectors(&p, 5).unwrap();
        for n in 0..5 {
            assert!((w[n] - (0.6f64 / 0.4).powi(n as i32)).abs() < 1e-12);
            assert!((v[n] - (0.3f64 / 0.7).powi(n as i32)).abs() < 1e-12);
        }
        assert!(matches!(boundary_vectors(&ProcessParams::tasep(0.0, 1.0, 2).unwrap(), 4), Err(Error::Degenerate(_))));
    }

    #[test]
    fn residuals_of_general_rep() {
        let p = ProcessParams::new(0.4, 0.9, 0.7, 0.2, 0.3, 3).unwrap();
        let rep = MpaRep::new(&p, 24).unwrap();
        assert!(rep.bulk_residual() < 1e-13);
        let (rw, rv) = rep.boundary_residuals(&p);
        assert!(rw < 1e-12 && rv < 1e-12, "{rw} {rv}");
    }

    #[test]
    fn tasep_partition_ladder() {
        let p = ProcessParams::tasep(1.0, 1.0, 4).unwrap();
        let pf = partition_functions(&p, 1e-12, DEFAULT_M_MAX).unwrap();
        assert_eq!(pf.values(), &[2.0, 5.0, 14.0, 42.0]);
    }

    #[test]
    fn single_site_current() {
        let (a, b, c, d) = (0.9, 0.7, 0.2, 0.3);
        let p = ProcessParams::new(0.4, a, b, c, d, 1).unwrap();
        let pf = partition_functions(&p, 1e-13, DEFAULT_M_MAX).unwrap();
        assert!((pf.current() - (a * b - c * d) / (a + b + c + d)).abs() < 1e-10);
    }

    #[test]
    fn normal_ordering_matches_truncation() {
        let p = ProcessParams::new(0.5, 1.0, 0.7, 0.2, 0.1, 4).unwrap();
        let t = mpa_observables(&p, &MpaOptions { method: MpaMethod::Truncated, ..Default::default() }).unwrap();
        let n = mpa_observables(&p, &MpaOptions { method: MpaMethod::NormalOrdering, ..Default::default() }).unwrap();
        let tp = t.probabilities.unwrap();
        let np = n.probabilities.unwrap();
        assert!(tp.iter().zip(&np).all(|(x, y)| (x - y).abs() < 1e-12));
    }

    #[test]
    fn reflection_map() {
        let p = ProcessParams::new(2.0, 0.3, 0.4, 0.1, 0.2, 3).unwrap();
        let r = reflect_params(&p).unwrap();
        assert_eq!(r.params.q, 0.5);
        assert_eq!((r.params.alpha, r.params.beta, r.params.gamma, r.params.delta), (0.1, 0.05, 0.2, 0.15));
        let exact = exact_observables(&p).unwrap();
        let mirror = exact_observables(&r.params).unwrap();
        for i in 0..3 {
            assert!((exact.densities[i] - mirror.densities[2 - i]).abs() < 1e-12);
        }
        let via_mpa = mpa_observables(&p, &MpaOptions::default()).unwrap();
        assert!((via_mpa.current - exact.current).abs() < 1e-10);
        let ep = exact.probabilities.unwrap();
        let mp = via_mpa.probabilities.unwrap();
        assert!(ep.iter().zip(&mp).all(|(x, y)| (x - y).abs() < 1e-10));
        assert!(reflect_params(&ProcessParams::new(1.0, 0.3, 0.4, 0.1, 0.2, 3).unwrap()).is_err());
    }

    #[test]
    fn gauge_scaling_leaves_probabilities() {
        let p = ProcessParams::new(0.3, 0.8, 0.6, 0.1, 0.2, 3).unwrap();
        let rep = MpaRep::new(&p, 48).unwrap();
        let base = rep.all_weights(3);
        let zb: f64 = base.iter().sum();
        let w = nalgebra::DVector::from_vec(rep.w.clone());
        let v = nalgebra::DVector::from_vec(rep.v.clone());
        for c in [2.0, -1.0, 0.37] {
            let (d0, d1) = (rep.d0() * c, rep.d1() * c);
            let scaled: Vec<f64> = (0..8usize)
                .map(|s| {
                    let mut x = v.clone();
                    for bit in (0..3).map(|k| (s >> k) & 1 == 1) {
                        x = if bit { &d1 * x } else { &d0 * x };
                    }
                    w.dot(&x)
                })
                .collect();
            let zs: f64 = scaled.iter().sum();
            for (a, b) in base.iter().zip(&scaled) {
                assert!((a / zb - b / zs).abs() < 1e-13);
            }
        }
    }
}
