//! The open exclusion process: parameters, configurations, the exact
//! Markov generator and its stationary vector.

use alloc::collections::VecDeque;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use nalgebra::{DMatrix, DVector};

use crate::{Error, Result};

/// Default largest chain length accepted by [`build_generator`].
pub const DEFAULT_MAX_SITES: usize = 14;

/// Largest state-space dimension solved with a dense factorization.
pub const DENSE_LIMIT: usize = 256;

/// Rates of the open chain. Right hops have rate 1, left hops rate `q`.
/// At site 1 particles enter with rate `alpha` and leave with rate `gamma`;
/// at site `sites` they leave with rate `beta` and enter with rate `delta`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProcessParams {
    pub q: f64,
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub delta: f64,
    pub sites: usize,
}

impl ProcessParams {
    pub fn new(q: f64, alpha: f64, beta: f64, gamma: f64, delta: f64, sites: usize) -> Result<Self> {
        let p = ProcessParams { q, alpha, beta, gamma, delta, sites };
        p.validate()?;
        Ok(p)
    }

    /// Totally asymmetric chain with injection `alpha` and extraction `beta`.
    pub fn tasep(alpha: f64, beta: f64, sites: usize) -> Result<Self> {
        Self::new(0.0, alpha, beta, 0.0, 0.0, sites)
    }

    /// Symmetric chain (`q = 1`).
    pub fn ssep(alpha: f64, beta: f64, gamma: f64, delta: f64, sites: usize) -> Result<Self> {
        Self::new(1.0, alpha, beta, gamma, delta, sites)
    }

    pub fn validate(&self) -> Result<()> {
        let named =
            [("q", self.q), ("alpha", self.alpha), ("beta", self.beta), ("gamma", self.gamma), ("delta", self.delta)];
        for (name, v) in named {
            if !v.is_finite() || v < 0.0 {
                return Err(Error::InvalidParameter(format!("{name} must be finite and non-negative, got {v}")));
            }
        }
        if self.sites == 0 {
            return Err(Error::InvalidParameter("chain needs at least one site".into()));
        }
        Ok(())
    }

    /// Whether every configuration can reach every other one.
    ///
    /// With left hops (`q > 0`) particles move freely, so the chain is
    /// irreducible as soon as particles can both enter and leave. Without
    /// them site 1 can only be filled by injection there and site L only
    /// emptied by extraction there.
    pub fn is_irreducible(&self) -> bool {
        if self.sites == 1 || self.q > 0.0 {
            self.alpha + self.delta > 0.0 && self.beta + self.gamma > 0.0
        } else {
            self.alpha > 0.0 && self.beta > 0.0
        }
    }

    /// Particle-hole conjugation combined with left-right reversal, which
    /// maps the process onto itself with `(alpha, beta, gamma, delta)`
    /// replaced by `(beta, alpha, delta, gamma)`.
    pub fn conjugated(&self) -> Self {
        ProcessParams { alpha: self.beta, beta: self.alpha, gamma: self.delta, delta: self.gamma, ..*self }
    }

    /// Smallest strictly positive rate, used to scale burn-in times.
    pub fn min_positive_rate(&self) -> f64 {
        let mut m = 1.0f64;
        for r in [self.q, self.alpha, self.beta, self.gamma, self.delta] {
            if r > 0.0 {
                m = m.min(r);
            }
        }
        m
    }

    pub fn dim(&self) -> usize {
        1usize << self.sites
    }
}

/// Occupation numbers `s_1 ... s_L`. Site 1 is the most significant bit of
/// [`Configuration::index`], so the index order matches a tensor product
/// with site 1 as the leftmost factor.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Configuration {
    bits: u64,
    sites: usize,
}

impl Configuration {
    pub fn from_index(index: usize, sites: usize) -> Self {
        debug_assert!(sites <= 63 && index < (1usize << sites));
        Configuration { bits: index as u64, sites }
    }

    pub fn empty(sites: usize) -> Self {
        Configuration { bits: 0, sites }
    }

    pub fn full(sites: usize) -> Self {
        Configuration { bits: (1u64 << sites) - 1, sites }
    }

    pub fn from_occupancy(occ: &[bool]) -> Self {
        let mut c = Configuration::empty(occ.len());
        for (i, &o) in occ.iter().enumerate() {
            c.set(i + 1, o);
        }
        c
    }

    /// Parses a string of `0`/`1` characters, site 1 first.
    pub fn parse(s: &str) -> Result<Self> {
        let occ: Option<Vec<bool>> = s
            .chars()
            .map(|c| match c {
                '0' => Some(false),
                '1' => Some(true),
                _ => None,
            })
            .collect();
        match occ {
            Some(o) if !o.is_empty() => Ok(Self::from_occupancy(&o)),
            _ => Err(Error::InvalidParameter(format!("bad configuration `{s}`"))),
        }
    }

    pub fn index(&self) -> usize {
        self.bits as usize
    }

    pub fn sites(&self) -> usize {
        self.sites
    }

    fn mask(&self, site: usize) -> u64 {
        debug_assert!(site >= 1 && site <= self.sites);
        1u64 << (self.sites - site)
    }

    /// Occupancy of `site` (1-based).
    pub fn occupied(&self, site: usize) -> bool {
        self.bits & self.mask(site) != 0
    }

    pub fn set(&mut self, site: usize, value: bool) {
        let m = self.mask(site);
        if value {
            self.bits |= m;
        } else {
            self.bits &= !m;
        }
    }

    pub fn flip(&mut self, site: usize) {
        self.bits ^= self.mask(site);
    }

    pub fn particles(&self) -> u32 {
        self.bits.count_ones()
    }

    /// `s_i -> 1 - s_{L+1-i}`.
    pub fn conjugated(&self) -> Self {
        let mut out = Configuration::empty(self.sites);
        for i in 1..=self.sites {
            out.set(self.sites + 1 - i, !self.occupied(i));
        }
        out
    }
}

impl fmt::Display for Configuration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 1..=self.sites {
            f.write_str(if self.occupied(i) { "1" } else { "0" })?;
        }
        Ok(())
    }
}

/// Elementary transitions of the chain.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Event {
    /// 0 -> 1 at site 1, rate alpha.
    InjectLeft,
    /// 1 -> 0 at site 1, rate gamma.
    ExtractLeft,
    /// 1 -> 0 at site L, rate beta.
    ExtractRight,
    /// 0 -> 1 at site L, rate delta.
    InjectRight,
    /// Particle at site `i` moves to `i + 1`, rate 1.
    HopRight(usize),
    /// Particle at site `i + 1` moves to `i`, rate q.
    HopLeft(usize),
}

impl Event {
    pub fn apply(&self, c: &mut Configuration) {
        let l = c.sites();
        match *self {
            Event::InjectLeft | Event::ExtractLeft => c.flip(1),
            Event::InjectRight | Event::ExtractRight => c.flip(l),
            Event::HopRight(i) | Event::HopLeft(i) => {
                c.flip(i);
                c.flip(i + 1);
            }
        }
    }
}

/// Calls `f(event, rate)` for every event with a positive rate in `c`.
pub(crate) fn for_each_event(c: &Configuration, p: &ProcessParams, mut f: impl FnMut(Event, f64)) {
    let l = c.sites();
    if c.occupied(1) {
        if p.gamma > 0.0 {
            f(Event::ExtractLeft, p.gamma);
        }
    } else if p.alpha > 0.0 {
        f(Event::InjectLeft, p.alpha);
    }
    for i in 1..l {
        match (c.occupied(i), c.occupied(i + 1)) {
            (true, false) => f(Event::HopRight(i), 1.0),
            (false, true) if p.q > 0.0 => f(Event::HopLeft(i), p.q),
            _ => {}
        }
    }
    if c.occupied(l) {
        if p.beta > 0.0 {
            f(Event::ExtractRight, p.beta);
        }
    } else if p.delta > 0.0 {
        f(Event::InjectRight, p.delta);
    }
}

/// Sparse transition-rate matrix, stored by source configuration: column
/// `s` holds the rates `Gamma(s', s)` out of `s` followed by the diagonal.
#[derive(Debug, Clone)]
pub struct MarkovGenerator {
    params: ProcessParams,
    col_ptr: Vec<usize>,
    rows: Vec<usize>,
    values: Vec<f64>,
    diag: Vec<f64>,
}

impl MarkovGenerator {
    pub fn params(&self) -> &ProcessParams {
        &self.params
    }

    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    /// Off-diagonal entries `(target, rate)` of column `source`.
    pub fn column(&self, source: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let r = self.col_ptr[source]..self.col_ptr[source + 1];
        self.rows[r.clone()].iter().copied().zip(self.values[r].iter().copied())
    }

    pub fn diagonal(&self) -> &[f64] {
        &self.diag
    }

    pub fn off_diagonal_count(&self) -> usize {
        self.rows.len()
    }

    /// `Gamma(to, from)`.
    pub fn entry(&self, to: usize, from: usize) -> f64 {
        if to == from {
            return self.diag[from];
        }
        self.column(from).find(|&(t, _)| t == to).map_or(0.0, |(_, r)| r)
    }

    pub fn max_abs_entry(&self) -> f64 {
        self.diag.iter().chain(self.values.iter()).fold(0.0f64, |m, v| m.max(v.abs()))
    }

    /// `Gamma * p`.
    pub fn apply(&self, p: &[f64]) -> Vec<f64> {
        let mut out: Vec<f64> = self.diag.iter().zip(p).map(|(d, x)| d * x).collect();
        for (s, &x) in p.iter().enumerate() {
            if x == 0.0 {
                continue;
            }
            for (t, r) in self.column(s) {
                out[t] += r * x;
            }
        }
        out
    }

    pub fn column_sums(&self) -> Vec<f64> {
        (0..self.dim()).map(|s| self.diag[s] + self.column(s).map(|(_, r)| r).sum::<f64>()).collect()
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let n = self.dim();
        let mut m = DMatrix::zeros(n, n);
        for s in 0..n {
            m[(s, s)] = self.diag[s];
            for (t, r) in self.column(s) {
                m[(t, s)] += r;
            }
        }
        m
    }

    /// Strong connectivity of the transition graph.
    pub fn is_strongly_connected(&self) -> bool {
        let n = self.dim();
        let mut reverse: Vec<Vec<usize>> = vec![Vec::new(); n];
        for s in 0..n {
            for (t, _) in self.column(s) {
                reverse[t].push(s);
            }
        }
        let forward = |s: usize| self.column(s).map(|(t, _)| t).collect::<Vec<_>>();
        reaches_all(n, forward) && reaches_all(n, |s| reverse[s].clone())
    }
}

fn reaches_all(n: usize, next: impl Fn(usize) -> Vec<usize>) -> bool {
    let mut seen = vec![false; n];
    let mut queue = VecDeque::from([0usize]);
    seen[0] = true;
    let mut count = 1;
    while let Some(s) = queue.pop_front() {
        for t in next(s) {
            if !seen[t] {
                seen[t] = true;
                count += 1;
                queue.push_back(t);
            }
        }
    }
    count == n
}

/// Builds the generator with the default capacity cap.
pub fn build_generator(params: &ProcessParams) -> Result<MarkovGenerator> {
    build_generator_capped(params, DEFAULT_MAX_SITES)
}

pub fn build_generator_capped(params: &ProcessParams, cap: usize) -> Result<MarkovGenerator> {
    params.validate()?;
    if params.sites > cap || params.sites > 30 {
        return Err(Error::Capacity { sites: params.sites, cap });
    }
    let n = params.dim();
    let mut col_ptr = Vec::with_capacity(n + 1);
    let mut rows = Vec::new();
    let mut values = Vec::new();
    let mut diag = vec![0.0; n];
    col_ptr.push(0);
    for s in 0..n {
        let c = Configuration::from_index(s, params.sites);
        let start = rows.len();
        for_each_event(&c, params, |e, r| {
            let mut t = c;
            e.apply(&mut t);
            let t = t.index();
            // On a single site both boundaries act on the same bit.
            if let Some(k) = rows[start..].iter().position(|&x| x == t) {
                values[start + k] += r;
            } else {
                rows.push(t);
                values.push(r);
            }
            diag[s] -= r;
        });
        col_ptr.push(rows.len());
    }
    Ok(MarkovGenerator { params: *params, col_ptr, rows, values, diag })
}

/// Which solver produced a stationary vector.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolverKind {
    DenseLu,
    Gmres,
}

/// Normalized kernel vector of the generator.
#[derive(Debug, Clone)]
pub struct SteadyState {
    pub params: ProcessParams,
    pub probs: Vec<f64>,
    /// `max |Gamma p|`.
    pub residual: f64,
    pub solver: SolverKind,
    pub iterations: usize,
}

impl SteadyState {
    pub fn probability(&self, c: &Configuration) -> f64 {
        self.probs[c.index()]
    }
}

const CLIP: f64 = 1e-14;

/// Stationary distribution of an irreducible chain.
pub fn steady_state(generator: &MarkovGenerator) -> Result<SteadyState> {
    if !generator.is_strongly_connected() {
        return Err(Error::NonUniqueSteadyState(format!(
            "transition graph of {:?} is not strongly connected",
            generator.params
        )));
    }
    let n = generator.dim();
    let (mut p, solver, iterations) = if n <= DENSE_LIMIT {
        (dense_kernel(generator)?, SolverKind::DenseLu, 0)
    } else {
        let (p, it) = gmres_kernel(generator)?;
        (p, SolverKind::Gmres, it)
    };
    normalize(&mut p)?;
    if solver == SolverKind::Gmres {
        polish(generator, &mut p);
        normalize(&mut p)?;
    }
    let residual = generator.apply(&p).iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let bound = 1e-12 * generator.max_abs_entry();
    if !(residual <= bound) {
        return Err(Error::NonConvergent(format!("stationary residual {residual:e} above {bound:e}")));
    }
    Ok(SteadyState { params: generator.params, probs: p, residual, solver, iterations })
}

fn normalize(p: &mut [f64]) -> Result<()> {
    let total: f64 = p.iter().sum();
    if !(total.abs() > 0.0) || !total.is_finite() {
        return Err(Error::NonConvergent("kernel vector vanished".into()));
    }
    for (index, x) in p.iter_mut().enumerate() {
        *x /= total;
        if *x < 0.0 {
            if *x > -CLIP {
                *x = 0.0;
            } else {
                return Err(Error::NegativeProbability { index, value: *x });
            }
        }
    }
    let total: f64 = p.iter().sum();
    p.iter_mut().for_each(|x| *x /= total);
    Ok(())
}

/// Solves the generator system with its first row replaced by the
/// normalization condition.
fn dense_kernel(g: &MarkovGenerator) -> Result<Vec<f64>> {
    let n = g.dim();
    let mut m = g.to_dense();
    for j in 0..n {
        m[(0, j)] = 1.0;
    }
    let mut rhs = DVector::zeros(n);
    rhs[0] = 1.0;
    m.lu()
        .solve(&rhs)
        .map(|x| x.iter().copied().collect())
        .ok_or_else(|| Error::NonUniqueSteadyState("singular bordered generator".into()))
}

/// Same bordered system as [`dense_kernel`], solved by restarted GMRES
/// with a Jacobi right preconditioner.
fn gmres_kernel(g: &MarkovGenerator) -> Result<(Vec<f64>, usize)> {
    let n = g.dim();
    let apply = |x: &[f64]| -> Vec<f64> {
        let mut y = g.apply(x);
        y[0] = x.iter().sum();
        y
    };
    let mut precond: Vec<f64> = g.diagonal().iter().map(|d| 1.0 / d.abs().max(1e-300)).collect();
    precond[0] = 1.0;
    let mut b = vec![0.0; n];
    b[0] = 1.0;
    let x0 = vec![1.0 / n as f64; n];
    let (x, iters, rel) = gmres(apply, &precond, &b, x0, 60, 4000, 1e-14);
    if rel > 1e-10 {
        return Err(Error::NonConvergent(format!(
            "GMRES stalled at relative residual {rel:e} after {iters} iterations"
        )));
    }
    Ok((x, iters))
}

/// Uniformized power steps `p <- p + Gamma p / Lambda`.
fn polish(g: &MarkovGenerator, p: &mut [f64]) {
    let lambda = g.diagonal().iter().fold(0.0f64, |m, d| m.max(d.abs())) * 1.05;
    for _ in 0..3 {
        let gp = g.apply(p);
        for (x, d) in p.iter_mut().zip(gp) {
            *x += d / lambda;
        }
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm2(a: &[f64]) -> f64 {
    libm::sqrt(dot(a, a))
}

/// Right-preconditioned GMRES(m). Returns the solution, the iteration
/// count and the final relative residual.
fn gmres(
    apply: impl Fn(&[f64]) -> Vec<f64>,
    precond: &[f64],
    b: &[f64],
    mut x: Vec<f64>,
    restart: usize,
    max_iter: usize,
    tol: f64,
) -> (Vec<f64>, usize, f64) {
    let n = b.len();
    let bnorm = norm2(b).max(1e-300);
    let mut total = 0;
    loop {
        let ax = apply(&x);
        let r: Vec<f64> = b.iter().zip(&ax).map(|(bi, ai)| bi - ai).collect();
        let beta = norm2(&r);
        if beta / bnorm < tol || total >= max_iter {
            return (x, total, beta / bnorm);
        }
        let mut v: Vec<Vec<f64>> = vec![r.iter().map(|ri| ri / beta).collect()];
        let mut h = vec![vec![0.0; restart]; restart + 1];
        let mut cs = vec![0.0; restart];
        let mut sn = vec![0.0; restart];
        let mut e = vec![0.0; restart + 1];
        e[0] = beta;
        let mut k_used = 0;
        for k in 0..restart {
            total += 1;
            let z: Vec<f64> = v[k].iter().zip(precond).map(|(a, m)| a * m).collect();
            let mut w = apply(&z);
            for i in 0..=k {
                h[i][k] = dot(&w, &v[i]);
                for (wj, vj) in w.iter_mut().zip(&v[i]) {
                    *wj -= h[i][k] * vj;
                }
            }
            h[k + 1][k] = norm2(&w);
            for i in 0..k {
                let t = cs[i] * h[i][k] + sn[i] * h[i + 1][k];
                h[i + 1][k] = -sn[i] * h[i][k] + cs[i] * h[i + 1][k];
                h[i][k] = t;
            }
            let d = libm::sqrt(h[k][k] * h[k][k] + h[k + 1][k] * h[k + 1][k]);
            cs[k] = h[k][k] / d;
            sn[k] = h[k + 1][k] / d;
            let hk1 = h[k + 1][k];
            h[k][k] = cs[k] * h[k][k] + sn[k] * hk1;
            h[k + 1][k] = 0.0;
            e[k + 1] = -sn[k] * e[k];
            e[k] *= cs[k];
            k_used = k + 1;
            let converged = e[k + 1].abs() / bnorm < tol;
            if converged || hk1 == 0.0 || total >= max_iter {
                break;
            }
            v.push(w.iter().map(|wj| wj / hk1).collect());
        }
        let mut y = vec![0.0; k_used];
        for i in (0..k_used).rev() {
            let mut s = e[i];
            for j in i + 1..k_used {
                s -= h[i][j] * y[j];
            }
            y[i] = s / h[i][i];
        }
        let mut dx = vec![0.0; n];
        for (j, yj) in y.iter().enumerate() {
            for (d, vj) in dx.iter_mut().zip(&v[j]) {
                *d += yj * vj;
            }
        }
        for ((xi, d), m) in x.iter_mut().zip(dx).zip(precond) {
            *xi += d * m;
        }
    }
}

/// How an [`ObservableReport`] was produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Exact,
    Mpa,
    Kmc,
    SsepClosedForm,
}

impl Method {
    pub fn name(&self) -> &'static str {
        match self {
            Method::Exact => "exact",
            Method::Mpa => "mpa",
            Method::Kmc => "kmc",
            Method::SsepClosedForm => "ssep",
        }
    }
}

/// Stationary observables from any of the methods.
#[derive(Debug, Clone, PartialEq)]
pub struct ObservableReport {
    pub method: Method,
    pub params: ProcessParams,
    /// `Z_1 ... Z_L`, when the method produces them.
    pub partition_functions: Vec<f64>,
    pub current: f64,
    /// Left boundary, the `L - 1` bonds, right boundary (when available).
    pub currents: Vec<f64>,
    pub densities: Vec<f64>,
    pub probabilities: Option<Vec<f64>>,
    /// Solver residual, truncation error or statistical error, by method.
    pub error: f64,
}

impl ObservableReport {
    /// Largest difference between any two current measurements.
    pub fn current_spread(&self) -> f64 {
        let lo = self.currents.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = self.currents.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        if self.currents.is_empty() {
            0.0
        } else {
            hi - lo
        }
    }
}

/// Densities and all `L + 1` current measurements from a distribution
/// over configurations.
pub(crate) fn profile_from_probs(p: &ProcessParams, probs: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let l = p.sites;
    let mut dens = vec![0.0; l];
    let mut bond = vec![0.0; l.saturating_sub(1)];
    for (s, &w) in probs.iter().enumerate() {
        let c = Configuration::from_index(s, l);
        for i in 1..=l {
            if c.occupied(i) {
                dens[i - 1] += w;
            }
        }
        for i in 1..l {
            match (c.occupied(i), c.occupied(i + 1)) {
                (true, false) => bond[i - 1] += w,
                (false, true) => bond[i - 1] -= p.q * w,
                _ => {}
            }
        }
    }
    let mut currents = Vec::with_capacity(l + 1);
    currents.push(p.alpha * (1.0 - dens[0]) - p.gamma * dens[0]);
    currents.extend(bond);
    currents.push(p.beta * dens[l - 1] - p.delta * (1.0 - dens[l - 1]));
    (dens, currents)
}

/// Densities and currents of an exact stationary state. The reported
/// current is the mean of the `L + 1` measurements.
pub fn observables(ss: &SteadyState) -> ObservableReport {
    let (densities, currents) = profile_from_probs(&ss.params, &ss.probs);
    let current = currents.iter().sum::<f64>() / currents.len() as f64;
    ObservableReport {
        method: Method::Exact,
        params: ss.params,
        partition_functions: Vec::new(),
        current,
        currents,
        densities,
        probabilities: Some(ss.probs.clone()),
        error: ss.residual,
    }
}

/// Convenience: generator, stationary state and observables in one call.
pub fn exact_observables(params: &ProcessParams) -> Result<ObservableReport> {
    let g = build_generator(params)?;
    Ok(observables(&steady_state(&g)?))
}

pub(crate) fn describe(p: &ProcessParams) -> String {
    format!("q={} alpha={} beta={} gamma={} delta={} L={}", p.q, p.alpha, p.beta, p.gamma, p.delta, p.sites)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: &[f64], b: &[f64], tol: f64) -> bool {
        a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() < tol)
    }

    #[test]
    fn two_state_exchange() {
        let p = ProcessParams::tasep(1.0, 1.0, 1).unwrap();
        let g = build_generator(&p).unwrap();
        let d = g.to_dense();
        assert_eq!(d, DMatrix::from_row_slice(2, 2, &[-1.0, 1.0, 1.0, -1.0]));
        let ss = steady_state(&g).unwrap();
        assert!(close(&ss.probs, &[0.5, 0.5], 1e-15));
    }

    #[test]
    fn tasep_two_sites_transitions() {
        let p = ProcessParams::tasep(1.0, 1.0, 2).unwrap();
        let g = build_generator(&p).unwrap();
        assert_eq!(g.off_diagonal_count(), 5);
        let idx = |s: &str| Configuration::parse(s).unwrap().index();
        for (from, to) in [("00", "10"), ("01", "11"), ("01", "00"), ("11", "10"), ("10", "01")] {
            assert_eq!(g.entry(idx(to), idx(from)), 1.0, "{from}->{to}");
        }
        let ss = steady_state(&g).unwrap();
        let want = [0.2, 0.2, 0.4, 0.2];
        assert!(close(&ss.probs, &want, 1e-14), "{:?}", ss.probs);
        let obs = observables(&ss);
        assert!(close(&obs.densities, &[0.6, 0.4], 1e-14));
        assert!((obs.current - 0.4).abs() < 1e-14);
    }

    #[test]
    fn single_site_general_rates() {
        let (a, b, c, d) = (0.7, 1.3, 0.4, 0.25);
        let p = ProcessParams::new(0.5, a, b, c, d, 1).unwrap();
        let obs = exact_observables(&p).unwrap();
        assert!((obs.densities[0] - (a + d) / (a + b + c + d)).abs() < 1e-14);
        assert!((obs.current - (a * b - c * d) / (a + b + c + d)).abs() < 1e-14);
    }

    #[test]
    fn ssep_two_sites_linear_profile() {
        let p = ProcessParams::ssep(1.0, 1.0, 0.0, 0.0, 2).unwrap();
        let obs = exact_observables(&p).unwrap();
        assert!(close(&obs.densities, &[2.0 / 3.0, 1.0 / 3.0], 1e-14));
        assert!((obs.current - 1.0 / 3.0).abs() < 1e-14);
    }

    #[test]
    fn reducible_chain_is_rejected() {
        let p = ProcessParams::new(0.5, 0.0, 1.0, 0.3, 0.0, 3).unwrap();
        assert!(!p.is_irreducible());
        let g = build_generator(&p).unwrap();
        assert!(matches!(steady_state(&g), Err(Error::NonUniqueSteadyState(_))));
    }

    #[test]
    fn capacity_cap() {
        let p = ProcessParams::tasep(1.0, 1.0, 15).unwrap();
        assert!(matches!(build_generator(&p), Err(Error::Capacity { sites: 15, cap: 14 })));
    }

    #[test]
    fn invalid_rates() {
        assert!(ProcessParams::new(-0.1, 1.0, 1.0, 0.0, 0.0, 2).is_err());
        assert!(ProcessParams::new(0.5, f64::NAN, 1.0, 0.0, 0.0, 2).is_err());
        assert!(ProcessParams::new(0.5, 1.0, 1.0, 0.0, 0.0, 0).is_err());
    }

    #[test]
    fn gmres_path_matches_uniform_current() {
        let p = ProcessParams::new(0.4, 0.9, 0.6, 0.1, 0.2, 10).unwrap();
        let ss = steady_state(&build_generator(&p).unwrap()).unwrap();
        assert_eq!(ss.solver, SolverKind::Gmres);
        let obs = observables(&ss);
        assert!(obs.current_spread() < 1e-10, "spread {}", obs.current_spread());
    }

    #[test]
    fn configuration_text_round() {
        let c = Configuration::parse("0110").unwrap();
        assert_eq!(c.index(), 0b0110);
        assert!(c.occupied(2) && !c.occupied(1));
        assert_eq!(alloc::format!("{}", c.conjugated()), "1001");
        assert!(Configuration::parse("01x").is_err());
    }
}
