//! Exact evaluation of matrix-product weights by normal ordering.
//!
//! Every word in `D0`, `D1` reduces, through `D1 D0 = q D0 D1 + D0 + D1`,
//! to a combination of `D0^a D1^b` with non-negative coefficients. The
//! boundary conditions then fix `E(a, b) = <w|D0^a D1^b|v>` degree by
//! degree through an overdetermined linear system. No truncation is
//! involved, so this also works close to and at `q = 1`.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector};

use crate::process::ProcessParams;
use crate::{Error, Result};

/// Polynomial in normal-ordered monomials: `coef[a][b]` multiplies
/// `D0^a D1^b`.
#[derive(Debug, Clone, PartialEq)]
pub struct NormalPoly {
    coef: Vec<Vec<f64>>,
}

impl NormalPoly {
    fn zero(max: usize) -> Self {
        NormalPoly { coef: vec![vec![0.0; max + 1]; max + 1] }
    }

    fn one(max: usize) -> Self {
        let mut p = Self::zero(max);
        p.coef[0][0] = 1.0;
        p
    }

    pub fn coefficient(&self, a: usize, b: usize) -> f64 {
        self.coef[a][b]
    }
}

/// Normal-ordering tables and the boundary expectation values up to a
/// maximal word length.
#[derive(Debug, Clone)]
pub struct NormalOrdering {
    q: f64,
    max: usize,
    /// `D1^b D0 = sum_j u[b][j] D0 D1^j + t[b][j] D1^j`.
    u: Vec<Vec<f64>>,
    t: Vec<Vec<f64>>,
    /// `D1 D0^k = sum_j r[k][j] D0^j D1 + p[k][j] D0^j`.
    r: Vec<Vec<f64>>,
    p: Vec<Vec<f64>>,
    /// `E(a, b)`, normalized by `<w|v> = 1`.
    e: Vec<Vec<f64>>,
    /// Largest relative least-squares residual of the boundary systems.
    pub consistency: f64,
}

impl NormalOrdering {
    pub fn new(params: &ProcessParams, max: usize) -> Result<Self> {
        params.validate()?;
        let ProcessParams { q, alpha, beta, gamma, delta, .. } = *params;
        if alpha <= 0.0 || beta <= 0.0 {
            return Err(Error::Degenerate(
                "matrix-product weights need alpha > 0 and beta > 0; use the exact solver".into(),
            ));
        }
        let n1 = max + 1;
        let mut u = vec![vec![0.0; n1]; n1];
        let mut t = vec![vec![0.0; n1]; n1];
        u[0][0] = 1.0;
        for b in 1..n1 {
            // D1^b D0 = q (D1^{b-1} D0) D1 + D1^{b-1} D0 + D1^b
            for j in 0..b {
                u[b][j + 1] += q * u[b - 1][j];
                t[b][j + 1] += q * t[b - 1][j];
                u[b][j] += u[b - 1][j];
                t[b][j] += t[b - 1][j];
            }
            t[b][b] += 1.0;
        }
        let mut r = vec![vec![0.0; n1]; n1];
        let mut p = vec![vec![0.0; n1]; n1];
        r[0][0] = 1.0;
        for k in 1..n1 {
            // D1 D0^k = q D0 (D1 D0^{k-1}) + D1 D0^{k-1} + D0^k
            for j in 0..k {
                r[k][j + 1] += q * r[k - 1][j];
                p[k][j + 1] += q * p[k - 1][j];
                r[k][j] += r[k - 1][j];
                p[k][j] += p[k - 1][j];
            }
            p[k][k] += 1.0;
        }
        let mut me = NormalOrdering { q, max, u, t, r, p, e: vec![vec![0.0; n1]; n1], consistency: 0.0 };
        me.e[0][0] = 1.0;
        for n in 1..=max {
            me.solve_degree(n, alpha, beta, gamma, delta)?;
        }
        Ok(me)
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    pub fn max_length(&self) -> usize {
        self.max
    }

    /// `<w|D0^a D1^b|v>`.
    pub fn expectation(&self, a: usize, b: usize) -> f64 {
        self.e[a][b]
    }

    fn solve_degree(&mut self, n: usize, alpha: f64, beta: f64, gamma: f64, delta: f64) -> Result<()> {
        let mut rows: Vec<Vec<f64>> = Vec::new();
        let mut rhs: Vec<f64> = Vec::new();
        for a in 0..=n {
            let b = n - a;
            if b >= 1 {
                // beta E(a,b) - delta <w|D0^a D1^{b-1} D0|v> = E(a, b-1)
                let mut row = vec![0.0; n + 1];
                row[a] += beta;
                let mut k = self.e[a][b - 1];
                for j in 0..b {
                    let (uu, tt) = (self.u[b - 1][j], self.t[b - 1][j]);
                    if a + 1 + j == n {
                        row[a + 1] -= delta * uu;
                    } else {
                        k += delta * uu * self.e[a + 1][j];
                    }
                    k += delta * tt * self.e[a][j];
                }
                rows.push(row);
                rhs.push(k);
            }
            if a >= 1 {
                // alpha E(a,b) - gamma <w|D1 D0^{a-1} D1^b|v> = E(a-1, b)
                let mut row = vec![0.0; n + 1];
                row[a] += alpha;
                let mut k = self.e[a - 1][b];
                for j in 0..a {
                    let (rr, pp) = (self.r[a - 1][j], self.p[a - 1][j]);
                    if j + b + 1 == n {
                        row[j] -= gamma * rr;
                    } else {
                        k += gamma * rr * self.e[j][b + 1];
                    }
                    k += gamma * pp * self.e[j][b];
                }
                rows.push(row);
                rhs.push(k);
            }
        }
        let m = DMatrix::from_fn(rows.len(), n + 1, |i, j| rows[i][j]);
        let y = DVector::from_vec(rhs);
        let qr = m.clone().qr();
        let r = qr.r();
        let diag = r.diagonal().map(f64::abs);
        let (dmax, dmin) = (diag.max(), diag.min());
        if !(dmin > 1e-12 * dmax) {
            return Err(Error::Degenerate(format!(
                "boundary system of degree {n} is rank deficient (zero stationary current?)"
            )));
        }
        let x = r
            .solve_upper_triangular(&(qr.q().transpose() * &y))
            .ok_or_else(|| Error::Degenerate(format!("boundary system of degree {n} is singular")))?;
        let smax = m.norm();
        let resid = (&m * &x - &y).amax() / y.amax().max(x.amax() * smax).max(1e-300);
        if !resid.is_finite() || resid > 1e-8 {
            return Err(Error::Degenerate(format!(
                "boundary conditions inconsistent at degree {n} (relative residual {resid:e})"
            )));
        }
        self.consistency = self.consistency.max(resid);
        for a in 0..=n {
            self.e[a][n - a] = x[a];
        }
        Ok(())
    }

    fn times_d1(&self, p: &NormalPoly) -> NormalPoly {
        let mut out = NormalPoly::zero(self.max);
        for a in 0..=self.max {
            for b in 0..self.max - a {
                out.coef[a][b + 1] += p.coef[a][b];
            }
        }
        out
    }

    fn times_d0(&self, p: &NormalPoly) -> NormalPoly {
        let mut out = NormalPoly::zero(self.max);
        for a in 0..self.max {
            for b in 0..self.max - a {
                let c = p.coef[a][b];
                if c == 0.0 {
                    continue;
                }
                for j in 0..=b {
                    out.coef[a + 1][j] += c * self.u[b][j];
                    out.coef[a][j] += c * self.t[b][j];
                }
            }
        }
        out
    }

    /// Right multiplication by `D_bit`.
    pub fn times(&self, p: &NormalPoly, occupied: bool) -> NormalPoly {
        if occupied {
            self.times_d1(p)
        } else {
            self.times_d0(p)
        }
    }

    pub fn identity(&self) -> NormalPoly {
        NormalPoly::one(self.max)
    }

    /// `<w| p |v>`.
    pub fn evaluate(&self, p: &NormalPoly) -> f64 {
        let mut s = 0.0;
        for a in 0..=self.max {
            for b in 0..=self.max - a {
                s += p.coef[a][b] * self.e[a][b];
            }
        }
        s
    }

    fn times_c(&self, p: &NormalPoly) -> NormalPoly {
        let mut x = self.times_d0(p);
        let y = self.times_d1(p);
        for (rx, ry) in x.coef.iter_mut().zip(&y.coef) {
            for (a, b) in rx.iter_mut().zip(ry) {
                *a += b;
            }
        }
        x
    }

    /// `Z_0 ... Z_max` with `Z_k = <w|(D0 + D1)^k|v>`.
    pub fn partition_functions(&self) -> Vec<f64> {
        let mut p = self.identity();
        let mut z = vec![self.evaluate(&p)];
        for _ in 0..self.max {
            p = self.times_c(&p);
            z.push(self.evaluate(&p));
        }
        z
    }

    /// Unnormalized weight of a word, `s[0]` being site 1.
    pub fn weight(&self, word: &[bool]) -> f64 {
        let mut p = self.identity();
        for &s in word {
            p = self.times(&p, s);
        }
        self.evaluate(&p)
    }

    /// Weights of all `2^L` configurations in configuration-index order.
    pub fn all_weights(&self, sites: usize) -> Vec<f64> {
        let mut out = vec![0.0; 1 << sites];
        self.fill(&self.identity(), 0, sites, 0, &mut out);
        out
    }

    fn fill(&self, prefix: &NormalPoly, depth: usize, sites: usize, index: usize, out: &mut [f64]) {
        if depth == sites {
            out[index] = self.evaluate(prefix);
            return;
        }
        for bit in [false, true] {
            let next = self.times(prefix, bit);
            self.fill(&next, depth + 1, sites, (index << 1) | bit as usize, out);
        }
    }

    /// `<w|C^{i-1} D1 C^{L-i}|v>` for `i = 1..=L`.
    pub fn density_weights(&self, sites: usize) -> Vec<f64> {
        let mut left = self.identity();
        let mut out = Vec::with_capacity(sites);
        for i in 1..=sites {
            let mut p = self.times_d1(&left);
            for _ in i..sites {
                p = self.times_c(&p);
            }
            out.push(self.evaluate(&p));
            left = self.times_c(&left);
        }
        out
    }
}
