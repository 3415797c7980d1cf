use alloc::format;
use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector};

use super::rep::{BoundaryPair, Rates};
use crate::linalg::{max_abs, q_commutator, Mat};
use crate::{Error, Result};

/// Scalars of a tridiagonal pair and of the related relation families.
/// Every relation kind reads the subset it needs.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct TriPairScalars {
    pub beta_s: Option<f64>,
    pub gamma_s: Option<f64>,
    pub gamma_s_star: Option<f64>,
    pub rho: Option<f64>,
    pub rho_star: Option<f64>,
    pub omega: Option<f64>,
    pub eta: Option<f64>,
    pub eta_star: Option<f64>,
    pub k: Option<f64>,
    pub k_star: Option<f64>,
    pub t: Option<f64>,
    pub t_star: Option<f64>,
    pub c: Option<f64>,
    pub c_star: Option<f64>,
    pub e1: Option<f64>,
    pub e2: Option<f64>,
    pub c_tilde: Option<f64>,
    pub x0: Option<f64>,
}

impl TriPairScalars {
    /// Scalars of `A -> t A + c`, `A* -> t* A* + c*` for the
    /// Askey-Wilson form with fixed `beta_s`.
    pub fn affine(&self, t: f64, t_star: f64, c: f64, c_star: f64) -> Result<TriPairScalars> {
        let need = |v: Option<f64>, name: &'static str| v.ok_or(Error::MissingScalar { kind: "AW20", name });
        let b = need(self.beta_s, "beta")?;
        let g = need(self.gamma_s, "gamma")?;
        let gs = need(self.gamma_s_star, "gamma*")?;
        let rho = need(self.rho, "rho")?;
        let rhos = need(self.rho_star, "rho*")?;
        let om = need(self.omega, "omega")?;
        let eta = need(self.eta, "eta")?;
        let etas = need(self.eta_star, "eta*")?;
        let (ts, cs) = (t_star, c_star);
        let u = 2.0 - b;
        Ok(TriPairScalars {
            beta_s: Some(b),
            gamma_s: Some(g * t + u * c),
            gamma_s_star: Some(gs * ts + u * cs),
            rho: Some(rho * t * t - 2.0 * c * g * t - u * c * c),
            rho_star: Some(rhos * ts * ts - 2.0 * cs * gs * ts - u * cs * cs),
            omega: Some(om * t * ts - 2.0 * c * gs * ts - 2.0 * cs * g * t - 2.0 * u * c * cs),
            eta: Some(
                eta * t * t * ts + u * c * c * cs + c * c * gs * ts + 2.0 * c * cs * g * t
                    - c * om * t * ts
                    - cs * rho * t * t,
            ),
            eta_star: Some(
                etas * t * ts * ts + u * c * cs * cs + 2.0 * c * cs * gs * ts + cs * cs * g * t
                    - cs * om * t * ts
                    - c * rhos * ts * ts,
            ),
            t: Some(t),
            t_star: Some(t_star),
            c: Some(c),
            c_star: Some(c_star),
            ..*self
        })
    }
}

/// Which closed form to use for the boundary structure constants.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConstantSource {
    /// The constants as printed with the boundary relations.
    Printed,
    /// The constants the boundary operators actually satisfy.
    Derived,
}

/// Structure constants of the boundary pair. For `0 < q < 1` these are
/// `rho, rho*, omega, eta, eta*` of the deformed relations, which need the
/// Casimir value; at `q = 1` only `rho, rho*` of the Dolan-Grady form.
pub fn structure_constants(
    rates: &Rates,
    casimir: f64,
    q: f64,
    x0: f64,
    source: ConstantSource,
) -> Result<TriPairScalars> {
    let Rates { alpha: al, beta: be, gamma: ga, delta: de } = *rates;
    let x1 = -x0;
    if q == 1.0 {
        let (rho, rho_star) = match source {
            ConstantSource::Printed => (-x0 * x1 * be * de, -x0 * x1 * al * ga),
            ConstantSource::Derived => (x0 * x0 * (be + de) * (be + de), x0 * x0 * (al + ga) * (al + ga)),
        };
        return Ok(TriPairScalars {
            beta_s: Some(2.0),
            gamma_s: Some(0.0),
            gamma_s_star: Some(0.0),
            rho: Some(rho),
            rho_star: Some(rho_star),
            ..Default::default()
        });
    }
    if !(q > 0.0 && q < 1.0) {
        return Err(Error::InvalidParameter(format!("structure constants need 0 < q <= 1, got {q}")));
    }
    let r = libm::sqrt(q);
    let p = r + 1.0 / r;
    let s = r - 1.0 / r;
    let qq = casimir;
    let x2 = x0 * x0;
    let x3 = x2 * x0;
    let (rho, rho_star, omega, eta, eta_star) = match source {
        ConstantSource::Printed => (
            x2 * be * de / q * p * p,
            x2 * al * ga / q * p * p,
            -(x2 * (be - de) * (ga - al) - x2 * (be * ga + al * de) * s * qq),
            r * p * x3 * (be * de * (ga - al) * qq + (be - de) * (be * ga + al * de) / s),
            r * p * x3 * (al * ga * (be - de) * qq + (al - ga) * (al * de + be * ga) / s),
        ),
        ConstantSource::Derived => {
            let w = (1.0 - q) * (1.0 - q);
            (
                x2 * be * de * p * p * r / (1.0 - q),
                x2 * al * ga * p * p / (r * (1.0 - q)),
                x2 * (-(al * be + ga * de) / q
                    + be * ga / r
                    + al * de / (q * r)
                    + (1.0 - q) / q * (be * ga + al * de) * qq),
                x3 * (1.0 + q) * ((be - de / r) * (be * ga + al * de) / w + be * de * (al / r - ga) * qq / q),
                x3 * (1.0 + q) * ((al / q - ga / r) * (al * de + be * ga) / w + al * ga * (be - de / r) * qq / (q * r)),
            )
        }
    };
    Ok(TriPairScalars {
        rho: Some(rho),
        rho_star: Some(rho_star),
        omega: Some(omega),
        eta: Some(eta),
        eta_star: Some(eta_star),
        ..Default::default()
    })
}

/// Least-squares fit of `(rho, rho*, omega, eta, eta*)` from
/// `[[A, A*]_q, A]_q = -rho A* - omega A - eta` and
/// `[A*, [A, A*]_q]_q = -rho* A - omega A* - eta*`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConstantFit {
    pub scalars: TriPairScalars,
    /// Largest entry of the fit residual relative to the cube of the
    /// largest operand entry.
    pub residual: f64,
    pub rank: usize,
}

pub fn fit_structure_constants(pair: &BoundaryPair, q: f64) -> Result<ConstantFit> {
    let (a, s) = (&pair.a, &pair.a_star);
    let n = a.nrows();
    let c = q_commutator(a, s, q);
    let l1 = q_commutator(&c, a, q);
    let l2 = q_commutator(s, &c, q);
    let id = Mat::identity(n, n);
    let nn = n * n;
    let mut m = DMatrix::<f64>::zeros(2 * nn, 5);
    let mut y = DVector::<f64>::zeros(2 * nn);
    for k in 0..nn {
        let (i, j) = (k / n, k % n);
        m[(k, 0)] = -s[(i, j)];
        m[(k, 2)] = -a[(i, j)];
        m[(k, 3)] = -id[(i, j)];
        y[k] = l1[(i, j)];
        m[(nn + k, 1)] = -a[(i, j)];
        m[(nn + k, 2)] = -s[(i, j)];
        m[(nn + k, 4)] = -id[(i, j)];
        y[nn + k] = l2[(i, j)];
    }
    // unit columns, so the identity columns weigh as much as the operators
    let norms: Vec<f64> = (0..5).map(|k| m.column(k).norm()).collect();
    let mut ms = m.clone();
    for (k, &w) in norms.iter().enumerate() {
        if w > 0.0 {
            ms.column_mut(k).scale_mut(1.0 / w);
        }
    }
    let svd = ms.svd(true, true);
    let smax = svd.singular_values.max();
    let tol = 1e-12 * smax;
    let rank = svd.singular_values.iter().filter(|&&v| v > tol).count();
    if rank < 5 {
        return Err(Error::Degenerate(format!("structure constants are not determined (rank {rank} of 5)")));
    }
    let mut x = svd.solve(&y, tol).map_err(|e| Error::Degenerate(format!("{e}")))?;
    for (k, &w) in norms.iter().enumerate() {
        x[k] /= w;
    }
    let scale = max_abs(a).max(max_abs(s)).max(1e-300);
    let residual = (&m * &x - &y).amax() / (scale * scale * scale);
    let v: Vec<f64> = x.iter().copied().collect();
    Ok(ConstantFit {
        scalars: TriPairScalars {
            rho: Some(v[0]),
            rho_star: Some(v[1]),
            omega: Some(v[2]),
            eta: Some(v[3]),
            eta_star: Some(v[4]),
            ..Default::default()
        },
        residual,
        rank,
    })
}

/// Askey-Wilson scalars of the bulk pair `A = D1`, `A* = D0` built from
/// `x0` times the q-oscillator.
pub fn bulk_scalars(q: f64, x0: f64) -> TriPairScalars {
    let x1 = -x0;
    let r = libm::sqrt(q);
    let s = r - 1.0 / r;
    TriPairScalars {
        beta_s: Some(q + 1.0 / q),
        gamma_s: Some(-x1 * s / r),
        gamma_s_star: Some(x0 * s / r),
        rho: Some(x1 * x1 / q),
        rho_star: Some(x0 * x0 / q),
        omega: Some(-x0 * x1 / q),
        eta: Some(0.0),
        eta_star: Some(0.0),
        ..Default::default()
    }
}
