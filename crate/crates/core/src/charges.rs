//! Dolan-Grady charge hierarchy of the symmetric chain.
//!
//! For a pair obeying `[A,[A,[A,A*]]] = rho [A,A*]` and the dual relation
//! with `rho*`, the operators `R_{2n}`, `R~_{2n}` below generate commuting
//! charges `Q_{2n}` starting from `Q_0 = f A + f* A*`. The recursion needs
//! `rho = rho*`, so `A*` is rescaled by `sqrt(rho / rho*)` first (and `f*`
//! by the inverse) whenever both constants have the same sign.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::algebra::{
    build_boundary_ops_ssep, check_relations, ssep_boundary_operators, structure_constants, ConstantSource, Rates,
    RelationKind, RelationReport, TriPairScalars, UqSu2Rep,
};
use core::ops::{Div, Neg};

use nalgebra::{ClosedAddAssign, ClosedMulAssign, ClosedSubAssign, DMatrix, Scalar};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::linalg::{commutator, max_abs, Mat};
use crate::{Error, Result};

#[derive(Debug, Clone)]
pub struct ChargeSequence {
    pub f: f64,
    pub f_star: f64,
    /// `f A + f* A*`.
    pub h: Mat,
    pub r: Vec<Mat>,
    pub r_tilde: Vec<Mat>,
    pub q_charges: Vec<Mat>,
    pub rho: f64,
    pub rho_star: f64,
    /// Factor applied to `A*` before the recursion.
    pub scale: f64,
}

impl ChargeSequence {
    /// `|[Q_2m, Q_2n]|_inf / max(|Q_2m|, |Q_2n|)^2`.
    pub fn commutator_residual(&self, m: usize, n: usize) -> f64 {
        let (x, y) = (&self.q_charges[m], &self.q_charges[n]);
        let s = max_abs(x).max(max_abs(y));
        if s == 0.0 {
            return 0.0;
        }
        max_abs(&commutator(x, y)) / (s * s)
    }

    /// Largest [`Self::commutator_residual`] over all pairs.
    pub fn max_commutator_residual(&self) -> f64 {
        let k = self.q_charges.len();
        let mut worst = 0.0f64;
        for m in 0..k {
            for n in m + 1..k {
                worst = worst.max(self.commutator_residual(m, n));
            }
        }
        worst
    }
}

pub fn charge_sequence(
    a: &Mat,
    a_star: &Mat,
    rho: f64,
    rho_star: f64,
    f: f64,
    f_star: f64,
    n_max: usize,
) -> Result<ChargeSequence> {
    if rho == 0.0 || rho_star == 0.0 {
        return Err(Error::Degenerate(
            "charge recursion divides by rho and rho*; it needs beta delta > 0 and alpha gamma > 0".into(),
        ));
    }
    if !a.is_square() || a.shape() != a_star.shape() {
        return Err(Error::DimensionMismatch(format!("A is {:?} and A* is {:?}", a.shape(), a_star.shape())));
    }
    let scale = if rho / rho_star > 0.0 { libm::sqrt(rho / rho_star) } else { 1.0 };
    let b = a_star * scale;
    let g = f_star / scale;
    let (r, r_tilde, q_charges) = recursion(a, &b, rho, rho_star * scale * scale, f, g, n_max);
    Ok(ChargeSequence { f, f_star, h: q_charges[0].clone(), r, r_tilde, q_charges, rho, rho_star, scale })
}

/// Any exact or floating field nalgebra can multiply over.
trait Field:
    Scalar + Zero + One + ClosedAddAssign + ClosedSubAssign + ClosedMulAssign + Div<Output = Self> + Neg<Output = Self>
{
}

impl<T> Field for T where
    T: Scalar + Zero + One + ClosedAddAssign + ClosedSubAssign + ClosedMulAssign + Div<Output = T> + Neg<Output = T>
{
}

type Mats<T> = Vec<DMatrix<T>>;

fn comm<T: Field>(x: &DMatrix<T>, y: &DMatrix<T>) -> DMatrix<T> {
    x * y - y * x
}

fn recursion<T: Field>(
    a: &DMatrix<T>,
    b: &DMatrix<T>,
    rho: T,
    rho_b: T,
    f: T,
    g: T,
    n_max: usize,
) -> (Mats<T>, Mats<T>, Mats<T>) {
    let two = T::one() + T::one();
    let (c, cb) = (-(two.clone() / rho), -(two / rho_b));
    let mut r = vec![a.clone()];
    let mut rt = vec![b.clone()];
    for n in 1..=n_max {
        let next = comm(a, &comm(b, &r[n - 1])) * c.clone() - &rt[n - 1];
        let next_t = comm(b, &comm(a, &rt[n - 1])) * cb.clone() - &r[n - 1];
        r.push(next);
        rt.push(next_t);
    }
    let mut q = vec![a * f.clone() + b * g.clone()];
    for n in 1..=n_max {
        q.push((&r[n] - &rt[n - 1]) * f.clone() + (&rt[n] - &r[n - 1]) * g.clone());
    }
    (r, rt, q)
}

fn exact(x: f64) -> Result<BigRational> {
    BigRational::from_float(x).ok_or_else(|| Error::InvalidParameter(format!("{x} is not finite")))
}

fn rounded(m: &DMatrix<BigRational>) -> Mat {
    m.map(|v| v.to_f64().unwrap_or(f64::NAN))
}

/// Charges of the boundary operators `B^R`, `B^L` of a spin-`j` module at
/// `q = 1`, with the constants the operators satisfy,
/// `rho = x0^2 (beta + delta)^2` and `rho* = x0^2 (alpha + gamma)^2`.
///
/// The forward recursion multiplies rounding errors by roughly `32 j^2`
/// per order, so the operators are built and the recursion is run in
/// exact rational arithmetic; only the results are rounded.
pub fn ssep_charge_sequence(
    rates: &Rates,
    rep: &UqSu2Rep,
    x0: f64,
    f: f64,
    f_star: f64,
    n_max: usize,
) -> Result<ChargeSequence> {
    if rep.q != 1.0 {
        return Err(Error::InvalidParameter(format!("symmetric boundary charges need q = 1, got {}", rep.q)));
    }
    let Rates { alpha, beta, gamma, delta } = *rates;
    let (al, be, ga, de, x) = (exact(alpha)?, exact(beta)?, exact(gamma)?, exact(delta)?, exact(x0)?);
    let (left, right) = (&al + &ga, &be + &de);
    if left.is_zero() || right.is_zero() || x.is_zero() {
        return Err(Error::Degenerate("charges need alpha + gamma, beta + delta and x0 nonzero".into()));
    }
    let n = rep.dim();
    let half_two_j = BigRational::new(BigInt::from(rep.two_j), BigInt::from(2));
    let weight = |i: usize| BigRational::from_integer(BigInt::from(i)) - &half_two_j;
    let mut h = vec![BigRational::zero()];
    for i in 0..n - 1 {
        let next = &h[i] + weight(i) * BigRational::from_integer(BigInt::from(2));
        h.push(next);
    }
    // x0 (u A+ - v A- + (u - v)(N + 1))
    let build = |u: &BigRational, v: &BigRational| {
        let diff = u - v;
        DMatrix::from_fn(n, n, |i, k| {
            let e = if i == k + 1 {
                u.clone()
            } else if k == i + 1 {
                -(v * &h[k])
            } else if i == k {
                &diff * (weight(i) + BigRational::one())
            } else {
                BigRational::zero()
            };
            &x * e
        })
    };
    let br = build(&be, &de);
    let bl = build(&al, &ga);
    let rho = &x * &x * &right * &right;
    let rho_star = &x * &x * &left * &left;
    let s = (&right / &left).abs();
    let (fq, gq) = (exact(f)?, exact(f_star)? / &s);
    let (r, rt, q) = recursion(&br, &(bl * s.clone()), rho.clone(), rho.clone(), fq, gq, n_max);
    let all = |v: &Mats<BigRational>| v.iter().map(rounded).collect::<Vec<_>>();
    let q_charges = all(&q);
    Ok(ChargeSequence {
        f,
        f_star,
        h: q_charges[0].clone(),
        r: all(&r),
        r_tilde: all(&rt),
        q_charges,
        rho: rho.to_f64().unwrap_or(f64::NAN),
        rho_star: rho_star.to_f64().unwrap_or(f64::NAN),
        scale: s.to_f64().unwrap_or(f64::NAN),
    })
}

/// Right and left boundary operators `B^R = beta D1 - delta D0` and
/// `B^L = alpha D0 - gamma D1` of a `q = 1` representation, with the
/// Dolan-Grady residuals for the given constants.
#[derive(Debug, Clone)]
pub struct BoundaryCharges {
    pub b_right: Mat,
    pub b_left: Mat,
    pub scalars: TriPairScalars,
    pub report: RelationReport,
}

pub fn ssep_boundary_charges(
    rates: &Rates,
    rep: &UqSu2Rep,
    x0: f64,
    source: ConstantSource,
) -> Result<BoundaryCharges> {
    let pair = build_boundary_ops_ssep(rep, rates, x0)?;
    let (b_right, b_left) = ssep_boundary_operators(&pair, rates, x0);
    let scalars = structure_constants(rates, rep.casimir, 1.0, x0, source)?;
    let report = check_relations(RelationKind::Dg38, &b_right, &b_left, &scalars, 1.0, false)?;
    Ok(BoundaryCharges { b_right, b_left, scalars, report })
}

/// Least-squares `rho` in `[A,[A,[A,A*]]] = rho [A,A*]`.
pub fn fit_dolan_grady_rho(a: &Mat, a_star: &Mat) -> Result<f64> {
    let c = commutator(a, a_star);
    let cc = c.dot(&c);
    if cc == 0.0 {
        return Err(Error::Degenerate("[A, A*] vanishes, rho is undetermined".into()));
    }
    let t = commutator(a, &commutator(a, &c));
    Ok(t.dot(&c) / cc)
}
