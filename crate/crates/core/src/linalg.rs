//! Small dense helpers shared by the verifiers.

use alloc::vec::Vec;
use nalgebra::{Complex, DMatrix};

pub type Mat = DMatrix<f64>;

pub fn commutator(x: &Mat, y: &Mat) -> Mat {
    x * y - y * x
}

pub fn anticommutator(x: &Mat, y: &Mat) -> Mat {
    x * y + y * x
}

/// `[X, Y]_q = q^{1/2} XY - q^{-1/2} YX`.
pub fn q_commutator(x: &Mat, y: &Mat, q: f64) -> Mat {
    let r = libm::sqrt(q);
    x * y * r - y * x / r
}

/// Largest absolute entry.
pub fn max_abs(x: &Mat) -> f64 {
    x.iter().fold(0.0, |m, v| m.max(v.abs()))
}

/// Leading `(n - margin) x (n - margin)` block.
pub fn interior(x: &Mat, margin: usize) -> Mat {
    let n = x.nrows().saturating_sub(margin);
    let m = x.ncols().saturating_sub(margin);
    x.view((0, 0), (n, m)).into_owned()
}

pub fn kron(a: &Mat, b: &Mat) -> Mat {
    a.kronecker(b)
}

pub fn diag(values: &[f64]) -> Mat {
    DMatrix::from_diagonal(&nalgebra::DVector::from_row_slice(values))
}

/// Eigenvalues of a general real matrix.
pub fn eigenvalues(x: &Mat) -> Vec<Complex<f64>> {
    x.complex_eigenvalues().iter().copied().collect()
}

/// Eigenvalues sorted by real part, then imaginary part.
pub fn sorted_spectrum(x: &Mat) -> Vec<Complex<f64>> {
    let mut ev = eigenvalues(x);
    ev.sort_by(|a, b| {
        a.re.partial_cmp(&b.re)
            .unwrap_or(core::cmp::Ordering::Equal)
            .then(a.im.partial_cmp(&b.im).unwrap_or(core::cmp::Ordering::Equal))
    });
    ev
}

/// Distance between two spectra as multisets: greedy nearest matching,
/// returning the largest matched gap. Unequal lengths give infinity.
pub fn spectrum_distance(a: &[Complex<f64>], b: &[Complex<f64>]) -> f64 {
    if a.len() != b.len() {
        return f64::INFINITY;
    }
    let mut used = alloc::vec![false; b.len()];
    let mut worst = 0.0f64;
    for x in a {
        let mut best = f64::INFINITY;
        let mut at = 0;
        for (k, y) in b.iter().enumerate() {
            if used[k] {
                continue;
            }
            let d = (x - y).norm();
            if d < best {
                best = d;
                at = k;
            }
        }
        used[at] = true;
        worst = worst.max(best);
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn q_commutator_of_equal_arguments() {
        let x = Mat::from_row_slice(2, 2, &[1.0, 2.0, -0.5, 3.0]);
        let q: f64 = 0.3;
        let lhs = q_commutator(&x, &x, q);
        let rhs = &x * &x * (libm::sqrt(q) - 1.0 / libm::sqrt(q));
        assert!(max_abs(&(lhs - rhs)) < 1e-14);
    }

    #[test]
    fn q_commutator_reduces_at_unit_q() {
        let x = Mat::from_row_slice(2, 2, &[1.0, 2.0, -0.5, 3.0]);
        let y = Mat::from_row_slice(2, 2, &[0.0, 1.0, 4.0, -1.0]);
        assert!(max_abs(&(q_commutator(&x, &y, 1.0) - commutator(&x, &y))) < 1e-14);
        let d1 = diag(&[1.0, 2.0]);
        let d2 = diag(&[-3.0, 0.5]);
        assert_eq!(max_abs(&q_commutator(&d1, &d2, 1.0)), 0.0);
        let q: f64 = 0.7;
        let swapped = -(&y * &x / libm::sqrt(q) - &x * &y * libm::sqrt(q));
        assert!(max_abs(&(q_commutator(&x, &y, q) - swapped)) < 1e-14);
    }

    #[test]
    fn spectrum_distance_ignores_order() {
        let a = [Complex::new(1.0, 0.0), Complex::new(-2.0, 1.0), Complex::new(-2.0, -1.0)];
        let b = [Complex::new(-2.0, -1.0), Complex::new(1.0, 0.0), Complex::new(-2.0, 1.0)];
        assert_eq!(spectrum_distance(&a, &b), 0.0);
    }
}
