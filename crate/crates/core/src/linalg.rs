//! Small dense complex linear algebra on top of `nalgebra`.
//!
//! Everything here works on matrices of a few dozen rows at most: Runge-Kutta
//! coefficient matrices, companion matrices and BEM panel systems.

use nalgebra::linalg::Schur;
use nalgebra::{Complex, DMatrix, DVector};

use crate::error::{Error, Result};

pub type C64 = Complex<f64>;
pub type CMatrix = DMatrix<C64>;
pub type CVector = DVector<C64>;

pub const I: C64 = C64 { re: 0.0, im: 1.0 };

pub fn c(re: f64) -> C64 {
    C64::new(re, 0.0)
}

pub fn to_complex(m: &DMatrix<f64>) -> CMatrix {
    m.map(c)
}

/// Induced 1-norm (max column sum).
pub fn norm1(m: &CMatrix) -> f64 {
    m.column_iter()
        .map(|col| col.iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Inverse with a 1-norm condition estimate; fails above `max_condition`.
pub fn inverse_checked(m: &CMatrix, max_condition: f64) -> Result<CMatrix> {
    let inv = m.clone().lu().try_inverse().ok_or(Error::Singular {
        condition: f64::INFINITY,
    })?;
    let condition = norm1(m) * norm1(&inv);
    if !condition.is_finite() || condition > max_condition {
        return Err(Error::Singular { condition });
    }
    Ok(inv)
}

pub fn solve_checked(m: &CMatrix, rhs: &CVector, max_condition: f64) -> Result<CVector> {
    let inv = inverse_checked(m, max_condition)?;
    Ok(inv * rhs)
}

fn schur(m: &CMatrix) -> Result<(CMatrix, CMatrix)> {
    let n = m.nrows();
    if n == 0 {
        return Ok((CMatrix::zeros(0, 0), CMatrix::zeros(0, 0)));
    }
    let iters = 100 * n.max(10);
    if let Some(s) = Schur::try_new(m.clone(), f64::EPSILON, iters) {
        return Ok(s.unpack());
    }
    // The shifted QR iteration can stall on highly symmetric spectra; a complex
    // diagonal shift breaks the symmetry without changing the Schur vectors.
    let scale = max_abs(m).max(1.0);
    for k in 1..=3 {
        let shift = C64::new(0.37, 0.61) * (scale * k as f64);
        let shifted = m + CMatrix::identity(n, n) * shift;
        if let Some(s) = Schur::try_new(shifted, f64::EPSILON, iters) {
            let (q, t) = s.unpack();
            return Ok((q, t - CMatrix::identity(n, n) * shift));
        }
    }
    Err(Error::EigenFailure(n))
}

/// Eigenvalues of a general complex matrix (diagonal of the complex Schur form).
pub fn eigenvalues(m: &CMatrix) -> Result<Vec<C64>> {
    let (_, t) = schur(m)?;
    Ok((0..t.nrows()).map(|i| t[(i, i)]).collect())
}

#[derive(Debug, Clone)]
pub struct EigenDecomposition {
    pub values: Vec<C64>,
    /// Unit-norm eigenvectors stored column-wise.
    pub vectors: CMatrix,
    pub inverse: CMatrix,
    /// 1-norm condition number of `vectors`.
    pub condition: f64,
}

/// Full eigendecomposition `M = E diag(values) E^{-1}` for a diagonalizable matrix.
///
/// Eigenvectors come from back substitution on the triangular Schur factor.
pub fn eigen_decompose(m: &CMatrix) -> Result<EigenDecomposition> {
    let n = m.nrows();
    let (q, t) = schur(m)?;
    let scale = max_abs(&t).max(f64::MIN_POSITIVE);
    let tiny = f64::EPSILON * scale;
    let mut y = CMatrix::zeros(n, n);
    for k in 0..n {
        y[(k, k)] = c(1.0);
        let tkk = t[(k, k)];
        for j in (0..k).rev() {
            let mut acc = C64::new(0.0, 0.0);
            for i in j + 1..=k {
                acc += t[(j, i)] * y[(i, k)];
            }
            let mut d = t[(j, j)] - tkk;
            if d.norm() < tiny {
                d = c(tiny);
            }
            y[(j, k)] = -acc / d;
        }
    }
    let mut vectors = q * y;
    for mut col in vectors.column_iter_mut() {
        let nrm = col.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        col.iter_mut().for_each(|z| *z /= nrm);
    }
    let inverse = vectors
        .clone()
        .lu()
        .try_inverse()
        .ok_or(Error::IllConditionedEigenbasis {
            condition: f64::INFINITY,
        })?;
    let condition = norm1(&vectors) * norm1(&inverse);
    let values = (0..n).map(|i| t[(i, i)]).collect();
    Ok(EigenDecomposition {
        values,
        vectors,
        inverse,
        condition,
    })
}

/// Hausdorff distance between two finite point sets in the complex plane.
pub fn hausdorff(a: &[C64], b: &[C64]) -> f64 {
    if a.is_empty() && b.is_empty() {
        return 0.0;
    }
    if a.is_empty() || b.is_empty() {
        return f64::INFINITY;
    }
    let directed = |x: &[C64], y: &[C64]| {
        x.iter()
            .map(|p| {
                y.iter()
                    .map(|q| (p - q).norm())
                    .fold(f64::INFINITY, f64::min)
            })
            .fold(0.0, f64::max)
    };
    directed(a, b).max(directed(b, a))
}
