//! Laplace-domain symbols `K(s)` consumed by the convolution quadrature.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{CMatrix, C64};

/// Polynomial growth envelope `|K(s)| <= bound * |s|^mu` on `Re s >= sigma0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Growth {
    pub mu: f64,
    pub sigma0: f64,
    pub bound: f64,
}

/// An operator-valued analytic function on a right half-plane.
pub trait TransferFunction: Sync {
    /// Operator dimension (1 for scalar kernels).
    fn dim(&self) -> usize;

    fn growth(&self) -> Growth;

    /// Full operator value at `s`.
    fn eval(&self, s: C64) -> Result<CMatrix>;

    /// `K(s) x`. Implementations with a cheaper matrix-free path override this.
    fn apply(&self, s: C64, x: &[C64]) -> Result<Vec<C64>> {
        if x.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: x.len(),
            });
        }
        let k = self.eval(s)?;
        Ok((0..k.nrows())
            .map(|i| (0..k.ncols()).map(|j| k[(i, j)] * x[j]).sum())
            .collect())
    }

    /// True when `K(conj s) = conj K(s)`, i.e. the time-domain kernel is real.
    fn conjugate_symmetric(&self) -> bool {
        true
    }

    /// Rejects frequencies left of the analyticity abscissa.
    fn check_frequency(&self, s: C64) -> Result<()> {
        let sigma0 = self.growth().sigma0;
        if s.re < sigma0 || !s.re.is_finite() || !s.im.is_finite() {
            return Err(Error::OutsideHalfPlane { s, sigma0 });
        }
        Ok(())
    }
}

/// A scalar symbol given by a closure.
pub struct ScalarTransfer<F> {
    f: F,
    growth: Growth,
    real: bool,
}

impl<F> ScalarTransfer<F>
where
    F: Fn(C64) -> C64 + Sync,
{
    pub fn new(f: F, growth: Growth) -> Self {
        Self {
            f,
            growth,
            real: true,
        }
    }

    /// Marks a symbol without the conjugation symmetry.
    pub fn complex(mut self) -> Self {
        self.real = false;
        self
    }

    pub fn value(&self, s: C64) -> C64 {
        (self.f)(s)
    }
}

impl<F> TransferFunction for ScalarTransfer<F>
where
    F: Fn(C64) -> C64 + Sync,
{
    fn dim(&self) -> usize {
        1
    }

    fn growth(&self) -> Growth {
        self.growth
    }

    fn eval(&self, s: C64) -> Result<CMatrix> {
        Ok(CMatrix::from_element(1, 1, (self.f)(s)))
    }

    fn apply(&self, s: C64, x: &[C64]) -> Result<Vec<C64>> {
        if x.len() != 1 {
            return Err(Error::DimensionMismatch {
                expected: 1,
                found: x.len(),
            });
        }
        Ok(vec![(self.f)(s) * x[0]])
    }

    fn conjugate_symmetric(&self) -> bool {
        self.real
    }
}

/// Largest observed `|K(s)| / |s|^mu` over the given samples.
pub fn observed_growth_bound<K: TransferFunction + ?Sized>(k: &K, samples: &[C64]) -> Result<f64> {
    let mu = k.growth().mu;
    let mut worst: f64 = 0.0;
    for &s in samples {
        let v = k.eval(s)?;
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        worst = worst.max(norm / s.norm().powf(mu));
    }
    Ok(worst)
}
