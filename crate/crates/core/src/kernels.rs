//! Scalar symbols and closed-form data used in the numerical experiments.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{CMatrix, C64};
use crate::transfer::{Growth, TransferFunction};

/// Default abscissa for the built-in symbols.
pub const DEFAULT_SIGMA0: f64 = 0.1;

/// `exp(z) - 1` without cancellation for small `|z|`.
pub fn expm1(z: C64) -> C64 {
    let half = (0.5 * z.im).sin();
    let re = z.re.exp_m1() * z.im.cos() - 2.0 * half * half;
    let im = z.re.exp() * z.im.sin();
    C64::new(re, im)
}

/// `K_mu(s) = s^mu / (1 - e^{-s})` on the principal branch.
pub fn eval_kmu(s: C64, mu: f64) -> Result<C64> {
    if !(s.re > 0.0) {
        return Err(Error::Domain(format!("K_mu needs Re s > 0, got {s}")));
    }
    Ok(s.powf(mu) / -expm1(-s))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ScalarKernel {
    /// `s^mu / (1 - e^{-s})`.
    PowerOverOneMinusExp { mu: f64 },
    /// `s^mu`.
    Power { mu: f64 },
}

impl ScalarKernel {
    pub fn mu(&self) -> f64 {
        match *self {
            ScalarKernel::PowerOverOneMinusExp { mu } | ScalarKernel::Power { mu } => mu,
        }
    }

    pub fn value(&self, s: C64) -> Result<C64> {
        match *self {
            ScalarKernel::PowerOverOneMinusExp { mu } => eval_kmu(s, mu),
            ScalarKernel::Power { mu } => {
                if !(s.re > 0.0) {
                    return Err(Error::Domain(format!("s^mu needs Re s > 0, got {s}")));
                }
                Ok(s.powf(mu))
            }
        }
    }

    pub fn name(&self) -> String {
        match *self {
            ScalarKernel::PowerOverOneMinusExp { mu } => format!("kmu_{mu}"),
            ScalarKernel::Power { mu } => format!("pow_{mu}"),
        }
    }
}

impl TransferFunction for ScalarKernel {
    fn dim(&self) -> usize {
        1
    }

    fn growth(&self) -> Growth {
        let bound = match self {
            ScalarKernel::PowerOverOneMinusExp { .. } => 1.0 / -(-DEFAULT_SIGMA0).exp_m1(),
            ScalarKernel::Power { .. } => 1.0,
        };
        Growth {
            mu: self.mu(),
            sigma0: DEFAULT_SIGMA0,
            bound,
        }
    }

    fn eval(&self, s: C64) -> Result<CMatrix> {
        Ok(CMatrix::from_element(1, 1, self.value(s)?))
    }

    fn apply(&self, s: C64, x: &[C64]) -> Result<Vec<C64>> {
        if x.len() != 1 {
            return Err(Error::DimensionMismatch {
                expected: 1,
                found: x.len(),
            });
        }
        Ok(vec![self.value(s)? * x[0]])
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Datum {
    /// `e^{-0.4 t} sin^6 t`.
    SinPowExp,
    /// `(1 + sin^2 x_2) t^15`.
    MonomialBump,
    /// `exp(-((t - x . alpha + shift) / rho)^2)`.
    TravelingGaussian {
        rho: f64,
        alpha: [f64; 2],
        shift: f64,
    },
}

impl Datum {
    /// The plane wave used in the scattering experiments.
    pub fn standard_gaussian() -> Self {
        let a = -std::f64::consts::FRAC_1_SQRT_2;
        Datum::TravelingGaussian {
            rho: 0.375,
            alpha: [a, a],
            shift: -4.0,
        }
    }

    pub fn is_spatial(&self) -> bool {
        !matches!(self, Datum::SinPowExp)
    }

    pub fn name(&self) -> &'static str {
        match self {
            Datum::SinPowExp => "sin_pow_exp",
            Datum::MonomialBump => "monomial_bump",
            Datum::TravelingGaussian { .. } => "traveling_gaussian",
        }
    }
}

pub fn eval_datum(kind: &Datum, x: Option<[f64; 2]>, t: f64) -> Result<f64> {
    if !(t >= 0.0) {
        return Err(Error::Domain(format!(
            "data are defined for t >= 0, got {t}"
        )));
    }
    match *kind {
        Datum::SinPowExp => Ok((-0.4 * t).exp() * t.sin().powi(6)),
        Datum::MonomialBump => {
            let x =
                x.ok_or_else(|| Error::InvalidArgument("spatial datum needs a point".into()))?;
            Ok((1.0 + x[1].sin().powi(2)) * t.powi(15))
        }
        Datum::TravelingGaussian { rho, alpha, shift } => {
            let x =
                x.ok_or_else(|| Error::InvalidArgument("spatial datum needs a point".into()))?;
            let arg = (t - (x[0] * alpha[0] + x[1] * alpha[1]) + shift) / rho;
            Ok((-arg * arg).exp())
        }
    }
}
