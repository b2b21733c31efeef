//! Discrete `H^{-1/2}` norm and the time-domain error metric.

use gausscq_core::cq::Trace;
use gausscq_core::{CMatrix, Error, Result, C64};

use crate::assembly::assemble_v;
use crate::mesh::BoundaryMesh;

/// `‖φ‖ = (Re φ^H V(1) φ)^{1/2}`, using the single layer at `s = 1` as the
/// Gram matrix of an equivalent norm.
#[derive(Debug, Clone)]
pub struct HMinusHalfNorm {
    v1: CMatrix,
}

impl HMinusHalfNorm {
    pub fn new(mesh: &BoundaryMesh) -> Result<Self> {
        Ok(Self {
            v1: assemble_v(C64::new(1.0, 0.0), mesh)?,
        })
    }

    pub fn from_matrix(v1: CMatrix) -> Self {
        Self { v1 }
    }

    pub fn dim(&self) -> usize {
        self.v1.nrows()
    }

    pub fn norm(&self, phi: &[f64]) -> f64 {
        hminus_half_norm(phi, &self.v1)
    }

    /// `(h Σ_j ‖φ(t_j) - φ_ref(t_j)‖²)^{1/2}` over the coarse grid. The
    /// reference grid must refine the coarse one by an integer factor.
    pub fn error_metric(&self, coarse: &Trace, reference: &Trace) -> Result<f64> {
        let stride = grid_stride(coarse, reference)?;
        let mut sum = 0.0;
        for (j, u) in coarse.values.iter().enumerate() {
            let r = &reference.values[j * stride];
            if u.len() != self.dim() || r.len() != self.dim() {
                return Err(Error::DimensionMismatch {
                    expected: self.dim(),
                    found: u.len().min(r.len()),
                });
            }
            let d: Vec<f64> = u.iter().zip(r).map(|(a, b)| a - b).collect();
            sum += self.norm(&d).powi(2);
        }
        Ok((coarse.h * sum).sqrt())
    }
}

pub fn hminus_half_norm(phi: &[f64], v1: &CMatrix) -> f64 {
    let n = phi.len();
    let mut q = 0.0;
    for i in 0..n {
        let mut row = C64::new(0.0, 0.0);
        for j in 0..n {
            row += v1[(i, j)] * phi[j];
        }
        q += (row * phi[i]).re;
    }
    q.max(0.0).sqrt()
}

/// Index stride from the coarse grid into the reference grid.
pub fn grid_stride(coarse: &Trace, reference: &Trace) -> Result<usize> {
    let (nc, nr) = (coarse.steps(), reference.steps());
    if nc == 0 || nr == 0 || nr % nc != 0 {
        return Err(Error::InvalidArgument(format!(
            "reference grid of {nr} steps does not refine {nc} steps"
        )));
    }
    let stride = nr / nc;
    let span = (coarse.h * nc as f64, reference.h * nr as f64);
    if (span.0 - span.1).abs() > 1e-12 * span.0.abs().max(1.0) {
        return Err(Error::InvalidArgument(format!(
            "time spans differ: {} vs {}",
            span.0, span.1
        )));
    }
    Ok(stride)
}
