//! Time-domain boundary problems solved by convolution quadrature.

use gausscq_core::cq::{apply_cq_frequency, CqOptions, TimeSignal, Trace};
use gausscq_core::kernels::{eval_datum, Datum};
use gausscq_core::tableau::ButcherTableau;
use gausscq_core::{Error, Result};
use serde::{Deserialize, Serialize};

use crate::mesh::{make_mesh, BoundaryMesh, Geometry};
use crate::transfer::{BemTransfer, BoundaryOperator};

/// `φ = K(∂_t) g` for a boundary operator `K` and Dirichlet data `g`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScatteringProblem {
    pub geometry: Geometry,
    pub operator: BoundaryOperator,
    pub datum: Datum,
    pub final_time: f64,
    pub n_panels: usize,
}

impl ScatteringProblem {
    pub fn validate(&self) -> Result<()> {
        if !self.datum.is_spatial() {
            return Err(Error::InvalidArgument(format!(
                "datum {} has no spatial dependence",
                self.datum.name()
            )));
        }
        if !(self.final_time > 0.0 && self.final_time.is_finite()) {
            return Err(Error::InvalidArgument("final time must be positive".into()));
        }
        Ok(())
    }

    pub fn mesh(&self) -> Result<BoundaryMesh> {
        make_mesh(self.geometry, self.n_panels)
    }

    pub fn transfer(&self) -> Result<BemTransfer> {
        self.validate()?;
        Ok(BemTransfer::new(self.mesh()?, self.operator))
    }

    /// Data sampled at panel midpoints on the stage and grid times.
    pub fn signal(&self, mesh: &BoundaryMesh, nodes: &[f64], steps: usize) -> Result<TimeSignal> {
        if steps == 0 {
            return Err(Error::InvalidArgument(
                "at least one time step is required".into(),
            ));
        }
        let mids = mesh.midpoints();
        // Surface evaluation errors before sampling, which cannot fail afterwards.
        eval_datum(&self.datum, Some(mids[0]), 0.0)?;
        let h = self.final_time / steps as f64;
        let datum = self.datum;
        Ok(TimeSignal::sample(h, steps, nodes, mids.len(), |t| {
            mids.iter()
                .map(|&x| eval_datum(&datum, Some(x), t).unwrap_or(f64::NAN))
                .collect()
        }))
    }

    pub fn solve(
        &self,
        transfer: &BemTransfer,
        t: &ButcherTableau,
        steps: usize,
        opts: &CqOptions,
    ) -> Result<Trace> {
        let c: Vec<f64> = t.c.iter().copied().collect();
        let g = self.signal(transfer.mesh(), &c, steps)?;
        apply_cq_frequency(transfer, t, &g, opts)
    }
}
