//! Boundary-integral transfer functions `s -> V(s)^{-1} M` and
//! `s -> V(s)^{-1}(-M/2 + K(s))` on a fixed mesh.

use std::collections::HashMap;
use std::path::PathBuf;
use std::sync::{Arc, Mutex};

use gausscq_core::transfer::{Growth, TransferFunction};
use gausscq_core::{CMatrix, Error, Result, C64};
use nalgebra::{DVector, Dyn, LU};
use serde::{Deserialize, Serialize};

use crate::assembly::{assemble_with, HelmholtzMatrices, QuadratureOptions};
use crate::cache::{frequency_key, MatrixCache};
use crate::mesh::BoundaryMesh;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundaryOperator {
    /// `V(s)^{-1} M`: panel averages of Dirichlet data to the single-layer density.
    InverseSingleLayer,
    /// `V(s)^{-1}(-M/2 + K(s))`: Dirichlet to Neumann for the exterior problem.
    ExteriorDtN,
}

impl BoundaryOperator {
    pub fn name(&self) -> &'static str {
        match self {
            BoundaryOperator::InverseSingleLayer => "inverse_single_layer",
            BoundaryOperator::ExteriorDtN => "exterior_dtn",
        }
    }
}

/// Nominal growth envelope: `|K(s)| <~ |s|^2` on `Re s >= 0.1`.
pub const BOUNDARY_GROWTH: Growth = Growth {
    mu: 2.0,
    sigma0: 0.1,
    bound: 1.0,
};

/// Default number of factorizations kept in memory.
pub const DEFAULT_CACHE_CAPACITY: usize = 64;

struct Factored {
    lu: LU<C64, Dyn, Dyn>,
    /// Right factor: `M` (diagonal) for the inverse single layer, `-M/2 + K` otherwise.
    right: Right,
}

enum Right {
    Diagonal(Vec<f64>),
    Dense(CMatrix),
}

impl Factored {
    fn new(op: BoundaryOperator, mats: HelmholtzMatrices) -> Result<Self> {
        let right = match op {
            BoundaryOperator::InverseSingleLayer => Right::Diagonal(mats.mass),
            BoundaryOperator::ExteriorDtN => {
                let mut b = mats.kd;
                for (i, l) in mats.mass.iter().enumerate() {
                    b[(i, i)] -= 0.5 * l;
                }
                Right::Dense(b)
            }
        };
        let lu = mats.v.lu();
        if !lu.is_invertible() {
            return Err(Error::Singular {
                condition: f64::INFINITY,
            });
        }
        Ok(Self { lu, right })
    }

    fn right_times(&self, x: &DVector<C64>) -> DVector<C64> {
        match &self.right {
            Right::Diagonal(d) => {
                DVector::from_iterator(d.len(), d.iter().zip(x.iter()).map(|(l, v)| v * *l))
            }
            Right::Dense(b) => b * x,
        }
    }

    fn solve(&self, rhs: &DVector<C64>) -> Result<DVector<C64>> {
        let y = self.lu.solve(rhs).ok_or(Error::Singular {
            condition: f64::INFINITY,
        })?;
        if y.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::Singular {
                condition: f64::INFINITY,
            });
        }
        Ok(y)
    }
}

/// A boundary operator on a mesh, evaluated by assembly and LU factorization.
///
/// Factorizations are cached per frequency (12 significant digits); the first
/// writer for a key wins and later readers share it.
pub struct BemTransfer {
    mesh: BoundaryMesh,
    operator: BoundaryOperator,
    growth: Growth,
    quadrature: QuadratureOptions,
    capacity: usize,
    factors: Mutex<HashMap<String, Arc<Factored>>>,
    disk: Option<MatrixCache>,
}

impl BemTransfer {
    pub fn new(mesh: BoundaryMesh, operator: BoundaryOperator) -> Self {
        Self {
            mesh,
            operator,
            growth: BOUNDARY_GROWTH,
            quadrature: QuadratureOptions::default(),
            capacity: DEFAULT_CACHE_CAPACITY,
            factors: Mutex::new(HashMap::new()),
            disk: None,
        }
    }

    pub fn with_growth(mut self, growth: Growth) -> Self {
        self.growth = growth;
        self
    }

    pub fn with_quadrature(mut self, quadrature: QuadratureOptions) -> Self {
        self.quadrature = quadrature;
        self
    }

    pub fn with_cache_capacity(mut self, capacity: usize) -> Self {
        self.capacity = capacity;
        self
    }

    /// Reads and writes assembled matrices under `dir`.
    pub fn with_matrix_cache(mut self, dir: impl Into<PathBuf>, label: &str) -> Result<Self> {
        self.disk = Some(MatrixCache::new(dir, label, &self.mesh)?);
        Ok(self)
    }

    pub fn mesh(&self) -> &BoundaryMesh {
        &self.mesh
    }

    pub fn operator(&self) -> BoundaryOperator {
        self.operator
    }

    /// Assembled matrices at `s`, through the disk cache when configured.
    pub fn matrices(&self, s: C64) -> Result<HelmholtzMatrices> {
        if let Some(disk) = &self.disk {
            if let Some(m) = disk.load(s) {
                if m.mass.len() == self.mesh.len() {
                    return Ok(m);
                }
            }
            let m = assemble_with(s, &self.mesh, &self.quadrature)?;
            disk.store(&m)?;
            return Ok(m);
        }
        assemble_with(s, &self.mesh, &self.quadrature)
    }

    fn factor(&self, s: C64) -> Result<Arc<Factored>> {
        let key = frequency_key(s);
        if let Some(f) = self.lock().get(&key) {
            return Ok(Arc::clone(f));
        }
        let f = Arc::new(Factored::new(self.operator, self.matrices(s)?)?);
        if self.capacity == 0 {
            return Ok(f);
        }
        let mut map = self.lock();
        if map.len() >= self.capacity && !map.contains_key(&key) {
            map.clear();
        }
        Ok(Arc::clone(map.entry(key).or_insert(f)))
    }

    fn lock(&self) -> std::sync::MutexGuard<'_, HashMap<String, Arc<Factored>>> {
        // A poisoned map only holds finished factorizations.
        self.factors.lock().unwrap_or_else(|e| e.into_inner())
    }

    /// Number of factorizations currently cached.
    pub fn cached(&self) -> usize {
        self.lock().len()
    }
}

impl TransferFunction for BemTransfer {
    fn dim(&self) -> usize {
        self.mesh.len()
    }

    fn growth(&self) -> Growth {
        self.growth
    }

    fn eval(&self, s: C64) -> Result<CMatrix> {
        self.check_frequency(s)?;
        let f = self.factor(s)?;
        let n = self.dim();
        let mut out = CMatrix::zeros(n, n);
        for j in 0..n {
            let mut e = DVector::zeros(n);
            e[j] = C64::new(1.0, 0.0);
            out.set_column(j, &f.solve(&f.right_times(&e))?);
        }
        Ok(out)
    }

    fn apply(&self, s: C64, x: &[C64]) -> Result<Vec<C64>> {
        if x.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: x.len(),
            });
        }
        self.check_frequency(s)?;
        let f = self.factor(s)?;
        let y = f.solve(&f.right_times(&DVector::from_column_slice(x)))?;
        Ok(y.iter().copied().collect())
    }
}
