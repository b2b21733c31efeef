//! Gauss and Radau IIA Butcher tableaux built from their order conditions.
//!
//! Nodes come from Newton iteration on Legendre polynomials. The coefficient
//! matrix is the unique solution of the simplifying condition C(m); the
//! collocation systems are posed in the Legendre basis on [-1, 1], which keeps
//! them well conditioned up to twelve stages.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::legendre::{gauss_legendre, legendre_table, right_radau_nodes};
use crate::linalg::{c, eigen_decompose, to_complex, CMatrix, CVector, C64};

/// Largest supported stage counts.
pub const GAUSS_MAX_STAGES: usize = 12;
pub const RADAU_MAX_STAGES: usize = 8;

const ORDER_TOL: f64 = 1e-13;
const ASSUMPTION_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    Gauss,
    #[serde(rename = "radau_iia")]
    RadauIIA,
}

impl Family {
    pub fn max_stages(self) -> usize {
        match self {
            Family::Gauss => GAUSS_MAX_STAGES,
            Family::RadauIIA => RADAU_MAX_STAGES,
        }
    }
}

impl std::fmt::Display for Family {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Family::Gauss => write!(f, "gauss"),
            Family::RadauIIA => write!(f, "radau_iia"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ButcherTableau {
    pub family: Family,
    pub m: usize,
    pub a: DMatrix<f64>,
    pub b: DVector<f64>,
    pub c: DVector<f64>,
    /// Classical order.
    pub p: usize,
    /// Stage order.
    pub q: usize,
}

/// Builds a tableau of the given family.
pub fn tableau(family: Family, m: usize) -> Result<ButcherTableau> {
    match family {
        Family::Gauss => gauss_tableau(m),
        Family::RadauIIA => radau_iia_tableau(m),
    }
}

/// m-stage Gauss-Legendre collocation method (order 2m, stage order m).
pub fn gauss_tableau(m: usize) -> Result<ButcherTableau> {
    if !(1..=GAUSS_MAX_STAGES).contains(&m) {
        return Err(Error::InvalidArgument(format!(
            "Gauss stage count must be in 1..={GAUSS_MAX_STAGES}, got {m}"
        )));
    }
    let (xi, w) = gauss_legendre(m)?;
    let b: Vec<f64> = w.iter().map(|w| 0.5 * w).collect();
    let a = collocation_matrix(&xi)?;
    finish(Family::Gauss, xi, a, b, 2 * m)
}

/// m-stage Radau IIA method (order 2m-1, stage order m, c_m = 1).
pub fn radau_iia_tableau(m: usize) -> Result<ButcherTableau> {
    if !(1..=RADAU_MAX_STAGES).contains(&m) {
        return Err(Error::InvalidArgument(format!(
            "Radau IIA stage count must be in 1..={RADAU_MAX_STAGES}, got {m}"
        )));
    }
    let xi = right_radau_nodes(m)?;
    let a = collocation_matrix(&xi)?;
    // Quadrature weights: sum_j b_j P_k(xi_j) = delta_k0 for k < m.
    let basis = legendre_basis(&xi, m);
    let mut rhs = DVector::zeros(m);
    rhs[0] = 1.0;
    let b = basis.transpose().lu().solve(&rhs).ok_or(Error::Singular {
        condition: f64::INFINITY,
    })?;
    finish(
        Family::RadauIIA,
        xi,
        a,
        b.iter().copied().collect(),
        2 * m - 1,
    )
}

/// `basis[(j, k)] = P_k(xi_j)` for k < m.
fn legendre_basis(xi: &[f64], m: usize) -> DMatrix<f64> {
    let mut basis = DMatrix::zeros(xi.len(), m);
    for (j, &x) in xi.iter().enumerate() {
        let row = legendre_table(m - 1, x);
        for k in 0..m {
            basis[(j, k)] = row[k];
        }
    }
    basis
}

/// Solves `sum_j a_ij P_k(xi_j) = int_0^{c_i} P_k(2 tau - 1) d tau` for every row.
fn collocation_matrix(xi: &[f64]) -> Result<DMatrix<f64>> {
    let m = xi.len();
    let basis = legendre_basis(xi, m);
    let mut rhs = DMatrix::zeros(m, m);
    for (i, &x) in xi.iter().enumerate() {
        let p = legendre_table(m, x);
        rhs[(0, i)] = 0.5 * (x + 1.0);
        for k in 1..m {
            rhs[(k, i)] = 0.5 * (p[k + 1] - p[k - 1]) / (2 * k + 1) as f64;
        }
    }
    // basis^T a^T = rhs
    let at = basis.transpose().lu().solve(&rhs).ok_or(Error::Singular {
        condition: f64::INFINITY,
    })?;
    Ok(at.transpose())
}

fn finish(
    family: Family,
    xi: Vec<f64>,
    a: DMatrix<f64>,
    b: Vec<f64>,
    p: usize,
) -> Result<ButcherTableau> {
    let m = xi.len();
    let mut c: Vec<f64> = xi.iter().map(|x| 0.5 * (x + 1.0)).collect();
    if family == Family::RadauIIA {
        c[m - 1] = 1.0;
    }
    let t = ButcherTableau {
        family,
        m,
        a,
        b: DVector::from_vec(b),
        c: DVector::from_vec(c),
        p,
        q: m,
    };
    t.check_invariants()?;
    Ok(t)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OrderResiduals {
    /// Max residual of the simplifying condition C(q).
    pub stage: f64,
    /// Max residual of the quadrature conditions up to order p.
    pub quadrature: f64,
}

impl ButcherTableau {
    pub fn ones(&self) -> DVector<f64> {
        DVector::from_element(self.m, 1.0)
    }

    /// `b^T A^{-1}` as a row vector.
    pub fn b_ainv(&self) -> DVector<f64> {
        self.a
            .transpose()
            .lu()
            .solve(&self.b)
            .expect("coefficient matrix is invertible by construction")
    }

    /// `R(inf) = 1 - b^T A^{-1} 1`.
    pub fn r_infinity(&self) -> f64 {
        1.0 - self.b_ainv().sum()
    }

    pub fn a_complex(&self) -> CMatrix {
        to_complex(&self.a)
    }

    pub fn order_residuals(&self) -> OrderResiduals {
        let m = self.m;
        let mut stage: f64 = 0.0;
        for i in 0..m {
            for k in 1..=self.q {
                let lhs: f64 = (0..m)
                    .map(|j| self.a[(i, j)] * self.c[j].powi(k as i32 - 1))
                    .sum();
                stage = stage.max((lhs - self.c[i].powi(k as i32) / k as f64).abs());
            }
        }
        let mut quadrature: f64 = 0.0;
        for k in 1..=self.p {
            let lhs: f64 = (0..m)
                .map(|j| self.b[j] * self.c[j].powi(k as i32 - 1))
                .sum();
            quadrature = quadrature.max((lhs - 1.0 / k as f64).abs());
        }
        OrderResiduals { stage, quadrature }
    }

    /// Structural and order-condition checks.
    pub fn check_invariants(&self) -> Result<()> {
        let m = self.m;
        if self.a.nrows() != m || self.a.ncols() != m || self.b.len() != m || self.c.len() != m {
            return Err(Error::DimensionMismatch {
                expected: m,
                found: self.b.len(),
            });
        }
        if self.b.iter().any(|&x| x == 0.0) {
            return Err(Error::Invariant("zero quadrature weight".into()));
        }
        for i in 0..m {
            if !(0.0..=1.0).contains(&self.c[i]) {
                return Err(Error::Invariant(format!(
                    "node c_{i} = {} outside [0,1]",
                    self.c[i]
                )));
            }
            for j in 0..i {
                if self.c[i] == self.c[j] {
                    return Err(Error::Invariant("repeated nodes".into()));
                }
            }
        }
        let res = self.order_residuals();
        if res.stage > ORDER_TOL || res.quadrature > ORDER_TOL {
            return Err(Error::Invariant(format!(
                "order conditions violated: C(q) residual {:.2e}, quadrature residual {:.2e}",
                res.stage, res.quadrature
            )));
        }
        if self.family == Family::Gauss {
            let expected = if m % 2 == 0 { 1.0 } else { -1.0 };
            let r = self.r_infinity();
            if (r - expected).abs() > ORDER_TOL {
                return Err(Error::Invariant(format!(
                    "R(inf) = {r}, expected {expected}"
                )));
            }
        }
        Ok(())
    }

    /// `R(z) = 1 + z b^T (I - zA)^{-1} 1`.
    pub fn stability_eval(&self, z: C64) -> Result<C64> {
        let m = self.m;
        let mat = CMatrix::identity(m, m) - self.a_complex() * z;
        let lu = mat.lu();
        let ones = CVector::from_element(m, c(1.0));
        let x = lu.solve(&ones).ok_or(Error::Singular {
            condition: f64::INFINITY,
        })?;
        if x.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(Error::Singular {
                condition: f64::INFINITY,
            });
        }
        let bx: C64 = self.b.iter().zip(x.iter()).map(|(&bj, xj)| xj * bj).sum();
        Ok(c(1.0) + z * bx)
    }

    pub fn to_json(&self) -> TableauJson {
        TableauJson {
            family: self.family,
            m: self.m,
            a: self.a.transpose().iter().copied().collect(),
            b: self.b.iter().copied().collect(),
            c: self.c.iter().copied().collect(),
            p: self.p,
            q: self.q,
        }
    }

    /// Pretty JSON with round-trip exact floats.
    pub fn to_json_string(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&self.to_json())?)
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        let raw: TableauJson = serde_json::from_str(s)?;
        Self::try_from(raw)
    }
}

/// Serialized form: `{family, m, A (row-major), b, c, p, q}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TableauJson {
    pub family: Family,
    pub m: usize,
    #[serde(rename = "A")]
    pub a: Vec<f64>,
    pub b: Vec<f64>,
    pub c: Vec<f64>,
    pub p: usize,
    pub q: usize,
}

impl TryFrom<TableauJson> for ButcherTableau {
    type Error = Error;

    fn try_from(raw: TableauJson) -> Result<Self> {
        let m = raw.m;
        if m == 0 || m > raw.family.max_stages() {
            return Err(Error::Decode(format!("stage count {m} out of range")));
        }
        if raw.a.len() != m * m || raw.b.len() != m || raw.c.len() != m {
            return Err(Error::Decode("array lengths do not match m".into()));
        }
        let expected_p = match raw.family {
            Family::Gauss => 2 * m,
            Family::RadauIIA => 2 * m - 1,
        };
        if raw.p != expected_p || raw.q != m {
            return Err(Error::Decode("orders do not match the family".into()));
        }
        let t = ButcherTableau {
            family: raw.family,
            m,
            a: DMatrix::from_row_slice(m, m, &raw.a),
            b: DVector::from_vec(raw.b),
            c: DVector::from_vec(raw.c),
            p: raw.p,
            q: raw.q,
        };
        t.check_invariants()
            .map_err(|e| Error::Decode(e.to_string()))?;
        Ok(t)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Assumption2Report {
    pub invertible: bool,
    pub det_abs: f64,
    pub min_eigen_gap: f64,
    pub passes: bool,
}

/// Invertibility of A and simplicity of its spectrum, both relative to the
/// spectral radius since `det A` shrinks like `m!/(2m)!`.
pub fn verify_assumption2(t: &ButcherTableau) -> Assumption2Report {
    let det_abs = t.a.determinant().abs();
    let (min_abs, min_eigen_gap, radius) = match crate::linalg::eigenvalues(&t.a_complex()) {
        Ok(ev) => {
            let mut gap = f64::INFINITY;
            for i in 0..ev.len() {
                for j in 0..i {
                    gap = gap.min((ev[i] - ev[j]).norm());
                }
            }
            let abs = ev.iter().map(|z| z.norm());
            (
                abs.clone().fold(f64::INFINITY, f64::min),
                gap,
                abs.fold(0.0, f64::max),
            )
        }
        Err(_) => (0.0, 0.0, 1.0),
    };
    let invertible = det_abs > 0.0 && min_abs > ASSUMPTION_TOL * radius;
    Assumption2Report {
        invertible,
        det_abs,
        min_eigen_gap,
        passes: invertible && min_eigen_gap > ASSUMPTION_TOL * radius,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NondegeneracyReport {
    /// min over eigenvectors x of A of |b^T x| / (|b| |x|).
    pub min_b_projection: f64,
    /// min over eigenvectors y of A^T of |1^T y| / (sqrt(m) |y|).
    pub min_ones_projection: f64,
    pub passes: bool,
}

pub fn verify_eigenvector_nondegeneracy(t: &ButcherTableau) -> NondegeneracyReport {
    let projection = |mat: CMatrix, v: &DVector<f64>| -> f64 {
        let vn = v.norm();
        match eigen_decompose(&mat) {
            Ok(e) => e
                .vectors
                .column_iter()
                .map(|x| {
                    let dot: C64 = x.iter().zip(v.iter()).map(|(xi, &vi)| xi * vi).sum();
                    let xn = x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
                    dot.norm() / (vn * xn)
                })
                .fold(f64::INFINITY, f64::min),
            Err(_) => 0.0,
        }
    };
    let min_b_projection = projection(t.a_complex(), &t.b);
    let min_ones_projection = projection(t.a_complex().transpose(), &t.ones());
    NondegeneracyReport {
        min_b_projection,
        min_ones_projection,
        passes: min_b_projection > ASSUMPTION_TOL && min_ones_projection > ASSUMPTION_TOL,
    }
}
