//! Runge-Kutta convolution quadrature.
//!
//! The weights are Taylor coefficients of `K(Delta(zeta)/h)`, recovered with a
//! scaled FFT on the circle `|zeta| = lambda`. The discrete convolution can be
//! applied either from stored weights or directly in the frequency domain.

use std::sync::Arc;

use nalgebra::DVector;
use rayon::prelude::*;
use rustfft::{FftDirection, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{c, eigen_decompose, inverse_checked, max_abs, CMatrix, C64};
use crate::tableau::{radau_iia_tableau, ButcherTableau, Family};
use crate::transfer::TransferFunction;

const DELTA_MAX_CONDITION: f64 = 1e14;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CqOptions {
    /// Target aliasing level: the contour radius is `epsilon^(1/(2L))`.
    pub epsilon: f64,
    /// FFT length override; defaults to the next power of two >= 2(N+1).
    pub fft_len: Option<usize>,
    /// Largest tolerated condition number of the `Delta(zeta)` eigenbasis.
    pub max_eigen_condition: f64,
}

impl Default for CqOptions {
    fn default() -> Self {
        Self {
            epsilon: 1e-22,
            fft_len: None,
            max_eigen_condition: 1e10,
        }
    }
}

impl CqOptions {
    pub fn fft_len(&self, steps: usize) -> usize {
        self.fft_len
            .unwrap_or_else(|| (2 * (steps + 1)).next_power_of_two())
    }

    pub fn radius(&self, len: usize) -> f64 {
        self.epsilon.powf(1.0 / (2.0 * len as f64))
    }
}

/// `Delta(zeta) = (zeta/(1-zeta) 1 b^T + A)^{-1}`.
pub fn delta_matrix(t: &ButcherTableau, zeta: C64) -> Result<CMatrix> {
    if zeta.norm() >= 1.0 {
        return Err(Error::InvalidArgument(format!(
            "|zeta| = {} must be < 1",
            zeta.norm()
        )));
    }
    let m = t.m;
    let f = zeta / (c(1.0) - zeta);
    let mat = CMatrix::from_fn(m, m, |i, j| c(t.a[(i, j)]) + f * t.b[j]);
    inverse_checked(&mat, DELTA_MAX_CONDITION)
}

/// Eigendecomposition of `z` with the checks shared by both CQ routes.
pub(crate) struct Eigenbasis {
    pub values: Vec<C64>,
    pub vectors: CMatrix,
    pub inverse: CMatrix,
    pub condition: f64,
}

fn eigenbasis(z: &CMatrix, opts: &CqOptions) -> Result<Eigenbasis> {
    let e = eigen_decompose(z)?;
    if !(e.condition <= opts.max_eigen_condition) {
        return Err(Error::IllConditionedEigenbasis {
            condition: e.condition,
        });
    }
    // The K(s) = 1 sanity row: E E^{-1} must reproduce the identity.
    let n = z.nrows();
    let defect = max_abs(&(&e.vectors * &e.inverse - CMatrix::identity(n, n)));
    if defect > 1e-10 {
        return Err(Error::Contract(format!(
            "eigenbasis reconstruction defect {defect:.3e}"
        )));
    }
    Ok(Eigenbasis {
        values: e.values,
        vectors: e.vectors,
        inverse: e.inverse,
        condition: e.condition,
    })
}

/// `K(Z * inv_h)` as an `(m n) x (m n)` block matrix, stage index outermost.
///
/// Returns the block together with the eigenbasis condition number.
pub fn transfer_of_matrix<K: TransferFunction + ?Sized>(
    k: &K,
    z: &CMatrix,
    inv_h: f64,
) -> Result<(CMatrix, f64)> {
    transfer_of_matrix_with(k, z, inv_h, &CqOptions::default())
}

pub fn transfer_of_matrix_with<K: TransferFunction + ?Sized>(
    k: &K,
    z: &CMatrix,
    inv_h: f64,
    opts: &CqOptions,
) -> Result<(CMatrix, f64)> {
    let m = z.nrows();
    let n = k.dim();
    let eb = eigenbasis(z, opts)?;
    let mut values = Vec::with_capacity(m);
    for &zi in &eb.values {
        let s = zi * inv_h;
        k.check_frequency(s)?;
        let v = k.eval(s)?;
        if v.nrows() != n || v.ncols() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: v.nrows(),
            });
        }
        values.push(v);
    }
    let mut out = CMatrix::zeros(m * n, m * n);
    for i in 0..m {
        for j in 0..m {
            for (l, kl) in values.iter().enumerate() {
                let w = eb.vectors[(i, l)] * eb.inverse[(l, j)];
                for a in 0..n {
                    for b in 0..n {
                        out[(i * n + a, j * n + b)] += w * kl[(a, b)];
                    }
                }
            }
        }
    }
    Ok((out, eb.condition))
}

/// Post-stage coefficients `gamma_0 = 0`, `gamma_j = R(inf)^{j-1} b^T A^{-1}`.
pub fn gamma_coefficients(t: &ButcherTableau, steps: usize) -> Vec<Vec<f64>> {
    let row: Vec<f64> = t.b_ainv().iter().copied().collect();
    let r = t.r_infinity();
    let mut out = vec![vec![0.0; t.m]];
    let mut scale = 1.0;
    for _ in 1..=steps {
        out.push(row.iter().map(|x| x * scale).collect());
        scale *= r;
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct CqWeightSet {
    pub h: f64,
    pub steps: usize,
    pub family: Family,
    pub m: usize,
    pub dim: usize,
    /// `W_0, ..., W_N`, each `(m dim) x (m dim)`.
    pub w: Vec<CMatrix>,
    pub gamma: Vec<Vec<f64>>,
    pub r_infinity: f64,
    /// Worst eigenbasis condition number met on the contour.
    pub max_condition: f64,
}

fn contour_point(lambda: f64, l: usize, len: usize) -> C64 {
    C64::from_polar(lambda, 2.0 * std::f64::consts::PI * l as f64 / len as f64)
}

/// Indices of contour samples that must be evaluated; the rest follow by conjugation.
fn evaluated_indices(len: usize, symmetric: bool) -> usize {
    if symmetric {
        len / 2 + 1
    } else {
        len
    }
}

fn fft(len: usize, direction: FftDirection) -> Arc<dyn rustfft::Fft<f64>> {
    FftPlanner::new().plan_fft(len, direction)
}

/// CQ weights `W_0..W_N` of `K` for step `h` (default contour options).
pub fn compute_weights<K: TransferFunction + ?Sized>(
    k: &K,
    t: &ButcherTableau,
    h: f64,
    steps: usize,
) -> Result<CqWeightSet> {
    compute_weights_with(k, t, h, steps, &CqOptions::default())
}

pub fn compute_weights_with<K: TransferFunction + ?Sized>(
    k: &K,
    t: &ButcherTableau,
    h: f64,
    steps: usize,
    opts: &CqOptions,
) -> Result<CqWeightSet> {
    if !(h > 0.0) || steps == 0 {
        return Err(Error::InvalidArgument("need h > 0 and N >= 1".into()));
    }
    let len = opts.fft_len(steps);
    if len < steps + 1 {
        return Err(Error::InvalidArgument("FFT length must exceed N".into()));
    }
    let lambda = opts.radius(len);
    let m = t.m;
    let n = k.dim();
    let size = m * n;
    let symmetric = k.conjugate_symmetric();
    let count = evaluated_indices(len, symmetric);
    let samples: Vec<(CMatrix, f64)> = (0..count)
        .into_par_iter()
        .map(|l| {
            let z = delta_matrix(t, contour_point(lambda, l, len))?;
            transfer_of_matrix_with(k, &z, 1.0 / h, opts)
        })
        .collect::<Result<_>>()?;
    let max_condition = samples.iter().map(|s| s.1).fold(0.0, f64::max);

    let plan = fft(len, FftDirection::Forward);
    let columns: Vec<Vec<C64>> = (0..size * size)
        .into_par_iter()
        .map(|idx| {
            let (r, col) = (idx % size, idx / size);
            let mut buf: Vec<C64> = (0..len)
                .map(|l| {
                    if l < count {
                        samples[l].0[(r, col)]
                    } else {
                        samples[len - l].0[(r, col)].conj()
                    }
                })
                .collect();
            plan.process(&mut buf);
            buf
        })
        .collect();
    let w = (0..=steps)
        .map(|j| {
            let scale = lambda.powi(-(j as i32)) / len as f64;
            CMatrix::from_fn(size, size, |r, col| columns[col * size + r][j] * scale)
        })
        .collect();
    Ok(CqWeightSet {
        h,
        steps,
        family: t.family,
        m,
        dim: n,
        w,
        gamma: gamma_coefficients(t, steps),
        r_infinity: t.r_infinity(),
        max_condition,
    })
}

/// Stage and grid samples of a real signal on a uniform grid.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSignal {
    pub h: f64,
    pub steps: usize,
    pub dim: usize,
    pub nodes: Vec<f64>,
    /// `stages[n][i * dim + a] = g_a(t_n + c_i h)`.
    pub stages: Vec<Vec<f64>>,
    /// `grid[n][a] = g_a(t_n)`.
    pub grid: Vec<Vec<f64>>,
}

impl TimeSignal {
    pub fn sample<F>(h: f64, steps: usize, nodes: &[f64], dim: usize, f: F) -> Self
    where
        F: Fn(f64) -> Vec<f64>,
    {
        let mut stages = Vec::with_capacity(steps + 1);
        let mut grid = Vec::with_capacity(steps + 1);
        for n in 0..=steps {
            let tn = n as f64 * h;
            let mut row = Vec::with_capacity(nodes.len() * dim);
            for &ci in nodes {
                let v = f(tn + ci * h);
                assert_eq!(v.len(), dim, "signal returned a vector of the wrong length");
                row.extend(v);
            }
            stages.push(row);
            grid.push(f(tn));
        }
        Self {
            h,
            steps,
            dim,
            nodes: nodes.to_vec(),
            stages,
            grid,
        }
    }

    pub fn sample_scalar<F: Fn(f64) -> f64>(h: f64, steps: usize, nodes: &[f64], f: F) -> Self {
        Self::sample(h, steps, nodes, 1, |t| vec![f(t)])
    }

    /// Advisory: the data should vanish at `t = 0`.
    pub fn vanishing_start(&self) -> bool {
        self.grid[0].iter().all(|x| x.abs() <= 1e-12)
    }

    fn check(&self, m: usize, dim: usize) -> Result<()> {
        if self.dim != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: self.dim,
            });
        }
        if self.nodes.len() != m {
            return Err(Error::DimensionMismatch {
                expected: m,
                found: self.nodes.len(),
            });
        }
        if self.stages.len() != self.steps + 1 {
            return Err(Error::DimensionMismatch {
                expected: self.steps + 1,
                found: self.stages.len(),
            });
        }
        for row in &self.stages {
            if row.len() != m * dim {
                return Err(Error::DimensionMismatch {
                    expected: m * dim,
                    found: row.len(),
                });
            }
        }
        Ok(())
    }
}

/// Grid values `u_0, ..., u_N` produced by a CQ solve.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trace {
    pub h: f64,
    pub values: Vec<Vec<f64>>,
    /// Largest discarded imaginary part.
    pub max_imag: f64,
}

impl Trace {
    pub fn steps(&self) -> usize {
        self.values.len().saturating_sub(1)
    }

    /// Scalar component 0 at every grid point.
    pub fn scalar(&self) -> Vec<f64> {
        self.values.iter().map(|v| v[0]).collect()
    }
}

/// `u_n = R(inf) u_{n-1} + (b^T A^{-1} (x) I) U_{n-1}` from stage values `U_n`.
fn recombine(t_gamma: &[f64], r_inf: f64, stages: &[Vec<C64>], dim: usize, h: f64) -> Trace {
    let m = t_gamma.len();
    let steps = stages.len() - 1;
    let mut u = vec![vec![c(0.0); dim]];
    for n in 1..=steps {
        let prev = &stages[n - 1];
        let next: Vec<C64> = (0..dim)
            .map(|a| {
                let mut acc = u[n - 1][a] * r_inf;
                for i in 0..m {
                    acc += prev[i * dim + a] * t_gamma[i];
                }
                acc
            })
            .collect();
        u.push(next);
    }
    let max_imag = u.iter().flatten().map(|z| z.im.abs()).fold(0.0, f64::max);
    Trace {
        h,
        values: u
            .into_iter()
            .map(|v| v.into_iter().map(|z| z.re).collect())
            .collect(),
        max_imag,
    }
}

/// Applies stored weights: `U_n = sum_{j<=n} W_{n-j} G_j`, then the step update.
pub fn apply_cq(ws: &CqWeightSet, g: &TimeSignal) -> Result<Trace> {
    g.check(ws.m, ws.dim)?;
    if g.steps > ws.steps {
        return Err(Error::DimensionMismatch {
            expected: ws.steps,
            found: g.steps,
        });
    }
    if (g.h - ws.h).abs() > 1e-14 * ws.h {
        return Err(Error::InvalidArgument(
            "signal and weights use different steps".into(),
        ));
    }
    let size = ws.m * ws.dim;
    let data: Vec<DVector<C64>> = g
        .stages
        .iter()
        .map(|row| DVector::from_iterator(size, row.iter().map(|&x| c(x))))
        .collect();
    let stages: Vec<Vec<C64>> = (0..=g.steps)
        .into_par_iter()
        .map(|n| {
            let mut acc = DVector::<C64>::zeros(size);
            for j in 0..=n {
                acc += &ws.w[n - j] * &data[j];
            }
            acc.iter().copied().collect()
        })
        .collect();
    let row = if ws.gamma.len() > 1 {
        ws.gamma[1].clone()
    } else {
        vec![0.0; ws.m]
    };
    Ok(recombine(&row, ws.r_infinity, &stages, ws.dim, ws.h))
}

/// Applies `K(d_t^h)` without forming weights: the scaled data is transformed,
/// multiplied by `K(Delta(zeta_l)/h)` frequency by frequency, and transformed back.
pub fn apply_cq_frequency<K: TransferFunction + ?Sized>(
    k: &K,
    t: &ButcherTableau,
    g: &TimeSignal,
    opts: &CqOptions,
) -> Result<Trace> {
    let m = t.m;
    let dim = k.dim();
    g.check(m, dim)?;
    let h = g.h;
    let steps = g.steps;
    let len = opts.fft_len(steps);
    let lambda = opts.radius(len);
    let size = m * dim;

    // ghat[r][l] = sum_n lambda^n G_n[r] zeta_l^n
    let inv_plan = fft(len, FftDirection::Inverse);
    let ghat: Vec<Vec<C64>> = (0..size)
        .map(|r| {
            let mut buf = vec![c(0.0); len];
            let mut scale = 1.0;
            for n in 0..=steps {
                buf[n] = c(g.stages[n][r] * scale);
                scale *= lambda;
            }
            inv_plan.process(&mut buf);
            buf
        })
        .collect();

    let symmetric = k.conjugate_symmetric();
    let count = evaluated_indices(len, symmetric);
    let uhat: Vec<Vec<C64>> = (0..count)
        .into_par_iter()
        .map(|l| -> Result<Vec<C64>> {
            let z = delta_matrix(t, contour_point(lambda, l, len))?;
            let eb = eigenbasis(&z, opts)?;
            let mut out = vec![c(0.0); size];
            for i in 0..m {
                let mut y = vec![c(0.0); dim];
                for kk in 0..m {
                    let w = eb.inverse[(i, kk)];
                    for a in 0..dim {
                        y[a] += w * ghat[kk * dim + a][l];
                    }
                }
                let s = eb.values[i] / h;
                k.check_frequency(s)?;
                let ky = k.apply(s, &y)?;
                for r in 0..m {
                    let w = eb.vectors[(r, i)];
                    for a in 0..dim {
                        out[r * dim + a] += w * ky[a];
                    }
                }
            }
            Ok(out)
        })
        .collect::<Result<_>>()?;

    let plan = fft(len, FftDirection::Forward);
    let mut stages = vec![vec![c(0.0); size]; steps + 1];
    for r in 0..size {
        let mut buf: Vec<C64> = (0..len)
            .map(|l| {
                if l < count {
                    uhat[l][r]
                } else {
                    uhat[len - l][r].conj()
                }
            })
            .collect();
        plan.process(&mut buf);
        let mut scale = 1.0 / len as f64;
        for (n, row) in stages.iter_mut().enumerate() {
            row[r] = buf[n] * scale;
            scale /= lambda;
        }
    }
    let row: Vec<f64> = t.b_ainv().iter().copied().collect();
    Ok(recombine(&row, t.r_infinity(), &stages, dim, h))
}

/// Stage count of the Radau IIA method used for reference solutions.
pub const REFERENCE_STAGES: usize = 5;

/// Reference trace for a scalar problem on `[0, T]` with `n_ref` steps,
/// computed with the 5-stage Radau IIA method.
pub fn scalar_reference_solution<K, G>(k: &K, g: G, final_time: f64, n_ref: usize) -> Result<Trace>
where
    K: TransferFunction + ?Sized,
    G: Fn(f64) -> f64,
{
    let t = radau_iia_tableau(REFERENCE_STAGES)?;
    solve_scalar(k, &t, g, final_time, n_ref, &CqOptions::default())
}

/// Scalar CQ solve on `[0, T]` with `steps` uniform steps, through stored weights.
pub fn solve_scalar<K, G>(
    k: &K,
    t: &ButcherTableau,
    g: G,
    final_time: f64,
    steps: usize,
    opts: &CqOptions,
) -> Result<Trace>
where
    K: TransferFunction + ?Sized,
    G: Fn(f64) -> f64,
{
    if k.dim() != 1 {
        return Err(Error::DimensionMismatch {
            expected: 1,
            found: k.dim(),
        });
    }
    let h = final_time / steps as f64;
    let ws = compute_weights_with(k, t, h, steps, opts)?;
    let nodes: Vec<f64> = t.c.iter().copied().collect();
    apply_cq(&ws, &TimeSignal::sample_scalar(h, steps, &nodes, g))
}

/// Relative discrete l2 error of `coarse` against `reference` on the coarse grid.
pub fn relative_l2_error(coarse: &Trace, reference: &Trace) -> Result<f64> {
    let nc = coarse.steps();
    let nr = reference.steps();
    if nc == 0 || nr % nc != 0 {
        return Err(Error::InvalidArgument(format!(
            "grid mismatch: {nc} does not divide {nr}"
        )));
    }
    let stride = nr / nc;
    let mut num = 0.0;
    let mut den = 0.0;
    for (n, u) in coarse.values.iter().enumerate() {
        let r = &reference.values[n * stride];
        for (a, b) in u.iter().zip(r) {
            num += (a - b) * (a - b);
            den += b * b;
        }
    }
    if den == 0.0 {
        return Ok(num.sqrt());
    }
    Ok((num / den).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tableau::gauss_tableau;
    use crate::transfer::{Growth, ScalarTransfer};

    fn growth(mu: f64) -> Growth {
        Growth {
            mu,
            sigma0: 0.1,
            bound: 1.0,
        }
    }

    #[test]
    fn delta_at_zero_is_a_inverse() {
        let t = gauss_tableau(3).unwrap();
        let d = delta_matrix(&t, c(0.0)).unwrap();
        let prod = d * t.a_complex();
        assert!(max_abs(&(prod - CMatrix::identity(3, 3))) < 1e-13);
    }

    #[test]
    fn delta_sherman_morrison() {
        let t = gauss_tableau(3).unwrap();
        let zeta = C64::from_polar(0.6, 0.4);
        let ainv = t.a_complex().try_inverse().unwrap();
        let one = CMatrix::from_element(3, 1, c(1.0));
        let bt = CMatrix::from_fn(1, 3, |_, j| c(t.b[j]));
        let rank1 = &ainv * &one * &bt * &ainv;
        let want = &ainv - rank1 * (zeta / (c(1.0) - zeta * t.r_infinity()));
        let d = delta_matrix(&t, zeta).unwrap();
        assert!(max_abs(&(d - want)) < 1e-12 * max_abs(&ainv));
    }

    #[test]
    fn transfer_of_matrix_polynomial_symbols() {
        let t = gauss_tableau(2).unwrap();
        let z = delta_matrix(&t, C64::from_polar(0.5, 0.3)).unwrap();
        let h = 0.1;
        let one = ScalarTransfer::new(|_| c(1.0), growth(0.0));
        let (k1, _) = transfer_of_matrix(&one, &z, 1.0 / h).unwrap();
        assert!(max_abs(&(k1 - CMatrix::identity(2, 2))) < 1e-12);
        let lin = ScalarTransfer::new(|s| s, growth(1.0));
        let (ks, _) = transfer_of_matrix(&lin, &z, 1.0 / h).unwrap();
        assert!(max_abs(&(ks - &z / c(h))) < 1e-12 * max_abs(&z) / h);
        let sq = ScalarTransfer::new(|s| s * s, growth(2.0));
        let (k2, _) = transfer_of_matrix(&sq, &z, 1.0 / h).unwrap();
        let want = (&z * &z) / c(h * h);
        assert!(max_abs(&(k2 - &want)) < 1e-12 * max_abs(&want));
    }

    #[test]
    fn frequency_below_abscissa_is_rejected() {
        let t = gauss_tableau(2).unwrap();
        let z = delta_matrix(&t, c(0.9)).unwrap();
        let k = ScalarTransfer::new(
            |s| s,
            Growth {
                mu: 1.0,
                sigma0: 1e6,
                bound: 1.0,
            },
        );
        assert!(matches!(
            transfer_of_matrix(&k, &z, 1.0),
            Err(Error::OutsideHalfPlane { .. })
        ));
    }

    #[test]
    fn gamma_closed_form() {
        let t = gauss_tableau(1).unwrap();
        let g = gamma_coefficients(&t, 4);
        assert_eq!(g[0], vec![0.0]);
        for j in 1..=4 {
            let want = 2.0 * if (j - 1) % 2 == 0 { 1.0 } else { -1.0 };
            assert!((g[j][0] - want).abs() < 1e-14);
        }
    }

    #[test]
    fn both_routes_agree() {
        let t = gauss_tableau(3).unwrap();
        let k = ScalarTransfer::new(|s: C64| s.sqrt(), growth(0.5));
        let h = 0.05;
        let steps = 40;
        let nodes: Vec<f64> = t.c.iter().copied().collect();
        let g = TimeSignal::sample_scalar(h, steps, &nodes, |x| x.powi(4) * (-x).exp());
        let a = apply_cq(&compute_weights(&k, &t, h, steps).unwrap(), &g).unwrap();
        let b = apply_cq_frequency(&k, &t, &g, &CqOptions::default()).unwrap();
        let scale = a.scalar().iter().fold(0.0_f64, |m, x| m.max(x.abs()));
        for (x, y) in a.scalar().iter().zip(b.scalar()) {
            assert!((x - y).abs() < 1e-7 * scale, "{x} {y}");
        }
    }

    #[test]
    fn midpoint_identity_kernel_telescopes() {
        let t = gauss_tableau(1).unwrap();
        let k = ScalarTransfer::new(|_| c(1.0), growth(0.0));
        let h = 0.01;
        let steps = 100;
        let f = |x: f64| (x * x * x) * (-x).exp();
        let g = TimeSignal::sample_scalar(h, steps, &[0.5], f);
        let u = apply_cq(&compute_weights(&k, &t, h, steps).unwrap(), &g).unwrap();
        for (n, v) in u.scalar().iter().enumerate() {
            assert!((v - f(n as f64 * h)).abs() < 1e-4);
        }
    }

    #[test]
    fn zero_signal_gives_zero() {
        let t = gauss_tableau(2).unwrap();
        let k = ScalarTransfer::new(|s: C64| s.powf(0.5), growth(0.5));
        let ws = compute_weights(&k, &t, 0.1, 16).unwrap();
        let nodes: Vec<f64> = t.c.iter().copied().collect();
        let u = apply_cq(&ws, &TimeSignal::sample_scalar(0.1, 16, &nodes, |_| 0.0)).unwrap();
        assert!(u.scalar().iter().all(|&x| x == 0.0));
    }

    #[test]
    fn dimension_mismatch_is_reported() {
        let t = gauss_tableau(2).unwrap();
        let k = ScalarTransfer::new(|s| s, growth(1.0));
        let ws = compute_weights(&k, &t, 0.1, 4).unwrap();
        let g = TimeSignal::sample_scalar(0.1, 4, &[0.5], |x| x);
        assert!(matches!(
            apply_cq(&ws, &g),
            Err(Error::DimensionMismatch { .. })
        ));
    }
}
