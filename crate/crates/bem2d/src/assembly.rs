//! Galerkin matrices of the single-layer operator `V(s)` and the double-layer
//! boundary operator `K(s)` for piecewise-constant densities.
//!
//! The kernel is `G(r) = K_0(s r) / 2π`, the fundamental solution of
//! `-Δu + s²u = 0`. Quadrature by panel relation:
//! - self panel: `K_0(s r) + ln r` by graded Gauss-Legendre, the logarithm exactly;
//! - shared vertex: Duffy triangles in polar-like coordinates about the vertex,
//!   graded toward it;
//! - separated panels: tensor Gauss-Legendre with the order picked from the
//!   distance-to-length ratio and the oscillation `|s| L`.

use std::f64::consts::PI;
use std::sync::OnceLock;

use gausscq_core::legendre::gauss_legendre;
use gausscq_core::{CMatrix, Error, Result, C64};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bessel::RadialBessel;
use crate::mesh::{BoundaryMesh, Panel};

/// Largest Gauss-Legendre order available.
pub const MAX_ORDER: usize = 32;
/// Grading ratio for cells approaching a singular point.
const GRADING: f64 = 0.25;
/// Order per graded cell.
const GRADED_ORDER: usize = 10;
/// Order in the smooth Duffy direction.
const DUFFY_ANGULAR_ORDER: usize = 12;
/// Phase span covered by one graded cell before it is subdivided.
const CELL_PHASE: f64 = 2.0;
/// Pairs with `Re(s) * distance` beyond this are below double precision.
pub const SKIP_DECAY: f64 = 60.0;
/// Bisection depth limit for nearly touching panels.
const MAX_SPLIT_DEPTH: usize = 12;

/// Gauss-Legendre nodes and weights on `[0, 1]`.
struct Rule {
    x: Vec<f64>,
    w: Vec<f64>,
}

fn rule(q: usize) -> &'static Rule {
    static RULES: OnceLock<Vec<Rule>> = OnceLock::new();
    let rules = RULES.get_or_init(|| {
        (1..=MAX_ORDER)
            .map(|q| {
                let (x, w) = gauss_legendre(q).expect("Gauss-Legendre rules up to MAX_ORDER exist");
                Rule {
                    x: x.iter().map(|t| 0.5 * (t + 1.0)).collect(),
                    w: w.iter().map(|w| 0.5 * w).collect(),
                }
            })
            .collect()
    });
    &rules[q.clamp(1, MAX_ORDER) - 1]
}

/// Accuracy and work limits for the panel quadratures.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureOptions {
    /// Target relative accuracy for separated panels.
    pub far_tolerance: f64,
    /// Cap on the Gauss-Legendre order per direction.
    pub max_order: usize,
    /// Cap on the subdivisions of one graded cell.
    pub max_cell_pieces: usize,
}

impl Default for QuadratureOptions {
    fn default() -> Self {
        Self {
            far_tolerance: 1e-12,
            max_order: 16,
            max_cell_pieces: 4,
        }
    }
}

impl QuadratureOptions {
    pub fn validate(&self) -> Result<()> {
        if !(self.far_tolerance > 0.0 && self.far_tolerance < 1.0) {
            return Err(Error::InvalidArgument(
                "far tolerance must lie in (0, 1)".into(),
            ));
        }
        if !(2..=MAX_ORDER).contains(&self.max_order) || self.max_cell_pieces == 0 {
            return Err(Error::InvalidArgument(format!(
                "quadrature orders must lie in 2..={MAX_ORDER}"
            )));
        }
        Ok(())
    }
}

/// Per-frequency state shared by all panel pairs.
struct Ctx<'a> {
    s: C64,
    bessel: RadialBessel,
    opts: &'a QuadratureOptions,
}

impl Ctx<'_> {
    /// `(K_0(s r) / 2π, s K_1(s r) / (2π r))`.
    #[inline]
    fn kernels(&self, r: f64) -> (C64, C64) {
        let (k0, k1) = self.bessel.eval(r);
        (k0 * (0.5 / PI), self.s * k1 * (0.5 / (PI * r)))
    }
}

/// Matrices at one frequency.
#[derive(Debug, Clone)]
pub struct HelmholtzMatrices {
    pub s: C64,
    pub v: CMatrix,
    pub kd: CMatrix,
    /// Panel lengths (the diagonal mass matrix).
    pub mass: Vec<f64>,
}

/// Contributions of one unordered panel pair `(i, j)`.
#[derive(Debug, Clone, Copy, Default)]
struct PairBlock {
    v: C64,
    kd_ij: C64,
    kd_ji: C64,
}

impl std::ops::AddAssign for PairBlock {
    fn add_assign(&mut self, o: Self) {
        self.v += o.v;
        self.kd_ij += o.kd_ij;
        self.kd_ji += o.kd_ji;
    }
}

fn check_frequency(s: C64) -> Result<()> {
    if !(s.re > 0.0) || !s.im.is_finite() || !s.re.is_finite() {
        return Err(Error::Domain(format!(
            "boundary operators need Re s > 0, got {s}"
        )));
    }
    Ok(())
}

pub fn assemble(s: C64, mesh: &BoundaryMesh) -> Result<HelmholtzMatrices> {
    assemble_with(s, mesh, &QuadratureOptions::default())
}

pub fn assemble_with(
    s: C64,
    mesh: &BoundaryMesh,
    opts: &QuadratureOptions,
) -> Result<HelmholtzMatrices> {
    check_frequency(s)?;
    opts.validate()?;
    let ctx = Ctx {
        s,
        bessel: RadialBessel::new(s),
        opts,
    };
    let n = mesh.len();
    let rows: Vec<Vec<PairBlock>> = (0..n)
        .into_par_iter()
        .map(|i| {
            (i..n)
                .map(|j| pair_block(&ctx, mesh, i, j))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<_>>()?;
    let mut v = CMatrix::zeros(n, n);
    let mut kd = CMatrix::zeros(n, n);
    for (i, row) in rows.iter().enumerate() {
        for (offset, b) in row.iter().enumerate() {
            let j = i + offset;
            v[(i, j)] = b.v;
            v[(j, i)] = b.v;
            kd[(i, j)] = b.kd_ij;
            kd[(j, i)] = b.kd_ji;
        }
    }
    Ok(HelmholtzMatrices {
        s,
        v,
        kd,
        mass: mesh.lengths(),
    })
}

/// `V_ij = ∫_i ∫_j G(|x - y|) dy dx`.
pub fn assemble_v(s: C64, mesh: &BoundaryMesh) -> Result<CMatrix> {
    Ok(assemble(s, mesh)?.v)
}

/// `K_ij = ∫_i ∫_j ∂_{n_y} G(x - y) dy dx`.
pub fn assemble_kd(s: C64, mesh: &BoundaryMesh) -> Result<CMatrix> {
    Ok(assemble(s, mesh)?.kd)
}

fn pair_block(ctx: &Ctx, mesh: &BoundaryMesh, i: usize, j: usize) -> Result<PairBlock> {
    let panels = mesh.panels();
    let (pi, pj) = (&panels[i], &panels[j]);
    if i == j {
        return Ok(PairBlock {
            v: self_single_layer(ctx, pi.length),
            ..Default::default()
        });
    }
    if let Some(vertex) = mesh.shared_vertex(i, j) {
        let v = mesh.vertices()[vertex];
        return Ok(touching_pair(ctx, pi, pj, v));
    }
    separated_pair(ctx, pi, pj, 0)
}

fn dot(a: [f64; 2], b: [f64; 2]) -> f64 {
    a[0] * b[0] + a[1] * b[1]
}

fn sub(a: [f64; 2], b: [f64; 2]) -> [f64; 2] {
    [a[0] - b[0], a[1] - b[1]]
}

fn point_segment_distance(p: [f64; 2], seg: &Panel) -> f64 {
    let t = dot(sub(p, seg.a), seg.tangent).clamp(0.0, seg.length);
    let q = seg.point(t);
    (p[0] - q[0]).hypot(p[1] - q[1])
}

/// Distance between two non-crossing segments.
fn segment_distance(a: &Panel, b: &Panel) -> f64 {
    point_segment_distance(a.a, b)
        .min(point_segment_distance(a.b, b))
        .min(point_segment_distance(b.a, a))
        .min(point_segment_distance(b.b, a))
}

/// Order for which the nearest kernel singularity lies outside the Bernstein
/// ellipse reaching accuracy `FAR_TOL`.
fn separated_order(distance: f64, length: f64, tol: f64) -> usize {
    let r = 1.0 + 2.0 * distance / length;
    let rho = r + (r * r - 1.0).sqrt();
    (-tol.ln() / (2.0 * rho.ln())).ceil() as usize
}

fn oscillation_order(s: C64, length: f64) -> usize {
    (0.6 * s.norm() * length).ceil() as usize + 3
}

fn separated_pair(ctx: &Ctx, pi: &Panel, pj: &Panel, depth: usize) -> Result<PairBlock> {
    let s = ctx.s;
    let distance = segment_distance(pi, pj);
    if s.re * distance > SKIP_DECAY {
        return Ok(PairBlock::default());
    }
    let length = pi.length.max(pj.length);
    let q_geo = if distance > 0.0 {
        separated_order(distance, length, ctx.opts.far_tolerance)
    } else {
        usize::MAX
    };
    if q_geo > ctx.opts.max_order {
        if depth >= MAX_SPLIT_DEPTH || distance == 0.0 {
            return Err(Error::Quadrature(format!(
                "panels at distance {distance:.3e} with length {length:.3e} are too close"
            )));
        }
        // Bisect the longer panel.
        let (long, short, swapped) = if pi.length >= pj.length {
            (pi, pj, false)
        } else {
            (pj, pi, true)
        };
        let mid = long.midpoint;
        let mut total = PairBlock::default();
        for half in [Panel::new(long.a, mid), Panel::new(mid, long.b)] {
            let b = if swapped {
                separated_pair(ctx, short, &half, depth + 1)?
            } else {
                separated_pair(ctx, &half, short, depth + 1)?
            };
            total += b;
        }
        return Ok(total);
    }
    let q = q_geo
        .max(oscillation_order(s, length))
        .clamp(2, ctx.opts.max_order);
    let rq = rule(q);
    let mut out = PairBlock::default();
    for (&xa, &wa) in rq.x.iter().zip(&rq.w) {
        let p = pi.point(xa * pi.length);
        for (&xb, &wb) in rq.x.iter().zip(&rq.w) {
            let y = pj.point(xb * pj.length);
            let d = sub(p, y);
            let r = (d[0] * d[0] + d[1] * d[1]).sqrt();
            let (g, f) = ctx.kernels(r);
            let w = wa * wb;
            out.v += g * w;
            out.kd_ij += f * (w * dot(d, pj.normal));
            out.kd_ji -= f * (w * dot(d, pi.normal));
        }
    }
    let jac = pi.length * pj.length;
    out.v *= jac;
    out.kd_ij *= jac;
    out.kd_ji *= jac;
    Ok(out)
}

/// Breakpoints `1, σ, σ², ..., σ^K, 0` with the innermost cell below
/// `1e-3 / max(1, |s| scale)`.
fn graded_breakpoints(s: C64, scale: f64) -> Vec<f64> {
    let floor = 1e-3 / (s.norm() * scale).max(1.0);
    let mut pts = vec![1.0];
    let mut x = 1.0;
    while x > floor {
        x *= GRADING;
        pts.push(x);
    }
    pts.push(0.0);
    pts
}

/// Graded cells on `[0, 1]`, each subdivided so that `|s| scale` times the
/// cell width stays below the phase budget, as `(node, weight)` pairs.
fn graded_rule(s: C64, scale: f64, max_pieces: usize) -> Vec<(f64, f64)> {
    let pts = graded_breakpoints(s, scale);
    let base = rule(GRADED_ORDER);
    let mut out = Vec::new();
    for k in 0..pts.len() - 1 {
        let (hi, lo) = (pts[k], pts[k + 1]);
        let pieces = ((s.norm() * scale * (hi - lo)) / CELL_PHASE)
            .ceil()
            .clamp(1.0, max_pieces as f64) as usize;
        let width = (hi - lo) / pieces as f64;
        for p in 0..pieces {
            let a = lo + p as f64 * width;
            for (&x, &w) in base.x.iter().zip(&base.w) {
                out.push((a + x * width, w * width));
            }
        }
    }
    out
}

/// `∫_0^L ∫_0^L G(|u - w|) du dw = 2 ∫_0^L (L - r) G(r) dr`, with
/// `-∫∫ ln|u - w| = 1.5 L² - L² ln L` exactly.
fn self_single_layer(ctx: &Ctx, length: f64) -> C64 {
    let mut smooth = C64::new(0.0, 0.0);
    for (x, w) in graded_rule(ctx.s, length, ctx.opts.max_cell_pieces) {
        let r = x * length;
        let (k0, _) = ctx.bessel.eval(r);
        smooth += (k0 + r.ln()) * ((length - r) * w * length);
    }
    (smooth * 2.0 + (1.5 - length.ln()) * length * length) / (2.0 * PI)
}

/// Panels sharing the vertex `v`. With `x = v + L_i ξ e_i` and
/// `y = v + L_j η e_j`, the square is split along `ξ = η` and each triangle
/// mapped by `(ρ, t) -> (ρ, ρ t)`, so `|x - y| = ρ D(t)` and the Jacobian `ρ`
/// removes the singularity.
fn touching_pair(ctx: &Ctx, pi: &Panel, pj: &Panel, v: [f64; 2]) -> PairBlock {
    let s = ctx.s;
    let away = |p: &Panel| -> [f64; 2] {
        if p.a == v {
            p.tangent
        } else {
            [-p.tangent[0], -p.tangent[1]]
        }
    };
    let (ei, ej) = (away(pi), away(pj));
    let (li, lj) = (pi.length, pj.length);
    let radial = graded_rule(s, li + lj, ctx.opts.max_cell_pieces);
    let q_t = oscillation_order(s, li.max(lj))
        .min(ctx.opts.max_order)
        .max(DUFFY_ANGULAR_ORDER);
    let angular = rule(q_t);
    let mut out = PairBlock::default();
    for triangle in 0..2 {
        for (&t, &wt) in angular.x.iter().zip(&angular.w) {
            let (a, b) = if triangle == 0 { (1.0, t) } else { (t, 1.0) };
            let dv = [
                li * a * ei[0] - lj * b * ej[0],
                li * a * ei[1] - lj * b * ej[1],
            ];
            let dist = (dv[0] * dv[0] + dv[1] * dv[1]).sqrt();
            let (ni, nj) = (dot(dv, pi.normal), dot(dv, pj.normal));
            for &(rho, wr) in &radial {
                let r = rho * dist;
                let (g, f) = ctx.kernels(r);
                let w = wt * wr * rho;
                out.v += g * w;
                // x - y = ρ dv
                out.kd_ij += f * (w * rho * nj);
                out.kd_ji -= f * (w * rho * ni);
            }
        }
    }
    let jac = li * lj;
    out.v *= jac;
    out.kd_ij *= jac;
    out.kd_ji *= jac;
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn with_ctx<T>(s: C64, f: impl FnOnce(&Ctx) -> T) -> T {
        let opts = QuadratureOptions {
            max_order: MAX_ORDER,
            max_cell_pieces: 64,
            ..Default::default()
        };
        f(&Ctx {
            s,
            bessel: RadialBessel::new(s),
            opts: &opts,
        })
    }

    fn close(a: C64, b: [f64; 2], tol: f64) {
        let b = C64::new(b[0], b[1]);
        assert!((a - b).norm() <= tol * b.norm(), "{a} vs {b}");
    }

    // Reference values from adaptive tanh-sinh quadrature at 20 digits.

    #[test]
    fn self_term_matches_reference() {
        close(
            with_ctx(C64::new(1.3, 0.7), |c| self_single_layer(c, 0.2)),
            [0.018099335216918954, -0.0030942901706431392],
            1e-12,
        );
        close(
            with_ctx(C64::new(2.0, 40.0), |c| self_single_layer(c, 0.1)),
            [0.00028501043903070668, -0.0013166070153055244],
            1e-11,
        );
        close(
            with_ctx(C64::new(0.001, 0.0), |c| self_single_layer(c, 1.0)),
            [1.3565869438112328, 0.0],
            1e-12,
        );
        close(
            with_ctx(C64::new(50.0, 0.0), |c| self_single_layer(c, 0.1)),
            [0.00087308073031475207, 0.0],
            1e-12,
        );
    }

    #[test]
    fn touching_pairs_match_reference() {
        let pi = Panel::new([0.2, 0.0], [0.0, 0.0]);
        let pj = Panel::new([0.0, 0.0], [0.0, 0.15]);
        let b = with_ctx(C64::new(1.0, 2.0), |c| {
            touching_pair(c, &pi, &pj, [0.0, 0.0])
        });
        close(b.v, [0.0067327905909277375, -0.0049941044614465467], 1e-10);
        close(
            b.kd_ij,
            [0.032870605061029393, -0.0023740623691203478],
            1e-10,
        );
        close(
            b.kd_ji,
            [0.029420665326603688, -0.0018345865443738033],
            1e-10,
        );

        let pi = Panel::new([-0.1, 0.0], [0.0, 0.0]);
        let pj = Panel::new([0.0, 0.0], [0.1, 0.01]);
        let b = with_ctx(C64::new(0.5, 3.0), |c| {
            touching_pair(c, &pi, &pj, [0.0, 0.0])
        });
        close(b.v, [0.0022030827980617821, -0.0021625092323031206], 1e-10);
        close(
            b.kd_ij,
            [-0.001143510055571537, 6.7815970127114224e-5],
            1e-10,
        );
        close(
            b.kd_ji,
            [-0.0011461158644082424, 6.814169182288632e-5],
            1e-10,
        );
    }

    #[test]
    fn separated_pair_matches_reference() {
        let pi = Panel::new([0.0, 0.0], [0.1, 0.0]);
        let pj = Panel::new([0.15, 0.05], [0.25, 0.1]);
        let b = with_ctx(C64::new(2.0, -5.0), |c| separated_pair(c, &pi, &pj, 0)).unwrap();
        close(b.v, [0.00041324495422125054, 0.0015232461612489149], 1e-11);
        close(
            b.kd_ij,
            [0.0003760664580540394, 4.6944258531672066e-5],
            1e-11,
        );
        close(
            b.kd_ji,
            [-0.0049824437252844321, -0.0023015692856181116],
            1e-11,
        );
    }

    #[test]
    fn graded_rule_integrates_polynomials() {
        let s = C64::new(3.0, 40.0);
        let pts = graded_rule(s, 1.0, 64);
        let sum: f64 = pts.iter().map(|(x, w)| w * x.powi(5)).sum();
        assert!((sum - 1.0 / 6.0).abs() < 1e-14);
    }
}
