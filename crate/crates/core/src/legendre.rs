//! Legendre polynomials and the node sets built from them.

use crate::error::{Error, Result};

const NEWTON_TOL: f64 = 1e-15;
const NEWTON_MAX_ITER: usize = 100;

/// `P_n(x)` and `P_n'(x)` by the three-term recurrence.
pub fn legendre(n: usize, x: f64) -> (f64, f64) {
    if n == 0 {
        return (1.0, 0.0);
    }
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let nf = n as f64;
    let dp = if (1.0 - x * x).abs() < 1e-300 {
        let sign = if x > 0.0 || n % 2 == 1 { 1.0 } else { -1.0 };
        sign * nf * (nf + 1.0) / 2.0
    } else {
        nf * (x * p1 - p0) / (x * x - 1.0)
    };
    (p1, dp)
}

/// `[P_0(x), ..., P_n(x)]`.
pub fn legendre_table(n: usize, x: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(n + 1);
    out.push(1.0);
    if n >= 1 {
        out.push(x);
    }
    for k in 2..=n {
        let kf = k as f64;
        let next = ((2.0 * kf - 1.0) * x * out[k - 1] - (kf - 1.0) * out[k - 2]) / kf;
        out.push(next);
    }
    out
}

/// Newton iteration with Maehly deflation against already accepted roots.
fn newton_deflated<F>(f: F, guess: f64, found: &[f64], degree: usize) -> Result<f64>
where
    F: Fn(f64) -> (f64, f64),
{
    let mut x = guess;
    for _ in 0..NEWTON_MAX_ITER {
        let (p, dp) = f(x);
        let defl: f64 = found.iter().map(|r| 1.0 / (x - r)).sum();
        let denom = dp - p * defl;
        if denom == 0.0 {
            break;
        }
        let dx = p / denom;
        x -= dx;
        if dx.abs() <= NEWTON_TOL {
            return Ok(x);
        }
    }
    Err(Error::NoConvergence {
        degree,
        iterations: NEWTON_MAX_ITER,
    })
}

/// Gauss-Legendre nodes (ascending) and weights on [-1, 1].
pub fn gauss_legendre(n: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    if n == 0 {
        return Err(Error::InvalidArgument(
            "quadrature order must be >= 1".into(),
        ));
    }
    let mut nodes = Vec::with_capacity(n);
    for k in 0..n {
        let guess = (std::f64::consts::PI * (k as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let x = newton_deflated(|x| legendre(n, x), guess, &nodes, n)?;
        nodes.push(x);
    }
    nodes.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let weights = nodes
        .iter()
        .map(|&x| {
            let (_, dp) = legendre(n, x);
            2.0 / ((1.0 - x * x) * dp * dp)
        })
        .collect();
    Ok((nodes, weights))
}

/// Zeros of `P_m - P_{m-1}` on [-1, 1], ascending; the last one is exactly 1.
pub fn right_radau_nodes(m: usize) -> Result<Vec<f64>> {
    if m == 0 {
        return Err(Error::InvalidArgument("stage count must be >= 1".into()));
    }
    let f = |x: f64| {
        let (pm, dpm) = legendre(m, x);
        let (pl, dpl) = legendre(m - 1, x);
        (pm - pl, dpm - dpl)
    };
    let mut nodes = vec![1.0];
    for k in 1..m {
        let guess = (2.0 * std::f64::consts::PI * k as f64 / (2 * m - 1) as f64).cos();
        let x = newton_deflated(f, guess, &nodes, m)?;
        nodes.push(x);
    }
    nodes.sort_by(|a, b| a.partial_cmp(b).unwrap());
    nodes[m - 1] = 1.0;
    Ok(nodes)
}
