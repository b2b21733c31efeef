//! Padé machinery for the Gauss stability function `R_m(z) = P_m(z) / P_m(-z)`.
//!
//! Covers the root loci of `R_m(z) = w`, the expansion constants of those roots
//! near the imaginary axis, the spectrum identity for `Delta(zeta)` and the
//! odd-stage cancellation that produces superconvergence.

use serde::Serialize;

use crate::cq::delta_matrix;
use crate::error::{Error, Result};
use crate::legendre::gauss_legendre;
use crate::linalg::{c, eigenvalues, hausdorff, CMatrix, CVector, C64, I};
use crate::poly;
use crate::tableau::{gauss_tableau, ButcherTableau, Family};

pub const PADE_MAX_DEGREE: usize = 24;
const DROP_TOL: f64 = 1e-14;
const IMAG_TOL: f64 = 1e-9;
/// Roots farther out than this are reported but not held to the `beta > 1` check.
pub const BETA_ASSERT_LIMIT: f64 = 1e5;
/// Parameters of the limit fits for the large roots.
pub const LIMIT_FIT_T: [f64; 2] = [1e-3, 1e-4];

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PadePolynomial {
    pub m: usize,
    /// `p_0, ..., p_m` with `p_j = (2m-j)! / (j! (m-j)!)`.
    pub coeffs: Vec<f64>,
}

impl PadePolynomial {
    pub fn eval(&self, z: C64) -> C64 {
        poly::eval(&self.complex_coeffs(), z)
    }

    pub fn complex_coeffs(&self) -> Vec<C64> {
        self.coeffs.iter().map(|&x| c(x)).collect()
    }
}

fn binomial(n: u128, k: u128) -> u128 {
    let k = k.min(n - k);
    let mut r: u128 = 1;
    for i in 0..k {
        r = r * (n - i) / (i + 1);
    }
    r
}

/// Coefficients of the monic diagonal Padé denominator-numerator polynomial.
///
/// Evaluated in 128-bit integers as `C(2m-j, m) * m!/j!`, so every value is the
/// correctly rounded double of the exact integer.
pub fn pade_coeffs(m: usize) -> Result<PadePolynomial> {
    if !(1..=PADE_MAX_DEGREE).contains(&m) {
        return Err(Error::InvalidArgument(format!(
            "Padé degree must be in 1..={PADE_MAX_DEGREE}, got {m}"
        )));
    }
    let coeffs = (0..=m)
        .map(|j| {
            let falling: u128 = ((j + 1)..=m).map(|k| k as u128).product();
            (binomial((2 * m - j) as u128, m as u128) * falling) as f64
        })
        .collect();
    Ok(PadePolynomial { m, coeffs })
}

/// `R_m(z) = P_m(z) / P_m(-z)`.
pub fn pade_ratio(m: usize, z: C64) -> Result<C64> {
    let p = pade_coeffs(m)?;
    Ok(p.eval(z) / p.eval(-z))
}

/// Numerator and denominator of the `(k, j)` Padé approximant of `exp`.
pub fn pade_pair(k: usize, j: usize) -> (Vec<f64>, Vec<f64>) {
    let fact = |n: usize| (1..=n).fold(1.0_f64, |acc, x| acc * x as f64);
    let kj = fact(k + j);
    let num = (0..=k)
        .map(|i| fact(k + j - i) * fact(k) / (kj * fact(i) * fact(k - i)))
        .collect();
    let den = (0..=j)
        .map(|i| {
            let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
            sign * fact(k + j - i) * fact(j) / (kj * fact(i) * fact(j - i))
        })
        .collect();
    (num, den)
}

/// Numerator and denominator of the stability function of a family.
pub fn family_stability_polynomials(family: Family, m: usize) -> (Vec<f64>, Vec<f64>) {
    match family {
        Family::Gauss => pade_pair(m, m),
        Family::RadauIIA => pade_pair(m - 1, m),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RootSolve {
    pub roots: Vec<C64>,
    /// True when the leading coefficient vanished and one root escaped to infinity.
    pub degree_drop: bool,
}

fn solve_num_den(num: &[f64], den: &[f64], w: C64) -> Result<RootSolve> {
    let n = num.len().max(den.len());
    let nj = |j: usize| num.get(j).copied().unwrap_or(0.0);
    let dj = |j: usize| den.get(j).copied().unwrap_or(0.0);
    let mut coeffs: Vec<C64> = (0..n).map(|j| c(nj(j)) - w * dj(j)).collect();
    // A leading coefficient is degenerate when it cancels relative to its own
    // two contributions; the lower coefficients are larger by factorials.
    let mut degree_drop = false;
    while coeffs.len() > 1 {
        let j = coeffs.len() - 1;
        let scale = nj(j).abs() + w.norm() * dj(j).abs();
        if coeffs[j].norm() < DROP_TOL * scale {
            coeffs.pop();
            degree_drop = true;
        } else {
            break;
        }
    }
    let r = poly::roots(&coeffs, 0.0)?;
    for z in &r.roots {
        let pz = poly::eval(&num.iter().map(|&x| c(x)).collect::<Vec<_>>(), *z);
        let qz = poly::eval(&den.iter().map(|&x| c(x)).collect::<Vec<_>>(), *z);
        let res = (pz - w * qz).norm();
        if res > 1e-8 * pz.norm() + 1e-10 {
            return Err(Error::RootResidual(res));
        }
    }
    Ok(RootSolve {
        roots: r.roots,
        degree_drop,
    })
}

/// All finite solutions of `R_m(z) = w`, i.e. roots of `P_m(z) - w P_m(-z)`.
pub fn solve_r_equals(m: usize, w: C64) -> Result<RootSolve> {
    if w.norm() == 0.0 {
        return Err(Error::InvalidArgument("w must be nonzero".into()));
    }
    let p = pade_coeffs(m)?;
    let den: Vec<f64> = p
        .coeffs
        .iter()
        .enumerate()
        .map(|(j, &x)| if j % 2 == 0 { x } else { -x })
        .collect();
    solve_num_den(&p.coeffs, &den, w)
}

/// Solutions of `R(z) = w` for the stability function of any supported family.
pub fn solve_family_r_equals(family: Family, m: usize, w: C64) -> Result<RootSolve> {
    let (num, den) = family_stability_polynomials(family, m);
    solve_num_den(&num, &den, w)
}

/// `|P_m(iy)|^2 - y^{2m}` evaluated without cancellation of the leading term.
fn modulus_gap(p: &PadePolynomial, y: f64) -> f64 {
    // P(z) P(-z) = S(z^2); on z = iy this is S(-y^2) and S has leading term (-1)^m x^m.
    let m = p.m;
    let x = -y * y;
    let mut acc = 0.0;
    for k in (0..m).rev() {
        let mut s = 0.0;
        for i in 0..=2 * k {
            let j = 2 * k - i;
            if i <= m && j <= m {
                let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
                s += sign * p.coeffs[i] * p.coeffs[j];
            }
        }
        acc = acc * x + s;
    }
    acc
}

/// `beta = 1 / (1 - y^{2m} / |P_m(iy)|^2)`.
///
/// Evaluated as `1 + y^{2m} / (|P_m(iy)|^2 - y^{2m})` so that it never rounds below 1.
pub fn beta_coefficient(m: usize, y: f64) -> Result<f64> {
    Ok(1.0 + beta_excess(m, y)?)
}

/// `beta - 1 = y^{2m} / (|P_m(iy)|^2 - y^{2m})`, resolved even where `beta`
/// itself rounds to 1.
pub fn beta_excess(m: usize, y: f64) -> Result<f64> {
    let p = pade_coeffs(m)?;
    let gap = modulus_gap(&p, y);
    if gap <= 0.0 {
        return Err(Error::Domain(format!(
            "|P_{m}(iy)|^2 - y^{{2m}} = {gap:.3e} is not positive at y = {y}"
        )));
    }
    Ok(y.powi(2 * m as i32) / gap)
}

/// `beta = R_m(iy) / R_m'(iy)`, the first-order coefficient of the root curve.
pub fn beta_from_derivative(m: usize, y: f64) -> Result<C64> {
    let p = pade_coeffs(m)?;
    let pc = p.complex_coeffs();
    let z = I * y;
    let (a, da) = poly::eval_with_derivative(&pc, z);
    let (b, db) = poly::eval_with_derivative(&pc, -z);
    // R = a / b(-z); R'/R = a'/a + b'(-z)/b(-z)
    let log_deriv = da / a + db / b;
    if log_deriv.norm() == 0.0 {
        return Err(Error::Domain("R' vanishes".into()));
    }
    Ok(c(1.0) / log_deriv)
}

/// Residue form `delta = P_m(-ir) / (2 sum_j (2j-1) p_{2j-1} (ir)^{2j-2})` at a
/// nonzero root `ir` of `M_m(0, z)`.
pub fn delta_residue(m: usize, r: f64) -> Result<f64> {
    let p = pade_coeffs(m)?;
    let z = I * r;
    let mut den = c(0.0);
    let mut j = 1;
    while 2 * j - 1 <= m {
        den += z.powi(2 * j as i32 - 2) * ((2 * j - 1) as f64 * p.coeffs[2 * j - 1]);
        j += 1;
    }
    let val = p.eval(-z) / (den * 2.0);
    Ok(val.re)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ThetaRootSet {
    pub m: usize,
    pub theta: f64,
    /// Imaginary parts of the roots `iy_j` of `M_m(theta, z)`, ascending.
    pub y: Vec<f64>,
    pub betas: Vec<f64>,
    /// `beta_j - 1`, accurate for small roots.
    pub excess: Vec<f64>,
    /// Largest |Re| seen before projecting onto the imaginary axis.
    pub max_abs_re: f64,
    pub degenerate: bool,
}

/// Whether `theta` is a degree-dropping angle for `M_m`.
pub fn is_degenerate_theta(m: usize, theta: f64, window: f64) -> bool {
    let pi = std::f64::consts::PI;
    if m % 2 == 0 {
        theta.abs() < window.max(1e-15)
    } else {
        (pi - theta.abs()).abs() < window.max(1e-15)
    }
}

/// Roots of `M_m(theta, z) = P_m(z) - e^{i theta} P_m(-z)`, all purely imaginary.
pub fn m_theta_roots(m: usize, theta: f64) -> Result<ThetaRootSet> {
    let pi = std::f64::consts::PI;
    if !(-pi..=pi).contains(&theta) {
        return Err(Error::InvalidArgument(format!(
            "theta = {theta} outside [-pi, pi]"
        )));
    }
    let solved = solve_r_equals(m, C64::from_polar(1.0, theta))?;
    let max_abs_re = solved.roots.iter().map(|z| z.re.abs()).fold(0.0, f64::max);
    if max_abs_re > IMAG_TOL {
        return Err(Error::Invariant(format!(
            "root off the imaginary axis by {max_abs_re:.3e} (m = {m}, theta = {theta})"
        )));
    }
    let mut y: Vec<f64> = solved.roots.iter().map(|z| z.im).collect();
    y.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let betas = y
        .iter()
        .map(|&yj| beta_coefficient(m, yj))
        .collect::<Result<Vec<_>>>()?;
    let excess = y
        .iter()
        .map(|&yj| beta_excess(m, yj))
        .collect::<Result<Vec<_>>>()?;
    Ok(ThetaRootSet {
        m,
        theta,
        y,
        betas,
        excess,
        max_abs_re,
        degenerate: solved.degree_drop,
    })
}

/// Positive roots of an even or odd real polynomial in `y`, via the polynomial
/// in `x = -y^2` and a Newton polish in `y`.
fn imaginary_axis_pairs(
    even_coeffs_in_x: &[f64],
    f: impl Fn(f64) -> (f64, f64),
) -> Result<Vec<f64>> {
    let coeffs: Vec<C64> = even_coeffs_in_x.iter().map(|&x| c(x)).collect();
    let r = poly::roots(&coeffs, 0.0)?;
    let mut out = Vec::new();
    for x in r.roots {
        if x.re >= 0.0 || x.im.abs() > 1e-8 * x.norm() {
            return Err(Error::Invariant(format!(
                "expected a negative real root, found {x}"
            )));
        }
        let mut y = (-x.re).sqrt();
        for _ in 0..5 {
            let (v, dv) = f(y);
            if dv == 0.0 {
                break;
            }
            let step = v / dv;
            y -= step;
            if step.abs() <= 1e-16 * y.abs() {
                break;
            }
        }
        out.push(y);
    }
    out.sort_by(|a, b| a.partial_cmp(b).unwrap());
    Ok(out)
}

/// Positive `r_l` with `M_m(0, i r_l) = 0`.
pub fn theta0_pairs(m: usize) -> Result<Vec<f64>> {
    let p = pade_coeffs(m)?;
    // M_m(0, z) / (2z) = sum_l p_{2l-1} z^{2l-2}; with x = z^2 = -y^2.
    let odd: Vec<f64> = p.coeffs.iter().skip(1).step_by(2).copied().collect();
    let in_x: Vec<f64> = odd.clone();
    imaginary_axis_pairs(&in_x, |y| {
        // g(y) = sum_l (-1)^{l-1} p_{2l-1} y^{2l-2}
        let mut v = 0.0;
        let mut dv = 0.0;
        for (l, &a) in odd.iter().enumerate() {
            let sign = if l % 2 == 0 { 1.0 } else { -1.0 };
            let k = 2 * l as i32;
            v += sign * a * y.powi(k);
            if k > 0 {
                dv += sign * a * k as f64 * y.powi(k - 1);
            }
        }
        (v, dv)
    })
}

/// Positive `rho_l` with `M_m(pi, i rho_l) = 0`.
pub fn theta_pi_pairs(m: usize) -> Result<Vec<f64>> {
    let p = pade_coeffs(m)?;
    let even: Vec<f64> = p.coeffs.iter().step_by(2).copied().collect();
    let in_x = even.clone();
    imaginary_axis_pairs(&in_x, |y| {
        let mut v = 0.0;
        let mut dv = 0.0;
        for (l, &a) in even.iter().enumerate() {
            let sign = if l % 2 == 0 { 1.0 } else { -1.0 };
            let k = 2 * l as i32;
            v += sign * a * y.powi(k);
            if k > 0 {
                dv += sign * a * k as f64 * y.powi(k - 1);
            }
        }
        (v, dv)
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LimitFit {
    /// Extrapolated `lim_{t -> 0} t * z(t)`.
    pub limit: f64,
    /// Linear coefficient of `t * z(t) = limit + slope * t`.
    pub slope: f64,
    /// Samples `(t, t * z(t))` used in the fit.
    pub samples: Vec<(f64, f64)>,
    /// Closed-form product value for comparison.
    pub product: f64,
}

/// Tracks the root of largest modulus of `R_m(z) = sign * e^t` as `t -> 0`.
pub fn large_root(m: usize, t: f64, sign: f64) -> Result<C64> {
    let sol = solve_r_equals(m, c(sign * t.exp()))?;
    sol.roots
        .into_iter()
        .max_by(|a, b| a.norm().partial_cmp(&b.norm()).unwrap())
        .ok_or_else(|| Error::Invariant("no roots".into()))
}

fn limit_fit(m: usize, sign: f64, product: f64) -> Result<LimitFit> {
    let mut samples = Vec::new();
    for &t in &LIMIT_FIT_T {
        let z = large_root(m, t, sign)?;
        samples.push((t, t * z.re));
    }
    let (t1, f1) = samples[0];
    let (t2, f2) = samples[1];
    let slope = (f1 - f2) / (t1 - t2);
    let limit = f2 - slope * t2;
    Ok(LimitFit {
        limit,
        slope,
        samples,
        product,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Theta0Characterization {
    pub m: usize,
    pub r: Vec<f64>,
    pub delta: Vec<f64>,
    /// Present exactly for even m.
    pub d_m: Option<LimitFit>,
}

pub fn characterize_theta0(m: usize) -> Result<Theta0Characterization> {
    if m < 2 {
        return Err(Error::InvalidArgument(
            "the theta = 0 characterization needs m >= 2".into(),
        ));
    }
    let r = theta0_pairs(m)?;
    let delta = r
        .iter()
        .map(|&rl| beta_coefficient(m, rl))
        .collect::<Result<Vec<_>>>()?;
    let d_m = if m % 2 == 0 {
        let p0 = pade_coeffs(m)?.coeffs[0];
        let product = p0 / r.iter().map(|x| x * x).product::<f64>();
        Some(limit_fit(m, 1.0, product)?)
    } else {
        None
    };
    Ok(Theta0Characterization { m, r, delta, d_m })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ThetaPiCharacterization {
    pub m: usize,
    pub rho: Vec<f64>,
    pub gamma: Vec<f64>,
    /// Present exactly for odd m.
    pub e_m: Option<LimitFit>,
}

pub fn characterize_theta_pi(m: usize) -> Result<ThetaPiCharacterization> {
    let rho = theta_pi_pairs(m)?;
    let gamma = rho
        .iter()
        .map(|&r| beta_coefficient(m, r))
        .collect::<Result<Vec<_>>>()?;
    let e_m = if m % 2 == 1 {
        let p0 = pade_coeffs(m)?.coeffs[0];
        let product = 2.0 * p0 / rho.iter().map(|x| x * x).product::<f64>();
        Some(limit_fit(m, -1.0, product)?)
    } else {
        None
    };
    Ok(ThetaPiCharacterization { m, rho, gamma, e_m })
}

/// Hausdorff distance between the spectrum of `Delta(zeta)` and the roots of `R(z) = 1/zeta`.
pub fn delta_spectrum_matches(t: &ButcherTableau, zeta: C64) -> Result<f64> {
    if !(zeta.norm() > 0.0 && zeta.norm() < 1.0) {
        return Err(Error::InvalidArgument("need 0 < |zeta| < 1".into()));
    }
    let spectrum = eigenvalues(&delta_matrix(t, zeta)?)?;
    let roots = solve_family_r_equals(t.family, t.m, c(1.0) / zeta)?;
    Ok(hausdorff(&spectrum, &roots.roots))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StageOrderDefect {
    pub m: usize,
    pub c_q: Vec<f64>,
}

/// `C_m = A^{m+1} 1 - c^{m+1} / (m+1)!`.
///
/// Uses the equivalent form `-(1/m!) int_0^{c_i} prod_j (tau - c_j) d tau`,
/// which avoids the cancellation in the direct formula.
pub fn stage_order_defect(t: &ButcherTableau) -> Result<StageOrderDefect> {
    if t.q != t.m {
        return Err(Error::InvalidArgument(
            "stage order must equal the stage count".into(),
        ));
    }
    let m = t.m;
    let (x, w) = gauss_legendre(m + 1)?;
    let m_fact: f64 = (1..=m).map(|k| k as f64).product();
    let c_q = (0..m)
        .map(|i| {
            let ci = t.c[i];
            let integral: f64 = x
                .iter()
                .zip(&w)
                .map(|(&xk, &wk)| {
                    let tau = 0.5 * ci * (xk + 1.0);
                    wk * t.c.iter().map(|&cj| tau - cj).product::<f64>()
                })
                .sum::<f64>()
                * 0.5
                * ci;
            -integral / m_fact
        })
        .collect();
    Ok(StageOrderDefect { m, c_q })
}

/// The direct matrix-power form of the stage-order defect (cancellation prone).
pub fn stage_order_defect_direct(t: &ButcherTableau) -> Vec<f64> {
    let m = t.m;
    let mut v = t.ones();
    for _ in 0..=m {
        v = &t.a * v;
    }
    let fact: f64 = (1..=m + 1).map(|k| k as f64).product();
    (0..m)
        .map(|i| v[i] - t.c[i].powi(m as i32 + 1) / fact)
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CancellationReport {
    pub m: usize,
    pub r: Vec<f64>,
    /// Normalized residual for each pair.
    pub residuals: Vec<f64>,
    pub max_residual: f64,
}

/// `|b^T[(I - i r A)^{-1} + (-1)^m (I + i r A)^{-1}] C_m| / |b^T (I - i r A)^{-1} C_m|` for every pair.
pub fn cancellation_check(m: usize) -> Result<CancellationReport> {
    if m < 2 {
        return Err(Error::InvalidArgument(
            "cancellation check needs m >= 2".into(),
        ));
    }
    let t = gauss_tableau(m)?;
    let cm = CVector::from_iterator(m, stage_order_defect(&t)?.c_q.into_iter().map(c));
    let a = t.a_complex();
    let b = CVector::from_iterator(m, t.b.iter().map(|&x| c(x)));
    let r = theta0_pairs(m)?;
    let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
    let mut residuals = Vec::with_capacity(r.len());
    for &rl in &r {
        let solve = |z: C64| -> Result<C64> {
            let mat = CMatrix::identity(m, m) - &a * z;
            let x = mat.lu().solve(&cm).ok_or(Error::Singular {
                condition: f64::INFINITY,
            })?;
            Ok(b.dot(&x))
        };
        let wp = solve(I * rl)?;
        let wm = solve(-I * rl)?;
        residuals.push((wp + wm * sign).norm() / wp.norm());
    }
    let max_residual = residuals.iter().copied().fold(0.0, f64::max);
    Ok(CancellationReport {
        m,
        r,
        residuals,
        max_residual,
    })
}
