//! Polynomial evaluation and root finding through balanced companion matrices.

use crate::error::{Error, Result};
use crate::linalg::{eigenvalues, CMatrix, C64};

/// Horner evaluation of `sum_j coeffs[j] z^j`.
pub fn eval(coeffs: &[C64], z: C64) -> C64 {
    coeffs
        .iter()
        .rev()
        .fold(C64::new(0.0, 0.0), |acc, &a| acc * z + a)
}

/// Value and first derivative.
pub fn eval_with_derivative(coeffs: &[C64], z: C64) -> (C64, C64) {
    let zero = C64::new(0.0, 0.0);
    let mut p = zero;
    let mut dp = zero;
    for &a in coeffs.iter().rev() {
        dp = dp * z + p;
        p = p * z + a;
    }
    (p, dp)
}

#[derive(Debug, Clone)]
pub struct Roots {
    pub roots: Vec<C64>,
    /// Number of leading coefficients treated as zero.
    pub degree_drop: usize,
}

/// Effective degree after discarding leading coefficients below
/// `drop_tol * max |c_j|`.
pub fn effective_degree(coeffs: &[C64], drop_tol: f64) -> usize {
    let scale = coeffs.iter().map(|a| a.norm()).fold(0.0, f64::max);
    let mut d = coeffs.len().saturating_sub(1);
    while d > 0 && coeffs[d].norm() <= drop_tol * scale {
        d -= 1;
    }
    d
}

/// Parlett-Reinsch balancing with radix-2 scale factors (in place).
fn balance(m: &mut CMatrix) {
    let n = m.nrows();
    let radix = 2.0_f64;
    let mut converged = false;
    let mut sweeps = 0;
    while !converged && sweeps < 100 {
        converged = true;
        sweeps += 1;
        for i in 0..n {
            let mut col = 0.0;
            let mut row = 0.0;
            for j in 0..n {
                if j != i {
                    col += m[(j, i)].norm();
                    row += m[(i, j)].norm();
                }
            }
            if col == 0.0 || row == 0.0 {
                continue;
            }
            let mut f = 1.0;
            let s = col + row;
            let mut cc = col;
            let mut rr = row;
            while cc < rr / radix {
                cc *= radix;
                rr /= radix;
                f *= radix;
            }
            while cc >= rr * radix {
                cc /= radix;
                rr *= radix;
                f /= radix;
            }
            if (cc + rr) < 0.95 * s {
                converged = false;
                for j in 0..n {
                    m[(i, j)] /= f;
                    m[(j, i)] *= f;
                }
            }
        }
    }
}

/// All roots of `sum_j coeffs[j] z^j`.
///
/// Leading coefficients below `drop_tol` relative to the largest one are
/// dropped (reported in `degree_drop`). Each eigenvalue of the balanced
/// companion matrix receives one Newton step when that step lowers |p|.
pub fn roots(coeffs: &[C64], drop_tol: f64) -> Result<Roots> {
    if coeffs.is_empty()
        || coeffs
            .iter()
            .any(|a| !a.re.is_finite() || !a.im.is_finite())
    {
        return Err(Error::InvalidArgument(
            "polynomial coefficients must be finite".into(),
        ));
    }
    let d = effective_degree(coeffs, drop_tol);
    let degree_drop = coeffs.len() - 1 - d;
    // Exact zero roots are split off before the eigenvalue solve.
    let zeros = coeffs[..d].iter().take_while(|a| a.norm() == 0.0).count();
    let poly = &coeffs[zeros..=d];
    let d = d - zeros;
    if d == 0 {
        return Ok(Roots {
            roots: vec![C64::new(0.0, 0.0); zeros],
            degree_drop,
        });
    }
    let lead = poly[d];
    let mut comp = CMatrix::zeros(d, d);
    for j in 0..d {
        comp[(0, j)] = -poly[d - 1 - j] / lead;
    }
    for i in 1..d {
        comp[(i, i - 1)] = C64::new(1.0, 0.0);
    }
    balance(&mut comp);
    let mut rts = eigenvalues(&comp)?;
    for z in rts.iter_mut() {
        let (p, dp) = eval_with_derivative(poly, *z);
        if dp.norm() > 0.0 {
            let cand = *z - p / dp;
            if eval(poly, cand).norm() < p.norm() {
                *z = cand;
            }
        }
    }
    rts.extend(std::iter::repeat(C64::new(0.0, 0.0)).take(zeros));
    Ok(Roots {
        roots: rts,
        degree_drop,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cr(x: f64) -> C64 {
        C64::new(x, 0.0)
    }

    #[test]
    fn cubic_with_known_roots() {
        // (z-1)(z+2)(z-3i)
        let coeffs = [
            C64::new(0.0, 6.0),
            C64::new(-2.0, -3.0),
            C64::new(1.0, -3.0),
            cr(1.0),
        ];
        let r = roots(&coeffs, 1e-14).unwrap();
        assert_eq!(r.degree_drop, 0);
        for want in [cr(1.0), cr(-2.0), C64::new(0.0, 3.0)] {
            assert!(r.roots.iter().any(|z| (z - want).norm() < 1e-13));
        }
    }

    #[test]
    fn tiny_leading_coefficient_drops_degree() {
        let coeffs = [cr(-2.0), cr(1.0), cr(1e-20)];
        let r = roots(&coeffs, 1e-14).unwrap();
        assert_eq!(r.degree_drop, 1);
        assert_eq!(r.roots.len(), 1);
        assert!((r.roots[0] - cr(2.0)).norm() < 1e-15);
    }

    #[test]
    fn zero_roots_are_exact() {
        // z (z^2 + 4)
        let r = roots(&[cr(0.0), cr(4.0), cr(0.0), cr(1.0)], 1e-14).unwrap();
        assert_eq!(r.roots.iter().filter(|z| z.norm() == 0.0).count(), 1);
        assert!(r
            .roots
            .iter()
            .any(|z| (z - C64::new(0.0, 2.0)).norm() < 1e-14));
    }

    #[test]
    fn badly_scaled_coefficients() {
        // roots 1e-3 and 1e4
        let coeffs = [cr(10.0), cr(-(1e4 + 1e-3)), cr(1.0)];
        let r = roots(&coeffs, 1e-14).unwrap();
        assert!(r.roots.iter().any(|z| (z - cr(1e-3)).norm() < 1e-15));
        assert!(r.roots.iter().any(|z| (z - cr(1e4)).norm() < 1e-9));
    }
}
