use gausscq_core::linalg::c;
use gausscq_core::stability::*;
use gausscq_core::tableau::{gauss_tableau, radau_iia_tableau};
use gausscq_core::C64;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

#[test]
fn theta_grid_roots_are_imaginary_with_beta_above_one() {
    let pi = std::f64::consts::PI;
    for m in 1..=6 {
        for k in 0..721 {
            let theta = -pi + 2.0 * pi * k as f64 / 720.0;
            if is_degenerate_theta(m, theta, 0.05) {
                continue;
            }
            let set = m_theta_roots(m, theta).unwrap();
            assert_eq!(set.y.len(), m);
            assert!(set.max_abs_re <= 1e-9);
            for ((&y, &b), &e) in set.y.iter().zip(&set.betas).zip(&set.excess) {
                if y.abs() <= BETA_ASSERT_LIMIT && y != 0.0 {
                    assert!(
                        e > 0.0 && b >= 1.0 && b < 1e6,
                        "m={m} theta={theta} y={y} beta={b}"
                    );
                }
            }
        }
    }
}

#[test]
fn degenerate_angles_lose_one_root() {
    assert_eq!(m_theta_roots(2, 0.0).unwrap().y.len(), 1);
    assert!(m_theta_roots(2, 0.0).unwrap().degenerate);
    assert_eq!(m_theta_roots(3, std::f64::consts::PI).unwrap().y.len(), 2);
    assert!(!m_theta_roots(3, 0.0).unwrap().degenerate);
}

#[test]
fn small_root_follows_the_pade_order() {
    for m in 1..=6 {
        for t in [
            C64::new(1e-2, 0.0),
            C64::new(-1e-2, 0.0),
            C64::new(1e-3, 0.0),
            C64::new(-1e-3, 0.0),
            C64::new(0.0, 1e-2),
        ] {
            let roots = solve_r_equals(m, t.exp()).unwrap().roots;
            let best = roots
                .iter()
                .map(|z| (z - t).norm())
                .fold(f64::INFINITY, f64::min);
            assert!(
                best <= 2.0 * t.norm().powi(2 * m as i32 + 1) + 1e-12,
                "m={m} t={t} err={best}"
            );
        }
    }
}

#[test]
fn paired_roots_share_their_linear_coefficient() {
    for m in [3, 4, 5, 6] {
        let ch = characterize_theta0(m).unwrap();
        let t: f64 = 1e-6;
        let roots = solve_r_equals(m, c(t.exp())).unwrap().roots;
        for (&r, &delta) in ch.r.iter().zip(&ch.delta) {
            for sign in [1.0, -1.0] {
                let target = C64::new(0.0, sign * r);
                let z = roots
                    .iter()
                    .min_by(|a, b| {
                        (*a - target)
                            .norm()
                            .partial_cmp(&(*b - target).norm())
                            .unwrap()
                    })
                    .unwrap();
                let slope = (z - target) / t;
                assert!(
                    (slope.re - delta).abs() < 1e-6 * delta.max(1.0),
                    "m={m} r={r} {slope} vs {delta}"
                );
            }
        }
    }
}

#[test]
fn large_root_limits_match_products() {
    for m in [2, 4, 6] {
        let fit = characterize_theta0(m).unwrap().d_m.unwrap();
        assert!(fit.limit > 0.0);
        let rel = (fit.limit - fit.product).abs() / fit.product;
        assert!(rel < 1e-6, "D_{m}: {fit:?}");
        // |t z - D| <= C |t| with a consistent C.
        for &(t, v) in &fit.samples {
            assert!((v - fit.limit - fit.slope * t).abs() < 1e-9 * fit.limit);
        }
    }
    for m in [1, 3, 5] {
        let fit = characterize_theta_pi(m).unwrap().e_m.unwrap();
        assert!(fit.limit > 0.0);
        assert!(
            (fit.limit - fit.product).abs() < 1e-6 * fit.product,
            "E_{m}: {fit:?}"
        );
    }
}

#[test]
fn stability_derivative_is_quadratic_at_the_large_root() {
    for m in [2, 4] {
        let p = pade_coeffs(m).unwrap();
        let deriv = |z: C64| {
            let h = 1e-6 * z.norm().max(1.0);
            (p.eval(z + h) / p.eval(-z - h) - p.eval(z - h) / p.eval(-z + h)) / (2.0 * h)
        };
        let d1 = deriv(large_root(m, 1e-2, 1.0).unwrap()).norm();
        let d2 = deriv(large_root(m, 1e-3, 1.0).unwrap()).norm();
        let ratio = d1 / d2;
        assert!(ratio > 50.0 && ratio < 200.0, "m={m} ratio={ratio}");
    }
}

#[test]
fn exact_constants_for_three_stages() {
    let ch = characterize_theta0(3).unwrap();
    assert!((ch.delta[0] - 2.5).abs() <= 1e-12);
    let y = 60f64.sqrt();
    let a = beta_coefficient(3, y).unwrap();
    let b = beta_from_derivative(3, y).unwrap();
    assert!((a - 2.5).abs() <= 1e-12 && (b.re - 2.5).abs() <= 1e-12);
}

#[test]
fn cancellation_holds_up_to_twelve_stages() {
    for m in 3..=12 {
        let r = cancellation_check(m).unwrap();
        assert_eq!(r.residuals.len(), m.div_ceil(2) - 1);
        assert!(r.max_residual <= 1e-9, "m={m}: {:?}", r.residuals);
    }
}

#[test]
fn stage_order_defect_is_the_leading_stage_error() {
    for m in 1..=5 {
        let t = gauss_tableau(m).unwrap();
        let cq = stage_order_defect(&t).unwrap().c_q;
        let err = |z: f64| {
            let mut worst: f64 = 0.0;
            let mat = nalgebra::DMatrix::<f64>::identity(m, m) - &t.a * z;
            let x = mat.lu().solve(&t.ones()).unwrap();
            for i in 0..m {
                worst = worst.max((x[i] - (t.c[i] * z).exp() - cq[i] * z.powi(m as i32 + 1)).abs());
            }
            worst
        };
        // Step pairs keep the O(z^{m+2}) term well above rounding.
        let z = [1e-2, 1e-2, 5e-2, 0.2, 0.4][m - 1];
        let ratio = err(z) / err(z / 2.0);
        let want = 2f64.powi(m as i32 + 2);
        assert!(
            (ratio / want - 1.0).abs() < 0.1,
            "m={m} ratio={ratio} want={want}"
        );
    }
}

#[test]
fn spectrum_identity_on_random_points() {
    let mut rng = StdRng::seed_from_u64(0x2545_f491_4f6c_dd1d);
    let mut next = || rng.gen::<f64>();
    for m in 2..=5 {
        for t in [gauss_tableau(m).unwrap(), radau_iia_tableau(m).unwrap()] {
            for _ in 0..50 {
                let rho = 0.05 + 0.9 * next();
                let phi = 2.0 * std::f64::consts::PI * next();
                let d = delta_spectrum_matches(&t, C64::from_polar(rho, phi)).unwrap();
                assert!(d <= 1e-8, "{:?} m={m} rho={rho} phi={phi}: {d}", t.family);
            }
        }
    }
}
