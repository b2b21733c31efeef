//! Modified Bessel functions `K_0` and `K_1` for complex arguments with `Re z > 0`.
//!
//! Three regimes: the ascending series for `|z| <= 2`, Steed's continued
//! fraction (Temme's CF2) for `2 < |z| <= 20`, and the large-argument
//! asymptotic expansion beyond that. [`RadialBessel`] tabulates the middle
//! regime for repeated evaluation at one frequency.

use gausscq_core::C64;

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;
const SERIES_RADIUS: f64 = 2.0;
const ASYMPTOTIC_RADIUS: f64 = 20.0;
/// Beyond this real part `e^{-z}` underflows and both functions are returned as 0.
pub const UNDERFLOW_RE: f64 = 700.0;
const CF_MAX_ITER: usize = 100_000;

/// `(K_0(z), K_1(z))`.
///
/// Requires `Re z > 0`; returns NaN otherwise.
pub fn bessel_k01(z: C64) -> (C64, C64) {
    if !(z.re > 0.0) {
        let nan = C64::new(f64::NAN, f64::NAN);
        return (nan, nan);
    }
    if z.re > UNDERFLOW_RE {
        return (C64::new(0.0, 0.0), C64::new(0.0, 0.0));
    }
    let r2 = z.norm_sqr();
    if r2 <= SERIES_RADIUS * SERIES_RADIUS {
        series(z)
    } else if r2 <= ASYMPTOTIC_RADIUS * ASYMPTOTIC_RADIUS {
        continued_fraction(z)
    } else {
        asymptotic(z)
    }
}

pub fn bessel_k0(z: C64) -> C64 {
    bessel_k01(z).0
}

pub fn bessel_k1(z: C64) -> C64 {
    bessel_k01(z).1
}

/// Terms of the ascending series; `(|z|²/4)^k / (k!)² < 1e-18` for `|z| <= 2`.
const SERIES_TERMS: usize = 13;
/// Terms of the asymptotic expansion; the tail is below `1e-15` for `|z| >= 20`.
const ASYMPTOTIC_TERMS: usize = 30;

fn series(z: C64) -> (C64, C64) {
    let q = z * z * 0.25;
    let log_half = (z * 0.5).ln();
    // term_k = q^k / (k!)^2 and tail_k = q^k / (k! (k+1)!)
    let mut term = C64::new(1.0, 0.0);
    let mut i0 = term;
    let mut k0_sum = C64::new(0.0, 0.0);
    let mut i1_sum = term;
    let mut k1_sum = term * (1.0 - 2.0 * EULER_GAMMA);
    let mut harmonic = 0.0;
    let mut tail = term;
    for k in 1..SERIES_TERMS {
        let kf = k as f64;
        term *= q * (1.0 / (kf * kf));
        tail *= q * (1.0 / (kf * (kf + 1.0)));
        harmonic += 1.0 / kf;
        i0 += term;
        k0_sum += term * harmonic;
        i1_sum += tail;
        // psi(k+1) + psi(k+2) = -2 gamma + 2 H_k + 1/(k+1)
        k1_sum += tail * (2.0 * (harmonic - EULER_GAMMA) + 1.0 / (kf + 1.0));
    }
    let k0 = -(log_half + EULER_GAMMA) * i0 + k0_sum;
    let i1 = z * 0.5 * i1_sum;
    let k1 = z.inv() + log_half * i1 - z * 0.25 * k1_sum;
    (k0, k1)
}

fn continued_fraction(z: C64) -> (C64, C64) {
    let one = C64::new(1.0, 0.0);
    let mut b = (one + z) * 2.0;
    let mut d = b.inv();
    let mut delh = d;
    let mut h = d;
    let mut q1 = C64::new(0.0, 0.0);
    let mut q2 = one;
    let a1 = 0.25;
    let mut q = C64::new(a1, 0.0);
    let mut c = C64::new(a1, 0.0);
    let mut a = -a1;
    let mut s = one + q * delh;
    for i in 1..CF_MAX_ITER {
        let fi = i as f64;
        a -= 2.0 * fi;
        c = -c * (a / (fi + 1.0));
        let qnew = (q1 - b * q2) * (1.0 / a);
        q1 = q2;
        q2 = qnew;
        q += c * qnew;
        b += 2.0;
        d = (b + d * a).inv();
        delh = (b * d - 1.0) * delh;
        h += delh;
        let dels = q * delh;
        s += dels;
        if dels.norm_sqr() < 1e-34 * s.norm_sqr() {
            break;
        }
    }
    let h = h * a1;
    let k0 = sqrt_right(std::f64::consts::FRAC_PI_2 * z.inv()) * (-z).exp() / s;
    let k1 = k0 * (z + 0.5 - h) / z;
    (k0, k1)
}

/// Principal square root for `Re z > 0`, without polar conversion.
#[inline]
fn sqrt_right(z: C64) -> C64 {
    let t = (0.5 * (z.norm_sqr().sqrt() + z.re)).sqrt();
    C64::new(t, 0.5 * z.im / t)
}

/// `e^{-z}`.
#[inline]
fn exp_neg(z: C64) -> C64 {
    let (sin, cos) = z.im.sin_cos();
    C64::new(cos, -sin) * (-z.re).exp()
}

/// Smallest term count whose truncation error is below `1e-16` at `|z| >= r`,
/// indexed by term count.
fn asymptotic_thresholds() -> &'static [f64; ASYMPTOTIC_TERMS] {
    static THRESHOLDS: std::sync::OnceLock<[f64; ASYMPTOTIC_TERMS]> = std::sync::OnceLock::new();
    THRESHOLDS.get_or_init(|| {
        let a = asymptotic_coefficients();
        let mut out = [f64::INFINITY; ASYMPTOTIC_TERMS];
        for k in 1..ASYMPTOTIC_TERMS {
            let worst = a[0][k].abs().max(a[1][k].abs());
            out[k] = (worst / 1e-16).powf(1.0 / k as f64);
        }
        out
    })
}

/// `a_k(ν) = Π_{j<=k} (4ν² - (2j-1)²) / (8j)` for `ν = 0, 1`.
fn asymptotic_coefficients() -> &'static [[f64; ASYMPTOTIC_TERMS]; 2] {
    static COEFFS: std::sync::OnceLock<[[f64; ASYMPTOTIC_TERMS]; 2]> = std::sync::OnceLock::new();
    COEFFS.get_or_init(|| {
        let mut out = [[0.0; ASYMPTOTIC_TERMS]; 2];
        for (nu, row) in out.iter_mut().enumerate() {
            let mu = 4.0 * (nu * nu) as f64;
            row[0] = 1.0;
            for k in 1..ASYMPTOTIC_TERMS {
                let odd = (2 * k - 1) as f64;
                row[k] = row[k - 1] * (mu - odd * odd) / (8.0 * k as f64);
            }
        }
        out
    })
}

fn asymptotic(z: C64) -> (C64, C64) {
    let w = z.inv();
    let pref = sqrt_right(std::f64::consts::FRAC_PI_2 * w) * exp_neg(z);
    let coeffs = asymptotic_coefficients();
    let r = z.norm_sqr().sqrt();
    let thresholds = asymptotic_thresholds();
    let terms = (1..ASYMPTOTIC_TERMS)
        .find(|&k| thresholds[k] <= r)
        .unwrap_or(ASYMPTOTIC_TERMS);
    let mut sums = [C64::new(0.0, 0.0); 2];
    for (sum, a) in sums.iter_mut().zip(coeffs) {
        for &ak in a[..terms].iter().rev() {
            *sum = *sum * w + ak;
        }
    }
    (pref * sums[0], pref * sums[1])
}

/// Degree of the Chebyshev pieces in [`RadialBessel`].
const CHEB_DEGREE: usize = 16;
/// Width of one piece in units of `|s r|`.
const CHEB_PIECE: f64 = 1.5;

/// `(K_0(s r), K_1(s r))` for a fixed `s` as a function of `r > 0`.
///
/// Between the series and asymptotic regimes the functions are replaced by
/// piecewise Chebyshev interpolants in `r`, built once per frequency.
#[derive(Debug, Clone)]
pub struct RadialBessel {
    s: C64,
    abs_s: f64,
    pieces: Vec<[[C64; CHEB_DEGREE + 1]; 2]>,
}

impl RadialBessel {
    pub fn new(s: C64) -> Self {
        let abs_s = s.norm();
        let count = ((ASYMPTOTIC_RADIUS - SERIES_RADIUS) / CHEB_PIECE).ceil() as usize;
        let n = CHEB_DEGREE + 1;
        let tabulate = s.re > 0.0 && abs_s.is_finite();
        let pieces = if tabulate {
            (0..count)
                .map(|p| {
                    let lo = SERIES_RADIUS + p as f64 * CHEB_PIECE;
                    let vals: Vec<(C64, C64)> = (0..n)
                        .map(|j| {
                            let x = (std::f64::consts::PI * (j as f64 + 0.5) / n as f64).cos();
                            let r = (lo + 0.5 * CHEB_PIECE * (x + 1.0)) / abs_s;
                            bessel_k01(s * r)
                        })
                        .collect();
                    let mut coef = [[C64::new(0.0, 0.0); CHEB_DEGREE + 1]; 2];
                    for k in 0..n {
                        let mut acc = (C64::new(0.0, 0.0), C64::new(0.0, 0.0));
                        for (j, v) in vals.iter().enumerate() {
                            let w = (std::f64::consts::PI * k as f64 * (j as f64 + 0.5) / n as f64)
                                .cos();
                            acc.0 += v.0 * w;
                            acc.1 += v.1 * w;
                        }
                        let scale = if k == 0 { 1.0 } else { 2.0 } / n as f64;
                        coef[0][k] = acc.0 * scale;
                        coef[1][k] = acc.1 * scale;
                    }
                    coef
                })
                .collect()
        } else {
            Vec::new()
        };
        Self { s, abs_s, pieces }
    }

    pub fn s(&self) -> C64 {
        self.s
    }

    #[inline]
    pub fn eval(&self, r: f64) -> (C64, C64) {
        let x = self.abs_s * r;
        if x <= SERIES_RADIUS || x > ASYMPTOTIC_RADIUS || self.pieces.is_empty() {
            return bessel_k01(self.s * r);
        }
        let offset = (x - SERIES_RADIUS) / CHEB_PIECE;
        let p = (offset as usize).min(self.pieces.len() - 1);
        let t = 2.0 * (offset - p as f64) - 1.0;
        let coef = &self.pieces[p];
        (clenshaw(&coef[0], t), clenshaw(&coef[1], t))
    }
}

#[inline]
fn clenshaw(c: &[C64; CHEB_DEGREE + 1], t: f64) -> C64 {
    let mut b1 = C64::new(0.0, 0.0);
    let mut b2 = C64::new(0.0, 0.0);
    for &ck in c[1..].iter().rev() {
        let b0 = b1 * (2.0 * t) - b2 + ck;
        b2 = b1;
        b1 = b0;
    }
    b1 * t - b2 + c[0]
}

#[cfg(test)]
mod tests {
    use super::*;

    /// `(re z, im z, K_0(z), K_1(z))` from a 40-digit reference evaluation.
    #[rustfmt::skip]
    const REFERENCE: [(f64, f64, [f64; 2], [f64; 2]); 19] = [
        (1.0, 0.0, [0.42102443824070833, 0.0], [0.60190723019723457, 0.0]),
        (0.001, 0.0, [7.0236888005623813, 0.0], [999.99623815608555, 0.0]),
        (0.5, 0.5, [0.55297231092557471, -0.59964194785659463], [0.5784533638220992, -1.0828582158182142]),
        (1.9, 0.3, [0.11944714382938968, -0.046498768018739308], [0.14581428850383919, -0.06147300908128221]),
        (2.1, 0.0, [0.10078374088996693, 0.0], [0.1227464115335079, 0.0]),
        (3.0, 4.0, [-0.007239051213570155, 0.026510418350267677], [-0.0056734204013233075, 0.028666936579007819]),
        (0.05, 7.9, [-0.30763105496282691, -0.29135283770160485], [-0.32671655822195337, -0.27265044888735684]),
        (8.5, 0.1, [8.5773100341347113e-5, -9.1024233601248656e-6], [9.0678409239084207e-5, -9.6799786445195286e-6]),
        (10.0, -10.0, [-8.5995322049402432e-6, -1.2334791571650979e-5], [-8.5132483984864228e-6, -1.285270896727941e-5]),
        (0.01, 24.0, [0.23766364327077634, 0.087496747181248946], [0.23953918739807, 0.082567297440281971]),
        (24.0, 1.0, [5.0217721051769708e-12, -8.1873518326376907e-12], [5.1182134747215714e-12, -8.3601937240365521e-12]),
        (30.0, 30.0, [9.3229857439580343e-15, 1.5360193589723775e-14], [9.5276197255893079e-15, 1.5411123428033083e-14]),
        (0.2, 45.0, [-0.034469738560447532, -0.14902405653288209], [-0.036129070537461933, -0.14865768083094834]),
        (100.0, 0.0, [4.656628229175902e-45, 0.0], [4.6798537356369093e-45, 0.0]),
        (1.0, 300.0, [0.018362320992055871, 0.019272575453851539], [0.018394568839436446, 0.019242106014475328]),
        (650.0, 20.0, [9.896893806462758e-285, -2.3087229888061075e-284], [9.9039511777679008e-285, -2.3105199542192852e-284]),
        (0.3, 2.5, [-0.5770433792321198, 0.022724612429975819], [-0.59486622874781264, 0.13220551329972723]),
        (15.0, 0.01, [9.8190117045247e-8, -1.0141547928848597e-9], [1.0141185048989304e-7, -1.0495463096010673e-9]),
        (5.0, 19.0, [0.0013235210552269396, -0.0013657859922213321], [0.0012990685974954188, -0.001407348925916427]),
    ];

    #[test]
    fn matches_reference_values() {
        for (re, im, k0, k1) in REFERENCE {
            let (a, b) = bessel_k01(C64::new(re, im));
            let k0 = C64::new(k0[0], k0[1]);
            let k1 = C64::new(k1[0], k1[1]);
            assert!(
                (a - k0).norm() <= 1e-12 * k0.norm(),
                "K0({re}+{im}i) = {a}, want {k0}"
            );
            assert!(
                (b - k1).norm() <= 1e-12 * k1.norm(),
                "K1({re}+{im}i) = {b}, want {k1}"
            );
        }
    }

    #[test]
    fn k0_of_one() {
        assert!((bessel_k0(C64::new(1.0, 0.0)).re - 0.421_024_438_240_708_3).abs() < 1e-15);
    }

    #[test]
    fn conjugate_symmetry() {
        for z in [C64::new(0.7, 1.3), C64::new(4.0, 9.0), C64::new(0.5, 60.0)] {
            let (a, b) = bessel_k01(z);
            let (c, d) = bessel_k01(z.conj());
            assert!((a.conj() - c).norm() <= 1e-15 * a.norm());
            assert!((b.conj() - d).norm() <= 1e-15 * b.norm());
        }
    }

    #[test]
    fn satisfies_the_bessel_equation() {
        // z K0'' + K0' - z K0 = 0 with K0' = -K1.
        for z in [
            C64::new(0.8, 0.4),
            C64::new(1.99, 0.1),
            C64::new(5.0, 3.0),
            C64::new(12.0, -7.0),
            C64::new(30.0, 2.0),
        ] {
            let h = 1e-4;
            let d2 = (bessel_k0(z + h) - bessel_k0(z) * 2.0 + bessel_k0(z - h)) / (h * h);
            let d1 = -bessel_k1(z);
            let res = z * d2 + d1 - z * bessel_k0(z);
            assert!(
                res.norm() <= 1e-6 * (bessel_k0(z).norm() * z.norm()).max(1e-300),
                "z={z}: {res}"
            );
        }
    }

    #[test]
    fn regimes_agree_at_their_boundaries() {
        for arg in [0.0, 0.7, 1.5] {
            let z = C64::from_polar(SERIES_RADIUS, arg);
            let (a, b) = series(z);
            let (c, d) = continued_fraction(z);
            assert!(
                (a - c).norm() <= 1e-13 * a.norm() && (b - d).norm() <= 1e-13 * b.norm(),
                "{z}"
            );
            let z = C64::from_polar(ASYMPTOTIC_RADIUS, arg);
            let (a, b) = continued_fraction(z);
            let (c, d) = asymptotic(z);
            assert!(
                (a - c).norm() <= 1e-13 * a.norm() && (b - d).norm() <= 1e-13 * b.norm(),
                "{z}"
            );
        }
    }

    #[test]
    fn radial_table_matches_direct_evaluation() {
        for s in [
            C64::new(1.0, 0.0),
            C64::new(3.0, 40.0),
            C64::new(0.2, 900.0),
            C64::new(300.0, 50.0),
        ] {
            let table = RadialBessel::new(s);
            for k in 0..2000 {
                let r = 1e-4 * 1.006f64.powi(k);
                let (a, b) = table.eval(r);
                let (c, d) = bessel_k01(s * r);
                assert!((a - c).norm() <= 1e-13 * c.norm(), "s={s} r={r}");
                assert!((b - d).norm() <= 1e-13 * d.norm(), "s={s} r={r}");
            }
        }
    }

    #[test]
    fn domain_edges() {
        assert!(bessel_k0(C64::new(-1.0, 0.0)).re.is_nan());
        assert_eq!(bessel_k0(C64::new(800.0, 1.0)), C64::new(0.0, 0.0));
    }
}
