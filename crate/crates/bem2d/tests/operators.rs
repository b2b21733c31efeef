use gausscq_bem2d::assembly::{assemble, assemble_kd, assemble_v};
use gausscq_bem2d::mesh::{make_mesh, Geometry};
use gausscq_bem2d::transfer::{BemTransfer, BoundaryOperator};
use gausscq_core::transfer::TransferFunction;
use gausscq_core::{CMatrix, C64};

fn max_abs(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

fn theta(p: [f64; 2]) -> f64 {
    p[1].atan2(p[0])
}

#[test]
fn single_layer_is_symmetric() {
    for g in [Geometry::UnitCircle, Geometry::LShape] {
        let mesh = make_mesh(g, 40).unwrap();
        let v = assemble_v(C64::new(2.0, 3.0), &mesh).unwrap();
        let asym = max_abs(&(&v - v.transpose()));
        assert!(asym <= 1e-10 * max_abs(&v), "{g:?}: {asym}");
    }
}

#[test]
fn circle_constant_density_gives_constant_potential() {
    let mesh = make_mesh(Geometry::UnitCircle, 128).unwrap();
    let v = assemble_v(C64::new(1.0, 0.0), &mesh).unwrap();
    let sums: Vec<f64> = (0..128)
        .map(|i| v.row(i).iter().map(|z| z.re).sum())
        .collect();
    let mean = sums.iter().sum::<f64>() / 128.0;
    let dev = sums.iter().map(|x| (x - mean).abs()).fold(0.0, f64::max);
    assert!(dev <= 0.02 * mean.abs(), "deviation {dev} of {mean}");
}

#[test]
fn circle_quadratic_form_converges_at_second_order() {
    // V cos(θ) = I_1(s) K_1(s) cos(θ) on the unit circle, so
    // <V cos, cos> = π I_1(1) K_1(1) at s = 1.
    let exact = std::f64::consts::PI * 0.340_173_350_904_867_5;
    let err = |n: usize| {
        let mesh = make_mesh(Geometry::UnitCircle, n).unwrap();
        let v = assemble_v(C64::new(1.0, 0.0), &mesh).unwrap();
        let phi: Vec<f64> = mesh.midpoints().iter().map(|&p| theta(p).cos()).collect();
        let mut q = 0.0;
        for i in 0..n {
            for j in 0..n {
                q += v[(i, j)].re * phi[i] * phi[j];
            }
        }
        (q - exact).abs()
    };
    let (e1, e2, e3) = (err(32), err(64), err(128));
    assert!(e3 < 1e-3 * exact);
    for ratio in [e1 / e2, e2 / e3] {
        assert!(
            (3.5..4.5).contains(&ratio),
            "ratio {ratio} ({e1}, {e2}, {e3})"
        );
    }
}

#[test]
fn double_layer_vanishes_on_the_self_panel() {
    let mesh = make_mesh(Geometry::LShape, 30).unwrap();
    let kd = assemble_kd(C64::new(1.5, -0.5), &mesh).unwrap();
    for i in 0..30 {
        assert_eq!(kd[(i, i)], C64::new(0.0, 0.0));
    }
}

#[test]
fn double_layer_reproduces_the_laplace_jump_for_constants() {
    // With outward normals the double layer of 1 equals -1/2 on the boundary.
    for g in [Geometry::UnitCircle, Geometry::LShape] {
        let mesh = make_mesh(g, 64).unwrap();
        let kd = assemble_kd(C64::new(1e-3, 0.0), &mesh).unwrap();
        for (i, p) in mesh.panels().iter().enumerate() {
            let row: C64 = kd.row(i).iter().sum();
            let defect = (row + 0.5 * p.length).norm();
            assert!(defect <= 1e-3 * p.length, "{g:?} row {i}: {defect}");
        }
    }
}

#[test]
fn matrices_respect_frequency_conjugation() {
    let mesh = make_mesh(Geometry::LShape, 24).unwrap();
    let s = C64::new(0.7, 4.0);
    let a = assemble(s, &mesh).unwrap();
    let b = assemble(s.conj(), &mesh).unwrap();
    assert!(max_abs(&(&a.kd.map(|z| z.conj()) - &b.kd)) <= 1e-14 * max_abs(&a.kd));
    assert!(max_abs(&(&a.v.map(|z| z.conj()) - &b.v)) <= 1e-14 * max_abs(&a.v));
}

#[test]
fn rejects_frequencies_off_the_right_half_plane() {
    let mesh = make_mesh(Geometry::UnitCircle, 8).unwrap();
    assert!(assemble(C64::new(0.0, 1.0), &mesh).is_err());
    assert!(assemble(C64::new(-1.0, 0.0), &mesh).is_err());
}

/// Discrete DtN of the midpoint samples of `cos(kθ)`, against the exact
/// eigenvalue `s K_k'(s) / K_k(s)`.
fn dtn_mode_error(n: usize, s: C64, k: i32, eigen: C64) -> f64 {
    let mesh = make_mesh(Geometry::UnitCircle, n).unwrap();
    let t = BemTransfer::new(mesh.clone(), BoundaryOperator::ExteriorDtN);
    let g: Vec<C64> = mesh
        .midpoints()
        .iter()
        .map(|&p| C64::new((k as f64 * theta(p)).cos(), 0.0))
        .collect();
    let out = t.apply(s, &g).unwrap();
    out.iter()
        .zip(&g)
        .map(|(o, g)| (o - eigen * g).norm())
        .fold(0.0, f64::max)
        / eigen.norm()
}

#[test]
fn circle_dtn_matches_the_modal_symbol() {
    let cases = [
        (C64::new(2.0, 0.0), 0, C64::new(-2.456_073_859_637_816, 0.0)),
        (C64::new(2.0, 0.0), 1, C64::new(-2.628_615_517_527_579, 0.0)),
        (
            C64::new(1.0, 3.0),
            1,
            C64::new(-1.555_677_093_443_777, -2.912_821_050_698_502),
        ),
    ];
    for (s, k, eigen) in cases {
        let coarse = dtn_mode_error(32, s, k, eigen);
        let fine = dtn_mode_error(128, s, k, eigen);
        assert!(fine < 0.01, "s={s} k={k}: {fine}");
        assert!(coarse / fine > 3.0, "s={s} k={k}: {coarse} -> {fine}");
    }
}

#[test]
fn dtn_behaves_like_minus_s_at_high_frequency() {
    let mesh = make_mesh(Geometry::UnitCircle, 64).unwrap();
    let t = BemTransfer::new(mesh, BoundaryOperator::ExteriorDtN);
    let out = t
        .apply(C64::new(50.0, 0.0), &vec![C64::new(1.0, 0.0); 64])
        .unwrap();
    for z in out {
        assert!((z + 50.0).norm() <= 5.0, "{z}");
    }
}

#[test]
fn inverse_single_layer_is_real_for_real_frequencies() {
    let mesh = make_mesh(Geometry::LShape, 32).unwrap();
    let t = BemTransfer::new(mesh.clone(), BoundaryOperator::InverseSingleLayer);
    let x: Vec<C64> = mesh
        .midpoints()
        .iter()
        .map(|p| C64::new(p[0] - 0.3 * p[1], 0.0))
        .collect();
    let y = t.apply(C64::new(3.0, 0.0), &x).unwrap();
    assert_eq!(y.len(), 32);
    let scale = y.iter().map(|z| z.norm()).fold(0.0, f64::max);
    for z in y {
        assert!(z.im.abs() <= 1e-10 * scale);
    }
}

#[test]
fn transfer_respects_frequency_conjugation() {
    let mesh = make_mesh(Geometry::LShape, 32).unwrap();
    for op in [
        BoundaryOperator::InverseSingleLayer,
        BoundaryOperator::ExteriorDtN,
    ] {
        let t = BemTransfer::new(mesh.clone(), op);
        assert!(t.conjugate_symmetric());
        let s = C64::new(1.2, 7.5);
        let a = t.eval(s).unwrap();
        let b = t.eval(s.conj()).unwrap();
        assert!(
            max_abs(&(&a.map(|z| z.conj()) - &b)) <= 1e-10 * max_abs(&a),
            "{op:?}"
        );
    }
}

#[test]
fn eval_and_apply_agree_and_reuse_the_factorization() {
    let mesh = make_mesh(Geometry::UnitCircle, 20).unwrap();
    let t = BemTransfer::new(mesh, BoundaryOperator::ExteriorDtN);
    let s = C64::new(0.9, 2.0);
    let k = t.eval(s).unwrap();
    assert_eq!(t.cached(), 1);
    let x: Vec<C64> = (0..20).map(|i| C64::new((i as f64).sin(), 0.0)).collect();
    let y = t.apply(s, &x).unwrap();
    assert_eq!(t.cached(), 1);
    for i in 0..20 {
        let row: C64 = (0..20).map(|j| k[(i, j)] * x[j]).sum();
        assert!((row - y[i]).norm() <= 1e-12 * y[i].norm().max(1.0));
    }
    assert!(t.apply(s, &x[..3]).is_err());
    assert!(t.apply(C64::new(0.05, 1.0), &x).is_err());
}
