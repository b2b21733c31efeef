use gausscq_bem2d::assembly::assemble;
use gausscq_bem2d::cache::{decode_matrices, encode_matrices, MatrixCache};
use gausscq_bem2d::mesh::{make_mesh, BoundaryMesh, Geometry, L_SHAPE_CORNERS};
use gausscq_bem2d::norm::HMinusHalfNorm;
use gausscq_bem2d::transfer::{BemTransfer, BoundaryOperator};
use gausscq_core::cq::Trace;
use gausscq_core::transfer::TransferFunction;
use gausscq_core::C64;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

#[test]
fn lshape_perimeter_and_corners() {
    for n in [6, 17, 64, 128] {
        let m = make_mesh(Geometry::LShape, n).unwrap();
        assert_eq!(m.len(), n);
        assert!(
            (m.perimeter() - 8.0).abs() < 1e-12,
            "n={n}: {}",
            m.perimeter()
        );
        assert!((m.signed_area() - 3.19).abs() < 1e-12);
        for c in L_SHAPE_CORNERS {
            assert!(m.vertices().contains(&c), "corner {c:?} missing at n={n}");
        }
    }
    assert!(make_mesh(Geometry::LShape, 5).is_err());
}

#[test]
fn circle_perimeter_converges_quadratically() {
    let err = |n| {
        (make_mesh(Geometry::UnitCircle, n).unwrap().perimeter() - 2.0 * std::f64::consts::PI).abs()
    };
    let ratio = err(64) / err(128);
    assert!((ratio - 4.0).abs() < 0.01, "{ratio}");
    assert!(make_mesh(Geometry::UnitCircle, 2).is_err());
}

#[test]
fn normals_are_unit_and_outward() {
    for g in [Geometry::UnitCircle, Geometry::LShape] {
        let m = make_mesh(g, 48).unwrap();
        for p in m.panels() {
            assert!((p.normal[0].hypot(p.normal[1]) - 1.0).abs() < 1e-14);
            assert!((p.normal[0] * p.tangent[0] + p.normal[1] * p.tangent[1]).abs() < 1e-15);
        }
    }
    let c = make_mesh(Geometry::UnitCircle, 48).unwrap();
    for p in c.panels() {
        assert!(p.normal[0] * p.midpoint[0] + p.normal[1] * p.midpoint[1] > 0.99);
    }
}

#[test]
fn mesh_json_round_trip_and_validation() {
    let m = make_mesh(Geometry::LShape, 20).unwrap();
    let back = BoundaryMesh::from_json_str(&m.to_json_string().unwrap()).unwrap();
    assert_eq!(back, m);
    for bad in [
        "{}",
        r#"{"vertices": [[0,0],[1,0]], "panels": [[0,1],[1,0]]}"#,
        r#"{"vertices": [[0,0],[1,0],[0,1]], "panels": [[0,1],[1,5],[2,0]]}"#,
        r#"{"vertices": [[0,0],[0,1],[1,0]], "panels": [[0,1],[1,2],[2,0]]}"#,
        r#"{"vertices": [[0,0],[0,0],[0,1]], "panels": [[0,1],[1,2],[2,0]]}"#,
    ] {
        assert!(BoundaryMesh::from_json_str(bad).is_err(), "{bad}");
    }
}

#[test]
fn norm_basic_properties() {
    let mesh = make_mesh(Geometry::UnitCircle, 32).unwrap();
    let norm = HMinusHalfNorm::new(&mesh).unwrap();
    assert_eq!(norm.norm(&[0.0; 32]), 0.0);
    let mut rng = StdRng::seed_from_u64(7);
    for _ in 0..1000 {
        let phi: Vec<f64> = (0..32).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let n1 = norm.norm(&phi);
        assert!(n1 > 0.0);
        let alpha = rng.gen_range(-5.0..5.0);
        let scaled: Vec<f64> = phi.iter().map(|x| alpha * x).collect();
        assert!(
            (norm.norm(&scaled) - alpha.abs() * n1).abs()
                <= 1e-12 * n1.max(1.0) * alpha.abs().max(1.0)
        );
    }
}

fn trace(h: f64, values: Vec<Vec<f64>>) -> Trace {
    Trace {
        h,
        values,
        max_imag: 0.0,
    }
}

#[test]
fn error_metric_definition() {
    let mesh = make_mesh(Geometry::UnitCircle, 12).unwrap();
    let norm = HMinusHalfNorm::new(&mesh).unwrap();
    let row = |t: f64| (0..12).map(|i| (i as f64 + t).sin()).collect::<Vec<_>>();
    let coarse = trace(0.5, (0..=4).map(|n| row(0.5 * n as f64)).collect());
    let fine = trace(0.25, (0..=8).map(|n| row(0.25 * n as f64)).collect());
    assert_eq!(norm.error_metric(&coarse, &fine).unwrap(), 0.0);

    let zero = trace(0.25, vec![vec![0.0; 12]; 9]);
    let direct: f64 = coarse
        .values
        .iter()
        .map(|v| norm.norm(v).powi(2))
        .sum::<f64>()
        * 0.5;
    assert!((norm.error_metric(&coarse, &zero).unwrap() - direct.sqrt()).abs() < 1e-14);

    // Same samples on a grid twice as fine carry half the weight each.
    let doubled = trace(
        0.25,
        coarse
            .values
            .iter()
            .flat_map(|v| [v.clone(), v.clone()])
            .take(9)
            .collect(),
    );
    let zero_fine = trace(0.125, vec![vec![0.0; 12]; 17]);
    let a = norm.error_metric(&coarse, &zero).unwrap();
    let b = norm.error_metric(&doubled, &zero_fine).unwrap();
    let sum_doubled: f64 = doubled.values.iter().map(|v| norm.norm(v).powi(2)).sum();
    assert!((b - (0.25 * sum_doubled).sqrt()).abs() < 1e-14 && b > 0.0 && a > 0.0);

    let mismatched = trace(0.3, vec![vec![0.0; 12]; 7]);
    assert!(norm.error_metric(&coarse, &mismatched).is_err());
}

#[test]
fn matrix_artifact_round_trip() {
    let mesh = make_mesh(Geometry::LShape, 12).unwrap();
    let m = assemble(C64::new(1.0, -2.0), &mesh).unwrap();
    let bytes = encode_matrices(&m);
    let back = decode_matrices(&bytes).unwrap();
    assert_eq!(back.v, m.v);
    assert_eq!(back.kd, m.kd);
    assert_eq!(back.mass, m.mass);
    assert_eq!(back.s, m.s);
    assert!(decode_matrices(&bytes[..bytes.len() - 1]).is_err());
    let mut extra = bytes.clone();
    extra.push(0);
    assert!(decode_matrices(&extra).is_err());
    let mut huge = bytes[..8].to_vec();
    huge.extend_from_slice(&u64::MAX.to_le_bytes());
    huge.extend_from_slice(&[0; 16]);
    assert!(decode_matrices(&huge).is_err());
}

#[test]
fn disk_cache_reproduces_fresh_assembly() {
    let dir = tempfile::tempdir().unwrap();
    let mesh = make_mesh(Geometry::UnitCircle, 16).unwrap();
    let s = C64::new(0.8, 1.7);
    let x: Vec<C64> = (0..16).map(|i| C64::new(i as f64, 0.0)).collect();
    let plain = BemTransfer::new(mesh.clone(), BoundaryOperator::ExteriorDtN);
    let cached = || {
        BemTransfer::new(mesh.clone(), BoundaryOperator::ExteriorDtN)
            .with_matrix_cache(dir.path(), "circle")
            .unwrap()
    };
    let want = plain.apply(s, &x).unwrap();
    assert_eq!(cached().apply(s, &x).unwrap(), want);
    let store = MatrixCache::new(dir.path(), "circle", &mesh).unwrap();
    assert!(store.path(s).exists());
    // Second run reads the artifact back.
    assert_eq!(cached().apply(s, &x).unwrap(), want);
}
