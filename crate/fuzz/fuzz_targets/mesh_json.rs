#![no_main]

use gausscq_bem2d::BoundaryMesh;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(mesh) = BoundaryMesh::from_json_str(text) {
        assert!(mesh.perimeter().is_finite() && mesh.signed_area() > 0.0);
        let again = BoundaryMesh::from_json_str(&mesh.to_json_string().unwrap()).unwrap();
        assert_eq!(again.len(), mesh.len());
        assert_eq!(again.vertices(), mesh.vertices());
    }
});
