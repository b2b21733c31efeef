//! Closed polygonal boundaries split into straight panels.

use gausscq_core::{Error, Result};
use serde::{Deserialize, Serialize};

/// Corners of the L-shaped obstacle, counter-clockwise.
pub const L_SHAPE_CORNERS: [[f64; 2]; 6] = [
    [1.0, 0.1],
    [0.1, 0.1],
    [0.1, 1.0],
    [-1.0, 1.0],
    [-1.0, -1.0],
    [1.0, -1.0],
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Geometry {
    UnitCircle,
    LShape,
}

impl Geometry {
    pub fn name(&self) -> &'static str {
        match self {
            Geometry::UnitCircle => "circle",
            Geometry::LShape => "lshape",
        }
    }

    pub fn min_panels(&self) -> usize {
        match self {
            Geometry::UnitCircle => 3,
            Geometry::LShape => L_SHAPE_CORNERS.len(),
        }
    }
}

/// A straight boundary segment from `a` to `b`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Panel {
    pub a: [f64; 2],
    pub b: [f64; 2],
    pub midpoint: [f64; 2],
    pub length: f64,
    /// Unit vector from `a` to `b`.
    pub tangent: [f64; 2],
    /// Outward unit normal (the tangent turned clockwise).
    pub normal: [f64; 2],
}

impl Panel {
    pub(crate) fn new(a: [f64; 2], b: [f64; 2]) -> Self {
        let d = [b[0] - a[0], b[1] - a[1]];
        let length = d[0].hypot(d[1]);
        let tangent = [d[0] / length, d[1] / length];
        Self {
            a,
            b,
            midpoint: [0.5 * (a[0] + b[0]), 0.5 * (a[1] + b[1])],
            length,
            tangent,
            normal: [tangent[1], -tangent[0]],
        }
    }

    /// Point at arc length `t` from `a`.
    pub fn point(&self, t: f64) -> [f64; 2] {
        [
            self.a[0] + t * self.tangent[0],
            self.a[1] + t * self.tangent[1],
        ]
    }
}

/// Serialized form: vertex coordinates and panels as index pairs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeshJson {
    pub vertices: Vec<[f64; 2]>,
    pub panels: Vec<[usize; 2]>,
}

/// A closed, counter-clockwise polygon of straight panels.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryMesh {
    vertices: Vec<[f64; 2]>,
    connectivity: Vec<[usize; 2]>,
    panels: Vec<Panel>,
    pub closed: bool,
}

impl BoundaryMesh {
    /// Panels through consecutive vertices, closing back to the first.
    pub fn from_polygon(vertices: Vec<[f64; 2]>) -> Result<Self> {
        let n = vertices.len();
        let connectivity = (0..n).map(|i| [i, (i + 1) % n]).collect();
        Self::from_parts(vertices, connectivity)
    }

    pub fn from_parts(vertices: Vec<[f64; 2]>, connectivity: Vec<[usize; 2]>) -> Result<Self> {
        if connectivity.len() < 3 {
            return Err(Error::InvalidArgument(format!(
                "a closed boundary needs at least 3 panels, got {}",
                connectivity.len()
            )));
        }
        if vertices.iter().flatten().any(|x| !x.is_finite()) {
            return Err(Error::InvalidArgument(
                "vertex coordinates must be finite".into(),
            ));
        }
        for (k, p) in connectivity.iter().enumerate() {
            if p[0] >= vertices.len() || p[1] >= vertices.len() {
                return Err(Error::InvalidArgument(format!(
                    "panel {k} references a missing vertex"
                )));
            }
            let next = connectivity[(k + 1) % connectivity.len()];
            if p[1] != next[0] {
                return Err(Error::InvalidArgument(format!(
                    "panel {k} does not connect to panel {}",
                    k + 1
                )));
            }
        }
        let panels: Vec<Panel> = connectivity
            .iter()
            .map(|p| Panel::new(vertices[p[0]], vertices[p[1]]))
            .collect();
        if let Some(k) = panels
            .iter()
            .position(|p| !(p.length > 0.0) || !p.length.is_finite())
        {
            return Err(Error::InvalidArgument(format!(
                "panel {k} has non-positive length"
            )));
        }
        let mesh = Self {
            vertices,
            connectivity,
            panels,
            closed: true,
        };
        if !(mesh.signed_area() > 0.0) {
            return Err(Error::InvalidArgument(
                "boundary must be positively oriented".into(),
            ));
        }
        Ok(mesh)
    }

    pub fn panels(&self) -> &[Panel] {
        &self.panels
    }

    pub fn vertices(&self) -> &[[f64; 2]] {
        &self.vertices
    }

    pub fn len(&self) -> usize {
        self.panels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.panels.is_empty()
    }

    pub fn perimeter(&self) -> f64 {
        self.panels.iter().map(|p| p.length).sum()
    }

    /// Shoelace area; positive for counter-clockwise boundaries.
    pub fn signed_area(&self) -> f64 {
        0.5 * self
            .panels
            .iter()
            .map(|p| p.a[0] * p.b[1] - p.b[0] * p.a[1])
            .sum::<f64>()
    }

    pub fn lengths(&self) -> Vec<f64> {
        self.panels.iter().map(|p| p.length).collect()
    }

    pub fn midpoints(&self) -> Vec<[f64; 2]> {
        self.panels.iter().map(|p| p.midpoint).collect()
    }

    /// Shared vertex of panels `i` and `j` as `(end of i or start of i, ...)`.
    pub(crate) fn shared_vertex(&self, i: usize, j: usize) -> Option<usize> {
        let (p, q) = (self.connectivity[i], self.connectivity[j]);
        [p[0], p[1]].into_iter().find(|v| *v == q[0] || *v == q[1])
    }

    pub fn to_json(&self) -> MeshJson {
        MeshJson {
            vertices: self.vertices.clone(),
            panels: self.connectivity.clone(),
        }
    }

    pub fn to_json_string(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&self.to_json())?)
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        let raw: MeshJson = serde_json::from_str(s)?;
        Self::try_from(raw)
    }
}

impl TryFrom<MeshJson> for BoundaryMesh {
    type Error = Error;

    fn try_from(raw: MeshJson) -> Result<Self> {
        Self::from_parts(raw.vertices, raw.panels)
    }
}

pub fn make_mesh(geometry: Geometry, n: usize) -> Result<BoundaryMesh> {
    if n < geometry.min_panels() {
        return Err(Error::InvalidArgument(format!(
            "{} needs at least {} panels, got {n}",
            geometry.name(),
            geometry.min_panels()
        )));
    }
    match geometry {
        Geometry::UnitCircle => {
            let vertices = (0..n)
                .map(|k| {
                    let theta = 2.0 * std::f64::consts::PI * k as f64 / n as f64;
                    [theta.cos(), theta.sin()]
                })
                .collect();
            BoundaryMesh::from_polygon(vertices)
        }
        Geometry::LShape => BoundaryMesh::from_polygon(subdivide_polygon(&L_SHAPE_CORNERS, n)),
    }
}

/// Panels per side by largest-remainder rounding of the length-proportional
/// quotas. Requires `n >= lengths.len()`; every side receives at least one panel.
pub fn allocate_panels(lengths: &[f64], n: usize) -> Vec<usize> {
    let sides = lengths.len();
    let total: f64 = lengths.iter().sum();
    let quotas: Vec<f64> = lengths.iter().map(|l| l / total * n as f64).collect();
    let mut counts: Vec<usize> = quotas.iter().map(|q| q.floor() as usize).collect();
    let mut order: Vec<usize> = (0..sides).collect();
    order.sort_by(|&a, &b| {
        let ra = quotas[a] - quotas[a].floor();
        let rb = quotas[b] - quotas[b].floor();
        rb.total_cmp(&ra).then(a.cmp(&b))
    });
    let assigned: usize = counts.iter().sum();
    for &k in order.iter().take(n - assigned) {
        counts[k] += 1;
    }
    // Borrow from the largest side for any side rounded down to zero.
    while let Some(empty) = counts.iter().position(|&c| c == 0) {
        let donor = (0..sides).max_by_key(|&k| counts[k]).unwrap_or(0);
        counts[donor] -= 1;
        counts[empty] += 1;
    }
    counts
}

fn subdivide_polygon(corners: &[[f64; 2]], n: usize) -> Vec<[f64; 2]> {
    let sides = corners.len();
    let lengths: Vec<f64> = (0..sides)
        .map(|k| {
            let (a, b) = (corners[k], corners[(k + 1) % sides]);
            (b[0] - a[0]).hypot(b[1] - a[1])
        })
        .collect();
    let counts = allocate_panels(&lengths, n);
    let mut vertices = Vec::with_capacity(n);
    for k in 0..sides {
        let (a, b) = (corners[k], corners[(k + 1) % sides]);
        for j in 0..counts[k] {
            let t = j as f64 / counts[k] as f64;
            vertices.push([a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])]);
        }
    }
    vertices
}
