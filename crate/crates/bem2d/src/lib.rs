//! Piecewise-constant Galerkin boundary elements for the modified Helmholtz
//! equation `-Δu + s²u = 0` in two dimensions, and the boundary operators
//! `V(s)^{-1}` and the exterior Dirichlet-to-Neumann map built from them.

pub mod assembly;
pub mod bessel;
pub mod cache;
pub mod mesh;
pub mod norm;
pub mod problem;
pub mod transfer;

pub use assembly::{
    assemble, assemble_kd, assemble_v, assemble_with, HelmholtzMatrices, QuadratureOptions,
};
pub use mesh::{make_mesh, BoundaryMesh, Geometry, Panel};
pub use norm::{hminus_half_norm, HMinusHalfNorm};
pub use problem::ScatteringProblem;
pub use transfer::{BemTransfer, BoundaryOperator};
