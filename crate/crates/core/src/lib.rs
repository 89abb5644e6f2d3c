//! Numerical laboratory for a linearized kinetic collision equation on a bounded
//! domain with specular-reflection boundary conditions.
//!
//! The crate is organized around the machinery needed to build and certify a
//! regularized approximate solver for the near-equilibrium dynamics:
//!
//! * [`geometry`] — level-set domains, boundary patches, normals, the specular
//!   reflection map, and near-boundary normal coordinates.
//! * [`cutoff`] — the grazing-set cutoffs (λ_ε, β_ε, η_ε), the moment-matched
//!   bump kernel ξ, and the integral diffusion operator Q^ε with its adjoint.
//! * [`coefficients`] — collision kernel φ, Maxwellian μ, the diffusion matrix
//!   σ_G, drift a_g, zeroth-order action K̄_g, the bilinear form Γ, and the
//!   weighted norm suite.
//! * [`characteristics`] — backward/forward trajectory integration, stopping
//!   times, and the Liouville-formula Jacobian.
//! * [`grid`] / [`field`] — tensor phase-space grids and distribution fields.
//! * [`solver`] — the mild-solution fixed point for the regularized problem,
//!   the damped-reflection iteration, the Duhamel layer, the backward adjoint
//!   solve, and the duality certificate.
//! * [`macro_micro`] — projection onto collision invariants, Burnett
//!   functions, auxiliary Poisson problems, and the macroscopic-control and
//!   decay diagnostics.
//! * [`flatten`] — the boundary-flattening coordinate frames, mirror
//!   extension, transformed coefficients, and interface continuity
//!   certificates.

pub mod characteristics;
pub mod coefficients;
pub mod cutoff;
pub mod field;
pub mod flatten;
pub mod geometry;
pub mod grid;
pub mod linalg;
pub mod macro_micro;
pub mod quadrature;
pub mod solver;

pub use field::KineticField;
pub use geometry::{BoundaryClassification, BoundaryKind, DomainSpec, PhasePoint};
pub use grid::{PhaseGrid, SpatialGrid, VelocityGrid};
