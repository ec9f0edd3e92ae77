//! Finite element discretisation of the vector Laplacian on closed surfaces.
//!
//! The surface is described implicitly (signed distance, closest point,
//! normal, curvature) and approximated by parametric triangulations of
//! arbitrary geometry order. Tangential vector fields are discretised with
//! Euclidean components and the tangent condition is enforced weakly by a
//! normal-component penalty.
//!
//! Module map:
//!
//! * [`geometry`]: implicit torus, tangential projections, curvature and the
//!   distortion map between discrete and exact tangent planes.
//! * [`jet`]: forward-mode dual numbers with a three-component gradient,
//!   nestable for exact second derivatives.
//! * [`ref_elements`]: Lagrange bases of order 1 to 4 and triangle quadrature.
//! * [`mesh`]: structured and perturbed torus meshes, closest-point geometry
//!   elevation and element maps.
//! * [`assembly`]: local forms, sparse assembly, deflated conjugate gradient
//!   and numerical kernel estimation.
//! * [`manufactured`]: the torus model solution, its exact loads and error
//!   norms.
//! * [`experiment`]: convergence drivers, CSV tables and the run config.
//! * [`vtk`]: legacy ASCII VTK output.

pub mod assembly;
pub mod error;
pub mod experiment;
pub mod geometry;
pub mod jet;
pub mod manufactured;
pub mod mesh;
pub mod ref_elements;
pub mod vtk;

pub use error::{Error, Result};
pub use geometry::{Point3, Surface, Tensor3, TorusSurface};
