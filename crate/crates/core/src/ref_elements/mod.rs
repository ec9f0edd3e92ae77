//! Reference-triangle machinery: Lagrange bases and quadrature rules.
//!
//! The reference triangle is `{(xi, eta) : xi, eta >= 0, xi + eta <= 1}`
//! with vertices `(0,0)`, `(1,0)`, `(0,1)`.

mod lagrange;
mod quadrature;

pub use lagrange::{lagrange_lattice, BasisTable, ReferenceElement};
pub(crate) use lagrange::lattice_indices as lattice_indices_for;
pub use quadrature::{quadrature_for, QuadratureRule, MAX_QUADRATURE_DEGREE};

/// Quadrature degree used for assembling forms with solution order `k_u`
/// on geometry of order `k_g`.
pub fn assembly_degree(k_u: usize, k_g: usize) -> usize {
    (2 * k_u + 2 * (k_g - 1) + 2).min(MAX_QUADRATURE_DEGREE)
}
