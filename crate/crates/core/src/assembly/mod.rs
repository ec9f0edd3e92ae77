//! Discrete forms, sparse assembly and the nullspace-aware solver.
//!
//! Vector fields are discretised componentwise: every solution node carries
//! three consecutive degrees of freedom, one per Euclidean direction. The
//! tangent condition is only enforced weakly through the penalty form.

mod forms;
mod kernel;
mod solver;
mod sparse;

pub use forms::{
    assemble, assemble_parts, killing_field, CellQuadrature, Discretization, DofMap, FormulationKind,
    LoadFn, NormalSource, NullspacePolicy, Parts, SparseSystem,
};
pub use kernel::{numerical_kernel, KernelEstimate, DEFAULT_KERNEL_THRESHOLD};
pub use solver::{solve, SolveOutcome, DEFAULT_REL_TOL};
pub use sparse::{axpy, dot, norm, CsrMatrix};

/// Penalty parameter used unless configured otherwise.
pub const DEFAULT_BETA: f64 = 100.0;
