//! Time-fractional (Riemann–Liouville) subdiffusion in one space dimension:
//! L1 and generalized Crank–Nicolson time stepping on graded meshes,
//! piecewise-linear Galerkin elements in space, and a Mittag-Leffler series
//! reference solution for convergence studies.

// `!(x > 0.0)` is used on purpose throughout: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod fem1d;
pub mod frackernel;
pub mod harness;
pub mod mesh;
pub mod mittag_leffler;
pub mod quad;
pub mod solver;
pub mod special;

pub use error::{Error, Result};
pub use fem1d::{Problem, SpaceFunction, SpatialSystem};
pub use frackernel::{primary_weight, secondary_weight, weight_oracle, WeightTable};
pub use mesh::GradedMesh;
pub use mittag_leffler::{ml_neg, MittagLeffler, SeriesSolution};
pub use solver::{run, InitialProjection, Scheme, SolutionHistory};
