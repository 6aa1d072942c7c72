//! Exact (or tolerance-aware) linear algebra: matrices, elimination, null
//! spaces and LP feasibility.

mod linsolve;
mod matrix;
mod scalar;
mod simplex;

pub use linsolve::{determinant, in_span, inverse, null_space_basis, rank, rref, solve_linear, Rref};
pub use matrix::Matrix;
pub use scalar::{dot, parse_rational, ratio, sum, Scalar};
pub use simplex::{lp_feasible, Bound};
