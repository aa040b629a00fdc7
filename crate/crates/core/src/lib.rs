//! Global optimization of real-valued functions on the Grassmann manifold
//! Gr(k, n) — the space of k-dimensional linear subspaces of R^n — using
//! self-adaptive differential evolution with a QR projection step that keeps
//! every candidate on the manifold.
//!
//! Layout:
//! - [`linalg`]: dense row-major matrices with thin QR, Cholesky log-det,
//!   and small-matrix inversion.
//! - [`manifold`]: the vector-to-matrix representation of Grassmann points,
//!   projection, distances, and random subspace generation.
//! - [`de`]: the self-adaptive DE engine with interleaved projection.
//! - [`objectives`]: the five benchmark objective functions and their data.
//! - [`csv`]: the plain-text matrix format used by reference assets and the
//!   command-line tools.

pub mod csv;
pub mod de;
pub mod linalg;
pub mod manifold;
pub mod objectives;

pub use linalg::{LinalgError, Matrix};
pub use manifold::{GrassmannPoint, GrassmannShape, ManifoldError};
