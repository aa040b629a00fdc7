//! Grassmann manifold representation layer.
//!
//! A point on Gr(k, n) is carried as a flat genome of length `d = n * k`,
//! the row-major flattening of an `n x k` matrix with orthonormal columns.
//! Projection maps an arbitrary genome onto the manifold by reshaping,
//! taking the thin QR factorization, and flattening the orthonormal factor.
//! One fixed row-major bijection is used in both directions, which makes
//! projection idempotent and `reshape . flatten` the identity.

use crate::linalg::{LinalgError, Matrix};
use rand::{Rng, RngExt};
use rand_distr::StandardNormal;
use std::fmt;

/// Orthonormality residual at or below which a reference matrix is accepted
/// as-is.
pub const ORTHONORMAL_ACCEPT_TOL: f64 = 1e-6;

/// Residual up to which a reference matrix is repaired by re-orthonormalizing
/// through thin QR (covers matrices printed to four decimal places).
pub const ORTHONORMAL_REPAIR_TOL: f64 = 1e-3;

/// Feasibility residual every projected genome must satisfy.
pub const FEASIBILITY_TOL: f64 = 1e-10;

const RANDOM_POINT_RETRIES: usize = 3;

/// Error type for manifold operations.
#[derive(Debug, Clone, PartialEq)]
pub enum ManifoldError {
    /// Shape must satisfy `1 <= k < n`.
    InvalidShape { n: usize, k: usize },
    /// Genome length does not equal `n * k`.
    GenomeLength { expected: usize, got: usize },
    /// Operand shapes are incompatible.
    DimensionMismatch {
        left: (usize, usize),
        right: (usize, usize),
    },
    /// A matrix that must have orthonormal columns does not.
    NotOrthonormal { residual: f64 },
    /// Projection failed because the reshaped matrix is rank-deficient.
    ProjectionFailed(LinalgError),
    /// The alignment matrix `P^T Q` is singular (orthogonal or deficient
    /// overlap between the subspaces).
    SingularAlignment,
}

impl fmt::Display for ManifoldError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ManifoldError::InvalidShape { n, k } => {
                write!(
                    f,
                    "invalid Grassmann shape: need 1 <= k < n, got n={n}, k={k}"
                )
            }
            ManifoldError::GenomeLength { expected, got } => {
                write!(f, "genome length mismatch: expected {expected}, got {got}")
            }
            ManifoldError::DimensionMismatch { left, right } => write!(
                f,
                "dimension mismatch: {}x{} vs {}x{}",
                left.0, left.1, right.0, right.1
            ),
            ManifoldError::NotOrthonormal { residual } => {
                write!(f, "matrix is not orthonormal (residual {residual:e})")
            }
            ManifoldError::ProjectionFailed(e) => write!(f, "projection failed: {e}"),
            ManifoldError::SingularAlignment => {
                write!(f, "alignment matrix is singular")
            }
        }
    }
}

impl std::error::Error for ManifoldError {}

impl From<LinalgError> for ManifoldError {
    fn from(e: LinalgError) -> Self {
        ManifoldError::ProjectionFailed(e)
    }
}

/// The `(n, k)` pair fixing the manifold Gr(k, n) and the flattened genome
/// dimension `d = n * k`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GrassmannShape {
    n: usize,
    k: usize,
}

impl GrassmannShape {
    pub fn new(n: usize, k: usize) -> Result<Self, ManifoldError> {
        if k == 0 || k >= n {
            return Err(ManifoldError::InvalidShape { n, k });
        }
        Ok(Self { n, k })
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn k(&self) -> usize {
        self.k
    }

    /// Flattened genome dimension `d = n * k`.
    #[inline]
    pub fn d(&self) -> usize {
        self.n * self.k
    }
}

/// A feasible point on the Grassmannian: a genome whose reshaped matrix has
/// orthonormal columns.
#[derive(Debug, Clone, PartialEq)]
pub struct GrassmannPoint {
    shape: GrassmannShape,
    genome: Vec<f64>,
}

impl GrassmannPoint {
    /// Projects an arbitrary genome onto the manifold.
    pub fn project(genome: &[f64], shape: GrassmannShape) -> Result<Self, ManifoldError> {
        Ok(Self {
            shape,
            genome: project(genome, shape)?,
        })
    }

    /// Wraps a genome that is already feasible, verifying the orthonormality
    /// residual against [`FEASIBILITY_TOL`].
    pub fn from_feasible(genome: Vec<f64>, shape: GrassmannShape) -> Result<Self, ManifoldError> {
        let q = reshape(&genome, shape)?;
        let residual = orthonormality_residual(&q);
        if residual > FEASIBILITY_TOL {
            return Err(ManifoldError::NotOrthonormal { residual });
        }
        Ok(Self { shape, genome })
    }

    pub fn shape(&self) -> GrassmannShape {
        self.shape
    }

    pub fn genome(&self) -> &[f64] {
        &self.genome
    }

    /// The `n x k` orthonormal matrix representation.
    pub fn matrix(&self) -> Matrix {
        reshape(&self.genome, self.shape).expect("feasible genome has valid length")
    }
}

/// Reshapes a genome of length `d` into an `n x k` matrix with entry
/// `(i, j) = v[i * k + j]`.
pub fn reshape(v: &[f64], shape: GrassmannShape) -> Result<Matrix, ManifoldError> {
    if v.len() != shape.d() {
        return Err(ManifoldError::GenomeLength {
            expected: shape.d(),
            got: v.len(),
        });
    }
    Matrix::new(shape.n(), shape.k(), v.to_vec()).map_err(|e| match e {
        LinalgError::NonFinite { .. } => ManifoldError::ProjectionFailed(e),
        other => ManifoldError::ProjectionFailed(other),
    })
}

/// Row-major flattening, the inverse of [`reshape`].
pub fn flatten(m: &Matrix) -> Vec<f64> {
    m.data().to_vec()
}

/// Projects a genome onto Gr(k, n): thin QR of the reshaped matrix, then
/// flatten the orthonormal factor.
pub fn project(v: &[f64], shape: GrassmannShape) -> Result<Vec<f64>, ManifoldError> {
    let y = reshape(v, shape)?;
    let (q, _) = y.thin_qr()?;
    Ok(flatten(&q))
}

/// `||Q^T Q - I_k||_F`, the distance of a frame from orthonormality.
pub fn orthonormality_residual(q: &Matrix) -> f64 {
    let gram = q
        .transpose()
        .matmul(q)
        .expect("transpose product shapes always agree");
    let mut acc = 0.0;
    for i in 0..gram.rows() {
        for j in 0..gram.cols() {
            let target = if i == j { 1.0 } else { 0.0 };
            acc += (gram.get(i, j) - target).powi(2);
        }
    }
    acc.sqrt()
}

fn require_orthonormal(m: &Matrix) -> Result<(), ManifoldError> {
    let residual = orthonormality_residual(m);
    if residual > ORTHONORMAL_ACCEPT_TOL {
        return Err(ManifoldError::NotOrthonormal { residual });
    }
    Ok(())
}

/// Squared chordal distance `k - ||Q^T P||_F^2` between the subspaces
/// spanned by two orthonormal `n x k` frames. Zero exactly when the spans
/// coincide; at most `k` (orthogonal subspaces).
pub fn chordal_distance_sq(q: &Matrix, p: &Matrix) -> Result<f64, ManifoldError> {
    if q.rows() != p.rows() || q.cols() != p.cols() {
        return Err(ManifoldError::DimensionMismatch {
            left: (q.rows(), q.cols()),
            right: (p.rows(), p.cols()),
        });
    }
    require_orthonormal(q)?;
    require_orthonormal(p)?;
    let k = q.cols() as f64;
    let align = q
        .transpose()
        .matmul(p)
        .expect("dimensions checked above")
        .frobenius_norm_sq();
    Ok(k - align)
}

/// Draws a uniformly distributed point on Gr(k, n): i.i.d. standard Gaussian
/// entries followed by projection. Rank deficiency is a measure-zero event;
/// the draw is retried a few times before giving up.
pub fn random_point<R: Rng + ?Sized>(
    shape: GrassmannShape,
    rng: &mut R,
) -> Result<Vec<f64>, ManifoldError> {
    let mut last_err = ManifoldError::InvalidShape {
        n: shape.n(),
        k: shape.k(),
    };
    for _ in 0..RANDOM_POINT_RETRIES {
        let raw: Vec<f64> = (0..shape.d()).map(|_| rng.sample(StandardNormal)).collect();
        match project(&raw, shape) {
            Ok(genome) => return Ok(genome),
            Err(e) => last_err = e,
        }
    }
    Err(last_err)
}

/// Measures how close the alignment matrix `R = (P^T Q)^{-1}` is to
/// orthogonal, returning `||R^T R - I_k||_F`. Near zero exactly when the two
/// frames span the same subspace.
pub fn alignment_orthogonality(p: &Matrix, q: &Matrix) -> Result<f64, ManifoldError> {
    if p.rows() != q.rows() || p.cols() != q.cols() {
        return Err(ManifoldError::DimensionMismatch {
            left: (p.rows(), p.cols()),
            right: (q.rows(), q.cols()),
        });
    }
    require_orthonormal(p)?;
    require_orthonormal(q)?;
    let overlap = p.transpose().matmul(q).expect("dimensions checked above");
    let r = overlap.invert_small().map_err(|e| match e {
        LinalgError::Singular => ManifoldError::SingularAlignment,
        other => ManifoldError::ProjectionFailed(other),
    })?;
    let gram = r.transpose().matmul(&r).expect("square product");
    let mut acc = 0.0;
    for i in 0..gram.rows() {
        for j in 0..gram.cols() {
            let target = if i == j { 1.0 } else { 0.0 };
            acc += (gram.get(i, j) - target).powi(2);
        }
    }
    Ok(acc.sqrt())
}

/// Accepts a user-supplied reference frame, re-orthonormalizing it through
/// thin QR when its residual falls in the repairable band. Returns the
/// accepted matrix together with the pre-repair residual.
pub fn repair_orthonormal(m: &Matrix) -> Result<(Matrix, f64), ManifoldError> {
    let residual = orthonormality_residual(m);
    if residual <= ORTHONORMAL_ACCEPT_TOL {
        return Ok((m.clone(), residual));
    }
    if residual <= ORTHONORMAL_REPAIR_TOL {
        let (q, _) = m.thin_qr()?;
        return Ok((q, residual));
    }
    Err(ManifoldError::NotOrthonormal { residual })
}
