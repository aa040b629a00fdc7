//! The five benchmark objective functions, each a pure evaluation on an
//! orthonormal `n x k` frame, together with builders for their fixed data
//! and the embedded reference subspaces.
//!
//! All five depend on the candidate frame only through its span, so their
//! values are invariant under right multiplication by any orthogonal `k x k`
//! matrix. The engine minimizes; the captured-variance objective is negated
//! accordingly.

use crate::csv;
use crate::de::Objective;
use crate::linalg::{LinalgError, Matrix};
use crate::manifold::{self, ManifoldError};
use rand::{Rng, RngExt};
use rand_distr::StandardNormal;
use std::fmt;

/// Error type for objective construction and evaluation.
#[derive(Debug, Clone, PartialEq)]
pub enum ObjectiveError {
    Dimension {
        expected: (usize, usize),
        got: (usize, usize),
    },
    /// A reference frame could not be accepted or repaired.
    Reference(ManifoldError),
    /// The cluster objective needs at least one reference matrix.
    EmptyReferences,
    Linalg(LinalgError),
}

impl fmt::Display for ObjectiveError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ObjectiveError::Dimension { expected, got } => write!(
                f,
                "dimension mismatch: expected {}x{}, got {}x{}",
                expected.0, expected.1, got.0, got.1
            ),
            ObjectiveError::Reference(e) => write!(f, "bad reference matrix: {e}"),
            ObjectiveError::EmptyReferences => write!(f, "no reference matrices supplied"),
            ObjectiveError::Linalg(e) => write!(f, "{e}"),
        }
    }
}

impl std::error::Error for ObjectiveError {}

impl From<LinalgError> for ObjectiveError {
    fn from(e: LinalgError) -> Self {
        ObjectiveError::Linalg(e)
    }
}

impl From<ManifoldError> for ObjectiveError {
    fn from(e: ManifoldError) -> Self {
        ObjectiveError::Reference(e)
    }
}

fn check_same_shape(expected: &Matrix, got: &Matrix) -> Result<(), ObjectiveError> {
    if expected.rows() != got.rows() || expected.cols() != got.cols() {
        return Err(ObjectiveError::Dimension {
            expected: (expected.rows(), expected.cols()),
            got: (got.rows(), got.cols()),
        });
    }
    Ok(())
}

/// Negated captured variance `-tr(Q^T Sigma Q)`. Minimizing drives the span
/// of `Q` onto the top-k eigenspace of `Sigma`; report the negation as the
/// variance captured.
pub fn eval_pca_trace(sigma: &Matrix, q: &Matrix) -> Result<f64, ObjectiveError> {
    if sigma.rows() != sigma.cols() || sigma.rows() != q.rows() {
        return Err(ObjectiveError::Dimension {
            expected: (q.rows(), q.rows()),
            got: (sigma.rows(), sigma.cols()),
        });
    }
    let value = q.transpose().matmul(sigma)?.matmul(q)?.trace()?;
    Ok(-value)
}

/// Squared chordal distance `k - ||Q^T P||_F^2` to a fixed reference frame.
pub fn eval_chordal(p_ref: &Matrix, q: &Matrix) -> Result<f64, ObjectiveError> {
    check_same_shape(p_ref, q)?;
    let align = q.transpose().matmul(p_ref)?.frobenius_norm_sq();
    Ok(q.cols() as f64 - align)
}

/// Strongest total squared alignment with either of two fixed frames:
/// `max(||Q^T P1||_F^2, ||Q^T P2||_F^2)`.
pub fn eval_bimodal(p1: &Matrix, p2: &Matrix, q: &Matrix) -> Result<f64, ObjectiveError> {
    check_same_shape(p1, q)?;
    check_same_shape(p2, q)?;
    let a1 = q.transpose().matmul(p1)?.frobenius_norm_sq();
    let a2 = q.transpose().matmul(p2)?.frobenius_norm_sq();
    Ok(a1.max(a2))
}

/// Volume penalty `-log det(Q^T A Q)` for a symmetric positive definite `A`.
pub fn eval_logdet(a: &Matrix, q: &Matrix) -> Result<f64, ObjectiveError> {
    if a.rows() != a.cols() || a.rows() != q.rows() {
        return Err(ObjectiveError::Dimension {
            expected: (q.rows(), q.rows()),
            got: (a.rows(), a.cols()),
        });
    }
    let projected = q.transpose().matmul(a)?.matmul(q)?;
    Ok(-projected.cholesky_logdet()?)
}

/// Subspace clustering residual
/// `min_i ||X - Q Q^T X_i||_F^2` over the reference data matrices.
pub fn eval_cluster_residual(
    x: &Matrix,
    refs: &[Matrix],
    q: &Matrix,
) -> Result<f64, ObjectiveError> {
    if refs.is_empty() {
        return Err(ObjectiveError::EmptyReferences);
    }
    if x.rows() != q.rows() {
        return Err(ObjectiveError::Dimension {
            expected: (q.rows(), x.cols()),
            got: (x.rows(), x.cols()),
        });
    }
    let qt = q.transpose();
    let mut best = f64::INFINITY;
    for reference in refs {
        check_same_shape(x, reference)?;
        let projected = q.matmul(&qt.matmul(reference)?)?;
        let residual = x.sub(&projected)?.frobenius_norm_sq();
        best = best.min(residual);
    }
    Ok(best)
}

/// Diagonal spectrum `diag(n, n-1, ..., 1)`.
pub fn build_sigma_linear(n: usize) -> Matrix {
    assert!(n >= 1);
    let entries: Vec<f64> = (1..=n).rev().map(|v| v as f64).collect();
    Matrix::diag(&entries)
}

/// Spiked spectrum `diag(10, 9, 1, ..., 1)`: two dominant directions over a
/// flat unit bulk.
pub fn build_a_spiked(n: usize) -> Matrix {
    assert!(n >= 2);
    let mut entries = vec![1.0; n];
    entries[0] = 10.0;
    entries[1] = 9.0;
    Matrix::diag(&entries)
}

/// Synthetic cluster data: for each basis `P_i` draws a `k x m` matrix `Z_i`
/// of i.i.d. standard Gaussians and returns `X_i = P_i Z_i`, so the columns
/// of `X_i` lie in the span of `P_i`.
pub fn build_cluster_data<R: Rng + ?Sized>(
    p_list: &[Matrix],
    m: usize,
    rng: &mut R,
) -> Result<Vec<Matrix>, ObjectiveError> {
    assert!(m >= 1);
    let mut refs = Vec::with_capacity(p_list.len());
    for p in p_list {
        let z = Matrix::from_fn(p.cols(), m, |_, _| rng.sample(StandardNormal));
        refs.push(p.matmul(&z)?);
    }
    Ok(refs)
}

/// Tagged descriptor selecting one of the five benchmark objectives with its
/// fixed data. Reference frames are accepted through the orthonormality
/// repair band at construction, so evaluation never re-validates them.
#[derive(Debug, Clone, PartialEq)]
pub enum ObjectiveSpec {
    PcaTrace { sigma: Matrix },
    ChordalToRef { p_ref: Matrix },
    BimodalMax { p1: Matrix, p2: Matrix },
    LogDetVolume { a: Matrix },
    ClusterResidual { x: Matrix, refs: Vec<Matrix> },
}

fn require_symmetric(m: &Matrix) -> Result<(), ObjectiveError> {
    if m.rows() != m.cols() {
        return Err(ObjectiveError::Dimension {
            expected: (m.rows(), m.rows()),
            got: (m.rows(), m.cols()),
        });
    }
    let residual = m.sub(&m.transpose())?.frobenius_norm();
    if residual > 1e-10 * m.frobenius_norm() {
        return Err(ObjectiveError::Linalg(LinalgError::NotSymmetric {
            residual,
        }));
    }
    Ok(())
}

impl ObjectiveSpec {
    pub fn pca_trace(sigma: Matrix) -> Result<Self, ObjectiveError> {
        require_symmetric(&sigma)?;
        Ok(ObjectiveSpec::PcaTrace { sigma })
    }

    pub fn chordal_to_ref(p_ref: Matrix) -> Result<Self, ObjectiveError> {
        let (p_ref, _) = manifold::repair_orthonormal(&p_ref)?;
        Ok(ObjectiveSpec::ChordalToRef { p_ref })
    }

    pub fn bimodal_max(p1: Matrix, p2: Matrix) -> Result<Self, ObjectiveError> {
        check_same_shape(&p1, &p2)?;
        let (p1, _) = manifold::repair_orthonormal(&p1)?;
        let (p2, _) = manifold::repair_orthonormal(&p2)?;
        Ok(ObjectiveSpec::BimodalMax { p1, p2 })
    }

    pub fn log_det_volume(a: Matrix) -> Result<Self, ObjectiveError> {
        require_symmetric(&a)?;
        Ok(ObjectiveSpec::LogDetVolume { a })
    }

    pub fn cluster_residual(x: Matrix, refs: Vec<Matrix>) -> Result<Self, ObjectiveError> {
        if refs.is_empty() {
            return Err(ObjectiveError::EmptyReferences);
        }
        for reference in &refs {
            check_same_shape(&x, reference)?;
        }
        Ok(ObjectiveSpec::ClusterResidual { x, refs })
    }

    /// Evaluates the selected objective on an orthonormal frame.
    pub fn evaluate(&self, q: &Matrix) -> Result<f64, ObjectiveError> {
        match self {
            ObjectiveSpec::PcaTrace { sigma } => eval_pca_trace(sigma, q),
            ObjectiveSpec::ChordalToRef { p_ref } => eval_chordal(p_ref, q),
            ObjectiveSpec::BimodalMax { p1, p2 } => eval_bimodal(p1, p2, q),
            ObjectiveSpec::LogDetVolume { a } => eval_logdet(a, q),
            ObjectiveSpec::ClusterResidual { x, refs } => eval_cluster_residual(x, refs, q),
        }
    }
}

impl Objective for ObjectiveSpec {
    /// Errors surface as NaN, which aborts the engine with the evaluation's
    /// generation and index.
    fn eval(&self, q: &Matrix) -> f64 {
        self.evaluate(q).unwrap_or(f64::NAN)
    }
}

/// Reference subspace frames shipped with the crate as plain-text CSV,
/// stored exactly as printed to four decimal places and re-orthonormalized
/// through thin QR on load.
pub mod assets {
    use super::*;

    pub const P1_CSV: &str = include_str!("../assets/p1.csv");
    pub const P2_CSV: &str = include_str!("../assets/p2.csv");
    pub const P3_CSV: &str = include_str!("../assets/p3.csv");

    fn load(text: &str) -> (Matrix, f64) {
        let raw = csv::parse_matrix(text).expect("embedded asset parses");
        manifold::repair_orthonormal(&raw).expect("embedded asset lies in the repair band")
    }

    /// Loads the raw four-decimal matrix without repair.
    pub fn raw(text: &str) -> Matrix {
        csv::parse_matrix(text).expect("embedded asset parses")
    }

    /// First reference frame, repaired, with its pre-repair residual.
    pub fn p1() -> (Matrix, f64) {
        load(P1_CSV)
    }

    /// Second reference frame, repaired, with its pre-repair residual.
    pub fn p2() -> (Matrix, f64) {
        load(P2_CSV)
    }

    /// Third reference frame, repaired, with its pre-repair residual.
    pub fn p3() -> (Matrix, f64) {
        load(P3_CSV)
    }
}
