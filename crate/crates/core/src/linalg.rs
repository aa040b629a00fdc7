//! Minimal dense linear algebra for subspace optimization.
//!
//! A row-major `f64` matrix with exactly the operations the manifold layer
//! and the benchmark objectives need: products, transpose, Frobenius norms,
//! trace, thin Householder QR, Cholesky log-determinant, and inversion of
//! small square matrices. Inputs are validated; matrices are never silently
//! repaired.

use std::fmt;

/// Relative rank tolerance for thin QR: a diagonal entry of `R` at or below
/// `QR_RANK_TOL * ||Y||_F` marks the input rank-deficient.
pub const QR_RANK_TOL: f64 = 1e-12;

/// Relative symmetry tolerance required by [`Matrix::cholesky_logdet`].
pub const SYMMETRY_TOL: f64 = 1e-10;

/// Largest dimension accepted by [`Matrix::invert_small`].
pub const INVERT_MAX_DIM: usize = 16;

/// Relative pivot tolerance below which Gauss-Jordan declares singularity.
const PIVOT_REL_TOL: f64 = 1e-13;

/// Error type for matrix operations.
#[derive(Debug, Clone, PartialEq)]
pub enum LinalgError {
    /// Operand shapes are incompatible for the requested operation.
    DimensionMismatch {
        left: (usize, usize),
        right: (usize, usize),
    },
    /// The operation requires a square matrix.
    NotSquare { rows: usize, cols: usize },
    /// Data length does not match `rows * cols`.
    InvalidData { expected: usize, got: usize },
    /// A NaN or infinite entry was supplied.
    NonFinite { row: usize, col: usize },
    /// Thin QR found a (numerically) dependent column.
    RankDeficient { column: usize },
    /// The matrix is not symmetric within [`SYMMETRY_TOL`].
    NotSymmetric { residual: f64 },
    /// Cholesky hit a non-positive pivot.
    NotPositiveDefinite { pivot: usize },
    /// The matrix is singular to working precision.
    Singular,
    /// The matrix exceeds the size limit of the small-matrix routine.
    TooLarge { size: usize, limit: usize },
}

impl fmt::Display for LinalgError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LinalgError::DimensionMismatch { left, right } => write!(
                f,
                "dimension mismatch: {}x{} vs {}x{}",
                left.0, left.1, right.0, right.1
            ),
            LinalgError::NotSquare { rows, cols } => {
                write!(f, "matrix must be square, got {rows}x{cols}")
            }
            LinalgError::InvalidData { expected, got } => {
                write!(f, "data length mismatch: expected {expected}, got {got}")
            }
            LinalgError::NonFinite { row, col } => {
                write!(f, "non-finite entry at ({row}, {col})")
            }
            LinalgError::RankDeficient { column } => {
                write!(f, "rank-deficient input: column {column} is dependent")
            }
            LinalgError::NotSymmetric { residual } => {
                write!(f, "matrix is not symmetric (residual {residual:e})")
            }
            LinalgError::NotPositiveDefinite { pivot } => {
                write!(f, "matrix is not positive definite (pivot {pivot})")
            }
            LinalgError::Singular => write!(f, "matrix is singular to working precision"),
            LinalgError::TooLarge { size, limit } => {
                write!(f, "matrix of size {size} exceeds limit {limit}")
            }
        }
    }
}

impl std::error::Error for LinalgError {}

/// Dense real matrix in row-major order: `data[i * cols + j]` holds entry `(i, j)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    /// Creates a matrix from row-major data, rejecting length mismatches and
    /// non-finite entries.
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self, LinalgError> {
        if data.len() != rows * cols {
            return Err(LinalgError::InvalidData {
                expected: rows * cols,
                got: data.len(),
            });
        }
        if let Some(idx) = data.iter().position(|x| !x.is_finite()) {
            return Err(LinalgError::NonFinite {
                row: idx / cols.max(1),
                col: idx % cols.max(1),
            });
        }
        Ok(Self { rows, cols, data })
    }

    /// Creates a matrix from nested row slices. Panics on ragged input;
    /// intended for literals in tests and fixtures.
    pub fn from_rows(rows: &[&[f64]]) -> Self {
        assert!(!rows.is_empty(), "matrix needs at least one row");
        let cols = rows[0].len();
        let mut data = Vec::with_capacity(rows.len() * cols);
        for row in rows {
            assert_eq!(row.len(), cols, "ragged rows");
            data.extend_from_slice(row);
        }
        Self {
            rows: rows.len(),
            cols,
            data,
        }
    }

    /// Builds a matrix entry-by-entry from a closure over `(row, col)`.
    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, n, |i, j| if i == j { 1.0 } else { 0.0 })
    }

    /// Square diagonal matrix with the given entries.
    pub fn diag(entries: &[f64]) -> Self {
        let n = entries.len();
        Self::from_fn(n, n, |i, j| if i == j { entries[i] } else { 0.0 })
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.data[row * self.cols + col]
    }

    #[inline]
    pub fn set(&mut self, row: usize, col: usize, value: f64) {
        self.data[row * self.cols + col] = value;
    }

    /// Row-major backing slice.
    pub fn data(&self) -> &[f64] {
        &self.data
    }

    /// Matrix product `self * other`.
    pub fn matmul(&self, other: &Matrix) -> Result<Matrix, LinalgError> {
        if self.cols != other.rows {
            return Err(LinalgError::DimensionMismatch {
                left: (self.rows, self.cols),
                right: (other.rows, other.cols),
            });
        }
        let mut out = Matrix::zeros(self.rows, other.cols);
        // i-k-j order keeps both operands streaming in row-major.
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a_ik = self.data[i * self.cols + k];
                if a_ik == 0.0 {
                    continue;
                }
                let out_row = i * other.cols;
                let b_row = k * other.cols;
                for j in 0..other.cols {
                    out.data[out_row + j] += a_ik * other.data[b_row + j];
                }
            }
        }
        Ok(out)
    }

    pub fn transpose(&self) -> Matrix {
        let mut out = Matrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.data[j * self.rows + i] = self.data[i * self.cols + j];
            }
        }
        out
    }

    /// Element-wise difference `self - other`.
    pub fn sub(&self, other: &Matrix) -> Result<Matrix, LinalgError> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(LinalgError::DimensionMismatch {
                left: (self.rows, self.cols),
                right: (other.rows, other.cols),
            });
        }
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a - b)
            .collect();
        Ok(Matrix {
            rows: self.rows,
            cols: self.cols,
            data,
        })
    }

    /// Squared Frobenius norm, the sum of squared entries.
    pub fn frobenius_norm_sq(&self) -> f64 {
        self.data.iter().map(|x| x * x).sum()
    }

    /// Frobenius norm.
    pub fn frobenius_norm(&self) -> f64 {
        self.frobenius_norm_sq().sqrt()
    }

    /// Sum of diagonal entries. Rejects non-square input.
    pub fn trace(&self) -> Result<f64, LinalgError> {
        if self.rows != self.cols {
            return Err(LinalgError::NotSquare {
                rows: self.rows,
                cols: self.cols,
            });
        }
        Ok((0..self.rows).map(|i| self.get(i, i)).sum())
    }

    /// Thin QR factorization `Y = Q R` via Householder reflections.
    ///
    /// For an `n x k` input with `n >= k`, returns `Q` (`n x k`, orthonormal
    /// columns) and `R` (`k x k`, upper triangular). Signs are fixed so every
    /// `R[i][i] >= 0`, which makes the factorization unique for full-rank
    /// input and returns an already-orthonormal matrix unchanged.
    pub fn thin_qr(&self) -> Result<(Matrix, Matrix), LinalgError> {
        let (n, k) = (self.rows, self.cols);
        if n < k {
            return Err(LinalgError::DimensionMismatch {
                left: (n, k),
                right: (k, k),
            });
        }
        let input_norm = self.frobenius_norm();
        let mut work = self.clone();
        // Reflectors stored as (column, v, v.v); v lives on rows j..n.
        let mut reflectors: Vec<(usize, Vec<f64>, f64)> = Vec::with_capacity(k);

        for j in 0..k {
            let norm_x_sq: f64 = (j..n).map(|i| work.get(i, j).powi(2)).sum();
            let norm_x = norm_x_sq.sqrt();
            if norm_x == 0.0 {
                // Dependent column; the rank check after the loop reports it.
                work.set(j, j, 0.0);
                continue;
            }
            let x0 = work.get(j, j);
            let alpha = if x0 >= 0.0 { -norm_x } else { norm_x };
            let mut v: Vec<f64> = (j..n).map(|i| work.get(i, j)).collect();
            v[0] -= alpha;
            let v_dot: f64 = v.iter().map(|x| x * x).sum();

            // Apply H = I - 2 v v^T / (v.v) to the trailing columns.
            for c in (j + 1)..k {
                let s: f64 = v
                    .iter()
                    .enumerate()
                    .map(|(t, vt)| vt * work.get(j + t, c))
                    .sum();
                let scale = 2.0 * s / v_dot;
                for (t, vt) in v.iter().enumerate() {
                    let val = work.get(j + t, c) - scale * vt;
                    work.set(j + t, c, val);
                }
            }
            // Column j maps exactly onto alpha * e1.
            work.set(j, j, alpha);
            for i in (j + 1)..n {
                work.set(i, j, 0.0);
            }
            reflectors.push((j, v, v_dot));
        }

        let mut r = Matrix::zeros(k, k);
        for i in 0..k {
            for j in i..k {
                r.set(i, j, work.get(i, j));
            }
        }

        // Accumulate the thin Q by applying the reflectors, last to first,
        // to the leading k columns of the identity.
        let mut q = Matrix::from_fn(n, k, |i, j| if i == j { 1.0 } else { 0.0 });
        for (j, v, v_dot) in reflectors.iter().rev() {
            for c in 0..k {
                let s: f64 = v
                    .iter()
                    .enumerate()
                    .map(|(t, vt)| vt * q.get(j + t, c))
                    .sum();
                let scale = 2.0 * s / v_dot;
                for (t, vt) in v.iter().enumerate() {
                    let val = q.get(j + t, c) - scale * vt;
                    q.set(j + t, c, val);
                }
            }
        }

        // Fix signs so the diagonal of R is nonnegative.
        for j in 0..k {
            if r.get(j, j) < 0.0 {
                for c in j..k {
                    let val = -r.get(j, c);
                    r.set(j, c, val);
                }
                for i in 0..n {
                    let val = -q.get(i, j);
                    q.set(i, j, val);
                }
            }
        }

        let tol = QR_RANK_TOL * input_norm;
        for j in 0..k {
            if r.get(j, j) <= tol {
                return Err(LinalgError::RankDeficient { column: j });
            }
        }
        Ok((q, r))
    }

    /// Log-determinant of a symmetric positive definite matrix via Cholesky:
    /// `2 * sum(ln L[i][i])`.
    pub fn cholesky_logdet(&self) -> Result<f64, LinalgError> {
        let n = self.rows;
        if self.rows != self.cols {
            return Err(LinalgError::NotSquare {
                rows: self.rows,
                cols: self.cols,
            });
        }
        let sym_residual = self.sub(&self.transpose())?.frobenius_norm();
        if sym_residual > SYMMETRY_TOL * self.frobenius_norm() {
            return Err(LinalgError::NotSymmetric {
                residual: sym_residual,
            });
        }
        let mut l = vec![0.0; n * n];
        let mut logdet = 0.0;
        for i in 0..n {
            for j in 0..=i {
                let mut s = self.get(i, j);
                for t in 0..j {
                    s -= l[i * n + t] * l[j * n + t];
                }
                if i == j {
                    if s <= 0.0 {
                        return Err(LinalgError::NotPositiveDefinite { pivot: i });
                    }
                    let root = s.sqrt();
                    l[i * n + i] = root;
                    logdet += 2.0 * root.ln();
                } else {
                    l[i * n + j] = s / l[j * n + j];
                }
            }
        }
        Ok(logdet)
    }

    /// Inverse of a small (`<= 16 x 16`) square matrix by Gauss-Jordan
    /// elimination with partial pivoting.
    pub fn invert_small(&self) -> Result<Matrix, LinalgError> {
        let n = self.rows;
        if self.rows != self.cols {
            return Err(LinalgError::NotSquare {
                rows: self.rows,
                cols: self.cols,
            });
        }
        if n > INVERT_MAX_DIM {
            return Err(LinalgError::TooLarge {
                size: n,
                limit: INVERT_MAX_DIM,
            });
        }
        let max_abs = self.data.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        if max_abs == 0.0 {
            return Err(LinalgError::Singular);
        }
        let pivot_tol = PIVOT_REL_TOL * max_abs;

        let mut a = self.clone();
        let mut inv = Matrix::identity(n);
        for col in 0..n {
            let pivot_row = (col..n)
                .max_by(|&r1, &r2| {
                    a.get(r1, col)
                        .abs()
                        .partial_cmp(&a.get(r2, col).abs())
                        .unwrap()
                })
                .unwrap();
            if a.get(pivot_row, col).abs() <= pivot_tol {
                return Err(LinalgError::Singular);
            }
            if pivot_row != col {
                for j in 0..n {
                    let (x, y) = (a.get(col, j), a.get(pivot_row, j));
                    a.set(col, j, y);
                    a.set(pivot_row, j, x);
                    let (x, y) = (inv.get(col, j), inv.get(pivot_row, j));
                    inv.set(col, j, y);
                    inv.set(pivot_row, j, x);
                }
            }
            let pivot = a.get(col, col);
            for j in 0..n {
                a.set(col, j, a.get(col, j) / pivot);
                inv.set(col, j, inv.get(col, j) / pivot);
            }
            for row in 0..n {
                if row == col {
                    continue;
                }
                let factor = a.get(row, col);
                if factor == 0.0 {
                    continue;
                }
                for j in 0..n {
                    let val = a.get(row, j) - factor * a.get(col, j);
                    a.set(row, j, val);
                    let val = inv.get(row, j) - factor * inv.get(col, j);
                    inv.set(row, j, val);
                }
            }
        }
        Ok(inv)
    }
}
