//! Dense complex linear algebra used throughout the crate.
//!
//! [`ComplexMatrix`] wraps an `nalgebra` matrix and guarantees that every
//! entry is finite. Eigen and Schur decompositions delegate to `nalgebra`;
//! the contracts here are the tolerances, checked in the tests below.

mod ode;
mod quadrature;

pub use ode::integrate_linear_ode;
pub use quadrature::integrate_adaptive;

use std::ops::Index;

use nalgebra::{DMatrix, DVector, Schur, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;

/// Absolute floor applied to relative tolerances for near-zero inputs.
pub const ABS_FLOOR: f64 = 1e-14;

/// Largest relative anti-Hermitian part accepted by [`eig_hermitian`].
pub const HERMITIAN_TOL: f64 = 1e-10;

/// Dense complex matrix with finite entries.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix(DMatrix<C64>);

impl ComplexMatrix {
    pub fn from_matrix(m: DMatrix<C64>) -> Result<Self> {
        if m.nrows() == 0 || m.ncols() == 0 {
            return Err(Error::Dimension("matrix must be non-empty".into()));
        }
        if m.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Self(m))
    }

    /// Builds a matrix from entries in row-major order.
    pub fn from_row_slice(rows: usize, cols: usize, entries: &[C64]) -> Result<Self> {
        if entries.len() != rows * cols {
            return Err(Error::Dimension(format!(
                "{} entries for a {rows}x{cols} matrix",
                entries.len()
            )));
        }
        Self::from_matrix(DMatrix::from_row_slice(rows, cols, entries))
    }

    pub fn from_real_row_slice(rows: usize, cols: usize, entries: &[f64]) -> Result<Self> {
        let entries: Vec<C64> = entries.iter().map(|&x| C64::new(x, 0.0)).collect();
        Self::from_row_slice(rows, cols, &entries)
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        assert!(rows > 0 && cols > 0, "matrix dimensions must be positive");
        Self(DMatrix::zeros(rows, cols))
    }

    pub fn identity(n: usize) -> Self {
        assert!(n > 0, "matrix dimension must be positive");
        Self(DMatrix::identity(n, n))
    }

    pub fn from_diagonal(diag: &[C64]) -> Result<Self> {
        Self::from_matrix(DMatrix::from_diagonal(&DVector::from_column_slice(diag)))
    }

    /// Wraps a matrix produced by arithmetic on already-finite inputs.
    pub(crate) fn from_matrix_unchecked(m: DMatrix<C64>) -> Self {
        debug_assert!(m.iter().all(|z| z.re.is_finite() && z.im.is_finite()));
        Self(m)
    }

    pub fn rows(&self) -> usize {
        self.0.nrows()
    }

    pub fn cols(&self) -> usize {
        self.0.ncols()
    }

    pub fn is_square(&self) -> bool {
        self.rows() == self.cols()
    }

    pub fn as_matrix(&self) -> &DMatrix<C64> {
        &self.0
    }

    pub fn into_matrix(self) -> DMatrix<C64> {
        self.0
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.0.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn scale(&self, factor: C64) -> Result<Self> {
        Self::from_matrix(&self.0 * factor)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same_shape(other)?;
        Self::from_matrix(&self.0 + &other.0)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_same_shape(other)?;
        Self::from_matrix(&self.0 - &other.0)
    }

    /// Adds `shift` to every diagonal entry.
    pub fn shift_diagonal(&self, shift: C64) -> Result<Self> {
        if !self.is_square() {
            return Err(self.non_square());
        }
        let mut m = self.0.clone();
        for i in 0..m.nrows() {
            m[(i, i)] += shift;
        }
        Self::from_matrix(m)
    }

    /// Relative anti-Hermitian part `‖A − A†‖_F / ‖A‖_F`.
    pub fn hermitian_defect(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let diff = (&self.0 - self.0.adjoint()).norm();
        diff / self.frobenius_norm().max(ABS_FLOOR)
    }

    fn check_same_shape(&self, other: &Self) -> Result<()> {
        if self.0.shape() != other.0.shape() {
            return Err(Error::Dimension(format!(
                "{:?} vs {:?}",
                self.0.shape(),
                other.0.shape()
            )));
        }
        Ok(())
    }

    fn non_square(&self) -> Error {
        Error::Dimension(format!("expected square matrix, got {}x{}", self.rows(), self.cols()))
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;

    fn index(&self, idx: (usize, usize)) -> &C64 {
        &self.0[idx]
    }
}

/// Eigenvalues with optional column eigenvectors.
#[derive(Debug, Clone)]
pub struct EigenSystem {
    pub values: Vec<C64>,
    pub vectors: Option<ComplexMatrix>,
}

impl EigenSystem {
    /// Real parts of the eigenvalues, in stored order.
    pub fn real_values(&self) -> Vec<f64> {
        self.values.iter().map(|z| z.re).collect()
    }
}

pub fn adjoint(a: &ComplexMatrix) -> ComplexMatrix {
    ComplexMatrix(a.0.adjoint())
}

pub fn trace(a: &ComplexMatrix) -> Result<C64> {
    if !a.is_square() {
        return Err(a.non_square());
    }
    Ok(a.0.trace())
}

pub fn matmul(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    if a.cols() != b.rows() {
        return Err(Error::Dimension(format!(
            "cannot multiply {}x{} by {}x{}",
            a.rows(),
            a.cols(),
            b.rows(),
            b.cols()
        )));
    }
    ComplexMatrix::from_matrix(&a.0 * &b.0)
}

/// Eigendecomposition of a Hermitian matrix; eigenvalues ascending.
pub fn eig_hermitian(a: &ComplexMatrix) -> Result<EigenSystem> {
    if !a.is_square() {
        return Err(a.non_square());
    }
    let defect = a.hermitian_defect();
    if defect > HERMITIAN_TOL {
        return Err(Error::NotHermitian(defect));
    }
    let n = a.rows();
    let sym = (&a.0 + a.0.adjoint()) * C64::new(0.5, 0.0);
    let eig = SymmetricEigen::try_new(sym, f64::EPSILON, 1000 * n.max(10)).ok_or_else(|| {
        Error::Convergence(format!("Hermitian eigensolver did not converge (n = {n})"))
    })?;

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let values = order.iter().map(|&i| C64::new(eig.eigenvalues[i], 0.0)).collect();
    let vectors = DMatrix::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]);
    Ok(EigenSystem {
        values,
        vectors: Some(ComplexMatrix::from_matrix(vectors)?),
    })
}

/// Eigenvalues of a general square matrix, read off the complex Schur form.
pub fn eig_general(a: &ComplexMatrix) -> Result<EigenSystem> {
    let (_, upper) = schur(a)?;
    let values = (0..upper.rows()).map(|i| upper[(i, i)]).collect();
    Ok(EigenSystem { values, vectors: None })
}

/// Complex Schur decomposition `a = U·T·U†`, returned as `(U, T)` with `T`
/// upper triangular.
pub fn schur(a: &ComplexMatrix) -> Result<(ComplexMatrix, ComplexMatrix)> {
    if !a.is_square() {
        return Err(a.non_square());
    }
    let n = a.rows();
    let decomposition = Schur::try_new(a.0.clone(), f64::EPSILON, 1000 * n.max(10))
        .ok_or_else(|| Error::Convergence(format!("Schur QR iteration did not converge (n = {n})")))?;
    let (unitary, mut upper) = decomposition.unpack();
    // nalgebra leaves round-off below the diagonal; the contract is strictly triangular.
    for c in 0..n {
        for r in (c + 1)..n {
            upper[(r, c)] = C64::new(0.0, 0.0);
        }
    }
    Ok((ComplexMatrix::from_matrix(unitary)?, ComplexMatrix::from_matrix(upper)?))
}
