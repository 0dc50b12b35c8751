//! Density matrices and the initial-state families used by the experiments.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::numerics::{eig_hermitian, ComplexMatrix, C64};
use crate::randomness::Stream;

/// Acceptance thresholds for [`DensityMatrix`] validation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StateTolerance {
    pub hermiticity: f64,
    pub trace: f64,
    /// Most negative eigenvalue accepted (as a positive magnitude).
    pub positivity: f64,
}

impl StateTolerance {
    /// Constructed states.
    pub const STRICT: StateTolerance = StateTolerance {
        hermiticity: 1e-12,
        trace: 1e-12,
        positivity: 1e-10,
    };

    /// States produced by numerical propagation.
    pub const PROPAGATED: StateTolerance = StateTolerance {
        hermiticity: 1e-9,
        trace: 1e-9,
        positivity: 1e-6,
    };
}

/// Hermitian, unit-trace, positive semidefinite matrix with cached purity.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    matrix: ComplexMatrix,
    purity: f64,
}

fn purity_of(m: &DMatrix<C64>) -> f64 {
    // tr(ρ²) = Σ|ρᵢⱼ|² for Hermitian ρ.
    m.iter().map(|z| z.norm_sqr()).sum()
}

impl DensityMatrix {
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        Self::with_tolerance(matrix, StateTolerance::STRICT)
    }

    pub fn with_tolerance(matrix: ComplexMatrix, tol: StateTolerance) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::Dimension("density matrix must be square".into()));
        }
        let n = matrix.rows();
        let asym = (matrix.as_matrix() - matrix.as_matrix().adjoint()).norm();
        if asym > tol.hermiticity {
            return Err(Error::InvalidState(format!("anti-Hermitian part {asym:.3e}")));
        }
        let tr = matrix.as_matrix().trace();
        if (tr - C64::new(1.0, 0.0)).norm() > tol.trace {
            return Err(Error::InvalidState(format!("trace {tr} differs from 1")));
        }
        let herm = ComplexMatrix::from_matrix(
            (matrix.as_matrix() + matrix.as_matrix().adjoint()) * C64::new(0.5, 0.0),
        )?;
        let min_eig = eig_hermitian(&herm)?
            .real_values()
            .first()
            .copied()
            .unwrap_or(0.0);
        if min_eig < -tol.positivity {
            return Err(Error::Positivity(min_eig));
        }
        let purity = purity_of(matrix.as_matrix());
        let nf = n as f64;
        if purity > 1.0 + tol.positivity.max(1e-10) || purity < 1.0 / nf - 1e-10 {
            return Err(Error::InvalidState(format!("purity {purity} outside [1/{n}, 1]")));
        }
        Ok(Self { matrix, purity })
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn purity(&self) -> f64 {
        self.purity
    }
}

fn check_unit(psi: &DVector<C64>) -> Result<()> {
    if psi.is_empty() {
        return Err(Error::Dimension("state vector must be non-empty".into()));
    }
    let norm = psi.norm();
    if (norm - 1.0).abs() > 1e-10 {
        return Err(Error::Normalization(norm));
    }
    Ok(())
}

/// `|ψ⟩⟨ψ|`.
pub fn pure_state(psi: &DVector<C64>) -> Result<DensityMatrix> {
    check_unit(psi)?;
    let m = psi * psi.adjoint();
    DensityMatrix::new(ComplexMatrix::from_matrix(m)?)
}

/// `I/n`.
pub fn maximally_mixed(n: usize) -> DensityMatrix {
    assert!(n >= 1, "dimension must be positive");
    let m = DMatrix::<C64>::identity(n, n) / C64::new(n as f64, 0.0);
    DensityMatrix {
        matrix: ComplexMatrix::from_matrix_unchecked(m),
        purity: 1.0 / n as f64,
    }
}

/// Weight `p` of the pure component in the family state with purity `p0`:
/// `p = √((N·P₀ − 1)/(N − 1))`.
pub fn family_weight(n: usize, p0: f64) -> Result<f64> {
    let nf = n as f64;
    if !(p0 >= 1.0 / nf - 1e-15 && p0 <= 1.0) {
        return Err(Error::Domain {
            value: p0,
            domain: format!("[1/{n}, 1]"),
        });
    }
    if n == 1 {
        return Ok(1.0);
    }
    Ok(((nf * p0 - 1.0).max(0.0) / (nf - 1.0)).sqrt())
}

/// `(1 − p)/N · I + p·|ψ⟩⟨ψ|`, whose purity is `p0`.
pub fn purity_family(psi: &DVector<C64>, p0: f64) -> Result<DensityMatrix> {
    check_unit(psi)?;
    let n = psi.len();
    let p = family_weight(n, p0)?;
    if p == 0.0 {
        return Ok(maximally_mixed(n));
    }
    if p == 1.0 {
        return pure_state(psi);
    }
    let mixed = DMatrix::<C64>::identity(n, n) * C64::new((1.0 - p) / n as f64, 0.0);
    let m = mixed + psi * psi.adjoint() * C64::new(p, 0.0);
    DensityMatrix::new(ComplexMatrix::from_matrix(m)?)
}

pub fn purity(rho: &DensityMatrix) -> f64 {
    rho.purity()
}

/// Purity drawn uniformly from `[1/n, 1]`.
pub fn uniform_purity(n: usize, stream: &mut Stream) -> f64 {
    stream.uniform_range(1.0 / n as f64, 1.0)
}
