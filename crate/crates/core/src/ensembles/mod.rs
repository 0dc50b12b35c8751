//! Random-matrix ensembles for Lindblad operators.
//!
//! All six kinds share one normalization: `⟨tr L†L⟩ = σ²N²`. Within that
//! constraint each Gaussian kind keeps the shape of its conjugation-invariant
//! weight (GOE diagonal variance twice the off-diagonal one; GSE built from
//! self-dual quaternions), and each Ginibre kind has i.i.d. entries of mean
//! square modulus σ².
//!
//! Symplectic kinds use the 2×2 complex embedding of quaternions,
//! `a + bi + cj + dk ↦ [[a + ib, c + id], [−c + id, a − ib]]`, so the
//! Hilbert-space dimension `N` is even and equal to the matrix size.

mod haar;
mod spectral;

pub use haar::{sample_haar_pure_state, sample_haar_unitary};
pub use spectral::{schur_trace_split, spectral_density_check, SpectralReport};

use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::numerics::{ComplexMatrix, C64};
use crate::randomness::Stream;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum EnsembleKind {
    Goe,
    Gue,
    Gse,
    GinOe,
    GinUe,
    GinSe,
}

/// Hermitian (Gaussian) versus non-Hermitian (Ginibre) ensembles.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Family {
    Gaussian,
    Ginibre,
}

impl EnsembleKind {
    pub const ALL: [EnsembleKind; 6] = [
        EnsembleKind::Goe,
        EnsembleKind::Gue,
        EnsembleKind::Gse,
        EnsembleKind::GinOe,
        EnsembleKind::GinUe,
        EnsembleKind::GinSe,
    ];

    pub fn name(self) -> &'static str {
        match self {
            EnsembleKind::Goe => "goe",
            EnsembleKind::Gue => "gue",
            EnsembleKind::Gse => "gse",
            EnsembleKind::GinOe => "ginoe",
            EnsembleKind::GinUe => "ginue",
            EnsembleKind::GinSe => "ginse",
        }
    }

    pub fn family(self) -> Family {
        match self {
            EnsembleKind::Goe | EnsembleKind::Gue | EnsembleKind::Gse => Family::Gaussian,
            _ => Family::Ginibre,
        }
    }

    pub fn is_hermitian(self) -> bool {
        self.family() == Family::Gaussian
    }

    /// Quaternion kinds need an even dimension.
    pub fn is_symplectic(self) -> bool {
        matches!(self, EnsembleKind::Gse | EnsembleKind::GinSe)
    }
}

impl fmt::Display for EnsembleKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for EnsembleKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        EnsembleKind::ALL
            .into_iter()
            .find(|k| k.name().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| Error::Parameter(format!("unknown ensemble kind '{s}'")))
    }
}

/// Ensemble kind, Hilbert-space dimension and scale.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnsembleSpec {
    kind: EnsembleKind,
    dim: usize,
    sigma: f64,
}

impl EnsembleSpec {
    pub fn new(kind: EnsembleKind, dim: usize, sigma: f64) -> Result<Self> {
        if dim == 0 {
            return Err(Error::Parameter("dimension must be positive".into()));
        }
        if kind.is_symplectic() && dim % 2 != 0 {
            return Err(Error::Parameter(format!(
                "{kind} needs an even dimension (quaternion blocks), got {dim}"
            )));
        }
        if !(sigma > 0.0 && sigma.is_finite()) {
            return Err(Error::Parameter(format!("sigma must be positive, got {sigma}")));
        }
        Ok(Self { kind, dim, sigma })
    }

    pub fn kind(&self) -> EnsembleKind {
        self.kind
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }
}

/// `a1·L¹ + a2·L²` with independent `L¹`, `L²` and `a1² + a2² = 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MixedEnsembleSpec {
    first: EnsembleSpec,
    second: EnsembleSpec,
    a1: f64,
    a2: f64,
}

impl MixedEnsembleSpec {
    pub fn new(first: EnsembleSpec, second: EnsembleSpec, a1: f64, a2: f64) -> Result<Self> {
        if (a1 * a1 + a2 * a2 - 1.0).abs() > 1e-12 {
            return Err(Error::Parameter(format!("mixing weights need a1² + a2² = 1 (got {a1}, {a2})")));
        }
        if first.dim != second.dim {
            return Err(Error::Parameter(format!("mixed dimensions differ: {} vs {}", first.dim, second.dim)));
        }
        if first.sigma != second.sigma {
            return Err(Error::Parameter(format!("mixed scales differ: {} vs {}", first.sigma, second.sigma)));
        }
        Ok(Self { first, second, a1, a2 })
    }

    /// Equal-weight mixture `(L¹ + L²)/√2`.
    pub fn balanced(first: EnsembleSpec, second: EnsembleSpec) -> Result<Self> {
        let w = std::f64::consts::FRAC_1_SQRT_2;
        Self::new(first, second, w, w)
    }

    pub fn first(&self) -> &EnsembleSpec {
        &self.first
    }

    pub fn second(&self) -> &EnsembleSpec {
        &self.second
    }

    pub fn weights(&self) -> (f64, f64) {
        (self.a1, self.a2)
    }

    pub fn dim(&self) -> usize {
        self.first.dim
    }

    pub fn sigma(&self) -> f64 {
        self.first.sigma
    }
}

/// Any ensemble a Lindblad operator can be drawn from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum OperatorEnsemble {
    Single(EnsembleSpec),
    Mixed(MixedEnsembleSpec),
}

impl OperatorEnsemble {
    pub fn dim(&self) -> usize {
        match self {
            OperatorEnsemble::Single(s) => s.dim(),
            OperatorEnsemble::Mixed(m) => m.dim(),
        }
    }

    pub fn sigma(&self) -> f64 {
        match self {
            OperatorEnsemble::Single(s) => s.sigma(),
            OperatorEnsemble::Mixed(m) => m.sigma(),
        }
    }

    /// All draws are Hermitian.
    pub fn is_hermitian(&self) -> bool {
        match self {
            OperatorEnsemble::Single(s) => s.kind().is_hermitian(),
            OperatorEnsemble::Mixed(m) => m.first.kind.is_hermitian() && m.second.kind.is_hermitian(),
        }
    }

    pub fn label(&self) -> String {
        match self {
            OperatorEnsemble::Single(s) => s.kind().name().to_string(),
            OperatorEnsemble::Mixed(m) => format!("mixed({}+{})", m.first.kind, m.second.kind),
        }
    }

    pub fn sample(&self, stream: &mut Stream) -> ComplexMatrix {
        match self {
            OperatorEnsemble::Single(s) => sample(s, stream),
            OperatorEnsemble::Mixed(m) => sample_mixed(m, stream),
        }
    }
}

impl From<EnsembleSpec> for OperatorEnsemble {
    fn from(spec: EnsembleSpec) -> Self {
        OperatorEnsemble::Single(spec)
    }
}

impl From<MixedEnsembleSpec> for OperatorEnsemble {
    fn from(spec: MixedEnsembleSpec) -> Self {
        OperatorEnsemble::Mixed(spec)
    }
}

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// 2×2 complex block of the quaternion `a + bi + cj + dk`.
fn quaternion_block(a: f64, b: f64, cq: f64, d: f64) -> [[C64; 2]; 2] {
    [[c(a, b), c(cq, d)], [c(-cq, d), c(a, -b)]]
}

/// Draws one matrix from `spec`.
pub fn sample(spec: &EnsembleSpec, stream: &mut Stream) -> ComplexMatrix {
    let n = spec.dim;
    let nf = n as f64;
    let sigma = spec.sigma;
    let mut m = DMatrix::<C64>::zeros(n, n);
    match spec.kind {
        EnsembleKind::Goe => {
            // Off-diagonal variance s², diagonal 2s², with s² = σ²N/(N+1).
            let s = sigma * (nf / (nf + 1.0)).sqrt();
            for i in 0..n {
                m[(i, i)] = c(std::f64::consts::SQRT_2 * s * stream.standard_normal(), 0.0);
                for j in (i + 1)..n {
                    let x = s * stream.standard_normal();
                    m[(i, j)] = c(x, 0.0);
                    m[(j, i)] = c(x, 0.0);
                }
            }
        }
        EnsembleKind::Gue => {
            let half = sigma * std::f64::consts::FRAC_1_SQRT_2;
            for i in 0..n {
                m[(i, i)] = c(sigma * stream.standard_normal(), 0.0);
                for j in (i + 1)..n {
                    let z = c(half * stream.standard_normal(), half * stream.standard_normal());
                    m[(i, j)] = z;
                    m[(j, i)] = z.conj();
                }
            }
        }
        EnsembleKind::Gse => {
            // Every complex entry of the embedding has variance s² = σ²N/(N−1);
            // diagonal quaternions are real.
            let quat = n / 2;
            let s = if n > 1 { sigma * (nf / (nf - 1.0)).sqrt() } else { sigma };
            let comp = s * std::f64::consts::FRAC_1_SQRT_2;
            for p in 0..quat {
                let a = s * stream.standard_normal();
                m[(2 * p, 2 * p)] = c(a, 0.0);
                m[(2 * p + 1, 2 * p + 1)] = c(a, 0.0);
                for q in (p + 1)..quat {
                    let blk = quaternion_block(
                        comp * stream.standard_normal(),
                        comp * stream.standard_normal(),
                        comp * stream.standard_normal(),
                        comp * stream.standard_normal(),
                    );
                    for r in 0..2 {
                        for col in 0..2 {
                            m[(2 * p + r, 2 * q + col)] = blk[r][col];
                            m[(2 * q + col, 2 * p + r)] = blk[r][col].conj();
                        }
                    }
                }
            }
        }
        EnsembleKind::GinOe => {
            for v in m.iter_mut() {
                *v = c(sigma * stream.standard_normal(), 0.0);
            }
        }
        EnsembleKind::GinUe => {
            let half = sigma * std::f64::consts::FRAC_1_SQRT_2;
            for v in m.iter_mut() {
                *v = c(half * stream.standard_normal(), half * stream.standard_normal());
            }
        }
        EnsembleKind::GinSe => {
            let comp = sigma * std::f64::consts::FRAC_1_SQRT_2;
            let quat = n / 2;
            for p in 0..quat {
                for q in 0..quat {
                    let blk = quaternion_block(
                        comp * stream.standard_normal(),
                        comp * stream.standard_normal(),
                        comp * stream.standard_normal(),
                        comp * stream.standard_normal(),
                    );
                    for r in 0..2 {
                        for col in 0..2 {
                            m[(2 * p + r, 2 * q + col)] = blk[r][col];
                        }
                    }
                }
            }
        }
    }
    ComplexMatrix::from_matrix_unchecked(m)
}

/// Draws `a1·L¹ + a2·L²`, each component from its own substream.
pub fn sample_mixed(spec: &MixedEnsembleSpec, stream: &mut Stream) -> ComplexMatrix {
    let parent = stream.split();
    let first = sample(&spec.first, &mut parent.child(0).stream());
    let second = sample(&spec.second, &mut parent.child(1).stream());
    let m = first.as_matrix() * C64::new(spec.a1, 0.0) + second.as_matrix() * C64::new(spec.a2, 0.0);
    ComplexMatrix::from_matrix_unchecked(m)
}
