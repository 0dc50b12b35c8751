//! Decoherence rates: per-realization evaluation, Monte Carlo ensemble
//! averages and the closed-form limits.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};

use crate::ensembles::{sample_haar_pure_state, Family, OperatorEnsemble};
use crate::error::{Error, Result};
use crate::lindblad::LindbladModel;
use crate::numerics::{ComplexMatrix, C64};
use crate::randomness::{SeedSpec, Stream};
use crate::states::{family_weight, uniform_purity, DensityMatrix};
use crate::stats::Summary;

fn traceless(l: &DMatrix<C64>) -> DMatrix<C64> {
    let n = l.nrows();
    let shift = l.trace() / C64::new(n as f64, 0.0);
    let mut out = l.clone();
    for i in 0..n {
        out[(i, i)] -= shift;
    }
    out
}

/// `tr(ρ²L†L) − tr(ρL†ρL)` for one jump operator, evaluated on the traceless
/// part of `L` as `‖Lρ‖² − Re⟨Lρ, ρL⟩`.
fn channel_term(l: &DMatrix<C64>, rho: &DMatrix<C64>) -> f64 {
    let l = traceless(l);
    let x = &l * rho;
    let y = rho * &l;
    let cross: f64 = x.iter().zip(y.iter()).map(|(a, b)| (a.conj() * b).re).sum();
    x.norm_squared() - cross
}

/// `D = (2/P₀) Σ_α γ_α [tr(ρ₀² L_α†L_α) − tr(ρ₀ L_α† ρ₀ L_α)]`.
pub fn rate(model: &LindbladModel, rho0: &DensityMatrix) -> Result<f64> {
    if rho0.dim() != model.dim() {
        return Err(Error::Dimension(format!(
            "state dimension {} vs model dimension {}",
            rho0.dim(),
            model.dim()
        )));
    }
    let rho = rho0.matrix().as_matrix();
    let total: f64 = model
        .jumps()
        .iter()
        .zip(model.rates())
        .map(|(l, &g)| g * channel_term(l.as_matrix(), rho))
        .sum();
    Ok(2.0 * total / rho0.purity())
}

/// Rate of a single jump operator for the family state
/// `(1 − p)/N · I + p|ψ⟩⟨ψ|` of purity `p0`, in `O(N²)` operations.
pub fn family_rate(l: &ComplexMatrix, gamma: f64, psi: &DVector<C64>, p0: f64) -> Result<f64> {
    let n = psi.len();
    if !l.is_square() || l.rows() != n {
        return Err(Error::Dimension(format!(
            "operator is {}x{} but the state has dimension {n}",
            l.rows(),
            l.cols()
        )));
    }
    let p = family_weight(n, p0)?;
    let a = (1.0 - p) / n as f64;
    let lt = traceless(l.as_matrix());
    let lpsi = &lt * psi;
    let ldpsi = lt.ad_mul(psi);
    let expect = psi.dotc(&lpsi);
    let fwd = lpsi.norm_squared();
    let back = ldpsi.norm_squared();
    let commutator = fwd + back - 2.0 * expect.norm_sqr();
    let asym = fwd - back;
    Ok(gamma * (p * p * commutator + (2.0 * a * p + p * p) * asym) / p0)
}

/// `|rate(L) − rate(L + c·I)|` for a single-jump model.
pub fn rate_shift_invariance_check(model: &LindbladModel, rho0: &DensityMatrix, shift: C64) -> Result<f64> {
    if model.jumps().len() != 1 {
        return Err(Error::Parameter("shift check needs exactly one jump operator".into()));
    }
    let base = rate(model, rho0)?;
    let shifted_op = model.jumps()[0].shift_diagonal(shift)?;
    let shifted = LindbladModel::new(vec![shifted_op], model.rates().to_vec(), model.hamiltonian().cloned())?;
    Ok((rate(&shifted, rho0)? - base).abs())
}

/// How the initial purity is chosen in each realization.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum P0Policy {
    /// Haar-random pure state.
    Pure,
    /// Family state with the given purity around a Haar-random `ψ`.
    Fixed(f64),
    /// Family state with purity uniform on `[1/N, 1]`.
    Uniform,
}

impl P0Policy {
    fn draw(self, n: usize, stream: &mut Stream) -> Result<f64> {
        let p0 = match self {
            P0Policy::Pure => 1.0,
            P0Policy::Fixed(p0) => p0,
            P0Policy::Uniform => uniform_purity(n, stream),
        };
        family_weight(n, p0)?;
        Ok(p0)
    }
}

/// One realization: draws `L`, then `ψ`, then `P₀`, all from `stream`.
/// Returns `(D, P₀)`.
pub fn realization_rate(
    ensemble: &OperatorEnsemble,
    policy: P0Policy,
    gamma_total: f64,
    stream: &mut Stream,
) -> Result<(f64, f64)> {
    let l = ensemble.sample(stream);
    let psi = sample_haar_pure_state(ensemble.dim(), stream);
    let p0 = policy.draw(ensemble.dim(), stream)?;
    Ok((family_rate(&l, gamma_total, &psi, p0)?, p0))
}

/// Per-realization rates for indices `range`, realization `i` drawing from
/// stream `i` under `seed`.
pub fn realization_rates(
    ensemble: &OperatorEnsemble,
    policy: P0Policy,
    gamma_total: f64,
    seed: SeedSpec,
    range: std::ops::Range<u64>,
) -> Result<Vec<(f64, f64)>> {
    range
        .map(|i| realization_rate(ensemble, policy, gamma_total, &mut seed.child(i).stream()))
        .collect()
}

/// Monte Carlo estimate of `⟨D⟩`.
#[derive(Debug, Clone, PartialEq)]
pub struct RateEstimate {
    pub mean: f64,
    pub std_error: f64,
    pub n_realizations: usize,
    pub ensemble: OperatorEnsemble,
    pub policy: P0Policy,
    /// Mean initial purity over the realizations.
    pub p0: f64,
}

impl RateEstimate {
    pub fn from_samples(ensemble: OperatorEnsemble, policy: P0Policy, samples: &[(f64, f64)]) -> Result<Self> {
        if samples.len() < 2 {
            return Err(Error::Parameter("a rate estimate needs at least two realizations".into()));
        }
        let rates: Vec<f64> = samples.iter().map(|s| s.0).collect();
        let purities: Vec<f64> = samples.iter().map(|s| s.1).collect();
        let summary = Summary::from_slice(&rates);
        Ok(Self {
            mean: summary.mean,
            std_error: summary.std_error(),
            n_realizations: samples.len(),
            ensemble,
            policy,
            p0: Summary::from_slice(&purities).mean,
        })
    }
}

pub fn mc_average_rate(
    ensemble: &OperatorEnsemble,
    policy: P0Policy,
    n_realizations: usize,
    gamma_total: f64,
    seed: SeedSpec,
) -> Result<RateEstimate> {
    if !(gamma_total > 0.0) {
        return Err(Error::Parameter(format!("gamma_total must be positive, got {gamma_total}")));
    }
    let samples = realization_rates(ensemble, policy, gamma_total, seed, 0..n_realizations as u64)?;
    RateEstimate::from_samples(ensemble.clone(), policy, &samples)
}

/// `⟨D⟩ = 2Γ(NP₀ − 1)/((N² − 1)P₀) · [⟨tr L†L⟩ − ⟨|tr L|²⟩/N]`.
pub fn averaged_rate_from_traces(n: usize, gamma_total: f64, p0: f64, mean_tr_ldl: f64, mean_abs_tr_sq: f64) -> Result<f64> {
    family_weight(n, p0)?;
    let nf = n as f64;
    Ok(2.0 * gamma_total * (nf * p0 - 1.0) / ((nf * nf - 1.0) * p0) * (mean_tr_ldl - mean_abs_tr_sq / nf))
}

/// Pure-state limit of [`averaged_rate_from_traces`]:
/// `2Γ/(N + 1) · [⟨tr L†L⟩ − ⟨|tr L|²⟩/N]`.
pub fn rate_upper_bound(n: usize, gamma_total: f64, mean_tr_ldl: f64, mean_abs_tr_sq: f64) -> f64 {
    let nf = n as f64;
    2.0 * gamma_total / (nf + 1.0) * (mean_tr_ldl - mean_abs_tr_sq / nf)
}

fn check_n(n: usize, min: usize) -> Result<()> {
    if n < min {
        return Err(Error::Domain {
            value: n as f64,
            domain: format!("N >= {min}"),
        });
    }
    Ok(())
}

/// `⟨D_L⟩`: `2Γσ²(N − 2 + π²/12)` for Gaussian ensembles and
/// `2Γσ²(N² − 2)/(N + 1)` for Ginibre ensembles.
pub fn analytic_rate_limit(family: Family, n: usize, gamma_sigma_sq: f64) -> Result<f64> {
    check_n(n, 3)?;
    let nf = n as f64;
    Ok(match family {
        Family::Gaussian => 2.0 * gamma_sigma_sq * (nf - 2.0 + PI * PI / 12.0),
        Family::Ginibre => 2.0 * gamma_sigma_sq * (nf * nf - 2.0) / (nf + 1.0),
    })
}

/// `A = 2 + (π²/6 − 2)/N` (Gaussian) or `2 − 2/(N² − 1)` (Ginibre).
pub fn a_coefficient(family: Family, n: usize) -> Result<f64> {
    check_n(n, 2)?;
    let nf = n as f64;
    Ok(match family {
        Family::Gaussian => 2.0 + (PI * PI / 6.0 - 2.0) / nf,
        Family::Ginibre => 2.0 - 2.0 / (nf * nf - 1.0),
    })
}

/// `⟨D⟩ = Γσ²A(N − 1/P₀)`.
pub fn analytic_average_rate(family: Family, n: usize, gamma_sigma_sq: f64, p0: f64) -> Result<f64> {
    family_weight(n, p0)?;
    let a = a_coefficient(family, n)?;
    Ok((gamma_sigma_sq * a * (n as f64 - 1.0 / p0)).max(0.0))
}
