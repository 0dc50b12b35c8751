use std::f64::consts::PI;

use super::{sample, EnsembleSpec, Family};
use crate::error::{Error, Result};
use crate::numerics::{eig_general, eig_hermitian, ComplexMatrix};
use crate::randomness::Stream;
use crate::stats::ks_statistic;

/// Outcome of a pooled-spectrum comparison against the limiting law.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralReport {
    /// KS distance to the semicircle CDF (Gaussian kinds) or to the
    /// radial circular-law CDF `r²` (Ginibre kinds).
    pub ks_distance: f64,
    /// Eigenvalues beyond 1.05 times the limiting support radius.
    pub support_violations: usize,
    pub outlier_fraction: f64,
    pub eigenvalue_count: usize,
}

/// Semicircle CDF on `[−radius, radius]`.
pub fn semicircle_cdf(x: f64, radius: f64) -> f64 {
    let u = (x / radius).clamp(-1.0, 1.0);
    0.5 + (u * (1.0 - u * u).sqrt() + u.asin()) / PI
}

/// Pools eigenvalues of `n_samples` draws and compares them with the
/// semicircle of radius `2σ√N` or the disk of radius `σ√N`.
pub fn spectral_density_check(spec: &EnsembleSpec, n_samples: usize, stream: &mut Stream) -> Result<SpectralReport> {
    if n_samples == 0 {
        return Err(Error::Parameter("spectral check needs at least one sample".into()));
    }
    let n = spec.dim() as f64;
    let scale = spec.sigma() * n.sqrt();
    let mut pooled = Vec::with_capacity(n_samples * spec.dim());
    let family = spec.kind().family();
    for _ in 0..n_samples {
        let m = sample(spec, stream);
        match family {
            Family::Gaussian => pooled.extend(eig_hermitian(&m)?.real_values()),
            Family::Ginibre => pooled.extend(eig_general(&m)?.values.iter().map(|z| z.norm() / scale)),
        }
    }
    let (ks_distance, support_violations) = match family {
        Family::Gaussian => {
            let radius = 2.0 * scale;
            let ks = ks_statistic(&pooled, |x| semicircle_cdf(x, radius));
            (ks, pooled.iter().filter(|x| x.abs() > 1.05 * radius).count())
        }
        Family::Ginibre => {
            let ks = ks_statistic(&pooled, |r| (r * r).min(1.0));
            (ks, pooled.iter().filter(|&&r| r > 1.05).count())
        }
    };
    Ok(SpectralReport {
        ks_distance,
        support_violations,
        outlier_fraction: support_violations as f64 / pooled.len() as f64,
        eigenvalue_count: pooled.len(),
    })
}

/// Splits `tr(g†g)` into the eigenvalue part `Σ|λᵢ|²` and the strictly
/// triangular Schur part `tr(T†T)`; returns `(lambda_sq, t_sq)`.
pub fn schur_trace_split(g: &ComplexMatrix) -> Result<(f64, f64)> {
    let total = g.frobenius_norm().powi(2);
    let lambda_sq: f64 = eig_general(g)?.values.iter().map(|z| z.norm_sqr()).sum();
    let mut t_sq = total - lambda_sq;
    let tol = 1e-10 * total.max(crate::numerics::ABS_FLOOR);
    if t_sq < 0.0 {
        if t_sq < -tol {
            return Err(Error::Convergence(format!(
                "Schur split violates Σ|λ|² ≤ ‖g‖² by {:.3e}",
                -t_sq
            )));
        }
        t_sq = 0.0;
    }
    Ok((lambda_sq, t_sq))
}
