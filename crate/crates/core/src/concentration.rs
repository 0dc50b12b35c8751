//! Distribution of the ensemble-averaged rate `⟨D⟩ = Ã(N − 1/P₀)` when the
//! initial purity is uniform on `[1/N, 1]`.

use crate::decoherence::{a_coefficient, analytic_average_rate, family_rate};
use crate::ensembles::{sample_haar_pure_state, Family, OperatorEnsemble};
use crate::error::{Error, Result};
use crate::numerics::integrate_adaptive;
use crate::randomness::SeedSpec;
use crate::states::uniform_purity;

/// Largest `k` accepted by [`RateDistributionModel::moment`].
pub const MAX_MOMENT: u32 = 8;

const QUAD_TOL: f64 = 1e-13;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateDistributionModel {
    n: usize,
    a_tilde: f64,
    family: Family,
}

impl RateDistributionModel {
    /// `Ã = Γσ²·A(N)` for the given family.
    pub fn new(family: Family, n: usize, gamma_sigma_sq: f64) -> Result<Self> {
        if !(gamma_sigma_sq > 0.0 && gamma_sigma_sq.is_finite()) {
            return Err(Error::Parameter(format!("Γσ² must be positive, got {gamma_sigma_sq}")));
        }
        let a = a_coefficient(family, n)?;
        Ok(Self {
            n,
            a_tilde: gamma_sigma_sq * a,
            family,
        })
    }

    pub fn with_a_tilde(family: Family, n: usize, a_tilde: f64) -> Result<Self> {
        if n < 2 {
            return Err(Error::Domain {
                value: n as f64,
                domain: "N >= 2".into(),
            });
        }
        if !(a_tilde > 0.0 && a_tilde.is_finite()) {
            return Err(Error::Parameter(format!("Ã must be positive, got {a_tilde}")));
        }
        Ok(Self { n, a_tilde, family })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn a_tilde(&self) -> f64 {
        self.a_tilde
    }

    pub fn family(&self) -> Family {
        self.family
    }

    /// `Ã(N − 1)`, the largest attainable mean rate.
    pub fn upper_bound(&self) -> f64 {
        self.a_tilde * (self.n as f64 - 1.0)
    }

    fn check_support(&self, d: f64) -> Result<()> {
        if !(0.0..=self.upper_bound()).contains(&d) {
            return Err(Error::Domain {
                value: d,
                domain: format!("[0, {}]", self.upper_bound()),
            });
        }
        Ok(())
    }

    /// `F(d) = d / ((N − 1)(ÃN − d))`.
    pub fn cdf(&self, d: f64) -> Result<f64> {
        self.check_support(d)?;
        if d == self.upper_bound() {
            return Ok(1.0);
        }
        let nf = self.n as f64;
        Ok((d / ((nf - 1.0) * (self.a_tilde * nf - d))).min(1.0))
    }

    /// `f(d) = ÃN / ((N − 1)(ÃN − d)²)`.
    pub fn pdf(&self, d: f64) -> Result<f64> {
        self.check_support(d)?;
        let nf = self.n as f64;
        let gap = self.a_tilde * nf - d;
        Ok(self.a_tilde * nf / ((nf - 1.0) * gap * gap))
    }

    /// Inverse of [`cdf`](Self::cdf): `d = ÃN(N − 1)u / (1 + (N − 1)u)`.
    pub fn quantile(&self, u: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&u) {
            return Err(Error::Domain {
                value: u,
                domain: "[0, 1]".into(),
            });
        }
        if u == 1.0 {
            return Ok(self.upper_bound());
        }
        let m = self.n as f64 - 1.0;
        Ok(self.a_tilde * self.n as f64 * m * u / (1.0 + m * u))
    }

    /// `E[⟨D⟩^k] = Ã^k (N − 1)^k [1 − k·₂F₁(1, k+1; k+2; (N−1)/N) / (N(k + 1))]`.
    pub fn moment(&self, k: u32) -> Result<f64> {
        if !(1..=MAX_MOMENT).contains(&k) {
            return Err(Error::Domain {
                value: k as f64,
                domain: format!("1..={MAX_MOMENT}"),
            });
        }
        let nf = self.n as f64;
        let kf = k as f64;
        let z = (nf - 1.0) / nf;
        let f = hyp2f1_special(k, z)?;
        Ok(self.upper_bound().powi(k as i32) * (1.0 - kf * f / (nf * (kf + 1.0))))
    }

    /// `(κ₁, κ₂, κ₃, κ₄)` from their closed forms.
    pub fn cumulants(&self) -> [f64; 4] {
        let a = self.a_tilde;
        let nf = self.n as f64;
        let m = nf - 1.0;
        let l = nf.ln();
        let k1 = a * nf * (1.0 - l / m);
        let k2 = a * a * nf * (1.0 - nf * l * l / (m * m));
        let k3 = -(a.powi(3) * nf / 2.0) * ((nf + 1.0) - 6.0 * nf * l / m + 4.0 * nf * nf * l.powi(3) / m.powi(3));
        let k4 = (a.powi(4) * nf / 3.0)
            * (1.0 + nf * (nf - 8.0) - 6.0 * nf * (nf + 1.0) * l / m + 36.0 * nf * nf * l * l / (m * m)
                - 18.0 * nf.powi(3) * l.powi(4) / m.powi(4));
        [k1, k2, k3, k4]
    }

    /// `∫ g(d)·f(d) dd` over the support, with `d = ÃN − eˢ`.
    fn expect<G: Fn(f64) -> f64>(&self, g: G) -> Result<f64> {
        let nf = self.n as f64;
        let top = self.a_tilde * nf;
        let scale = top / (nf - 1.0);
        integrate_adaptive(
            |s| {
                let u = s.exp();
                g(top - u) * scale / u
            },
            self.a_tilde.ln(),
            top.ln(),
            QUAD_TOL,
        )
    }

    /// Raw moment by adaptive quadrature of the pdf.
    pub fn moment_quadrature(&self, k: u32) -> Result<f64> {
        self.expect(|d| d.powi(k as i32))
    }

    /// `∫ f` over the support by quadrature.
    pub fn total_mass(&self) -> Result<f64> {
        self.expect(|_| 1.0)
    }

    /// Central moment `E[(⟨D⟩ − μ)^k]` by quadrature.
    pub fn central_moment_quadrature(&self, k: u32) -> Result<f64> {
        let mu = self.moment_quadrature(1)?;
        self.expect(|d| (d - mu).powi(k as i32))
    }

    /// `(κ₁, κ₂, κ₃, κ₄)` from quadrature central moments.
    pub fn cumulants_quadrature(&self) -> Result<[f64; 4]> {
        let mu = self.moment_quadrature(1)?;
        let c2 = self.central_moment_quadrature(2)?;
        let c3 = self.central_moment_quadrature(3)?;
        let c4 = self.central_moment_quadrature(4)?;
        Ok([mu, c2, c3, c4 - 3.0 * c2 * c2])
    }
}

/// Cumulants `κ₁…κ₄` from raw moments `m₁…m₄`.
pub fn cumulants_from_moments(m: [f64; 4]) -> [f64; 4] {
    let [m1, m2, m3, m4] = m;
    [
        m1,
        m2 - m1 * m1,
        m3 - 3.0 * m2 * m1 + 2.0 * m1.powi(3),
        m4 - 4.0 * m3 * m1 - 3.0 * m2 * m2 + 12.0 * m2 * m1 * m1 - 6.0 * m1.powi(4),
    ]
}

/// `₂F₁(1, k+1; k+2; z)` for `0 < z ≤ 1 − 10⁻¹²`.
pub fn hyp2f1_special(k: u32, z: f64) -> Result<f64> {
    if !(z > 0.0 && z <= 1.0 - 1e-12) {
        return Err(Error::Domain {
            value: z,
            domain: "(0, 1 - 1e-12]".into(),
        });
    }
    if z <= 0.9 {
        Ok(hyp2f1_series(k, z))
    } else {
        Ok(hyp2f1_log_form(k, z))
    }
}

/// `(k+1)·z^{−(k+1)}·[−ln(1 − z) − Σ_{m=1}^{k} z^m/m]`.
pub fn hyp2f1_log_form(k: u32, z: f64) -> f64 {
    let partial: f64 = (1..=k).map(|m| z.powi(m as i32) / m as f64).sum();
    let kp = k as f64 + 1.0;
    kp * z.powi(-(k as i32) - 1) * (-(-z).ln_1p() - partial)
}

/// `Σ_n (k+1)/(k+1+n)·zⁿ`, summed until the terms stop contributing.
fn hyp2f1_series(k: u32, z: f64) -> f64 {
    let kp = k as f64 + 1.0;
    let mut sum = 0.0;
    let mut power = 1.0;
    for n in 0..2000 {
        let term = kp / (kp + n as f64) * power;
        sum += term;
        if term < 1e-18 * sum {
            break;
        }
        power *= z;
    }
    sum
}

/// Mean rate of one family state (uniform `P₀`, Haar `ψ`) averaged over
/// `n_realizations` operator draws. Returns `(P₀, mean rate)`.
pub fn state_mean_rate(
    ensemble: &OperatorEnsemble,
    n_realizations: usize,
    gamma_total: f64,
    seed: SeedSpec,
    state_index: u64,
) -> Result<(f64, f64)> {
    if n_realizations == 0 {
        return Err(Error::Parameter("need at least one realization per state".into()));
    }
    let state_seed = seed.child(state_index);
    let mut stream = state_seed.stream();
    let n = ensemble.dim();
    let p0 = uniform_purity(n, &mut stream);
    let psi = sample_haar_pure_state(n, &mut stream);
    let ops_seed = state_seed.child(u64::MAX);
    let mut total = 0.0;
    for j in 0..n_realizations {
        let l = ensemble.sample(&mut ops_seed.child(j as u64).stream());
        total += family_rate(&l, gamma_total, &psi, p0)?;
    }
    Ok((p0, total / n_realizations as f64))
}

/// Sorted Monte Carlo means for `n_states` family states.
pub fn sample_rate_distribution(
    ensemble: &OperatorEnsemble,
    n_states: usize,
    n_realizations_per_state: usize,
    gamma_total: f64,
    seed: SeedSpec,
) -> Result<Vec<f64>> {
    let mut out = (0..n_states as u64)
        .map(|s| state_mean_rate(ensemble, n_realizations_per_state, gamma_total, seed, s).map(|r| r.1))
        .collect::<Result<Vec<f64>>>()?;
    out.sort_by(f64::total_cmp);
    Ok(out)
}

/// Sorted closed-form means `Γσ²A(N − 1/P₀)` for `n_states` uniform purities.
pub fn sample_rate_distribution_analytic(
    family: Family,
    n: usize,
    gamma_sigma_sq: f64,
    n_states: usize,
    seed: SeedSpec,
) -> Result<Vec<f64>> {
    let mut stream = seed.stream();
    let mut out = (0..n_states)
        .map(|_| analytic_average_rate(family, n, gamma_sigma_sq, uniform_purity(n, &mut stream)))
        .collect::<Result<Vec<f64>>>()?;
    out.sort_by(f64::total_cmp);
    Ok(out)
}

/// Fraction of `samples` strictly above `bound`.
pub fn over_bound_fraction(samples: &[f64], bound: f64) -> f64 {
    if samples.is_empty() {
        return 0.0;
    }
    samples.iter().filter(|&&d| d > bound).count() as f64 / samples.len() as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ensembles::{EnsembleKind, EnsembleSpec};
    use crate::stats::ks_statistic_sorted;

    fn model30() -> RateDistributionModel {
        RateDistributionModel::with_a_tilde(Family::Gaussian, 30, 1.98817).unwrap()
    }

    #[test]
    fn cdf_examples() {
        let m = model30();
        assert_eq!(m.cdf(0.0).unwrap(), 0.0);
        assert_eq!(m.cdf(m.upper_bound()).unwrap(), 1.0);
        assert!((m.cdf(40.0).unwrap() - 0.0702114188692).abs() < 1e-12);
        assert!(m.cdf(-1e-9).is_err());
        assert!(m.cdf(m.upper_bound() * (1.0 + 1e-12)).is_err());
        let mut prev = -1.0;
        for i in 0..=100 {
            let v = m.cdf(m.upper_bound() * i as f64 / 100.0).unwrap();
            assert!(v > prev && (0.0..=1.0).contains(&v));
            prev = v;
        }
    }

    #[test]
    fn pdf_examples() {
        let m = model30();
        let at0 = m.pdf(0.0).unwrap();
        assert!((at0 - 1.0 / (m.a_tilde() * 30.0 * 29.0)).abs() < 1e-15);
        let h = 1e-4;
        for i in 1..=20 {
            let d = m.upper_bound() * i as f64 / 21.0;
            let fd = (m.cdf(d + h).unwrap() - m.cdf(d - h).unwrap()) / (2.0 * h);
            let p = m.pdf(d).unwrap();
            assert!((fd - p).abs() < 1e-6 * p, "d = {d}");
            assert!(m.pdf(d).unwrap() > m.pdf(d - 0.1).unwrap());
        }
        assert!((m.total_mass().unwrap() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn quantile_inverts_cdf() {
        let m = model30();
        for u in [0.0, 0.1, 0.5, 0.9, 0.999, 1.0] {
            let d = m.quantile(u).unwrap();
            assert!((m.cdf(d).unwrap() - u).abs() < 1e-12);
        }
        assert!(m.quantile(1.5).is_err());
    }

    #[test]
    fn hypergeometric_examples() {
        assert!((hyp2f1_special(0, 0.5).unwrap() - 2.0 * 2f64.ln()).abs() < 1e-14);
        for k in 0..6 {
            assert!((hyp2f1_special(k, 1e-9).unwrap() - 1.0).abs() < 1e-8);
        }
        let series: f64 = (0..200).map(|n| 4.0 / (4.0 + n as f64) * 0.9f64.powi(n)).sum();
        assert!((hyp2f1_log_form(3, 0.9) - series).abs() < 1e-10 * series);
        let long: f64 = (0..2000).map(|n| 4.0 / (4.0 + n as f64) * 0.9f64.powi(n)).sum();
        assert!((hyp2f1_special(3, 0.9).unwrap() - long).abs() < 1e-13 * long);
        assert!(hyp2f1_special(2, 0.0).is_err());
        assert!(hyp2f1_special(2, 1.0).is_err());
        // Both branches agree across the switch point.
        let a = hyp2f1_series(5, 0.9);
        let b = hyp2f1_log_form(5, 0.9);
        assert!((a - b).abs() < 1e-12 * a);
    }

    #[test]
    fn n2_first_moment() {
        let m = RateDistributionModel::with_a_tilde(Family::Gaussian, 2, 1.0).unwrap();
        // 2∫_{1/2}^{1} (2 − 1/p) dp
        let expect = 2.0 * (1.0 - 2f64.ln());
        assert!((m.moment(1).unwrap() - expect).abs() < 1e-14);
    }

    #[test]
    fn moments_against_purity_integral() {
        // E[⟨D⟩^k] = N/(N−1) ∫_{1/N}^{1} (Ã(N − 1/p))^k dp
        for n in [3usize, 30, 300] {
            let m = RateDistributionModel::new(Family::Ginibre, n, 1.0).unwrap();
            let nf = n as f64;
            for k in 1..=6 {
                let oracle = integrate_adaptive(
                    |p| (m.a_tilde() * (nf - 1.0 / p)).powi(k as i32),
                    1.0 / nf,
                    1.0,
                    1e-13,
                )
                .unwrap()
                    * nf
                    / (nf - 1.0);
                let got = m.moment(k).unwrap();
                assert!((got - oracle).abs() < 1e-9 * oracle, "N={n} k={k}: {got} vs {oracle}");
                assert!(got <= m.upper_bound().powi(k as i32));
            }
        }
        assert!(model30().moment(0).is_err());
        assert!(model30().moment(9).is_err());
    }

    #[test]
    fn first_cumulant_is_first_moment() {
        for n in [3usize, 30, 300] {
            let m = RateDistributionModel::new(Family::Gaussian, n, 1.0).unwrap();
            let k1 = m.cumulants()[0];
            assert!((m.moment(1).unwrap() - k1).abs() < 1e-12 * k1);
        }
    }

    #[test]
    fn cumulant_examples() {
        let m = RateDistributionModel::with_a_tilde(Family::Gaussian, 30, 1.0).unwrap();
        let k = m.cumulants();
        assert!((k[1] - 17.62).abs() < 0.01, "{}", k[1]);
        for n in [3usize, 10, 30, 300] {
            let k = RateDistributionModel::with_a_tilde(Family::Gaussian, n, 1.0).unwrap().cumulants();
            assert!(k[2] < 0.0, "N={n}");
        }
        let big = RateDistributionModel::with_a_tilde(Family::Gaussian, 1_000_000, 1.0).unwrap();
        assert!((big.cumulants()[0] / 1e6 - 1.0).abs() < 1e-4);
    }

    #[test]
    fn analytic_shortcut_matches_cdf() {
        let m = RateDistributionModel::new(Family::Gaussian, 30, 1.0).unwrap();
        let samples = sample_rate_distribution_analytic(Family::Gaussian, 30, 1.0, 10_000, SeedSpec::new(21, 0)).unwrap();
        assert!(samples.windows(2).all(|w| w[0] <= w[1]));
        let ks = ks_statistic_sorted(&samples, |d| m.cdf(d.clamp(0.0, m.upper_bound())).unwrap());
        assert!(ks < 0.02, "KS {ks}");
        assert_eq!(over_bound_fraction(&samples, m.upper_bound() + 1e-9), 0.0);
    }

    #[test]
    fn monte_carlo_sampler_is_deterministic() {
        let ens: OperatorEnsemble = EnsembleSpec::new(EnsembleKind::Goe, 6, 1.0).unwrap().into();
        let a = sample_rate_distribution(&ens, 20, 10, 1.0, SeedSpec::new(3, 0)).unwrap();
        let b = sample_rate_distribution(&ens, 20, 10, 1.0, SeedSpec::new(3, 0)).unwrap();
        assert_eq!(a, b);
        assert!(a.windows(2).all(|w| w[0] <= w[1]));
        assert!(sample_rate_distribution(&ens, 2, 0, 1.0, SeedSpec::new(3, 0)).is_err());
    }
}
