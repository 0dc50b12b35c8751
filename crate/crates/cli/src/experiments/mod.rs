//! Experiment pipelines. Each returns its tables and a JSON summary; nothing
//! here touches the file system.
//!
//! Randomness is addressed by index: the stream for kind `k`, dimension `N`
//! and item `i` is `seed.child(k).child(N).child(i)`, so results do not depend
//! on how rayon schedules the work. Reductions run over index-ordered vectors.

mod cumulants;
mod diagnostics;
mod distribution;
mod purity;
mod scaling;

pub use cumulants::cumulant_table;
pub use diagnostics::ensemble_diagnostics;
pub use distribution::{model_cdf, rate_distribution, DistributionResult};
pub use purity::{purity_decay, purity_series, DecaySeries};
pub use scaling::{rate_scaling, ScalingRow};

use lindbrand::ensembles::{EnsembleSpec, Family, MixedEnsembleSpec, OperatorEnsemble};
use lindbrand::randomness::SeedSpec;
use lindbrand::Result;
use serde_json::Value;

use crate::config::{Experiment, ExperimentConfig, KindChoice};
use crate::output::Table;

pub const TIME_UNIT: &str = "1/(Gamma*sigma^2)";
pub const RATE_UNIT: &str = "Gamma*sigma^2";

pub struct ExperimentOutput {
    pub tables: Vec<Table>,
    pub summary: Value,
    pub gnuplot: String,
}

pub fn run_experiment(cfg: &ExperimentConfig, seed: u64) -> Result<ExperimentOutput> {
    match cfg.experiment {
        Experiment::RateScaling | Experiment::GinRateScaling => rate_scaling(cfg, seed),
        Experiment::PurityDecay => purity_decay(cfg, seed),
        Experiment::RateDistribution => rate_distribution(cfg, seed),
        Experiment::CumulantTable => cumulant_table(cfg, seed),
        Experiment::EnsembleDiagnostics => ensemble_diagnostics(cfg, seed),
    }
}

pub(crate) fn ensemble(cfg: &ExperimentConfig, kind: KindChoice, n: usize) -> Result<OperatorEnsemble> {
    Ok(match kind {
        KindChoice::Single(k) => EnsembleSpec::new(k, n, cfg.sigma)?.into(),
        KindChoice::Mixed => MixedEnsembleSpec::new(
            EnsembleSpec::new(cfg.mix_first, n, cfg.sigma)?,
            EnsembleSpec::new(cfg.mix_second, n, cfg.sigma)?,
            cfg.mix_a1,
            cfg.mix_a2,
        )?
        .into(),
    })
}

/// Family whose closed forms are used as the reference; mixed ensembles are
/// compared with the Gaussian limit.
pub(crate) fn reference_family(kind: KindChoice) -> Family {
    match kind {
        KindChoice::Single(k) => k.family(),
        KindChoice::Mixed => Family::Gaussian,
    }
}

pub(crate) fn family_name(family: Family) -> &'static str {
    match family {
        Family::Gaussian => "gxe",
        Family::Ginibre => "ginxe",
    }
}

pub(crate) fn point_seed(seed: u64, kind_index: usize, n: usize) -> SeedSpec {
    SeedSpec::new(seed, 0).child(kind_index as u64).child(n as u64)
}

/// Every `(kind index, kind, N)` point of the configuration.
pub(crate) fn points(cfg: &ExperimentConfig) -> Vec<(usize, KindChoice, usize)> {
    cfg.kinds
        .iter()
        .enumerate()
        .flat_map(|(ki, &k)| cfg.n_grid.iter().map(move |&n| (ki, k, n)))
        .collect()
}

pub(crate) fn gnuplot_header(title: &str) -> String {
    format!("set datafile separator ','\nset key autotitle columnhead\nset title '{title}'\n")
}
