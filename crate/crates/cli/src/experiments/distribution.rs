use lindbrand::concentration::{over_bound_fraction, state_mean_rate, RateDistributionModel};
use lindbrand::stats::ks_statistic_sorted;
use lindbrand::Result;
use rayon::prelude::*;
use serde_json::json;

use super::{ensemble, gnuplot_header, point_seed, points, reference_family, ExperimentOutput, RATE_UNIT};
use crate::config::ExperimentConfig;
use crate::output::Table;

const CURVE_POINTS: usize = 201;

/// Sampled state-averaged rates for one `(kind, N)`, in units of `Γσ²`.
#[derive(Debug, Clone)]
pub struct DistributionResult {
    pub kind: String,
    pub n: usize,
    /// Sorted ascending.
    pub samples: Vec<f64>,
    pub model: RateDistributionModel,
    pub ks_distance: f64,
    pub over_bound_fraction: f64,
}

/// CDF of the analytic law, extended by 0 below and 1 above the support.
pub fn model_cdf(model: &RateDistributionModel, d: f64) -> f64 {
    if d <= 0.0 {
        0.0
    } else if d >= model.upper_bound() {
        1.0
    } else {
        model.cdf(d).unwrap_or(f64::NAN)
    }
}

pub(crate) fn sample_point(cfg: &ExperimentConfig, seed: u64) -> Result<Vec<DistributionResult>> {
    points(cfg)
        .par_iter()
        .map(|&(ki, kind, n)| {
            let ens = ensemble(cfg, kind, n)?;
            let base = point_seed(seed, ki, n);
            let mut samples = (0..cfg.n_states as u64)
                .into_par_iter()
                .map(|s| state_mean_rate(&ens, cfg.n_realizations, cfg.gamma_total, base, s).map(|r| r.1 / cfg.rate_unit()))
                .collect::<Result<Vec<f64>>>()?;
            samples.sort_by(f64::total_cmp);
            let model = RateDistributionModel::new(reference_family(kind), n, 1.0)?;
            let ks_distance = ks_statistic_sorted(&samples, |d| model_cdf(&model, d));
            let over_bound_fraction = over_bound_fraction(&samples, model.upper_bound());
            Ok(DistributionResult {
                kind: kind.name().to_string(),
                n,
                samples,
                model,
                ks_distance,
                over_bound_fraction,
            })
        })
        .collect()
}

pub fn rate_distribution(cfg: &ExperimentConfig, seed: u64) -> Result<ExperimentOutput> {
    let results = sample_point(cfg, seed)?;
    let r = format!("rate[{RATE_UNIT}]");
    let density = format!("density[1/({RATE_UNIT})]");
    let pdf_col = format!("pdf[1/({RATE_UNIT})]");
    let mut hist = Table::new(
        "histogram.csv",
        &["kind", "n[1]", &format!("bin_low[{RATE_UNIT}]"), &format!("bin_high[{RATE_UNIT}]"), "count[1]", &density, &pdf_col],
    );
    let mut curve = Table::new("pdf.csv", &["kind", "n[1]", &r, &pdf_col, "cdf[1]"]);
    let mut bound = Table::new("upper_bound.csv", &["kind", "n[1]", &r, &pdf_col]);
    let mut samples = Table::new("samples.csv", &["kind", "n[1]", "rank[1]", &r]);
    let mut summary = Vec::new();

    for res in &results {
        let ub = res.model.upper_bound();
        let kind = res.kind.as_str();
        let top = ub.max(res.samples.last().copied().unwrap_or(ub));
        let bins = cfg.histogram_bins;
        let width = top / bins as f64;
        let mut counts = vec![0usize; bins];
        for &d in &res.samples {
            let b = ((d / width).floor().max(0.0) as usize).min(bins - 1);
            counts[b] += 1;
        }
        let total = res.samples.len() as f64;
        for (b, &c) in counts.iter().enumerate() {
            let (lo, hi) = (b as f64 * width, (b + 1) as f64 * width);
            let mid = 0.5 * (lo + hi);
            let pdf = if mid < ub { res.model.pdf(mid).ok() } else { Some(0.0) };
            hist.push(vec![kind.into(), res.n.into(), lo.into(), hi.into(), c.into(), (c as f64 / (total * width)).into(), pdf.into()]);
        }
        for k in 0..CURVE_POINTS {
            let d = ub * k as f64 / (CURVE_POINTS - 1) as f64;
            curve.push(vec![kind.into(), res.n.into(), d.into(), res.model.pdf(d)?.into(), model_cdf(&res.model, d).into()]);
        }
        bound.push(vec![kind.into(), res.n.into(), ub.into(), res.model.pdf(ub)?.into()]);
        for (i, &d) in res.samples.iter().enumerate() {
            samples.push(vec![kind.into(), res.n.into(), i.into(), d.into()]);
        }
        summary.push(json!({
            "kind": kind,
            "n": res.n,
            "upper_bound": ub,
            "ks_distance": res.ks_distance,
            "over_bound_fraction": res.over_bound_fraction,
            "sample_mean": res.samples.iter().sum::<f64>() / total,
            "analytic_mean": res.model.moment(1)?,
        }));
    }

    let gnuplot = gnuplot_header("Distribution of the state-averaged rate")
        + "set xlabel 'rate [Gamma sigma^2]'\nset ylabel 'density'\n"
        + "plot 'histogram.csv' using (($3+$4)/2):6 with boxes title 'sampled', 'pdf.csv' using 3:4 with lines title 'analytic', 'upper_bound.csv' using 3:4 with points pt 7 title 'upper bound'\n";
    Ok(ExperimentOutput {
        tables: vec![hist, curve, bound, samples],
        summary: json!({ "points": summary }),
        gnuplot,
    })
}
