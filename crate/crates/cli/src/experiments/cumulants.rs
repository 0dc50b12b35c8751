use lindbrand::concentration::{sample_rate_distribution_analytic, RateDistributionModel};
use lindbrand::Result;
use rayon::prelude::*;
use serde_json::json;

use super::distribution::sample_point;
use super::{family_name, gnuplot_header, point_seed, points, reference_family, ExperimentOutput};
use crate::config::{EmpiricalSource, ExperimentConfig};
use crate::output::{Cell, Table};

/// Mean, variance, skewness and excess kurtosis from cumulants.
fn shape(k: [f64; 4]) -> [f64; 4] {
    [k[0], k[1], k[2] / k[1].powf(1.5), k[3] / (k[1] * k[1])]
}

fn sample_cumulants(x: &[f64]) -> [f64; 4] {
    let n = x.len() as f64;
    let mean = x.iter().sum::<f64>() / n;
    let central = |p: i32| x.iter().map(|v| (v - mean).powi(p)).sum::<f64>() / n;
    let (m2, m3, m4) = (central(2), central(3), central(4));
    [mean, m2, m3, m4 - 3.0 * m2 * m2]
}

pub fn cumulant_table(cfg: &ExperimentConfig, seed: u64) -> Result<ExperimentOutput> {
    let pts = points(cfg);
    let empirical: Vec<Vec<f64>> = match cfg.empirical {
        EmpiricalSource::Analytic => pts
            .par_iter()
            .map(|&(ki, kind, n)| {
                sample_rate_distribution_analytic(reference_family(kind), n, 1.0, cfg.n_states, point_seed(seed, ki, n))
            })
            .collect::<Result<_>>()?,
        EmpiricalSource::MonteCarlo => sample_point(cfg, seed)?.into_iter().map(|r| r.samples).collect(),
    };

    let mut table = Table::new(
        "cumulants.csv",
        &[
            "kind", "family", "n[1]",
            "kappa1[Gamma*sigma^2]", "kappa2[(Gamma*sigma^2)^2]", "kappa3[(Gamma*sigma^2)^3]", "kappa4[(Gamma*sigma^2)^4]",
            "mean[Gamma*sigma^2]", "variance[(Gamma*sigma^2)^2]", "skewness[1]", "excess_kurtosis[1]", "relative_width[1]",
            "quadrature_max_rel_diff[1]",
            "sample_mean[Gamma*sigma^2]", "sample_variance[(Gamma*sigma^2)^2]", "sample_skewness[1]", "sample_excess_kurtosis[1]",
        ],
    );
    let mut summary = Vec::new();
    for (&(_, kind, n), sample) in pts.iter().zip(&empirical) {
        let family = reference_family(kind);
        let model = RateDistributionModel::new(family, n, 1.0)?;
        let k = model.cumulants();
        let q = model.cumulants_quadrature()?;
        let quad_diff = k.iter().zip(&q).map(|(a, b)| ((a - b) / a).abs()).fold(0.0, f64::max);
        let s = shape(k);
        let e = shape(sample_cumulants(sample));
        let width = k[1].sqrt() / k[0];
        let mut row: Vec<Cell> = vec![kind.name().into(), family_name(family).into(), n.into()];
        row.extend(k.iter().chain(&s).map(|&v| Cell::from(v)));
        row.push(width.into());
        row.push(quad_diff.into());
        row.extend(e.iter().map(|&v| Cell::from(v)));
        table.push(row);
        summary.push(json!({
            "kind": kind.name(),
            "n": n,
            "cumulants": k,
            "relative_width": width,
            "quadrature_max_rel_diff": quad_diff,
            "sample_shape": e,
        }));
    }
    let gnuplot = gnuplot_header("Cumulants of the state-averaged rate")
        + "set logscale x\nset xlabel 'N'\n"
        + "plot 'cumulants.csv' using 3:10 with linespoints title 'skewness', '' using 3:11 with linespoints title 'excess kurtosis', '' using 3:16 with points title 'sample skewness', '' using 3:17 with points title 'sample excess kurtosis'\n";
    Ok(ExperimentOutput {
        tables: vec![table],
        summary: json!({ "points": summary }),
        gnuplot,
    })
}
