use lindbrand::ensembles::{sample, schur_trace_split, spectral_density_check, EnsembleKind, EnsembleSpec, Family};
use lindbrand::numerics::trace;
use lindbrand::stats::Summary;
use lindbrand::Result;
use rayon::prelude::*;
use serde_json::json;

use super::{gnuplot_header, point_seed, points, ExperimentOutput};
use crate::config::{ExperimentConfig, KindChoice};
use crate::output::{Cell, Table};

struct Row {
    kind: EnsembleKind,
    n: usize,
    ks: f64,
    outliers: f64,
    norm_ratio: f64,
    trace_ratio: f64,
    lambda_sq: Option<f64>,
    lambda_sq_oracle: Option<f64>,
}

pub fn ensemble_diagnostics(cfg: &ExperimentConfig, seed: u64) -> Result<ExperimentOutput> {
    let rows = points(cfg)
        .par_iter()
        .map(|&(ki, kind, n)| {
            let KindChoice::Single(kind) = kind else {
                unreachable!("rejected by validation");
            };
            let spec = EnsembleSpec::new(kind, n, cfg.sigma)?;
            let base = point_seed(seed, ki, n);
            let report = spectral_density_check(&spec, cfg.n_realizations, &mut base.child(0).stream())?;
            let draws = (0..cfg.n_realizations as u64)
                .into_par_iter()
                .map(|j| {
                    let l = sample(&spec, &mut base.child(1).child(j).stream());
                    let abs_tr = trace(&l)?.norm_sqr();
                    let lam = match kind.family() {
                        Family::Ginibre => schur_trace_split(&l)?.0,
                        Family::Gaussian => f64::NAN,
                    };
                    Ok((l.frobenius_norm().powi(2), abs_tr, lam))
                })
                .collect::<Result<Vec<_>>>()?;
            let s2 = cfg.sigma * cfg.sigma;
            let nf = n as f64;
            let mean = |f: fn(&(f64, f64, f64)) -> f64| Summary::from_slice(&draws.iter().map(f).collect::<Vec<_>>()).mean;
            let ginibre = kind.family() == Family::Ginibre;
            Ok(Row {
                kind,
                n,
                ks: report.ks_distance,
                outliers: report.outlier_fraction,
                norm_ratio: mean(|d| d.0) / (s2 * nf * nf),
                trace_ratio: mean(|d| d.1) / (s2 * nf),
                lambda_sq: ginibre.then(|| mean(|d| d.2)),
                lambda_sq_oracle: (kind == EnsembleKind::GinUe).then(|| s2 * nf * (nf + 1.0) / 2.0),
            })
        })
        .collect::<Result<Vec<Row>>>()?;

    let mut table = Table::new(
        "diagnostics.csv",
        &[
            "kind", "n[1]", "samples[1]", "ks_distance[1]", "outlier_fraction[1]",
            "mean_tr_LdL_over_sigma2_n2[1]", "mean_abs_tr_sq_over_sigma2_n[1]",
            "mean_eigenvalue_sq_sum[sigma^2]", "exact_eigenvalue_sq_sum[sigma^2]",
        ],
    );
    let s2 = cfg.sigma * cfg.sigma;
    let mut summary = Vec::new();
    for r in &rows {
        table.push(vec![
            r.kind.name().into(),
            r.n.into(),
            cfg.n_realizations.into(),
            r.ks.into(),
            r.outliers.into(),
            r.norm_ratio.into(),
            r.trace_ratio.into(),
            Cell::from(r.lambda_sq.map(|v| v / s2)),
            Cell::from(r.lambda_sq_oracle.map(|v| v / s2)),
        ]);
        summary.push(json!({
            "kind": r.kind.name(),
            "n": r.n,
            "ks_distance": r.ks,
            "outlier_fraction": r.outliers,
            "mean_tr_LdL_ratio": r.norm_ratio,
        }));
    }
    let gnuplot = gnuplot_header("Spectral diagnostics")
        + "set xlabel 'N'\nset ylabel 'KS distance'\nplot 'diagnostics.csv' using 2:4 with points title 'KS distance'\n";
    Ok(ExperimentOutput {
        tables: vec![table],
        summary: json!({ "points": summary }),
        gnuplot,
    })
}
