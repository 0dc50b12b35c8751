use lindbrand::decoherence::{analytic_average_rate, analytic_rate_limit, family_rate};
use lindbrand::ensembles::sample_haar_pure_state;
use lindbrand::states::uniform_purity;
use lindbrand::stats::Summary;
use lindbrand::Result;
use rayon::prelude::*;
use serde_json::json;

use super::{ensemble, gnuplot_header, point_seed, points, reference_family, ExperimentOutput, RATE_UNIT};
use crate::config::{ExperimentConfig, P0Choice};
use crate::output::Table;

#[derive(Debug, Clone, Copy, PartialEq)]
enum Draw {
    Pure,
    Uniform,
    Fixed(f64),
}

impl Draw {
    fn label(self) -> &'static str {
        match self {
            Draw::Pure => "pure",
            Draw::Uniform => "uniform",
            Draw::Fixed(_) => "fixed",
        }
    }
}

fn state_plan(cfg: &ExperimentConfig) -> Vec<Draw> {
    let repeat = |d: Draw| std::iter::repeat_n(d, cfg.n_states);
    match cfg.p0_policy {
        P0Choice::Pure => repeat(Draw::Pure).collect(),
        P0Choice::Uniform => repeat(Draw::Uniform).collect(),
        P0Choice::PureAndUniform => repeat(Draw::Pure).chain(repeat(Draw::Uniform)).collect(),
        P0Choice::Fixed => cfg.p0_list.iter().flat_map(|&p| repeat(Draw::Fixed(p))).collect(),
    }
}

/// MC rate of one initial state, in units of `Γσ²`.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalingRow {
    pub kind: String,
    pub n: usize,
    pub state: usize,
    pub policy: &'static str,
    pub p0: f64,
    pub mean_rate: f64,
    pub std_error: f64,
    pub analytic_rate: f64,
    pub rate_limit: f64,
}

pub fn rate_scaling(cfg: &ExperimentConfig, seed: u64) -> Result<ExperimentOutput> {
    let unit = cfg.rate_unit();
    let plan = state_plan(cfg);
    let pts = points(cfg);

    let per_point: Vec<Vec<ScalingRow>> = pts
        .par_iter()
        .map(|&(ki, kind, n)| {
            let ens = ensemble(cfg, kind, n)?;
            let family = reference_family(kind);
            let limit = analytic_rate_limit(family, n, unit)?;
            let base = point_seed(seed, ki, n);
            plan.par_iter()
                .enumerate()
                .map(|(s, &draw)| {
                    let state_seed = base.child(s as u64);
                    let mut stream = state_seed.stream();
                    let p0 = match draw {
                        Draw::Pure => 1.0,
                        Draw::Uniform => uniform_purity(n, &mut stream),
                        Draw::Fixed(p) => p,
                    };
                    let psi = sample_haar_pure_state(n, &mut stream);
                    let ops = state_seed.child(u64::MAX);
                    let rates = (0..cfg.n_realizations as u64)
                        .into_par_iter()
                        .map(|j| family_rate(&ens.sample(&mut ops.child(j).stream()), cfg.gamma_total, &psi, p0))
                        .collect::<Result<Vec<f64>>>()?;
                    let summary = Summary::from_slice(&rates);
                    Ok(ScalingRow {
                        kind: kind.name().to_string(),
                        n,
                        state: s,
                        policy: draw.label(),
                        p0,
                        mean_rate: summary.mean / unit,
                        std_error: summary.std_error() / unit,
                        analytic_rate: analytic_average_rate(family, n, unit, p0)? / unit,
                        rate_limit: limit / unit,
                    })
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;

    let r = |name: &str| format!("{name}[{RATE_UNIT}]");
    let mut rates = Table::new(
        "rates.csv",
        &["kind", "n[1]", "state[1]", "policy", "p0[1]", &r("mean_rate"), &r("std_error"), &r("analytic_rate"), &r("rate_limit")],
    );
    let mut limits = Table::new(
        "limits.csv",
        &["kind", "n[1]", "pure_states[1]", &r("pure_mean_rate"), &r("pure_std_error"), &r("rate_limit"), "relative_deviation[1]"],
    );
    let mut summary = Vec::new();
    for rows in &per_point {
        for row in rows {
            rates.push(vec![
                row.kind.as_str().into(),
                row.n.into(),
                row.state.into(),
                row.policy.into(),
                row.p0.into(),
                row.mean_rate.into(),
                row.std_error.into(),
                row.analytic_rate.into(),
                row.rate_limit.into(),
            ]);
        }
        let first = &rows[0];
        let pure: Vec<&ScalingRow> = rows.iter().filter(|r| r.policy == "pure").collect();
        let (mean, se, dev) = if pure.is_empty() {
            (None, None, None)
        } else {
            let k = pure.len() as f64;
            let mean = pure.iter().map(|r| r.mean_rate).sum::<f64>() / k;
            let se = pure.iter().map(|r| r.std_error * r.std_error).sum::<f64>().sqrt() / k;
            (Some(mean), Some(se), Some((mean - first.rate_limit) / first.rate_limit))
        };
        limits.push(vec![
            first.kind.as_str().into(),
            first.n.into(),
            pure.len().into(),
            mean.into(),
            se.into(),
            first.rate_limit.into(),
            dev.into(),
        ]);
        summary.push(json!({
            "kind": first.kind,
            "n": first.n,
            "pure_mean_rate": mean,
            "rate_limit": first.rate_limit,
            "relative_deviation": dev,
        }));
    }

    let gnuplot = gnuplot_header("Decoherence rate versus dimension")
        + "set xlabel 'N'\nset ylabel 'rate [Gamma sigma^2]'\n"
        + "plot 'rates.csv' using 2:6:7 with yerrorbars title 'Monte Carlo', 'limits.csv' using 2:6 with linespoints title 'rate limit'\n";
    Ok(ExperimentOutput {
        tables: vec![rates, limits],
        summary: json!({ "points": summary, "states_per_point": plan.len() }),
        gnuplot,
    })
}
