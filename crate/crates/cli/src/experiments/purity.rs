use lindbrand::decoherence::analytic_rate_limit;
use lindbrand::ensembles::sample_haar_pure_state;
use lindbrand::lindblad::{ansatz_purity, purity_trajectory, time_grid, LindbladModel};
use lindbrand::states::purity_family;
use lindbrand::Result;
use rayon::prelude::*;
use serde_json::json;

use super::{ensemble, gnuplot_header, point_seed, points, reference_family, ExperimentOutput, TIME_UNIT};
use crate::output::Table;
use crate::config::ExperimentConfig;

/// Ensemble-mean purity for one `(kind, N, P₀)`; times in units of `1/(Γσ²)`.
#[derive(Debug, Clone, PartialEq)]
pub struct DecaySeries {
    pub kind: String,
    pub n: usize,
    pub p0: f64,
    pub times: Vec<f64>,
    pub mean: Vec<f64>,
    pub std_error: Vec<f64>,
    pub ansatz: Vec<f64>,
    /// `⟨D_L⟩` in units of `Γσ²`.
    pub rate_limit: f64,
    /// Largest `|mean − ansatz|/ansatz` over `t ≤ 3/⟨D_L⟩`.
    pub max_relative_deviation: f64,
}

/// Every purity series of the configuration.
pub fn purity_series(cfg: &ExperimentConfig, seed: u64) -> Result<Vec<DecaySeries>> {
    let unit = cfg.rate_unit();
    let tasks: Vec<_> = points(cfg)
        .into_iter()
        .flat_map(|(ki, kind, n)| cfg.p0_list.iter().enumerate().map(move |(pi, &p0)| (ki, kind, n, pi, p0)))
        .collect();

    tasks
        .par_iter()
        .map(|&(ki, kind, n, pi, p0)| {
            let ens = ensemble(cfg, kind, n)?;
            let d_l = analytic_rate_limit(reference_family(kind), n, unit)?;
            let t_max = cfg.t_max.map_or(3.0 / d_l, |t| t / unit);
            let grid = time_grid(t_max, cfg.n_points, cfg.spacing)?;
            let base = point_seed(seed, ki, n).child(pi as u64);
            let gamma = cfg.gamma_total / cfg.n_jumps as f64;

            let runs = (0..cfg.n_realizations as u64)
                .into_par_iter()
                .map(|r| {
                    let mut stream = base.child(r).stream();
                    let jumps: Vec<_> = (0..cfg.n_jumps).map(|_| ens.sample(&mut stream)).collect();
                    let psi = sample_haar_pure_state(n, &mut stream);
                    let model = LindbladModel::new(jumps, vec![gamma; cfg.n_jumps], None)?;
                    let traj = purity_trajectory(&model, &purity_family(&psi, p0)?, &grid, cfg.rel_tol)?;
                    Ok(traj.purities().to_vec())
                })
                .collect::<Result<Vec<Vec<f64>>>>()?;

            let count = runs.len() as f64;
            let mut mean = vec![0.0; grid.len()];
            for run in &runs {
                for (m, p) in mean.iter_mut().zip(run) {
                    *m += p;
                }
            }
            mean.iter_mut().for_each(|m| *m /= count);
            let std_error = (0..grid.len())
                .map(|k| {
                    if runs.len() < 2 {
                        return 0.0;
                    }
                    let var = runs.iter().map(|run| (run[k] - mean[k]).powi(2)).sum::<f64>() / (count - 1.0);
                    (var / count).sqrt()
                })
                .collect();

            let p_inf = 1.0 / n as f64;
            let ansatz: Vec<f64> = grid.iter().map(|&t| ansatz_purity(p0, p_inf, d_l, t)).collect();
            let window = 3.0 / d_l * (1.0 + 1e-12);
            let max_relative_deviation = grid
                .iter()
                .zip(mean.iter().zip(&ansatz))
                .filter(|(&t, _)| t <= window)
                .map(|(_, (m, a))| (m - a).abs() / a)
                .fold(0.0, f64::max);

            Ok(DecaySeries {
                kind: kind.name().to_string(),
                n,
                p0,
                times: grid.iter().map(|t| t * unit).collect(),
                mean,
                std_error,
                ansatz,
                rate_limit: d_l / unit,
                max_relative_deviation,
            })
        })
        .collect()
}

pub fn purity_decay(cfg: &ExperimentConfig, seed: u64) -> Result<ExperimentOutput> {
    let series = purity_series(cfg, seed)?;
    let t = format!("t[{TIME_UNIT}]");
    let mut table = Table::new(
        "purity.csv",
        &["kind", "n[1]", "p0[1]", &t, "purity_mean[1]", "purity_std_error[1]", "ansatz[1]"],
    );
    let mut summary = Vec::new();
    for s in &series {
        for k in 0..s.times.len() {
            table.push(vec![
                s.kind.as_str().into(),
                s.n.into(),
                s.p0.into(),
                s.times[k].into(),
                s.mean[k].into(),
                s.std_error[k].into(),
                s.ansatz[k].into(),
            ]);
        }
        summary.push(json!({
            "kind": s.kind,
            "n": s.n,
            "p0": s.p0,
            "rate_limit": s.rate_limit,
            "final_purity": s.mean.last(),
            "max_relative_deviation": s.max_relative_deviation,
        }));
    }
    let gnuplot = gnuplot_header("Ensemble-mean purity")
        + "set xlabel 't [1/(Gamma sigma^2)]'\nset ylabel 'purity'\n"
        + "plot 'purity.csv' using 4:5 with points title 'mean purity', '' using 4:7 with lines title 'ansatz'\n";
    Ok(ExperimentOutput {
        tables: vec![table],
        summary: json!({ "series": summary, "n_jumps": cfg.n_jumps }),
        gnuplot,
    })
}
