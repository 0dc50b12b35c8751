//! Config loading, execution on a sized worker pool, and output writing.

use std::fs;
use std::io;
use std::path::{Path, PathBuf};
use std::time::Instant;

use lindbrand::randomness::entropy_seed;
use serde_json::{json, Value};
use thiserror::Error;

use crate::config::{Diagnostic, ExperimentConfig, RawConfig};
use crate::experiments::run_experiment;
use crate::output::AtomicWriter;
use crate::presets::preset;

#[derive(Debug, Error)]
pub enum RunError {
    #[error("invalid configuration:\n{}", format_diagnostics(.0))]
    Config(Vec<Diagnostic>),
    #[error("numerical failure: {0}")]
    Numerical(#[from] lindbrand::Error),
    #[error("I/O failure: {0}")]
    Io(#[from] io::Error),
}

impl RunError {
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Config(_) => 2,
            RunError::Numerical(_) => 3,
            RunError::Io(_) => 1,
        }
    }
}

pub fn format_diagnostics(diags: &[Diagnostic]) -> String {
    diags.iter().map(|d| format!("  {d}")).collect::<Vec<_>>().join("\n")
}

/// Values given on the command line; they win over config entries.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub workers: Option<usize>,
    pub out: Option<PathBuf>,
}

/// Preset text, then the config file, then overrides.
pub fn load_config(
    config: Option<&Path>,
    preset_name: Option<&str>,
    overrides: &Overrides,
) -> Result<ExperimentConfig, Vec<Diagnostic>> {
    let mut raw = RawConfig::default();
    if let Some(name) = preset_name {
        let p = preset(name).ok_or_else(|| vec![Diagnostic::new("--preset", format!("unknown preset '{name}'"))])?;
        raw.merge(&RawConfig::parse(p.text)?);
    }
    if let Some(path) = config {
        let text = fs::read_to_string(path)
            .map_err(|e| vec![Diagnostic::new("--config", format!("cannot read {}: {e}", path.display()))])?;
        raw.merge(&RawConfig::parse(&text)?);
    }
    if config.is_none() && preset_name.is_none() {
        return Err(vec![Diagnostic::new("--config", "give --config or --preset")]);
    }
    if let Some(seed) = overrides.seed {
        raw.set("seed", seed.to_string());
    }
    if let Some(w) = overrides.workers {
        raw.set("n_workers", w.to_string());
    }
    if let Some(out) = &overrides.out {
        raw.set("output_dir", out.display().to_string());
    }
    let cfg = ExperimentConfig::from_raw(&raw)?;
    let diags = cfg.validate();
    if diags.is_empty() {
        Ok(cfg)
    } else {
        Err(diags)
    }
}

#[derive(Debug)]
pub struct RunOutcome {
    pub files: Vec<PathBuf>,
    pub manifest: Value,
}

pub const MANIFEST: &str = "manifest.json";

/// Runs the experiment and writes its CSVs, optional gnuplot script and
/// manifest. On any failure no output file is left behind.
pub fn run(cfg: &ExperimentConfig) -> Result<RunOutcome, RunError> {
    let diags = cfg.validate();
    if !diags.is_empty() {
        return Err(RunError::Config(diags));
    }
    let (seed, seed_source) = match cfg.seed {
        Some(s) => (s, "configured"),
        None => (entropy_seed(), "entropy"),
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.n_workers)
        .build()
        .map_err(|e| RunError::Io(io::Error::other(e)))?;

    let started = Instant::now();
    let output = pool.install(|| run_experiment(cfg, seed))?;
    let wall = started.elapsed().as_secs_f64();

    let mut writer = AtomicWriter::new(&cfg.output_dir)?;
    let mut names = Vec::new();
    for table in &output.tables {
        writer.write(&table.name, table.to_csv().as_bytes())?;
        names.push(table.name.clone());
    }
    if cfg.gnuplot {
        writer.write("plot.gp", output.gnuplot.as_bytes())?;
        names.push("plot.gp".into());
    }

    let mut echo = cfg.clone();
    echo.seed = Some(seed);
    let manifest = json!({
        "tool": "lindbrand",
        "version": env!("CARGO_PKG_VERSION"),
        "experiment": cfg.experiment.name(),
        "config": echo.to_text(),
        "seed": seed,
        "seed_source": seed_source,
        "n_workers": cfg.n_workers,
        "wall_time_seconds": wall,
        "scale_note": cfg.scale_note,
        "units": { "time": "1/(Gamma*sigma^2)", "rate": "Gamma*sigma^2" },
        "files": names,
        "summary": output.summary,
    });
    let text = serde_json::to_string_pretty(&manifest).expect("manifest is valid JSON") + "\n";
    writer.write(MANIFEST, text.as_bytes())?;
    Ok(RunOutcome {
        files: writer.commit(),
        manifest,
    })
}
