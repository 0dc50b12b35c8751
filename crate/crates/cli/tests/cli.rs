use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use lindbrand_cli::{load_config, run, Overrides, RunError};

fn lindbrand(args: &[&str], env_workers: Option<&str>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_lindbrand"));
    cmd.args(args);
    match env_workers {
        Some(w) => cmd.env("LINDBRAND_WORKERS", w),
        None => cmd.env_remove("LINDBRAND_WORKERS"),
    };
    cmd.output().unwrap()
}

fn write_config(dir: &Path, text: &str) -> String {
    let p = dir.join("exp.cfg");
    fs::write(&p, text).unwrap();
    p.display().to_string()
}

const SMALL: &str = "\
# small rate-scaling run
experiment = rate-scaling
kinds = gue, ginse
n_grid = 4, 6
n_realizations = 40
n_states = 3
p0_policy = pure+uniform
gnuplot = true
";

#[test]
fn validate_reports_field_paths_and_exit_code() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "experiment = rate-scaling\nkinds = gse\nn_grid = 8, 9\n");
    let out = lindbrand(&["validate", "--config", &cfg], None);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("n_grid[1]"), "{err}");

    let cfg = write_config(dir.path(), SMALL);
    let out = lindbrand(&["validate", "--config", &cfg], None);
    assert_eq!(out.status.code(), Some(0));

    let out = lindbrand(&["run", "--preset", "nope"], None);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn presets_are_listed_and_shown() {
    let out = lindbrand(&["presets", "list"], None);
    let text = String::from_utf8_lossy(&out.stdout);
    for name in ["fig1", "fig2", "fig3", "fig4", "fig-gin"] {
        assert!(text.contains(name));
    }
    let out = lindbrand(&["presets", "show", "fig3"], None);
    assert!(String::from_utf8_lossy(&out.stdout).contains("experiment = rate-distribution"));
}

#[test]
fn run_writes_csv_with_units_and_one_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), SMALL);
    let out_dir = dir.path().join("out");
    let out = lindbrand(&["run", "--config", &cfg, "--seed", "42", "--out", out_dir.to_str().unwrap()], None);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));

    let mut names: Vec<String> = fs::read_dir(&out_dir)
        .unwrap()
        .map(|e| e.unwrap().file_name().to_string_lossy().into_owned())
        .collect();
    names.sort();
    assert_eq!(names, vec!["limits.csv", "manifest.json", "plot.gp", "rates.csv"]);

    let rates = fs::read_to_string(out_dir.join("rates.csv")).unwrap();
    let header = rates.lines().next().unwrap();
    assert!(header.contains("mean_rate[Gamma*sigma^2]"));
    // kinds × dims × (pure + uniform) × states, plus the header.
    assert_eq!(rates.lines().count(), 1 + 2 * 2 * 2 * 3);

    let manifest: serde_json::Value = serde_json::from_str(&fs::read_to_string(out_dir.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["seed"], 42);
    assert_eq!(manifest["experiment"], "rate-scaling");
}

#[test]
fn outputs_do_not_depend_on_worker_count() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), SMALL);
    let mut outputs = Vec::new();
    for w in ["1", "2", "8"] {
        let out_dir = dir.path().join(format!("w{w}"));
        let out = lindbrand(&["run", "--config", &cfg, "--seed", "7", "--out", out_dir.to_str().unwrap()], Some(w));
        assert_eq!(out.status.code(), Some(0));
        let manifest: serde_json::Value =
            serde_json::from_str(&fs::read_to_string(out_dir.join("manifest.json")).unwrap()).unwrap();
        assert_eq!(manifest["n_workers"].as_u64().unwrap().to_string(), w);
        outputs.push((fs::read(out_dir.join("rates.csv")).unwrap(), fs::read(out_dir.join("limits.csv")).unwrap()));
    }
    assert!(outputs.windows(2).all(|w| w[0] == w[1]));
}

#[test]
fn flags_override_config_entries() {
    let dir = tempfile::tempdir().unwrap();
    let cfg_path = write_config(dir.path(), &format!("{SMALL}seed = 1\nn_workers = 3\n"));
    let overrides = Overrides {
        seed: Some(9),
        workers: Some(2),
        out: Some(dir.path().join("x")),
    };
    let cfg = load_config(Some(Path::new(&cfg_path)), None, &overrides).unwrap();
    assert_eq!((cfg.seed, cfg.n_workers), (Some(9), 2));
    assert_eq!(cfg.output_dir, dir.path().join("x"));

    // A config file layered over a preset keeps the preset's other keys.
    let cfg_path = write_config(dir.path(), "n_states = 100\n");
    let cfg = load_config(Some(Path::new(&cfg_path)), Some("fig3"), &Overrides::default()).unwrap();
    assert_eq!((cfg.n_states, cfg.n_grid.clone()), (100, vec![30]));
}

#[test]
fn every_experiment_runs_at_small_scale() {
    let dir = tempfile::tempdir().unwrap();
    let configs = [
        "experiment = purity-decay\nkinds = goe, mixed\nn_grid = 4\np0_list = 1, 0.5\nn_realizations = 4\nn_points = 5\nspacing = log\n",
        "experiment = gin-rate-scaling\nkinds = ginoe\nn_grid = 5\nn_realizations = 10\nn_states = 2\n",
        "experiment = rate-distribution\nkinds = gue\nn_grid = 5\nn_states = 100\nn_realizations = 20\nhistogram_bins = 10\n",
        "experiment = cumulant-table\nkinds = goe, ginue\nn_grid = 5, 50\nn_states = 200\nempirical = mc\nn_realizations = 5\n",
        "experiment = ensemble-diagnostics\nkinds = goe, ginue\nn_grid = 6\nn_realizations = 5\n",
    ];
    for (i, text) in configs.iter().enumerate() {
        let mut cfg = lindbrand_cli::ExperimentConfig::parse(text).unwrap();
        cfg.seed = Some(3);
        cfg.output_dir = dir.path().join(i.to_string());
        let outcome = run(&cfg).unwrap_or_else(|e| panic!("{text}: {e}"));
        for f in &outcome.files {
            let body = fs::read_to_string(f).unwrap();
            if f.extension().is_some_and(|e| e == "csv") {
                let header = body.lines().next().unwrap();
                let width = header.split(',').count();
                assert!(body.lines().all(|l| l.split(',').count() == width), "{}", f.display());
                assert!(!body.contains("nan"), "{}", f.display());
            }
        }
    }
}

#[test]
fn invalid_config_is_a_config_error() {
    let mut cfg = lindbrand_cli::ExperimentConfig::parse("experiment = rate-scaling\nn_grid = 8\n").unwrap();
    cfg.n_grid.clear();
    let dir = tempfile::tempdir().unwrap();
    cfg.output_dir = dir.path().join("never");
    let err = run(&cfg).unwrap_err();
    assert!(matches!(err, RunError::Config(_)));
    assert_eq!(err.exit_code(), 2);
    assert!(!cfg.output_dir.exists());
    assert_eq!(RunError::Numerical(lindbrand::Error::NonFinite).exit_code(), 3);
}
