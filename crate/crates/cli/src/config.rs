//! Flat `key = value` experiment configuration.
//!
//! One entry per line, `#` starts a comment, lists are comma separated.
//! Later sources override earlier ones: preset, then config file, then flags.

use std::collections::BTreeMap;
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use lindbrand::ensembles::{EnsembleKind, Family};
use lindbrand::lindblad::Spacing;

use crate::output::format_float;

/// A problem with one configuration field.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostic {
    pub field: String,
    pub message: String,
}

impl Diagnostic {
    pub fn new(field: impl Into<String>, message: impl Into<String>) -> Self {
        Self {
            field: field.into(),
            message: message.into(),
        }
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.field, self.message)
    }
}

/// Recognized keys with their one-line documentation.
pub const SCHEMA: &[(&str, &str)] = &[
    ("experiment", "rate-scaling | purity-decay | gin-rate-scaling | rate-distribution | cumulant-table | ensemble-diagnostics"),
    ("kinds", "comma list of goe, gue, gse, ginoe, ginue, ginse, mixed"),
    ("sigma", "entry scale σ (default 1)"),
    ("n_grid", "comma list of Hilbert-space dimensions, each ≥ 3"),
    ("gamma_total", "total rate Γ (default 1)"),
    ("n_realizations", "operator draws per state or per purity series"),
    ("n_states", "initial states per point"),
    ("p0_policy", "pure | uniform | pure+uniform | fixed (default pure)"),
    ("p0_list", "comma list of initial purities for fixed policy and purity-decay"),
    ("t_max", "final time in units of 1/(Γσ²); default 3/⟨D_L⟩"),
    ("n_points", "time-grid points (default 61)"),
    ("spacing", "linear | log (default linear)"),
    ("seed", "master seed; drawn from entropy when absent"),
    ("n_workers", "worker threads (default 1)"),
    ("output_dir", "output directory (default out)"),
    ("mix_first", "first kind of the mixed ensemble (default goe)"),
    ("mix_second", "second kind of the mixed ensemble (default ginue)"),
    ("mix_a1", "weight of the first kind (default 1/√2)"),
    ("mix_a2", "weight of the second kind (default 1/√2)"),
    ("n_jumps", "jump operators per purity-decay realization, each with rate Γ/n_jumps (default 1)"),
    ("rel_tol", "ODE tolerance (default 1e-8)"),
    ("histogram_bins", "bins of the rate histogram (default 40)"),
    ("empirical", "cumulant-table sample source: analytic | mc (default analytic)"),
    ("gnuplot", "also write plot.gp (default false)"),
    ("scale_note", "free text recorded in the manifest"),
];

/// Unparsed entries with the line each came from (0 for overrides).
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RawConfig {
    entries: BTreeMap<String, (String, usize)>,
}

impl RawConfig {
    pub fn parse(text: &str) -> Result<Self, Vec<Diagnostic>> {
        let mut entries = BTreeMap::new();
        let mut diags = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let lineno = i + 1;
            let body = line.split('#').next().unwrap_or("").trim();
            if body.is_empty() {
                continue;
            }
            let Some((key, value)) = body.split_once('=') else {
                diags.push(Diagnostic::new(format!("line {lineno}"), "expected `key = value`"));
                continue;
            };
            let key = key.trim().to_string();
            if !SCHEMA.iter().any(|(k, _)| *k == key) {
                diags.push(Diagnostic::new(key, format!("unknown key (line {lineno})")));
                continue;
            }
            if let Some((_, prev)) = entries.get(&key) {
                diags.push(Diagnostic::new(key, format!("duplicate key (lines {prev} and {lineno})")));
                continue;
            }
            entries.insert(key, (value.trim().to_string(), lineno));
        }
        if diags.is_empty() {
            Ok(Self { entries })
        } else {
            Err(diags)
        }
    }

    pub fn set(&mut self, key: &str, value: impl Into<String>) {
        self.entries.insert(key.to_string(), (value.into(), 0));
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(|(v, _)| v.as_str())
    }

    /// Entries of `other` replace those of `self`.
    pub fn merge(&mut self, other: &RawConfig) {
        for (k, v) in &other.entries {
            self.entries.insert(k.clone(), v.clone());
        }
    }

    pub fn entries(&self) -> impl Iterator<Item = (&str, &str)> {
        self.entries.iter().map(|(k, (v, _))| (k.as_str(), v.as_str()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Experiment {
    RateScaling,
    PurityDecay,
    GinRateScaling,
    RateDistribution,
    CumulantTable,
    EnsembleDiagnostics,
}

impl Experiment {
    pub const ALL: [Experiment; 6] = [
        Experiment::RateScaling,
        Experiment::PurityDecay,
        Experiment::GinRateScaling,
        Experiment::RateDistribution,
        Experiment::CumulantTable,
        Experiment::EnsembleDiagnostics,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Experiment::RateScaling => "rate-scaling",
            Experiment::PurityDecay => "purity-decay",
            Experiment::GinRateScaling => "gin-rate-scaling",
            Experiment::RateDistribution => "rate-distribution",
            Experiment::CumulantTable => "cumulant-table",
            Experiment::EnsembleDiagnostics => "ensemble-diagnostics",
        }
    }
}

impl FromStr for Experiment {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Experiment::ALL
            .into_iter()
            .find(|e| e.name() == s)
            .ok_or_else(|| format!("unknown experiment '{s}'"))
    }
}

/// An ensemble named in `kinds`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KindChoice {
    Single(EnsembleKind),
    Mixed,
}

impl KindChoice {
    pub fn name(self) -> &'static str {
        match self {
            KindChoice::Single(k) => k.name(),
            KindChoice::Mixed => "mixed",
        }
    }
}

impl FromStr for KindChoice {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        if s.eq_ignore_ascii_case("mixed") {
            return Ok(KindChoice::Mixed);
        }
        s.parse::<EnsembleKind>().map(KindChoice::Single).map_err(|e| e.to_string())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum P0Choice {
    Pure,
    Uniform,
    PureAndUniform,
    Fixed,
}

impl P0Choice {
    pub fn name(self) -> &'static str {
        match self {
            P0Choice::Pure => "pure",
            P0Choice::Uniform => "uniform",
            P0Choice::PureAndUniform => "pure+uniform",
            P0Choice::Fixed => "fixed",
        }
    }
}

impl FromStr for P0Choice {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        [P0Choice::Pure, P0Choice::Uniform, P0Choice::PureAndUniform, P0Choice::Fixed]
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| format!("unknown p0_policy '{s}'"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EmpiricalSource {
    Analytic,
    MonteCarlo,
}

/// Fully typed configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    pub kinds: Vec<KindChoice>,
    pub sigma: f64,
    pub n_grid: Vec<usize>,
    pub gamma_total: f64,
    pub n_realizations: usize,
    pub n_states: usize,
    pub p0_policy: P0Choice,
    pub p0_list: Vec<f64>,
    pub t_max: Option<f64>,
    pub n_points: usize,
    pub spacing: Spacing,
    pub seed: Option<u64>,
    pub n_workers: usize,
    pub output_dir: PathBuf,
    pub mix_first: EnsembleKind,
    pub mix_second: EnsembleKind,
    pub mix_a1: f64,
    pub mix_a2: f64,
    pub n_jumps: usize,
    pub rel_tol: f64,
    pub histogram_bins: usize,
    pub empirical: EmpiricalSource,
    pub gnuplot: bool,
    pub scale_note: Option<String>,
}

struct Reader<'a> {
    raw: &'a RawConfig,
    diags: Vec<Diagnostic>,
}

impl Reader<'_> {
    fn scalar<T: FromStr>(&mut self, key: &str, default: Option<T>) -> Option<T>
    where
        T::Err: fmt::Display,
    {
        match self.raw.get(key) {
            Some(v) => match v.parse::<T>() {
                Ok(x) => Some(x),
                Err(e) => {
                    self.diags.push(Diagnostic::new(key, format!("cannot parse '{v}': {e}")));
                    None
                }
            },
            None => {
                if default.is_none() {
                    self.diags.push(Diagnostic::new(key, "required key is missing"));
                }
                default
            }
        }
    }

    fn optional<T: FromStr>(&mut self, key: &str) -> Option<T>
    where
        T::Err: fmt::Display,
    {
        let v = self.raw.get(key)?;
        match v.parse::<T>() {
            Ok(x) => Some(x),
            Err(e) => {
                self.diags.push(Diagnostic::new(key, format!("cannot parse '{v}': {e}")));
                None
            }
        }
    }

    fn list<T: FromStr>(&mut self, key: &str, default: &str) -> Vec<T>
    where
        T::Err: fmt::Display,
    {
        let text = self.raw.get(key).unwrap_or(default);
        let mut out = Vec::new();
        for (i, item) in text.split(',').map(str::trim).filter(|s| !s.is_empty()).enumerate() {
            match item.parse::<T>() {
                Ok(x) => out.push(x),
                Err(e) => self.diags.push(Diagnostic::new(format!("{key}[{i}]"), format!("cannot parse '{item}': {e}"))),
            }
        }
        out
    }
}

fn parse_spacing(s: &str) -> Result<Spacing, String> {
    match s {
        "linear" => Ok(Spacing::Linear),
        "log" => Ok(Spacing::Log),
        _ => Err(format!("unknown spacing '{s}'")),
    }
}

fn parse_empirical(s: &str) -> Result<EmpiricalSource, String> {
    match s {
        "analytic" => Ok(EmpiricalSource::Analytic),
        "mc" => Ok(EmpiricalSource::MonteCarlo),
        _ => Err(format!("unknown empirical source '{s}'")),
    }
}

struct Wrapped<T>(T);

impl FromStr for Wrapped<Spacing> {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        parse_spacing(s).map(Wrapped)
    }
}

impl FromStr for Wrapped<EmpiricalSource> {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        parse_empirical(s).map(Wrapped)
    }
}

impl ExperimentConfig {
    /// Parses every field, reporting all malformed values at once.
    pub fn from_raw(raw: &RawConfig) -> Result<Self, Vec<Diagnostic>> {
        let mut r = Reader { raw, diags: Vec::new() };
        let experiment = r.scalar::<Experiment>("experiment", None);
        let kinds = r.list::<KindChoice>("kinds", "gue");
        let sigma = r.scalar("sigma", Some(1.0));
        let n_grid = r.list::<usize>("n_grid", "");
        let gamma_total = r.scalar("gamma_total", Some(1.0));
        let n_realizations = r.scalar("n_realizations", Some(200usize));
        let n_states = r.scalar("n_states", Some(5usize));
        let p0_policy = r.scalar("p0_policy", Some(P0Choice::Pure));
        let p0_list = r.list::<f64>("p0_list", "");
        let t_max = r.optional::<f64>("t_max");
        let n_points = r.scalar("n_points", Some(61usize));
        let spacing = r.scalar("spacing", Some(Wrapped(Spacing::Linear)));
        let seed = r.optional::<u64>("seed");
        let n_workers = r.scalar("n_workers", Some(1usize));
        let output_dir = r.scalar("output_dir", Some(PathBuf::from("out")));
        let mix_first = r.scalar("mix_first", Some(EnsembleKind::Goe));
        let mix_second = r.scalar("mix_second", Some(EnsembleKind::GinUe));
        let mix_a1 = r.scalar("mix_a1", Some(std::f64::consts::FRAC_1_SQRT_2));
        let mix_a2 = r.scalar("mix_a2", Some(std::f64::consts::FRAC_1_SQRT_2));
        let n_jumps = r.scalar("n_jumps", Some(1usize));
        let rel_tol = r.scalar("rel_tol", Some(1e-8));
        let histogram_bins = r.scalar("histogram_bins", Some(40usize));
        let empirical = r.scalar("empirical", Some(Wrapped(EmpiricalSource::Analytic)));
        let gnuplot = r.scalar("gnuplot", Some(false));
        let scale_note = raw.get("scale_note").map(str::to_string);

        if !r.diags.is_empty() {
            return Err(r.diags);
        }
        // Every scalar is Some once no diagnostics were raised.
        Ok(Self {
            experiment: experiment.expect("checked"),
            kinds,
            sigma: sigma.expect("checked"),
            n_grid,
            gamma_total: gamma_total.expect("checked"),
            n_realizations: n_realizations.expect("checked"),
            n_states: n_states.expect("checked"),
            p0_policy: p0_policy.expect("checked"),
            p0_list,
            t_max,
            n_points: n_points.expect("checked"),
            spacing: spacing.expect("checked").0,
            seed,
            n_workers: n_workers.expect("checked"),
            output_dir: output_dir.expect("checked"),
            mix_first: mix_first.expect("checked"),
            mix_second: mix_second.expect("checked"),
            mix_a1: mix_a1.expect("checked"),
            mix_a2: mix_a2.expect("checked"),
            n_jumps: n_jumps.expect("checked"),
            rel_tol: rel_tol.expect("checked"),
            histogram_bins: histogram_bins.expect("checked"),
            empirical: empirical.expect("checked").0,
            gnuplot: gnuplot.expect("checked"),
            scale_note,
        })
    }

    pub fn parse(text: &str) -> Result<Self, Vec<Diagnostic>> {
        Self::from_raw(&RawConfig::parse(text)?)
    }

    /// `Γσ²`, the unit of rates in all outputs.
    pub fn rate_unit(&self) -> f64 {
        self.gamma_total * self.sigma * self.sigma
    }

    fn needs_even(&self, kind: KindChoice) -> bool {
        match kind {
            KindChoice::Single(k) => k.is_symplectic(),
            KindChoice::Mixed => self.mix_first.is_symplectic() || self.mix_second.is_symplectic(),
        }
    }

    /// Invariant violations; empty when the configuration can run.
    pub fn validate(&self) -> Vec<Diagnostic> {
        let mut d = Vec::new();
        let mut positive = |field: &str, v: f64| {
            if !(v > 0.0 && v.is_finite()) {
                d.push(Diagnostic::new(field, format!("must be positive and finite, got {v}")));
            }
        };
        positive("sigma", self.sigma);
        positive("gamma_total", self.gamma_total);
        if let Some(t) = self.t_max {
            positive("t_max", t);
        }

        if self.kinds.is_empty() {
            d.push(Diagnostic::new("kinds", "no ensemble kinds given"));
        }
        if self.n_grid.is_empty() {
            d.push(Diagnostic::new("n_grid", "no dimensions given"));
        }
        for (i, &n) in self.n_grid.iter().enumerate() {
            if n < 3 {
                d.push(Diagnostic::new(format!("n_grid[{i}]"), format!("dimension must be at least 3, got {n}")));
            }
            for (j, &k) in self.kinds.iter().enumerate() {
                if n % 2 == 1 && self.needs_even(k) {
                    d.push(Diagnostic::new(
                        format!("n_grid[{i}]"),
                        format!("odd dimension {n} is incompatible with kinds[{j}] = {}", k.name()),
                    ));
                }
            }
        }

        let min_realizations = match self.experiment {
            Experiment::RateScaling | Experiment::GinRateScaling => 2,
            _ => 1,
        };
        if self.n_realizations < min_realizations {
            d.push(Diagnostic::new("n_realizations", format!("must be at least {min_realizations}")));
        }
        let min_states = if self.experiment == Experiment::RateDistribution { 100 } else { 1 };
        if self.n_states < min_states {
            d.push(Diagnostic::new("n_states", format!("must be at least {min_states}")));
        }
        if self.n_points < 2 {
            d.push(Diagnostic::new("n_points", "need at least two time points"));
        }
        if self.n_workers == 0 {
            d.push(Diagnostic::new("n_workers", "must be at least 1"));
        }
        if self.n_jumps == 0 {
            d.push(Diagnostic::new("n_jumps", "must be at least 1"));
        }
        if self.histogram_bins == 0 {
            d.push(Diagnostic::new("histogram_bins", "must be at least 1"));
        }
        if !(self.rel_tol > 0.0 && self.rel_tol <= 1e-3) {
            d.push(Diagnostic::new("rel_tol", format!("must lie in (0, 1e-3], got {}", self.rel_tol)));
        }

        let needs_p0_list = self.experiment == Experiment::PurityDecay || self.p0_policy == P0Choice::Fixed;
        if needs_p0_list && self.p0_list.is_empty() {
            d.push(Diagnostic::new("p0_list", "required by this experiment or p0_policy"));
        }
        let n_small = self.n_grid.iter().copied().min().unwrap_or(1).max(1);
        for (i, &p) in self.p0_list.iter().enumerate() {
            if !(p <= 1.0 && p >= 1.0 / n_small as f64 - 1e-15) {
                d.push(Diagnostic::new(
                    format!("p0_list[{i}]"),
                    format!("purity {p} must lie in [1/{n_small}, 1]"),
                ));
            }
        }

        if self.kinds.contains(&KindChoice::Mixed) {
            let norm = self.mix_a1 * self.mix_a1 + self.mix_a2 * self.mix_a2;
            if (norm - 1.0).abs() > 1e-12 {
                d.push(Diagnostic::new("mix_a2", format!("mix_a1² + mix_a2² must equal 1, got {norm}")));
            }
        }

        for (j, &k) in self.kinds.iter().enumerate() {
            let field = format!("kinds[{j}]");
            match (self.experiment, k) {
                (Experiment::GinRateScaling, KindChoice::Single(s)) if s.family() != Family::Ginibre => {
                    d.push(Diagnostic::new(field, "gin-rate-scaling takes Ginibre kinds only"));
                }
                (Experiment::GinRateScaling | Experiment::CumulantTable | Experiment::EnsembleDiagnostics, KindChoice::Mixed) => {
                    d.push(Diagnostic::new(field, format!("mixed is not supported by {}", self.experiment.name())));
                }
                _ => {}
            }
        }
        d
    }

    /// Canonical text form; parsing it yields an equal configuration.
    pub fn to_text(&self) -> String {
        let join = |v: Vec<String>| v.join(", ");
        let mut lines = vec![
            format!("experiment = {}", self.experiment.name()),
            format!("kinds = {}", join(self.kinds.iter().map(|k| k.name().to_string()).collect())),
            format!("sigma = {}", format_float(self.sigma)),
            format!("n_grid = {}", join(self.n_grid.iter().map(|n| n.to_string()).collect())),
            format!("gamma_total = {}", format_float(self.gamma_total)),
            format!("n_realizations = {}", self.n_realizations),
            format!("n_states = {}", self.n_states),
            format!("p0_policy = {}", self.p0_policy.name()),
        ];
        if !self.p0_list.is_empty() {
            lines.push(format!("p0_list = {}", join(self.p0_list.iter().map(|&p| format_float(p)).collect())));
        }
        if let Some(t) = self.t_max {
            lines.push(format!("t_max = {}", format_float(t)));
        }
        lines.push(format!("n_points = {}", self.n_points));
        lines.push(format!(
            "spacing = {}",
            match self.spacing {
                Spacing::Linear => "linear",
                Spacing::Log => "log",
            }
        ));
        if let Some(s) = self.seed {
            lines.push(format!("seed = {s}"));
        }
        lines.extend([
            format!("n_workers = {}", self.n_workers),
            format!("output_dir = {}", self.output_dir.display()),
            format!("mix_first = {}", self.mix_first.name()),
            format!("mix_second = {}", self.mix_second.name()),
            format!("mix_a1 = {}", format_float(self.mix_a1)),
            format!("mix_a2 = {}", format_float(self.mix_a2)),
            format!("n_jumps = {}", self.n_jumps),
            format!("rel_tol = {}", format_float(self.rel_tol)),
            format!("histogram_bins = {}", self.histogram_bins),
            format!(
                "empirical = {}",
                match self.empirical {
                    EmpiricalSource::Analytic => "analytic",
                    EmpiricalSource::MonteCarlo => "mc",
                }
            ),
            format!("gnuplot = {}", self.gnuplot),
        ]);
        if let Some(note) = &self.scale_note {
            lines.push(format!("scale_note = {note}"));
        }
        lines.join("\n") + "\n"
    }
}
