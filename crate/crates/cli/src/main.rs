use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use lindbrand_cli::presets::{preset, PRESETS};
use lindbrand_cli::runner::format_diagnostics;
use lindbrand_cli::{load_config, run, Overrides};

#[derive(Parser)]
#[command(name = "lindbrand", version, about = "Random Lindblad dynamics experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment and write CSV outputs plus a JSON manifest.
    Run(Source),
    /// Check a configuration without running it.
    Validate(Source),
    /// List or print the built-in presets.
    Presets {
        #[command(subcommand)]
        action: PresetAction,
    },
}

#[derive(Subcommand)]
enum PresetAction {
    List,
    Show { name: String },
}

#[derive(Args)]
struct Source {
    /// Flat `key = value` config file; applied on top of --preset.
    #[arg(long)]
    config: Option<PathBuf>,
    /// fig1, fig2, fig3, fig4 or fig-gin.
    #[arg(long)]
    preset: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, env = "LINDBRAND_WORKERS")]
    workers: Option<usize>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
}

impl Source {
    fn load(&self) -> Result<lindbrand_cli::ExperimentConfig, ExitCode> {
        let overrides = Overrides {
            seed: self.seed,
            workers: self.workers,
            out: self.out.clone(),
        };
        load_config(self.config.as_deref(), self.preset.as_deref(), &overrides).map_err(|d| {
            eprintln!("invalid configuration:\n{}", format_diagnostics(&d));
            ExitCode::from(2)
        })
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Run(src) => {
            let cfg = match src.load() {
                Ok(c) => c,
                Err(code) => return code,
            };
            match run(&cfg) {
                Ok(outcome) => {
                    for f in &outcome.files {
                        println!("{}", f.display());
                    }
                    ExitCode::SUCCESS
                }
                Err(e) => {
                    eprintln!("{e}");
                    ExitCode::from(e.exit_code() as u8)
                }
            }
        }
        Command::Validate(src) => match src.load() {
            Ok(_) => {
                println!("ok");
                ExitCode::SUCCESS
            }
            Err(code) => code,
        },
        Command::Presets { action } => match action {
            PresetAction::List => {
                for p in PRESETS {
                    println!("{:8} {}", p.name, p.description);
                }
                ExitCode::SUCCESS
            }
            PresetAction::Show { name } => match preset(&name) {
                Some(p) => {
                    print!("{}", p.text);
                    ExitCode::SUCCESS
                }
                None => {
                    let names: Vec<&str> = PRESETS.iter().map(|p| p.name).collect();
                    eprintln!("unknown preset '{name}'; available: {}", names.join(", "));
                    ExitCode::from(2)
                }
            },
        },
    }
}
