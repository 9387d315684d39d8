use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use ris_vitals_cli::{
    export_results, load_scenario, presets, run_experiment, HarnessError, RunReport, Scenario,
};

#[derive(Parser)]
#[command(
    name = "ris-vitals",
    version,
    about = "Simulate RIS-assisted respiration sensing"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum PresetName {
    Fig7,
    Fig4,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario file and write its artifacts.
    Simulate {
        #[arg(long)]
        scenario: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Overrides the scenario's seed.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Run one of the reference experiments.
    Preset {
        #[arg(value_enum)]
        name: PresetName,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Load and validate a scenario file, printing the resolved scenario.
    Validate {
        #[arg(long)]
        scenario: PathBuf,
    },
}

fn run(mut scenario: Scenario, seed: Option<u64>, out: &Path) -> Result<RunReport, HarnessError> {
    if let Some(seed) = seed {
        scenario.seed = seed;
    }
    let mut report = run_experiment(&scenario)?;
    export_results(&mut report, out)?;
    Ok(report)
}

fn summarize(report: &RunReport, out: &Path) {
    for t in &report.targets {
        let est = t
            .estimated_bpm
            .map_or("no breath".to_string(), |v| format!("{v:.2} bpm"));
        println!(
            "{} target {}: true {:.2} bpm, estimated {est}",
            t.label, t.target, t.true_bpm
        );
    }
    for m in &report.measurements {
        let value = m
            .value
            .map_or("undefined".to_string(), |v| format!("{v:.3}"));
        println!("{}: {value} {}", m.name, m.unit);
    }
    println!("wrote {} files to {}", report.manifest.len(), out.display());
    println!("wall clock: {:.2} s", report.wall_clock.as_secs_f64());
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Simulate {
            scenario,
            out,
            seed,
        } => load_scenario(&scenario)
            .and_then(|s| run(s, seed, &out))
            .map(|r| summarize(&r, &out)),
        Command::Preset { name, out, seed } => {
            let mut scenario = match name {
                PresetName::Fig7 => presets::fig7(),
                PresetName::Fig4 => presets::fig4(),
            };
            scenario.preset = Some(presets::NAMES[name as usize].into());
            run(scenario, seed, &out).map(|r| summarize(&r, &out))
        }
        Command::Validate { scenario } => {
            load_scenario(&scenario).map(|s| print!("{}", s.to_toml()))
        }
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
