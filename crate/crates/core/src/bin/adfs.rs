use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use adfs::scenario::{preset, run_scenario_with, ReportDocument, ScenarioConfig, Tasks, PRESET_NAMES};
use adfs::Error;

#[derive(Parser)]
#[command(name = "adfs", version, about = "Noise-insensitive probe design for quantum sensor networks")]
struct Cli {
    #[command(subcommand)]
    command: Option<Command>,
    /// Scenario config (JSON).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true)]
    samples: Option<usize>,
    /// Directory for the report and map files.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Check the engine against the full-register oracle and exit.
    #[arg(long)]
    self_check: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Design the probe and report its metrics.
    Design,
    /// Time-limited QFI against the GHZ and separable baselines.
    Qfi,
    /// Evaluate the maps listed in the config.
    Map,
    /// Run the scaling and convergence sections.
    Scaling,
    RankCheck,
    /// Run every section of a shipped preset.
    Reproduce {
        #[arg(value_parser = clap::builder::PossibleValuesParser::new(PRESET_NAMES))]
        preset: String,
    },
    SweepPhase,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            log::error!("{e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Config { .. } => 2,
        Error::OracleMismatch(_) => 4,
        e if e.is_numeric() => 3,
        _ => 1,
    }
}

fn run(cli: Cli) -> adfs::Result<()> {
    if cli.self_check {
        let worst = adfs::qfi::self_check()?;
        log::info!("oracle agreement, worst relative difference {worst:.2e}");
        println!("{}", serde_json::json!({ "self_check": "pass", "worst_relative_difference": worst }));
        return Ok(());
    }
    let Some(command) = cli.command else {
        return Err(Error::config("command", "no subcommand given; see --help"));
    };
    let (mut config, tasks) = match &command {
        Command::Reproduce { preset: name } => (preset(name)?, Tasks::ALL),
        other => {
            let path = cli
                .config
                .as_deref()
                .ok_or_else(|| Error::config("--config", "required for this subcommand"))?;
            let tasks = match other {
                Command::Design => Tasks::NONE,
                Command::Qfi => Tasks::NONE.with_qfi(),
                Command::Map => Tasks { maps: true, ..Tasks::NONE },
                Command::Scaling => Tasks { scaling: true, ..Tasks::NONE },
                Command::RankCheck => Tasks { rank_check: true, ..Tasks::NONE },
                Command::SweepPhase => Tasks { phase_sweep: true, ..Tasks::NONE },
                Command::Reproduce { .. } => unreachable!(),
            };
            (load(path)?, tasks)
        }
    };
    if let Some(seed) = cli.seed {
        config.seed = seed;
    }
    if let Some(samples) = cli.samples {
        config.samples = samples;
    }
    config.validate()?;
    log::info!("running `{}` ({})", config.name, &config.hash()[..12]);
    let report = run_scenario_with(&config, tasks)?;
    log::info!("done in {:.2} s", report.wall_time_s);
    emit(&report, cli.format, cli.out.as_deref())
}

fn load(path: &Path) -> adfs::Result<ScenarioConfig> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::config(path.display().to_string(), e.to_string()))?;
    ScenarioConfig::from_json(&text)
}

fn emit(report: &ReportDocument, format: Format, out: Option<&Path>) -> adfs::Result<()> {
    let json = report.to_json();
    if let Some(dir) = out {
        std::fs::create_dir_all(dir)?;
        std::fs::write(dir.join("report.json"), &json)?;
        for m in &report.maps {
            std::fs::write(dir.join(format!("{}.csv", m.name)), m.map.to_csv(m.log10))?;
        }
        log::info!("wrote {}", dir.display());
    }
    match format {
        Format::Json => println!("{json}"),
        Format::Csv => {
            if report.maps.is_empty() {
                return Err(Error::config("--format", "csv output needs at least one map in the config"));
            }
            for m in &report.maps {
                print!("{}", m.map.to_csv(m.log10));
            }
        }
    }
    Ok(())
}
