use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use shiftlab_cli::{catalog, report, run_checks, CliError, ExperimentConfig, RunReport};

#[derive(Parser)]
#[command(name = "shiftlab", version, about = "Build shift operators and run their checks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Run the checks of one experiment configuration.
    Run {
        config: PathBuf,
        /// Directory for report.json / report.csv and plot data; stdout if absent.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
        /// Write orbit curves and singular spectra as .dat files.
        #[arg(long)]
        emit_plots: bool,
        /// Override the seed in the configuration.
        #[arg(long)]
        seed: Option<u64>,
        /// Run independent checks on separate threads.
        #[arg(long)]
        parallel: bool,
    },
    /// List the preset configurations.
    Catalog {
        #[arg(long)]
        json: bool,
        /// Write every preset as a config file into this directory.
        #[arg(long)]
        write: Option<PathBuf>,
    },
}

fn run(cli: Cli) -> Result<bool, CliError> {
    match cli.command {
        Command::Run { config, out, format, emit_plots, seed, parallel } => {
            let mut cfg = ExperimentConfig::load(&config)?;
            if let Some(s) = seed {
                cfg.seed = s;
            }
            let run = run_checks(&cfg, parallel)?;
            let report = RunReport::new(cfg, run.reports.clone());
            let text = match format {
                Format::Json => report.to_json(),
                Format::Csv => report.to_csv()?,
            };
            match out {
                Some(dir) => {
                    std::fs::create_dir_all(&dir)?;
                    let name = match format {
                        Format::Json => "report.json",
                        Format::Csv => "report.csv",
                    };
                    std::fs::write(dir.join(name), text)?;
                    if emit_plots {
                        report::write_plots(&run, &dir.join("plots"))?;
                    }
                }
                None => {
                    print!("{}", if text.ends_with('\n') { text } else { text + "\n" });
                    if emit_plots {
                        report::write_plots(&run, &PathBuf::from("plots"))?;
                    }
                }
            }
            for c in report.checks.iter().filter(|c| !c.passed) {
                eprintln!("FAIL {}: {} (metric {:e}, tolerance {:e})", c.check_id, c.verdict, c.metric, c.tolerance);
            }
            Ok(report.passed)
        }
        Command::Catalog { json, write } => {
            let presets = catalog::presets();
            if let Some(dir) = write {
                for p in catalog::write_presets(&dir)? {
                    println!("{}", p.display());
                }
            } else if json {
                println!("{}", serde_json::to_string_pretty(&presets).expect("presets serialize"));
            } else {
                for p in &presets {
                    println!("{:<28} {}", p.name, p.description);
                }
            }
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
