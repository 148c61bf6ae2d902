use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use noma_simo::cli::{
    cmd_design, cmd_sweep, cmd_validate, write_sweep, CliError, ExperimentSpec, ValidateOptions,
};

#[derive(Parser)]
#[command(
    version,
    about = "Two-user noncoherent NOMA massive SIMO constellation design"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct SpecArgs {
    /// Experiment file (key = value lines); defaults to the built-in demo.
    #[arg(short, long)]
    config: Option<PathBuf>,
    /// Extra `key=value` settings applied after the file.
    #[arg(short = 's', long = "set", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Print the SERM / MED / custom designs for the configuration.
    Design {
        #[command(flatten)]
        spec: SpecArgs,
        #[arg(long)]
        json: bool,
    },
    /// Write exact (and simulated) error rates over the antenna sweep as CSV.
    Sweep {
        #[command(flatten)]
        spec: SpecArgs,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Run the cross-oracle checks.
    Validate {
        #[command(flatten)]
        spec: SpecArgs,
        #[arg(long)]
        json: bool,
        /// Scale every decision threshold (negative control).
        #[arg(long, hide = true)]
        perturb_thresholds: Option<f64>,
    },
}

fn load(args: &SpecArgs) -> Result<ExperimentSpec, CliError> {
    let mut text = match &args.config {
        Some(path) => std::fs::read_to_string(path).map_err(|source| CliError::Io {
            path: path.clone(),
            source,
        })?,
        None => String::new(),
    };
    for o in &args.overrides {
        text.push('\n');
        text.push_str(o);
    }
    ExperimentSpec::parse(&text)
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Design { spec, json } => {
            let reports = cmd_design(&load(&spec)?)?;
            if json {
                println!(
                    "{}",
                    serde_json::to_string_pretty(&reports).expect("serializable")
                );
            } else {
                for r in &reports {
                    print!("{r}");
                }
            }
        }
        Command::Sweep { spec, out } => {
            let spec = load(&spec)?;
            let table = cmd_sweep(&spec)?;
            match out.or_else(|| spec.output_path.clone()) {
                Some(path) => {
                    write_sweep(&spec, &table, &path)?;
                    if let Some(n) = table.crossover() {
                        eprintln!("serm below med from N = {n}");
                    }
                }
                None => print!("{}", table.to_csv()),
            }
        }
        Command::Validate {
            spec,
            json,
            perturb_thresholds,
        } => {
            let opts = ValidateOptions {
                threshold_scale: perturb_thresholds,
                ..ValidateOptions::default()
            };
            let report = cmd_validate(&load(&spec)?, &opts)?;
            if json {
                println!(
                    "{}",
                    serde_json::to_string_pretty(&report).expect("serializable")
                );
            } else {
                print!("{report}");
            }
            if !report.all_passed() {
                return Err(CliError::Validation("one or more checks failed".into()));
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
