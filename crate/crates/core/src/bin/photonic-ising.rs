use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use photonic_ising::cli::{self, CliError, Format, Overrides, RunResult};

#[derive(Parser)]
#[command(name = "photonic-ising", about = "Run photonic Ising memory experiments from TOML specs")]
struct Opts {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Common {
    /// Master seed (overrides the spec).
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads (default: $PHOTONIC_ISING_WORKERS, else all cores).
    #[arg(long)]
    workers: Option<usize>,
    /// Output table path; `-` writes the table to stdout without a sidecar.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

#[derive(Subcommand)]
enum Command {
    /// Run one spec file.
    Run {
        spec: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Run a spec once per value of a numeric parameter.
    Sweep {
        spec: PathBuf,
        #[arg(long)]
        axis: String,
        /// Comma-separated values.
        #[arg(long, value_delimiter = ',', num_args = 0..)]
        values: Vec<f64>,
        #[command(flatten)]
        common: Common,
    },
    /// Compare the exact M = 3 stationary law with the Gibbs distribution.
    OracleCheck {
        #[command(flatten)]
        common: Common,
    },
    /// Print the version.
    Version,
}

fn load(path: &PathBuf, common: &Common) -> Result<cli::ExperimentSpec, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    let overrides = Overrides { seed: common.seed, workers: common.workers, output: common.out.clone() };
    cli::parse_spec_with(&text, &overrides)
}

fn emit(result: &RunResult, spec: &cli::ExperimentSpec, format: Format) -> Result<(), CliError> {
    let ext = match format {
        Format::Csv => "csv",
        Format::Json => "json",
    };
    let out = spec.output.clone().unwrap_or_else(|| PathBuf::from(format!("{}.{ext}", spec.kind)));
    if out.as_os_str() == "-" {
        match format {
            Format::Csv => print!("{}", result.table.to_csv_string()),
            Format::Json => println!("{}", serde_json::to_string_pretty(&result.table).expect("table serializes")),
        }
    } else {
        cli::write_outputs(result, &out, format)?;
        eprintln!("wrote {} ({} rows) and {}", out.display(), result.table.rows.len(), cli::meta_path(&out).display());
    }
    Ok(())
}

fn main_inner(opts: Opts) -> Result<bool, CliError> {
    let (result, spec, format) = match opts.command {
        Command::Version => {
            println!("photonic-ising {} (result schema {})", env!("CARGO_PKG_VERSION"), cli::SCHEMA_VERSION);
            return Ok(true);
        }
        Command::Run { spec, common } => {
            let spec = load(&spec, &common)?;
            (cli::run(&spec)?, spec, common.format)
        }
        Command::Sweep { spec, axis, values, common } => {
            let spec = load(&spec, &common)?;
            (cli::sweep(&spec, &axis, &values)?, spec, common.format)
        }
        Command::OracleCheck { common } => {
            let overrides = Overrides { seed: common.seed, workers: common.workers, output: common.out.clone() };
            let mut spec = cli::parse_spec_with("kind = \"oracle-check\"", &overrides)?;
            if spec.output.is_none() {
                spec.output = Some(PathBuf::from("-"));
            }
            (cli::run(&spec)?, spec, common.format)
        }
    };
    emit(&result, &spec, format)?;
    Ok(result.all_passed())
}

fn main() -> ExitCode {
    match main_inner(Opts::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("oracle check failed");
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
