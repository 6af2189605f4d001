use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use rarebasis::commands::{run, Command};
use rarebasis::config::{ExperimentConfig, Overrides};
use rarebasis::maskfile::write_mask;
use rarebasis::report::Format;
use rarebasis::CliError;

#[derive(Parser)]
#[command(name = "rarebasis", version, about = "Extremal sets for rare differentiation bases")]
struct Cli {
    #[command(subcommand)]
    verb: Verb,
    /// Experiment config (TOML).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    n: Option<usize>,
    #[arg(long, global = true)]
    k: Option<usize>,
    /// Dyadic α, e.g. `1/32` or `0.03125`.
    #[arg(long, global = true)]
    alpha: Option<String>,
    /// Per-axis ranges, `lo:hi,lo:hi,...`.
    #[arg(long, global = true)]
    window: Option<String>,
    /// Largest grid (in cells) the oracle will materialize.
    #[arg(long, global = true)]
    guard: Option<u64>,
    #[arg(long, global = true, default_value = "text")]
    format: Format,
    /// Report file; stdout when absent.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    /// Mask file for `oracle-check` and `verify`.
    #[arg(long, global = true)]
    mask_out: Option<PathBuf>,
}

#[derive(Subcommand, Clone, Copy)]
enum Verb {
    /// List the spectrum inside the window.
    Spectrum,
    /// Net constants of the spectrum sections.
    Density,
    /// Extract scale sequences from the spectrum.
    Extract,
    /// Verify the union lower bound (and theorem runs with `alpha` or `stages`).
    Verify,
    /// Sweep k and report the growth of the ratio.
    Sweep,
    /// Cross-check the analytic union against a grid oracle.
    OracleCheck {
        /// Run random configurations from this seed instead of the config.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Check the planar IS property and product completeness.
    IsCheck,
    /// Report which tuples of Ω the spectrum realizes.
    Complete,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("rarebasis: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn execute(cli: &Cli) -> Result<bool, CliError> {
    let mut cfg = match &cli.config {
        Some(path) => ExperimentConfig::load(path)?,
        None => ExperimentConfig::default(),
    };
    cfg.apply(&Overrides {
        n: cli.n,
        k: cli.k,
        alpha: cli.alpha.clone(),
        window: cli.window.clone(),
        guard: cli.guard,
    });
    let (command, seed) = match cli.verb {
        Verb::Spectrum => (Command::Spectrum, None),
        Verb::Density => (Command::Density, None),
        Verb::Extract => (Command::Extract, None),
        Verb::Verify => (Command::Verify, None),
        Verb::Sweep => (Command::Sweep, None),
        Verb::OracleCheck { seed } => (Command::OracleCheck, seed),
        Verb::IsCheck => (Command::IsCheck, None),
        Verb::Complete => (Command::Complete, None),
    };
    let outcome = run(command, &cfg, cli.format, seed)?;
    let output_cfg = cfg.output.clone().unwrap_or_default();
    match cli.output.as_ref().or(output_cfg.report.as_ref()) {
        Some(path) => std::fs::write(path, &outcome.output).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?,
        None => print!("{}", outcome.output),
    }
    if let (Some(path), Some(mask)) = (cli.mask_out.as_ref().or(output_cfg.mask.as_ref()), &outcome.mask) {
        std::fs::write(path, write_mask(mask)).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    }
    Ok(outcome.passed)
}
