use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use pslseq_cli::{file_metrics, run_design, run_set, CliError, CliResult, Scenario};

/// Peak side-lobe level sequence design.
#[derive(Debug, Parser)]
#[command(name = "pslseq", version)]
struct Cli {
    /// Write artifacts here instead of the scenario's output directory.
    #[arg(long, global = true)]
    out_dir: Option<PathBuf>,
    /// Replace every random seed of the scenario.
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run a scenario file (a set scenario runs as gen-set).
    Run { scenario: PathBuf },
    /// Generate the waveform set of a scenario with a [set] table.
    GenSet { scenario: PathBuf },
    /// Print the metrics of a sequence file.
    Metrics {
        file: PathBuf,
        /// Suppression window.
        #[arg(short = 'Q', long = "q", alias = "Q")]
        q: usize,
    },
}

fn load(path: &Path, seed: Option<u64>) -> CliResult<Scenario> {
    let mut s = Scenario::load(path)?;
    if let Some(seed) = seed {
        s.override_seed(seed);
    }
    Ok(s)
}

fn warn(warnings: impl IntoIterator<Item = String>) {
    for w in warnings {
        eprintln!("warning: {w}");
    }
}

fn design_or_set(scenario: &Scenario, out_dir: &Path) -> CliResult<()> {
    if scenario.is_set() {
        let o = run_set(scenario, out_dir)?;
        let failed = o.set.runs.iter().filter(|r| !r.converged).count();
        if failed > 0 && o.config.max_iterations > 0 {
            warn([format!("{failed} member(s) did not converge")]);
        }
        println!(
            "{}: {} members, mean CCP {:.6e}, Welch ratio {:.6} -> {}",
            scenario.name,
            o.set.len(),
            o.set.stats.mean,
            o.audit.ratio,
            o.out_dir.display()
        );
    } else {
        let o = run_design(scenario, out_dir)?;
        if !o.result.converged && o.config.max_iterations > 0 {
            warn([format!("did not converge within {} iterations", o.config.max_iterations)]);
        }
        println!(
            "{}: {} iterations, converged {}, MPCL {:.6e} -> {}",
            scenario.name,
            o.result.iterations_used,
            o.result.converged,
            o.result.metrics.mpcl,
            o.out_dir.display()
        );
    }
    Ok(())
}

fn execute(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Run { scenario } => {
            let s = load(&scenario, cli.seed)?;
            design_or_set(&s, &s.output_dir(cli.out_dir.as_deref()))
        }
        Command::GenSet { scenario } => {
            let s = load(&scenario, cli.seed)?;
            if !s.is_set() {
                return Err(CliError::validation("set", "gen-set needs a scenario with a [set] table"));
            }
            design_or_set(&s, &s.output_dir(cli.out_dir.as_deref()))
        }
        Command::Metrics { file, q } => {
            print!("{}", file_metrics(&file, q, cli.out_dir.as_deref())?);
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) if !e.use_stderr() => {
            // --help and --version
            print!("{e}");
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let err = CliError::Validation {
                field: None,
                message: e.to_string().trim_end().to_string(),
            };
            return report(&err);
        }
    };
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => report(&e),
    }
}

fn report(e: &CliError) -> ExitCode {
    let record = serde_json::to_string(&e.record()).unwrap_or_else(|_| format!("{{\"message\":{:?}}}", e.to_string()));
    eprintln!("{record}");
    ExitCode::from(e.exit_code() as u8)
}
