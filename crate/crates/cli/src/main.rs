use clap::{Args, Parser, Subcommand};
use famzeta_cli::commands::{self, GammaSource, VerifyStatus};
use famzeta_cli::CliError;
use std::path::PathBuf;
use std::process::ExitCode;

/// Zeta functions of hyperelliptic curves in one-parameter families.
#[derive(Parser)]
#[command(name = "famzeta", version)]
struct Cli {
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build the family cache for parameters of degree up to `n`.
    Precompute {
        #[arg(long)]
        family: PathBuf,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Zeta function of one fibre.
    Zeta {
        #[arg(long)]
        cache: PathBuf,
        #[command(flatten)]
        gamma: GammaArgs,
        /// Degree of the random parameter over `F_q`.
        #[arg(long, requires = "random_gamma")]
        degree: Option<usize>,
        #[arg(long)]
        json: bool,
    },
    /// Compare the pipeline against brute-force counts.
    Verify {
        #[arg(long)]
        cache: PathBuf,
        #[arg(long)]
        gamma: String,
        #[arg(long)]
        kmax: usize,
    },
    /// Per-stage timings as tab-separated values.
    Bench {
        #[arg(long)]
        family: PathBuf,
        #[arg(long, value_delimiter = ',', num_args = 1..)]
        n: Vec<usize>,
    },
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct GammaArgs {
    /// An integer, a JSON document `{"psi": [...], "gamma": [...]}`, or `@file`.
    #[arg(long)]
    gamma: Option<String>,
    /// Seed for a random good parameter; needs `--degree`.
    #[arg(long, requires = "degree")]
    random_gamma: Option<u64>,
}

fn run(cli: Cli) -> Result<ExitCode, CliError> {
    let out = match cli.cmd {
        Command::Precompute { family, n, out } => commands::precompute(&family, n, &out)?,
        Command::Zeta {
            cache,
            gamma,
            degree,
            json,
        } => {
            let source = match (gamma.gamma, gamma.random_gamma, degree) {
                (Some(g), None, None) => GammaSource::Spec(g),
                (None, Some(seed), Some(degree)) => GammaSource::Random { seed, degree },
                _ => return Err(CliError::Usage("give --gamma, or --random-gamma with --degree".into())),
            };
            commands::zeta(&cache, &source, json)?
        }
        Command::Verify { cache, gamma, kmax } => {
            let (report, status) = commands::verify(&cache, &gamma, kmax)?;
            print!("{report}");
            if status == VerifyStatus::Mismatch {
                return Ok(ExitCode::from(CliError::Internal(String::new()).exit_code()));
            }
            return Ok(ExitCode::SUCCESS);
        }
        Command::Bench { family, n } => commands::bench(&family, &n)?,
    };
    print!("{out}");
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("famzeta: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
