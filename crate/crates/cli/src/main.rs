//! `malab`: command-line front end for the Monge-Ampère verification lab.
//!
//! Exit status is 0 when every checked inequality holds, 1 when one is
//! violated and 2 for usage errors, bad input or failed hypotheses.

mod commands;
mod report;

use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use malab::rational::parse_rational;
use malab::toric::Normalization;

use commands::{CliError, PairMode, ToricMode};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Report,
    Csv,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum NormalizationArg {
    Paper,
    Derived,
}

impl From<NormalizationArg> for Normalization {
    fn from(n: NormalizationArg) -> Self {
        match n {
            NormalizationArg::Paper => Normalization::Paper,
            NormalizationArg::Derived => Normalization::Derived,
        }
    }
}

#[derive(Parser, Debug)]
#[command(name = "malab", version, about = "Checks mixed complex Monge-Ampère inequalities")]
struct Cli {
    /// Scale for Dirac masses at the origin: (2π)ⁿ·Vol (paper) or (2π)ⁿ·n!·Vol (derived).
    #[arg(long, global = true, value_enum, default_value = "derived")]
    normalization: NormalizationArg,
    /// Violation tolerance; each command documents its default.
    #[arg(long, global = true)]
    tol: Option<f64>,
    #[arg(long, global = true, default_value_t = 7)]
    seed: u64,
    /// Subdivision levels for the domination check.
    #[arg(long, global = true, value_delimiter = ',', default_value = "0,1,2,3")]
    levels: Vec<usize>,
    #[arg(long, global = true, value_enum, default_value = "report")]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Random PSD pairs against the Gårding and Minkowski determinant inequalities (tol 1e-9).
    VerifyMatrix {
        #[arg(long, default_value_t = 1000)]
        count: usize,
        #[arg(long, short = 'n', default_value_t = 2)]
        n: usize,
        #[arg(long, value_enum, default_value = "independent")]
        pairs: PairMode,
    },
    /// Nodewise mixed and Minkowski inequalities for two grid files (tol 10h²).
    GridCheck {
        u: String,
        v: String,
        #[arg(long, short = 'k', default_value_t = 1)]
        k: usize,
    },
    /// Exact Dirac masses at the origin of toric functions given as slope files.
    Toric {
        #[arg(required = true)]
        files: Vec<String>,
        #[arg(long, value_enum, default_value = "mass")]
        mode: ToricMode,
    },
    /// The two-function family where the mixed inequalities fail (tol 1e-9).
    Counterexample {
        /// Positive rational, e.g. 2 or 3/2.
        #[arg(long, short = 'k', default_value = "2")]
        k: String,
    },
    /// Canonical approximation of a measure file at level k.
    Approx {
        file: String,
        #[arg(long, short = 'k', default_value_t = 1)]
        k: usize,
        /// affine, sqnorm or cubic.
        #[arg(long, default_value = "affine")]
        phi: String,
        /// Where to write the approximant.
        #[arg(long, short = 'o')]
        out: Option<String>,
    },
}

fn run(cli: &Cli) -> Result<report::Report, CliError> {
    let normalization = Normalization::from(cli.normalization);
    match &cli.command {
        Command::VerifyMatrix { count, n, pairs } => {
            commands::verify_matrix(*count, *n, cli.seed, cli.tol.unwrap_or(1e-9), *pairs)
        }
        Command::GridCheck { u, v, k } => commands::grid_check(u, v, *k, cli.tol),
        Command::Toric { files, mode } => commands::toric(files, *mode, normalization),
        Command::Counterexample { k } => {
            let k = parse_rational(k).ok_or_else(|| CliError::Usage(format!("`{k}` is not a rational number")))?;
            commands::counterexample(&k, &cli.levels, cli.tol.unwrap_or(1e-9), normalization)
        }
        Command::Approx { file, k, phi, out } => commands::approx(file, *k, phi, out.as_deref()),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(report) => {
            match cli.format {
                Format::Report => print!("{}", report.render()),
                Format::Csv => print!("{}", report.render_csv()),
            }
            ExitCode::from(report.status().exit_code() as u8)
        }
        Err(e) => {
            eprintln!("malab: {e}");
            ExitCode::from(2)
        }
    }
}
