use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

mod commands;

/// Numerical checks for contact metric structures.
#[derive(Debug, Parser)]
#[command(name = "kontact", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Contact metric axioms, structural identities and oracle agreement.
    Verify(StructureArgs),
    /// Fit (kappa, mu), test constancy and report the Boeckx regime.
    Classify(StructureArgs),
    /// Apply a D_a-homothetic deformation and compare fits with the prediction.
    Deform {
        #[command(flatten)]
        input: StructureArgs,
        #[arg(long)]
        a: f64,
    },
    /// Build the K-contact or mu = 2 structure from a weakly (kappa, mu) one.
    Construct {
        #[command(flatten)]
        input: StructureArgs,
        #[arg(long, value_enum)]
        target: TargetArg,
    },
    /// Classify the three-dimensional Lie family over a (c1, c2) grid as CSV.
    Sweep {
        #[arg(long, default_value = "-6:6:0.5", allow_hyphen_values = true)]
        c1: String,
        #[arg(long, default_value = "-6:6:0.5", allow_hyphen_values = true)]
        c2: String,
        #[command(flatten)]
        output: OutputArgs,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum TargetArg {
    Kcontact,
    Mu2,
}

#[derive(Debug, Args)]
struct StructureArgs {
    /// Structure file (same as --spec).
    path: Option<PathBuf>,
    #[arg(long, conflicts_with = "path")]
    spec: Option<PathBuf>,
    /// darboux-sasakian-n<k>, darboux-weak-n<k> or lie(<c1>,<c2>).
    #[arg(long, conflicts_with_all = ["path", "spec"])]
    builtin: Option<String>,
    /// Number of quasi-random sample points.
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Debug, Args)]
struct OutputArgs {
    #[arg(long, default_value_t = 1e-8)]
    tol: f64,
    #[arg(long, default_value_t = 1e-5)]
    oracle_tol: f64,
    #[arg(long)]
    json: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Verify(input) => commands::verify(&input),
        Command::Classify(input) => commands::classify(&input),
        Command::Deform { input, a } => commands::deform(&input, a),
        Command::Construct { input, target } => commands::construct(&input, target),
        Command::Sweep { c1, c2, output } => commands::sweep(&c1, &c2, &output),
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code())
        }
    }
}
