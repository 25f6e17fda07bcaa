//! `ncpauli` command-line tool.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "ncpauli", version, about = "Classical models of noncontextual Pauli Hamiltonians")]
struct Cli {
    #[command(flatten)]
    global: GlobalArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct GlobalArgs {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// Seed for the local-search solver.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Largest generating set solved by exhaustive enumeration.
    #[arg(long, global = true, default_value_t = 22)]
    pub exhaustive_threshold: usize,
    /// Random restarts for the local-search solver.
    #[arg(long, global = true, default_value_t = 64)]
    pub restarts: usize,
    /// Worker threads (defaults to the number of cores).
    #[arg(long, global = true, env = "NCPAULI_THREADS")]
    pub threads: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TieBreakArg {
    /// Equal magnitudes are ordered by label.
    Lex,
    /// Equal magnitudes keep their file order.
    Table,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Test whether a Hamiltonian is noncontextual (exit 1 if not).
    Check {
        /// Hamiltonian file; `-` or nothing reads stdin.
        input: Option<PathBuf>,
    },
    /// Print the generating set, clique representatives and term decompositions.
    Generators { input: Option<PathBuf> },
    /// Print the compiled objective function.
    Model {
        input: Option<PathBuf>,
        /// Generator values (comma separated, each +1 or -1).
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true, requires = "r")]
        q: Option<Vec<i64>>,
        /// Unit vector over clique representatives (comma separated).
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true, requires = "q")]
        r: Option<Vec<f64>>,
    },
    /// Find the classical ground state of a noncontextual Hamiltonian.
    Solve { input: Option<PathBuf> },
    /// Check that a witness reaches an energy at or below a threshold.
    Verify {
        input: Option<PathBuf>,
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true, requires = "r", conflicts_with = "witness")]
        q: Option<Vec<i64>>,
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true, requires = "q")]
        r: Option<Vec<f64>>,
        /// JSON record produced by `solve --format json`.
        #[arg(long)]
        witness: Option<PathBuf>,
        /// Energy threshold.
        #[arg(long, allow_negative_numbers = true)]
        below: f64,
    },
    /// Compare noncontextual and diagonal approximations with exact diagonalization.
    Approx {
        input: Option<PathBuf>,
        /// Window size for batched greedy selection.
        #[arg(long, default_value_t = 1)]
        batch: usize,
        /// Search all subsets for the best noncontextual approximation.
        #[arg(long)]
        brute_force: bool,
        /// Energy unit for the reported errors, in Hartree.
        #[arg(long, default_value_t = ncpauli::approx::CHEMICAL_ACCURACY)]
        chem_accuracy: f64,
        #[arg(long, value_enum, default_value_t = TieBreakArg::Lex)]
        tie_break: TieBreakArg,
    },
    /// Exact ground energy by dense diagonalization.
    Oracle {
        input: Option<PathBuf>,
        /// Operators whose ground-state expectation to print.
        #[arg(long, value_delimiter = ',')]
        expect: Vec<String>,
    },
    /// Reproduce the reference values of the bundled molecular systems.
    Report,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.global.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    let g = &cli.global;
    let result = match cli.command {
        Command::Check { input } => commands::check(g, input.as_deref()),
        Command::Generators { input } => commands::generators(g, input.as_deref()),
        Command::Model { input, q, r } => commands::model(g, input.as_deref(), q.zip(r)),
        Command::Solve { input } => commands::solve(g, input.as_deref()),
        Command::Verify { input, q, r, witness, below } => {
            commands::verify(g, input.as_deref(), q.zip(r), witness.as_deref(), below)
        }
        Command::Approx { input, batch, brute_force, chem_accuracy, tie_break } => {
            commands::approx(g, input.as_deref(), batch, brute_force, chem_accuracy, tie_break)
        }
        Command::Oracle { input, expect } => commands::oracle(g, input.as_deref(), &expect),
        Command::Report => commands::report(g),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
