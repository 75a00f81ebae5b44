mod commands;
mod input;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use input::Residues;
use output::Format;

/// Polynomial-method bounds for restricted-intersection set families.
#[derive(Debug, Parser)]
#[command(name = "lintersect", version, about)]
pub struct Cli {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Json, global = true)]
    format: Format,

    #[command(subcommand)]
    command: Command,
}

/// The residue parameters shared by most subcommands. Lists are
/// comma-separated; an empty string or `{}` is the empty set.
#[derive(Debug, Clone, clap::Args)]
pub struct Params {
    /// Allowed member sizes.
    #[arg(long = "K", value_name = "LIST", default_value = "")]
    k: Residues,
    /// Allowed pairwise intersection sizes.
    #[arg(long = "L", value_name = "LIST", default_value = "")]
    l: Residues,
    /// Prime modulus; conditions are then read mod p.
    #[arg(long)]
    p: Option<u64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Theorem {
    AbsClassic,
    Multilevel,
    ModularMultilevel,
    CoeffSensitive,
    CoeffSensitiveNonshadow,
    AlmostInitial,
    Consecutive,
    NonmodularSupport,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CertKind {
    /// Rank of the multilinear polynomial family.
    Witness,
    /// Pairwise values of the annihilator on intersection sizes.
    Gram,
    /// Rank of the incidence vectors over the binomial support.
    Incidence,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Binomial-basis expansion of the annihilator polynomial of L.
    Bsupp {
        #[arg(long = "L", value_name = "LIST", default_value = "")]
        l: Residues,
        #[arg(long, required_unless_present = "integers")]
        p: Option<u64>,
        /// Expand over the integers instead of F_p.
        #[arg(long, conflicts_with = "p")]
        integers: bool,
    },
    /// Shadow and non-shadow counts per level.
    Shadow {
        /// Family file (text or JSON); `-` reads stdin.
        family: PathBuf,
        /// Levels to report; all of 0..=n by default.
        #[arg(long, value_delimiter = ',')]
        levels: Option<Vec<usize>>,
    },
    /// Evaluate one bound on a family.
    Bound {
        family: PathBuf,
        #[arg(long, value_enum)]
        theorem: Theorem,
        #[command(flatten)]
        params: Params,
    },
    /// Build and check an independence certificate for a family.
    Certificate {
        family: PathBuf,
        #[arg(long, value_enum, default_value_t = CertKind::Witness)]
        kind: CertKind,
        #[command(flatten)]
        params: Params,
        /// Adjoin non-shadow unit vectors (incidence kind).
        #[arg(long)]
        with_nonshadows: bool,
        /// Build the witness even if hypotheses fail.
        #[arg(long)]
        unchecked: bool,
        /// Include the eliminated matrix in JSON output.
        #[arg(long)]
        emit_matrix: bool,
        /// Column cap for certificate matrices.
        #[arg(long, env = "LINTERSECT_MATRIX_CAP", default_value_t = lintersect::witness::DEFAULT_MATRIX_CAP)]
        matrix_cap: u128,
    },
    /// Exhaustive search for a maximum admissible family.
    Search {
        #[arg(long)]
        n: usize,
        #[command(flatten)]
        params: Params,
        #[command(flatten)]
        limits: Limits,
    },
    /// Tables of search results over parameter ranges.
    Sweep {
        #[command(subcommand)]
        sweep: Sweep,
    },
    /// A random admissible family from an explicit seed.
    Generate {
        #[arg(long)]
        n: usize,
        #[command(flatten)]
        params: Params,
        #[arg(long)]
        seed: u64,
    },
}

#[derive(Debug, Subcommand)]
enum Sweep {
    /// Top-level unions against N(n,s,r) for consecutive L.
    Sharpness {
        #[arg(long)]
        n_max: usize,
        #[arg(long)]
        s_max: usize,
        #[command(flatten)]
        limits: Limits,
    },
    /// Consecutive L mod p against binom(n,s) and N(n,s,r).
    Unattainability {
        #[arg(long)]
        p: u64,
        #[arg(long)]
        n_max: usize,
        #[command(flatten)]
        limits: Limits,
    },
}

#[derive(Debug, Clone, clap::Args)]
pub struct Limits {
    /// Largest ground set the search accepts.
    #[arg(long, default_value_t = lintersect::search::DEFAULT_MAX_N)]
    max_n: usize,
    /// Largest vertex count the search accepts.
    #[arg(long, env = "LINTERSECT_SEARCH_CAP", default_value_t = lintersect::search::DEFAULT_MAX_VERTICES)]
    max_vertices: usize,
    /// Seconds per problem; 0 returns the first greedy family.
    #[arg(long, env = "LINTERSECT_TIME_BUDGET", default_value_t = 60.0)]
    time_budget: f64,
    /// Worker threads; all cores by default.
    #[arg(long)]
    threads: Option<usize>,
    /// Do not cut the search off at theorem bounds.
    #[arg(long)]
    no_theorem_prune: bool,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(cli.command, cli.format) {
        Ok(code) => code,
        Err(failure) => {
            eprintln!("error: {}", failure.message);
            ExitCode::from(failure.code)
        }
    }
}
