use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde::Serialize;
use toricgm_cli::commands::{self, BasisArgs, CheckArgs, GraphArgs, IpsArgs, MleArgs, ModelArgs};
use toricgm_cli::formats::to_json;
use toricgm_cli::{CliError, RunReport};

/// Toric ideals, Markov bases and likelihood equations of discrete
/// log-linear and graphical models.
#[derive(Parser)]
#[command(name = "toricgm", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build the model matrix from a graph, generators or raw matrix file.
    Model(ModelArgs),
    /// Compute a Markov basis (reduced Gröbner basis of the toric ideal).
    Basis(BasisArgs),
    /// Classify a distribution as factoring, a limit only, or outside.
    Check(CheckArgs),
    /// Fit the model by iterative proportional scaling.
    Ips(IpsArgs),
    /// Eliminate the likelihood equations to a univariate polynomial.
    MleExact(MleArgs),
    /// Chordality, cliques, separations and partition of a graph.
    Graph(GraphArgs),
}

fn emit<T: Serialize>(r: Result<RunReport<T>, CliError>) -> Result<String, CliError> {
    r.map(|report| to_json(&report))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let out = match &cli.command {
        Command::Model(a) => emit(commands::model(a)),
        Command::Basis(a) => emit(commands::basis(a)),
        Command::Check(a) => emit(commands::check(a)),
        Command::Ips(a) => emit(commands::ips(a)),
        Command::MleExact(a) => emit(commands::mle_exact(a)),
        Command::Graph(a) => emit(commands::graph(a)),
    };
    match out {
        Ok(json) => {
            print!("{json}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code as u8)
        }
    }
}
