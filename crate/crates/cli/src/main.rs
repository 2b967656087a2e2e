//! isolab: build and verify warped-product soliton models, run the
//! volume-preserving graph flow, and check the isoperimetric inequality.
//!
//! Exit codes: 0 success, 2 verification failure, 1 usage/runtime error.
//! Commands never consult environment variables and write artifacts
//! atomically, echoing the resolved configuration beside each output.

mod artifacts;
mod commands;
mod models;
mod series_parse;

use clap::{Parser, Subcommand};
use commands::*;

#[derive(Parser)]
#[command(name = "isolab", version, about = "Warped-product soliton laboratory")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Verify the cigar soliton identities and admissibility bounds.
    CigarVerify(CigarVerifyArgs),
    /// Integrate the unstable trajectory and emit its table and model.
    BryantBuild(BryantBuildArgs),
    /// Check the phase-plane limit lemmas along the trajectory.
    BryantLemmas(BryantLemmasArgs),
    /// Tabulate the isoperimetric profile (or evaluate it: profile eval).
    Profile(ProfileArgs),
    /// Evolve a radial graph by the volume-preserving flow.
    Flow(FlowArgs),
    /// Batch-check the isoperimetric inequality on random graphs.
    Isocheck(IsocheckArgs),
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_USAGE,
            };
            let _ = e.print();
            std::process::exit(code);
        }
    };
    let outcome = match &cli.command {
        Command::CigarVerify(args) => cigar_verify(args),
        Command::BryantBuild(args) => bryant_build(args),
        Command::BryantLemmas(args) => bryant_lemmas(args),
        Command::Profile(args) => profile_cmd(args),
        Command::Flow(args) => flow_cmd(args),
        Command::Isocheck(args) => isocheck_cmd(args),
    };
    match outcome {
        Ok(code) => std::process::exit(code),
        Err(e) => {
            eprintln!("isolab: {e:#}");
            std::process::exit(EXIT_USAGE);
        }
    }
}
