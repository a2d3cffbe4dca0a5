//! qfir: run FIR filters classically and as simulated quantum circuits,
//! compare the two, and write per-sample results as CSV.

mod config;
mod csvio;
mod run;

use clap::error::ErrorKind;
use clap::Parser;

#[derive(Parser)]
#[command(
    name = "qfir",
    version,
    about = "FIR filtering on simulated quantum circuits, with classical cross-checks"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Subcommand)]
enum Command {
    /// Run one filtering experiment and write its time series to CSV.
    Run(config::RunArgs),
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            print!("{e}");
            std::process::exit(0);
        }
        Err(e) => {
            eprintln!("{}", run::CliError::Config(e.to_string()).to_json());
            std::process::exit(2);
        }
    };
    let code = match cli.command {
        Command::Run(args) => match run::run(args) {
            Ok(()) => 0,
            Err(e) => {
                eprintln!("{}", e.to_json());
                e.exit_code()
            }
        },
    };
    std::process::exit(code);
}
