use clap::Parser;
use fncomp_cli::error::CliError;
use fncomp_cli::{execute, Cli};

fn main() {
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(out) => print!("{out}"),
        Err(CliError::CheckFailed(report)) => {
            print!("{report}");
            eprintln!("fncomp: at least one property failed");
            std::process::exit(1);
        }
        Err(e) => {
            eprintln!("fncomp: {e}");
            std::process::exit(e.exit_code());
        }
    }
}
