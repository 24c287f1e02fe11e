use std::process::ExitCode;

use clap::Parser;

fn main() -> ExitCode {
    let cli = omcav_cli::args::Cli::parse();
    match omcav_cli::run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
