use std::io::Write;
use std::process::ExitCode;

use clap::Parser;

fn main() -> ExitCode {
    let cli = pslab::Cli::parse();
    match pslab::run(&cli) {
        Ok((paths, csv)) => {
            let mut out = std::io::stdout().lock();
            if out.write_all(&csv).is_err() {
                return ExitCode::FAILURE;
            }
            eprintln!("wrote {} and {}", paths.results.display(), paths.manifest.display());
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
