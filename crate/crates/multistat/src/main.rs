use std::process::ExitCode;

use clap::Parser;

use multistat::cli::{run, Cli};
use multistat::io::write_text;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let quiet = cli.quiet();
    let out = cli.out().map(|p| p.to_path_buf());
    match run(&cli) {
        Ok(outcome) => {
            if !quiet {
                print!("{}", outcome.summary);
            }
            if let Some(path) = out {
                if let Err(e) = write_text(&path, &outcome.report.to_json()) {
                    eprintln!("error: {e}");
                    return ExitCode::from(e.code as u8);
                }
            }
            if let Some(note) = &outcome.message {
                eprintln!("{note}");
            }
            ExitCode::from(outcome.code as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code as u8)
        }
    }
}
