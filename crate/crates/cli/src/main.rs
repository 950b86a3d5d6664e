use std::process::ExitCode;

use clap::Parser;
use drawstring::error::{EXIT_CHECKS_FAILED, EXIT_PASSED};
use drawstring::{run, Flags};

fn main() -> ExitCode {
    let flags = Flags::parse();
    let config = match flags.into_config() {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(e.exit_code());
        }
    };
    match run(&config) {
        Ok(outcome) => {
            for line in &outcome.summary {
                println!("{line}");
            }
            for file in &outcome.files {
                println!("wrote {}", file.display());
            }
            ExitCode::from(if outcome.passed { EXIT_PASSED } else { EXIT_CHECKS_FAILED })
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
