use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;
use condineq::cli::{run, Cli};
use condineq::error::{EXIT_FAILED, EXIT_INPUT, EXIT_OK};
use condineq::io::write_atomic;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(EXIT_INPUT),
            };
        }
    };
    let outcome = run(&cli).and_then(|o| {
        match &cli.out {
            Some(path) => write_atomic(path, &o.text)?,
            None => print!("{}", o.text),
        }
        Ok(o)
    });
    match outcome {
        Ok(o) => ExitCode::from(if o.success { EXIT_OK } else { EXIT_FAILED }),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
