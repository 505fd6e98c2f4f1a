use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use suffstat::cli::{run, Cli};
use suffstat::Error;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let stdout = std::io::stdout();
    let mut lock = stdout.lock();
    let code = match run(&cli, &mut lock) {
        Ok(code) => code,
        Err(Error::OutputClosed) => return ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            2
        }
    };
    let _ = lock.flush();
    ExitCode::from(code as u8)
}
