use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use stabpairs_cli::{run, Cli};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (text, code) = run(&cli);
    match &cli.run.output {
        Some(path) => {
            if let Err(e) = std::fs::write(path, &text) {
                eprintln!("{}: {e}", path.display());
                return ExitCode::from(2);
            }
        }
        None => {
            let _ = std::io::stdout().write_all(text.as_bytes());
        }
    }
    ExitCode::from(code as u8)
}
