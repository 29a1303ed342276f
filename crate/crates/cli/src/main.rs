use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use epw_cli::{error_payload, run_with_pool, Cli};

fn main() -> ExitCode {
    let argv: Vec<String> = std::env::args().collect();
    let cli = Cli::parse();
    let out = match run_with_pool(&cli) {
        Ok(out) => out,
        Err(e) => {
            eprint!("{}", error_payload(&e, &argv));
            return ExitCode::from(2);
        }
    };
    let written = match &cli.out {
        Some(path) => std::fs::write(path, &out.body),
        None => std::io::stdout().write_all(out.body.as_bytes()),
    };
    if let Err(e) = written {
        eprint!("{}", error_payload(&e.into(), &argv));
        return ExitCode::from(2);
    }
    if out.success {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}
