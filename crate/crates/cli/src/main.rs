use std::process::ExitCode;

use clap::Parser;
use hyperlab_cli::{run, Args};

fn main() -> ExitCode {
    let args = Args::parse();
    let code = match run(&args) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("hyperlab: {e}");
            e.exit_code()
        }
    };
    ExitCode::from(code as u8)
}
