use std::fs;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::Parser;
use invmon_cli::commands::{render, run, Cli};

fn write(path: &std::path::Path, text: &str) -> Result<()> {
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn main_inner(cli: &Cli) -> Result<i32> {
    let outcome = run(cli)?;
    let json = render(&outcome.report);
    match &cli.common.out {
        Some(path) => write(path, &json)?,
        None => print!("{json}"),
    }
    if let (Some(path), Some(dot)) = (&cli.common.dot, &outcome.dot) {
        write(path, dot)?;
    }
    for (path, text) in &outcome.files {
        write(path, text)?;
    }
    Ok(outcome.status.exit_code())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match main_inner(&cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
