use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{CommandFactory, Parser};
use twisthc_cli::{run, Cli, Command};

fn init_threads() -> Result<()> {
    let Ok(raw) = std::env::var("TWISTHC_THREADS") else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .with_context(|| format!("TWISTHC_THREADS={raw:?} is not a count"))?;
    rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Command::Homology { complex } = &cli.command {
        if complex.max_winding < 3 {
            Cli::command()
                .error(
                    clap::error::ErrorKind::ValueValidation,
                    format!("homology needs --max-winding >= 3, got {}", complex.max_winding),
                )
                .exit();
        }
    }
    let outcome = init_threads().and_then(|()| run(&cli));
    match outcome {
        Ok(report) => {
            print!("{}", report.render(cli.format));
            match &report.failure {
                Some(f) => {
                    eprintln!("error: {f}");
                    ExitCode::FAILURE
                }
                None if !report.ok => ExitCode::FAILURE,
                None => ExitCode::SUCCESS,
            }
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
