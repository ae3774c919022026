//! `bohm-vortex`: canonicalization, integration, sections and the analysis
//! reports of the core library.
//!
//! Exit status: 0 on success, 1 on a usage or input error, 2 when `verify`
//! finds a failing check.

mod args;
mod commands;
mod manifest;
mod svg;

use std::process::ExitCode;

use anyhow::{bail, Result};
use clap::error::ErrorKind;
use clap::Parser;

use crate::args::Cli;
use crate::commands::Output;
use crate::manifest::RunManifest;

const USAGE_ERROR: u8 = 1;

fn dispatch(cli: Cli) -> Result<u8> {
    if let Some(threads) = cli.threads {
        if threads == 0 {
            bail!("--threads must be positive");
        }
        rayon::ThreadPoolBuilder::new().num_threads(threads).build_global()?;
    }
    let command = match (cli.from_manifest, cli.command) {
        (Some(_), Some(_)) => bail!("pass either a subcommand or --from-manifest, not both"),
        (Some(path), None) => RunManifest::load(&path)?.command,
        (None, Some(command)) => command,
        (None, None) => bail!("a subcommand is required (see --help)"),
    };
    let out = Output::new(cli.out)?;
    let status = commands::run(&command, &out)?;
    if let Some(dir) = out.dir() {
        RunManifest::new(&command).write(dir)?;
    }
    Ok(status)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(USAGE_ERROR),
            };
        }
    };
    match dispatch(cli) {
        Ok(status) => ExitCode::from(status),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(USAGE_ERROR)
        }
    }
}
