// `!(x > 0.0)` is used on purpose so that NaN is rejected as well.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod args;
mod commands;
mod error;
mod output;

use std::process::ExitCode;

use clap::Parser;

use args::{Cli, Command};
use error::CliError;
use output::{default_manifest_path, render, Manifest, Output};

/// Parse `argv` (program name first) and execute; returns the exit code.
fn execute(argv: Vec<String>) -> Result<i32, CliError> {
    let cli = match Cli::try_parse_from(&argv) {
        Ok(c) => c,
        Err(e) => {
            let code = e.exit_code();
            e.print()?;
            return Ok(code);
        }
    };
    if let Command::Rerun { from } = &cli.command {
        let m = Manifest::read(from)?;
        let mut replay = vec![argv[0].clone()];
        replay.extend(m.flags);
        // A new output location overrides the recorded one.
        if let Some(out) = &cli.output {
            replay.push("--output".into());
            replay.push(out.display().to_string());
        }
        if let Some(man) = &cli.manifest {
            replay.push("--manifest".into());
            replay.push(man.display().to_string());
        }
        return execute(replay);
    }
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Usage(format!("thread pool: {e}")))?;
    }
    let out = commands::run(&cli.command)?;
    let text = render(&out, cli.format)?;
    match &cli.output {
        Some(path) => std::fs::write(path, &text)?,
        None => print!("{text}"),
    }
    let manifest_path = cli
        .manifest
        .clone()
        .or_else(|| cli.output.as_deref().map(default_manifest_path));
    if let Some(path) = manifest_path {
        let flags = strip_output_flags(&argv[1..]);
        let seed = commands::seed_of(&cli.command);
        Manifest::new(commands::name_of(&cli.command).into(), flags, seed).write(&path)?;
    }
    Ok(match out {
        Output::Report {
            pass: Some(false), ..
        } => 1,
        _ => 0,
    })
}

/// Drop `--output`/`--manifest` so a replay does not overwrite the original.
fn strip_output_flags(args: &[String]) -> Vec<String> {
    let mut out = Vec::new();
    let mut skip = false;
    for a in args {
        if skip {
            skip = false;
        } else if a == "--output" || a == "--manifest" {
            skip = true;
        } else if !(a.starts_with("--output=") || a.starts_with("--manifest=")) {
            out.push(a.clone());
        }
    }
    out
}

fn main() -> ExitCode {
    match execute(std::env::args().collect()) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
