mod args;
mod commands;

use args::{Cli, Command};
use clap::error::ErrorKind;
use clap::Parser;
use std::process::ExitCode;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => return fail(&e.to_string()),
    };
    if let Some(j) = cli.jobs {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(j).build_global() {
            return fail(&e.to_string());
        }
    }
    let outcome = match &cli.command {
        Command::Construct(a) => commands::construct(a),
        Command::Verify(a) => commands::verify(a),
        Command::Count(a) => commands::count(a),
        Command::Invariants(a) => commands::invariants(a),
        Command::Export(a) => commands::export(a),
        Command::Selftest(a) => commands::selftest(a),
    };
    let outcome = match outcome {
        Ok(o) => o,
        Err(e) => return fail(&format!("{e:#}")),
    };
    let text = outcome.render();
    let written = match &cli.out {
        Some(path) => std::fs::write(path, text.as_bytes()).map_err(|e| e.to_string()),
        None => {
            print!("{text}");
            Ok(())
        }
    };
    if let Err(e) = written {
        return fail(&e);
    }
    if outcome.negative {
        ExitCode::from(2)
    } else {
        ExitCode::SUCCESS
    }
}

/// Input or computation error: JSON diagnostic on stderr, exit 1.
fn fail(msg: &str) -> ExitCode {
    let doc = serde_json::json!({ "schema": "skewcode.error/1", "error": msg.trim_end() });
    eprintln!("{doc}");
    ExitCode::from(1)
}
