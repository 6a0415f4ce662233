mod args;
mod commands;
mod manifest;
mod summary;

use std::process::ExitCode;

use clap::Parser;
use dogss_core::ErrorKind;

use args::{Cli, Command};

fn emit(kind: &str, code: u8, message: &str) -> ExitCode {
    eprintln!(
        "{}",
        serde_json::json!({ "error": kind, "code": code, "message": message })
    );
    ExitCode::from(code)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => match e.kind() {
            clap::error::ErrorKind::DisplayHelp
            | clap::error::ErrorKind::DisplayVersion
            | clap::error::ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand => e.exit(),
            _ => return emit("config", 2, e.to_string().trim_end()),
        },
    };

    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();

    let result = match &cli.command {
        Command::Compare(a) => commands::compare(a),
        Command::Simulate(a) => commands::simulate(a),
        Command::Noise(a) => commands::noise(a),
        Command::Mix(a) => commands::mix(a),
        Command::Split(a) => commands::split(a),
        Command::EvalSeg(a) => commands::eval_seg(a),
        Command::Report(a) => summary::report(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let (kind, code) = match e.kind() {
                ErrorKind::Config => ("config", 2),
                ErrorKind::Io => ("io", 3),
                ErrorKind::Degenerate => ("degenerate", 4),
            };
            emit(kind, code, &e.to_string())
        }
    }
}
