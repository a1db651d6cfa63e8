use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use routed_cli::{commands::EXIT_USAGE, run, tolerance, Cli};
use serde_json::Value;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let tol = match tolerance() {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_USAGE as u8);
        }
    };
    let outcome = run(&cli, tol);
    let mut out = std::io::stdout().lock();
    let text = match (&outcome.report, cli.human) {
        (Value::String(raw), _) => raw.clone(),
        (_, true) => outcome.human.clone(),
        (report, false) => format!(
            "{}\n",
            serde_json::to_string_pretty(report).expect("reports serialize")
        ),
    };
    if cli.human && outcome.report.get("error").is_some() {
        eprint!("{text}");
    } else {
        let _ = out.write_all(text.as_bytes());
    }
    ExitCode::from(outcome.code as u8)
}
