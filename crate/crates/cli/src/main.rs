use clap::Parser;
use std::time::Instant;

use emcat_cli::cliargs::Cli;
use emcat_cli::commands::{self, CliError, Ctx};
use emcat_cli::workspace;
use emcat_core::DEFAULT_BUDGET;

fn main() {
    let cli = Cli::parse();
    let start = Instant::now();

    let budget = cli
        .budget
        .or_else(|| {
            std::env::var("EMCAT_BUDGET")
                .ok()
                .and_then(|v| v.parse().ok())
        })
        .unwrap_or(DEFAULT_BUDGET);

    let mut sources = Vec::new();
    for path in &cli.workspace {
        match std::fs::read_to_string(path) {
            Ok(text) => sources.push((path.display().to_string(), text)),
            Err(e) => {
                eprintln!("error: cannot read {}: {e}", path.display());
                std::process::exit(1);
            }
        }
    }
    let ws = match workspace::parse_workspace(&sources) {
        Ok(ws) => ws,
        Err(e) => {
            eprintln!("parse error: {e}");
            std::process::exit(1);
        }
    };

    let ctx = Ctx {
        ws,
        budget,
        battery_name: cli.battery.clone(),
        with_identities: cli.with_identities,
    };

    let echo = std::env::args().skip(1).collect::<Vec<_>>().join(" ");
    match commands::run(&ctx, &cli.cmd, &echo) {
        Ok(report) => {
            let timing = cli.timing.then(|| start.elapsed().as_millis());
            if cli.json {
                print!("{}", report.render_json(timing));
            } else {
                print!("{}", report.render_text(timing));
            }
        }
        Err(CliError::Budget(msg)) => {
            eprintln!("budget exceeded: {msg}");
            std::process::exit(2);
        }
        Err(CliError::Op(msg)) => {
            eprintln!("error: {msg}");
            std::process::exit(1);
        }
    }
}
