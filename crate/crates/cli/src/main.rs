use std::process::ExitCode;

use clap::Parser;
use ejs_core::session::summary_header;
use ejs_sim::error::{EXIT_ASSERTION, EXIT_CONFIG};
use ejs_sim::{run, Cli};

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(EXIT_CONFIG) } else { ExitCode::SUCCESS };
        }
    };
    match run(&cli) {
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
        Ok(outcome) => {
            println!("{}", summary_header());
            for c in &outcome.cells {
                println!(
                    "{}",
                    ejs_core::session::summary_row(&c.report, c.m, c.epsilon, &c.scheme, cli.seed)
                );
            }
            for w in &outcome.warnings {
                eprintln!("warning: {w}");
            }
            if outcome.failures.is_empty() {
                ExitCode::SUCCESS
            } else {
                for f in &outcome.failures {
                    eprintln!("error: assertion: {f}");
                }
                ExitCode::from(EXIT_ASSERTION)
            }
        }
    }
}
