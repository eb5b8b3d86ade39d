use std::process::ExitCode;

use clap::Parser;
use lambda_forge_cli::{init_threads, run, Cli, Status};

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(e) = init_threads(cli.threads) {
        eprintln!("error: {e}");
        return ExitCode::from(2);
    }
    match run(&cli.command) {
        Ok(report) => {
            if cli.json {
                match serde_json::to_string_pretty(&report.json) {
                    Ok(s) => println!("{s}"),
                    Err(e) => {
                        eprintln!("error: {e}");
                        return ExitCode::from(2);
                    }
                }
            } else {
                print!("{}", report.text);
            }
            match report.status {
                Status::Ok => ExitCode::SUCCESS,
                Status::Failed => ExitCode::from(1),
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
