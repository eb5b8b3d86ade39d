//! Command-line front end: expression parsing, JSON definitions and the
//! subcommands of `lambda-forge`.

pub mod commands;
pub mod defs;
pub mod error;
pub mod expr;

pub use commands::{run, Cli, Report, Status};
pub use error::CliError;

/// Sizes the global thread pool. `None` reads `LAMBDAFORGE_THREADS`; zero
/// or an unset variable leaves the choice to rayon.
pub fn init_threads(requested: Option<usize>) -> Result<(), CliError> {
    let n = match requested {
        Some(n) => n,
        None => match std::env::var("LAMBDAFORGE_THREADS") {
            Ok(s) => s
                .trim()
                .parse()
                .map_err(|_| CliError::Input(format!("LAMBDAFORGE_THREADS=`{s}` is not a number")))?,
            Err(_) => 0,
        },
    };
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Input(e.to_string()))
}
