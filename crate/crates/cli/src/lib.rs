//! The `hnd` command line: argument definitions and command runners.

pub mod args;
mod commands;
mod output;

use std::ffi::OsString;

use clap::Parser;

pub use args::Cli;
pub use commands::run;

/// Flag combinations the parser cannot reject on its own.
#[derive(Debug)]
pub struct UsageError(pub String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

pub const EXIT_USAGE: u8 = 2;
pub const EXIT_DATA: u8 = 3;
pub const EXIT_NUMERIC: u8 = 4;

/// Process exit code for a failed command.
pub fn exit_code(err: &anyhow::Error) -> u8 {
    use hnd_core::Error;
    for cause in err.chain() {
        if cause.downcast_ref::<UsageError>().is_some() || cause.downcast_ref::<clap::Error>().is_some() {
            return EXIT_USAGE;
        }
        if let Some(e) = cause.downcast_ref::<Error>() {
            return match e {
                Error::InvalidArgument(_) | Error::Config(_) => EXIT_USAGE,
                Error::Numeric { .. } => EXIT_NUMERIC,
                Error::Format { .. } | Error::Checkpoint(_) | Error::Degenerate(_) | Error::Io(_) => {
                    EXIT_DATA
                }
            };
        }
        if cause.downcast_ref::<std::io::Error>().is_some()
            || cause.downcast_ref::<serde_json::Error>().is_some()
        {
            return EXIT_DATA;
        }
    }
    1
}

/// Parses `args` (program name first) and runs the command.
pub fn run_args<I, T>(args: I) -> anyhow::Result<()>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    run(&Cli::try_parse_from(args)?)
}
