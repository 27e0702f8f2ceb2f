//! Command-line front end: presentation file parser, subcommands and JSON
//! reports.

pub mod commands;
pub mod parse;
pub mod report;

pub use commands::{run, Cli, EXIT_CHECK_FAILED, EXIT_INPUT, EXIT_OK};
pub use parse::{parse_file, parse_presentation, ParseError, PresentationFile, Warning};
pub use report::Report;
