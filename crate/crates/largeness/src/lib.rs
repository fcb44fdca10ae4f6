//! File formats, run records and the `largeness` command line on top of
//! `largeness-core`.

pub mod cli;
pub mod commands;
pub mod error;
pub mod fuzz;
pub mod io;
pub mod parallel;

pub use cli::run;
pub use commands::{execute, Invocation, Outcome, Status};
pub use error::{CliError, CliResult};
