//! Scenario files, sequence I/O and artifact writing for the `pslseq`
//! command-line tool.

pub mod error;
pub mod io;
pub mod runner;
pub mod scenario;

pub use error::{CliError, CliResult};
pub use io::{export_sequence, import_sequence};
pub use runner::{file_metrics, run_design, run_set, RunOutcome, SetOutcome};
pub use scenario::Scenario;
