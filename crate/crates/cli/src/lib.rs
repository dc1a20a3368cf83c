//! Spec ingestion, report emission and the seeded verification suite for
//! the `specasym` command.

pub mod error;
pub mod oracle;
pub mod random;
pub mod report;
pub mod run;
pub mod spec;
pub mod verify;

pub use error::CliError;
pub use report::ExperimentReport;
pub use spec::OperatorSpec;
