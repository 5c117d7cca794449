//! Library half of the `ridge-sdr` command: CSV ingestion, result documents
//! and JSON output.

pub mod analyze;
pub mod dataset_io;
pub mod error;
pub mod json;
pub mod study;

pub use analyze::{run_analyze, AnalysisConfig, MethodChoice, ResultDocument};
pub use dataset_io::{read_dataset, write_dataset};
pub use error::{CliError, CliResult};
pub use study::{run_converge, run_sample};
