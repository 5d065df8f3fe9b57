//! File formats, schemas, and command implementations behind the `platoon`
//! binary. The numerical work lives in `platoon-core`; this crate only
//! moves data in and out of it.

pub mod canonical;
pub mod coeffs;
pub mod commands;
pub mod error;
pub mod ingest;
pub mod report;
pub mod scenario;
pub mod schema;

pub use error::{CliError, ExitCode};
