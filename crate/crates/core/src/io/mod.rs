//! File formats: PGM rasters, delimited datasets and JSON reports.

pub mod delimited;
pub mod pgm;
pub mod report;

pub use delimited::{read_delimited, write_delimited, DelimitedOptions};
pub use pgm::{read_pgm, write_pgm, PgmVariant};
pub use report::{sha256_hex, write_report, ReportDocument};
