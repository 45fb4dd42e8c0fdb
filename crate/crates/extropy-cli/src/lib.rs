//! Library side of the `extropy` command-line tool: CSV dataset parsing,
//! vendored fixtures, and report serialization. The binary in `main.rs`
//! wires these to the estimators in `extropy-core`.

pub mod dataset;
pub mod fixtures;
pub mod report;

pub use dataset::{parse_dataset, parse_dataset_bytes, Dataset, ParseError};
pub use fixtures::{fixture_info, load_fixture, FixtureError, FixtureInfo, FIXTURES};
pub use report::{experiment_csv, table_csv, write_atomic, ReportDocument};
