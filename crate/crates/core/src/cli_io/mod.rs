//! File formats, exit codes and self-test suites behind the command-line tool.

mod result_file;
mod selftest;
mod spec_file;
mod table;

pub use result_file::{ResultFile, TOOL_NAME, TOOL_VERSION};
pub use selftest::{run_selftest, SuiteReport};
pub use spec_file::SpecFile;
pub use table::{read_sweep_csv, write_sweep_csv, SWEEP_COLUMNS};

use crate::error::Error;

pub const EXIT_OTHER: i32 = 1;
pub const EXIT_PARSE: i32 = 2;
pub const EXIT_INVALID_SPEC: i32 = 3;
pub const EXIT_GEOMETRY: i32 = 4;
pub const EXIT_CONVERGENCE: i32 = 5;
pub const EXIT_VERDICT: i32 = 6;

/// Process exit code for a failed command.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Parse(_) => EXIT_PARSE,
        Error::InvalidSpec { .. } => EXIT_INVALID_SPEC,
        Error::GeometryNotVerified { .. } => EXIT_GEOMETRY,
        Error::MaxItersExceeded { .. } | Error::DegenerateCollapse { .. } => EXIT_CONVERGENCE,
        Error::Domain(_) | Error::Dimension(_) | Error::Io(_) => EXIT_OTHER,
    }
}
