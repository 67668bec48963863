//! Verification suites over the `fockops-core` operators.

pub mod options;
pub mod report;
pub mod suites;

pub use options::{Format, Options, Suite};
pub use report::{CheckReport, Outcome, PassMode};
pub use suites::{jobs_for, run_suite};
