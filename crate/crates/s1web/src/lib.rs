//! Verification suite, JSON report and figures for the `s1web-core` kernel.
//!
//! [`suite::run_suite`] executes every check for a [`config::SuiteConfig`]
//! and returns a [`report::VerificationReport`]; [`plot::emit_plot`] writes
//! the static figures. The `s1web` binary wraps both.

pub mod config;
pub mod plot;
pub mod report;
pub mod suite;

pub use config::{ConfigError, SuiteConfig};
pub use report::{CheckRecord, Status, VerificationReport};
pub use suite::run_suite;
