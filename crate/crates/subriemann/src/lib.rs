//! Fixtures, scenario runner and reports on top of `subriemann-core`.

#![allow(clippy::needless_range_loop, clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod error;
pub mod exec;
pub mod fixture;
pub mod parse;
pub mod report;
pub mod suites;

pub use config::{Scenario, ScenarioFile, Suite};
pub use error::{Error, Result};
pub use report::{Report, Row};
pub use suites::{emit_profile, run_scenario};
