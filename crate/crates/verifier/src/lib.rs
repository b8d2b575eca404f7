//! Verification suites, scenario files, reports, and the `infokahler`
//! command-line front end.

pub mod cli;
pub mod config;
pub mod demo;
pub mod report;
pub mod streams;
pub mod suites;

pub use config::{ConfigError, Scenario, Tolerances};
pub use demo::{run_demo_flow, DemoError, DemoRow};
pub use report::{Expectation, Record, Report};
pub use suites::{run_verify, SuiteSelector};
