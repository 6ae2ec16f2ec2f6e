//! Scenario runner, report writers and the acceptance suite for `qbrown`.

pub mod acceptance;
pub mod config;
pub mod error;
pub mod report;
pub mod scenario;

pub use config::{load_config, parse_config, Scenario, ScenarioConfig};
pub use error::{ConfigIssue, Error, Result};
pub use report::RunManifest;
pub use scenario::{run_scenario, scales, RunReport};
