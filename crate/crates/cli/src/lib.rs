//! Scenario-file parsing and report rendering for the `kaehlerlab` binary.

pub mod report;
pub mod scenario;
