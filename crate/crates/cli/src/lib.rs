//! Command implementations and supporting plumbing for the `zdm` binary.

pub mod commands;
pub mod config;
pub mod report;
pub mod suites;
