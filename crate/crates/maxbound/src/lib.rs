//! Parallel validation harness, presets, configuration and report formats
//! on top of `maxbound_core`.

pub mod config;
pub mod harness;
pub mod presets;
pub mod report;
pub mod suite;
