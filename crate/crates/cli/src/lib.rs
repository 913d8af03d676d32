//! Configuration, parameter sweeps and tabular output for the `pshe` tool.

pub mod config;
pub mod emit;
pub mod sweep;
