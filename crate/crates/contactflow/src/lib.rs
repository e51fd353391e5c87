//! Experiment harness for the contactflow laboratory: configuration, file
//! formats and the drivers behind the CLI subcommands.

pub mod config;
pub mod experiments;
pub mod io;
