//! The `croissant-forge` command line: validate, inspect, records, health
//! and a loopback HTTP API for the editor.

pub mod args;
mod commands;
pub mod exit;
mod input;
pub mod serve;

pub use commands::run;
