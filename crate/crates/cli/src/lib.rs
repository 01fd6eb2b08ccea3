//! Scenario runner for the `shockdual` command line tool.

pub mod commands;
pub mod config;
pub mod error;
pub mod io;
pub mod preset;
