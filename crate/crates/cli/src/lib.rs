//! Command-line orchestration for the classical-field engine: run
//! configuration, chain scheduling, result tables.

pub mod checks;
pub mod config;
pub mod pipeline;
pub mod table;
