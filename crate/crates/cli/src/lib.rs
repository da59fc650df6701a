//! Library surface of the evaluation harness: configuration, execution, and
//! report serialisation. The binary in `main.rs` is a thin wrapper over this.

pub mod config;
pub mod report;
pub mod runner;
