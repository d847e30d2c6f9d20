//! Command-line front end for the `kairos` library.
//!
//! Every subcommand reads inputs, runs one analysis stage, and writes its
//! results into an output directory as JSON and CSV artifacts plus a
//! `manifest.json` describing what ran. Stages are composable: each one
//! consumes the files earlier stages produced, so `kairos run` is nothing
//! more than the stages executed in order.
//!
//! Determinism contract: apart from the timestamp inside `manifest.json`,
//! every byte written is a pure function of the inputs and the effective
//! configuration. Floats are rounded to nine significant digits before
//! serialization so that re-runs compare byte-for-byte.

pub mod artifacts;
pub mod commands;
pub mod config;
