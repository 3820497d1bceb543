//! Experiment harness for the ISI universal-decoding library: configuration,
//! paired Monte Carlo error-rate estimation, exponent-gap sweeps, verification
//! suites, and reproducible CSV/JSON reports.

#![allow(clippy::needless_range_loop)] // indexed loops run over several arrays at once here

pub mod config;
pub mod error;
pub mod fixtures;
pub mod harness;
pub mod report;
pub mod verify;

pub use config::{ExperimentConfig, ResolvedRun, UniversalRule};
pub use error::SimError;
pub use harness::{
    exponent_sweep, run_experiment, run_trial, wilson_interval, DecoderStats, ExperimentResult,
    SweepPoint, SweepResult, TrialOutcome,
};
pub use report::{csv_string, json_string, render, JsonReport, OutputFormat, RowRecord};
