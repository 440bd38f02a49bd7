//! CLI plumbing, random streams, trial orchestration and output.

pub mod cli;
pub mod config;
pub mod output;
pub mod rng;
pub mod runner;
pub mod stats;
pub mod verify;

pub use output::{Format, RecordWriter};
pub use rng::{domain_of, rng_stream, Domain};
pub use runner::Runner;
pub use stats::{CompensatedSum, MeanSummary, Proportion, Survival, Welford};
