//! Discrete-event simulation of hospital bed capacity.
//!
//! The crate provides an event-scheduling kernel ([`engine`]), common random
//! number sampling ([`sampling`]), the experiment and replication machinery
//! ([`experiment`]), two capacity-planning models ([`models::ccu`] and
//! [`models::stroke`]), result tables ([`reporting`]) and a built-in
//! verification suite ([`verify`]).

pub mod engine;
pub mod experiment;
pub mod models;
pub mod reporting;
pub mod sampling;
pub mod verify;

pub use experiment::{
    run_replications, run_scenarios, Experiment, ExperimentError, ExperimentRun, ModelId,
    ReplicationResult, ScenarioSummary, ScenarioTable, SweepAxis,
};
pub use sampling::DistributionSpec;

/// Library version, as published in build metadata.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
