//! Distribution sampling on common random number streams.
//!
//! Every sampling activity in a model draws from its own [`Stream`], derived
//! deterministically from the master seed, the replication index and a fixed
//! slot number. Changing one activity (say, how many beds exist) then never
//! shifts the draws seen by any other activity.

mod distribution;
mod lognormal;
mod streams;

use std::fmt;

use thiserror::Error;

pub use distribution::{DistributionSpec, Sampler};
pub use lognormal::LognormalParams;
pub use streams::{spawn_streams, Stream, StreamAllocator, StreamRegistry};

/// A rejected distribution parameter.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpecError {
    pub field: &'static str,
    pub message: String,
}

impl SpecError {
    pub fn new(field: &'static str, message: impl Into<String>) -> Self {
        SpecError {
            field,
            message: message.into(),
        }
    }
}

impl fmt::Display for SpecError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.field, self.message)
    }
}

impl std::error::Error for SpecError {}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SamplingError {
    #[error("at least one stream must be requested")]
    NoStreams,
}
