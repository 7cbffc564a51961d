//! Command line and HTTP front ends for the `wardsim` library.

pub mod api;
pub mod cli;
pub mod report;
