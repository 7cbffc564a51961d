//! Simulation models built on the kernel.

pub mod call_centre;
pub mod ccu;
pub mod occupancy;
pub mod stroke;
