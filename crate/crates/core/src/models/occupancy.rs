//! Audited occupancy distributions and probability of delay.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::engine::SimTime;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OccupancyError {
    #[error("no audit samples fall inside the collection window")]
    EmptyWindow,
    #[error("capacity must be at least 1")]
    ZeroCapacity,
}

/// Periodic occupancy counts for one unit, restricted to the collection
/// window `[window_start, ∞)`.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct OccupancyAudit {
    window_start: f64,
    counts: BTreeMap<u32, u64>,
    samples: u64,
    sum: f64,
}

impl OccupancyAudit {
    pub fn new(window_start: SimTime) -> Self {
        OccupancyAudit {
            window_start: window_start.value(),
            ..Default::default()
        }
    }

    /// Records a sample; samples before the window start are ignored.
    pub fn record(&mut self, time: SimTime, occupancy: u32) {
        if time.value() < self.window_start {
            return;
        }
        *self.counts.entry(occupancy).or_default() += 1;
        self.samples += 1;
        self.sum += f64::from(occupancy);
    }

    pub fn samples(&self) -> u64 {
        self.samples
    }

    pub fn counts(&self) -> &BTreeMap<u32, u64> {
        &self.counts
    }

    /// Time-average occupancy over the window; `None` when no samples exist.
    pub fn mean(&self) -> Option<f64> {
        (self.samples > 0).then(|| self.sum / self.samples as f64)
    }

    /// `pmf[k]` is the fraction of in-window samples with occupancy exactly `k`.
    pub fn pmf(&self) -> Result<OccupancyPmf, OccupancyError> {
        OccupancyPmf::from_counts(&self.counts)
    }

    /// Adds another audit's samples (pooling across replications).
    pub fn merge(&mut self, other: &OccupancyAudit) {
        for (&k, &c) in &other.counts {
            *self.counts.entry(k).or_default() += c;
        }
        self.samples += other.samples;
        self.sum += other.sum;
    }
}

/// Probability mass over occupancy levels `0..=max`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OccupancyPmf {
    probabilities: Vec<f64>,
}

impl OccupancyPmf {
    pub fn from_counts(counts: &BTreeMap<u32, u64>) -> Result<Self, OccupancyError> {
        let total: u64 = counts.values().sum();
        if total == 0 {
            return Err(OccupancyError::EmptyWindow);
        }
        let max = *counts.keys().next_back().expect("non-empty") as usize;
        let mut probabilities = vec![0.0; max + 1];
        for (&k, &c) in counts {
            probabilities[k as usize] = c as f64 / total as f64;
        }
        Ok(OccupancyPmf { probabilities })
    }

    /// Builds a pmf from explicit probabilities (used for analytic references).
    pub fn from_probabilities(probabilities: Vec<f64>) -> Self {
        OccupancyPmf { probabilities }
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.probabilities
    }

    pub fn get(&self, level: usize) -> f64 {
        self.probabilities.get(level).copied().unwrap_or(0.0)
    }

    pub fn max_level(&self) -> usize {
        self.probabilities.len().saturating_sub(1)
    }

    pub fn mean(&self) -> f64 {
        self.probabilities
            .iter()
            .enumerate()
            .map(|(k, p)| k as f64 * p)
            .sum()
    }

    /// Fraction of time occupancy would meet or exceed `capacity` beds. With
    /// Poisson arrivals this is the chance an arrival finds all beds full.
    pub fn prob_delay(&self, capacity: u32) -> Result<f64, OccupancyError> {
        if capacity == 0 {
            return Err(OccupancyError::ZeroCapacity);
        }
        let tail: f64 = self
            .probabilities
            .iter()
            .skip(capacity as usize)
            .fold(0.0, |acc, p| acc + p);
        Ok(tail.clamp(0.0, 1.0))
    }

    pub fn delay_curve(
        &self,
        capacities: impl IntoIterator<Item = u32>,
    ) -> Result<DelayCurve, OccupancyError> {
        let points = capacities
            .into_iter()
            .map(|n| self.prob_delay(n).map(|p| (n, p)))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(DelayCurve { points })
    }

    /// Total-variation distance to another pmf.
    pub fn total_variation(&self, other: &OccupancyPmf) -> f64 {
        let n = self.probabilities.len().max(other.probabilities.len());
        0.5 * (0..n)
            .map(|k| (self.get(k) - other.get(k)).abs())
            .sum::<f64>()
    }
}

/// Probability of delay per candidate capacity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DelayCurve {
    pub points: Vec<(u32, f64)>,
}

impl DelayCurve {
    pub fn get(&self, capacity: u32) -> Option<f64> {
        self.points
            .iter()
            .find(|(n, _)| *n == capacity)
            .map(|&(_, p)| p)
    }
}
