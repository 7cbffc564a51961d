use rand::distr::weighted::WeightedIndex;
use rand::Rng;
use rand_distr::{Distribution, Exp, LogNormal, Triangular, Uniform};
use serde::{Deserialize, Serialize};

use super::{LognormalParams, SpecError, Stream};

/// A sampling family and its parameters, as written in experiment files.
///
/// Time-valued parameters are in the owning model's time unit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "lowercase", deny_unknown_fields)]
pub enum DistributionSpec {
    Exponential { mean: f64 },
    /// Lognormal given by its arithmetic mean and standard deviation.
    Lognormal { mean: f64, sd: f64 },
    Deterministic { value: f64 },
    Discrete { labels: Vec<String>, p: Vec<f64> },
    Triangular { low: f64, mode: f64, high: f64 },
    Uniform { low: f64, high: f64 },
}

const PMF_TOLERANCE: f64 = 1e-9;

fn finite(field: &'static str, v: f64) -> Result<(), SpecError> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(SpecError::new(field, "must be a finite number"))
    }
}

impl DistributionSpec {
    pub fn exponential(mean: f64) -> Self {
        DistributionSpec::Exponential { mean }
    }

    pub fn lognormal(mean: f64, sd: f64) -> Self {
        DistributionSpec::Lognormal { mean, sd }
    }

    pub fn deterministic(value: f64) -> Self {
        DistributionSpec::Deterministic { value }
    }

    pub fn discrete<S: Into<String>>(pairs: impl IntoIterator<Item = (S, f64)>) -> Self {
        let (labels, p) = pairs.into_iter().map(|(l, p)| (l.into(), p)).unzip();
        DistributionSpec::Discrete { labels, p }
    }

    pub fn family(&self) -> &'static str {
        match self {
            DistributionSpec::Exponential { .. } => "exponential",
            DistributionSpec::Lognormal { .. } => "lognormal",
            DistributionSpec::Deterministic { .. } => "deterministic",
            DistributionSpec::Discrete { .. } => "discrete",
            DistributionSpec::Triangular { .. } => "triangular",
            DistributionSpec::Uniform { .. } => "uniform",
        }
    }

    pub fn validate(&self) -> Result<(), SpecError> {
        match *self {
            DistributionSpec::Exponential { mean } => {
                finite("mean", mean)?;
                if mean <= 0.0 {
                    return Err(SpecError::new("mean", "must be > 0"));
                }
            }
            DistributionSpec::Lognormal { mean, sd } => {
                finite("mean", mean)?;
                finite("sd", sd)?;
                LognormalParams::from_mean_sd(mean, sd)?;
            }
            DistributionSpec::Deterministic { value } => finite("value", value)?,
            DistributionSpec::Discrete {
                ref labels,
                ref p,
            } => {
                if labels.is_empty() {
                    return Err(SpecError::new("labels", "must not be empty"));
                }
                if labels.len() != p.len() {
                    return Err(SpecError::new("p", "must have one probability per label"));
                }
                for (i, l) in labels.iter().enumerate() {
                    if labels[..i].contains(l) {
                        return Err(SpecError::new("labels", format!("duplicate label {l:?}")));
                    }
                }
                if p.iter().any(|&x| !(x.is_finite() && x >= 0.0)) {
                    return Err(SpecError::new("p", "probabilities must be non-negative"));
                }
                let total: f64 = p.iter().sum();
                if (total - 1.0).abs() > PMF_TOLERANCE {
                    return Err(SpecError::new(
                        "p",
                        format!("probabilities must sum to 1 (got {total})"),
                    ));
                }
            }
            DistributionSpec::Triangular { low, mode, high } => {
                finite("low", low)?;
                finite("mode", mode)?;
                finite("high", high)?;
                if !(low <= mode && mode <= high) {
                    return Err(SpecError::new("mode", "requires low <= mode <= high"));
                }
            }
            DistributionSpec::Uniform { low, high } => {
                finite("low", low)?;
                finite("high", high)?;
                if low > high {
                    return Err(SpecError::new("high", "requires low <= high"));
                }
            }
        }
        Ok(())
    }

    /// Smallest value a draw can take.
    pub fn support_min(&self) -> f64 {
        match *self {
            DistributionSpec::Exponential { .. } | DistributionSpec::Lognormal { .. } => 0.0,
            DistributionSpec::Deterministic { value } => value,
            DistributionSpec::Discrete { .. } => 0.0,
            DistributionSpec::Triangular { low, .. } | DistributionSpec::Uniform { low, .. } => {
                low
            }
        }
    }

    /// Analytic mean. For discrete specs this is the mean category index.
    pub fn mean(&self) -> f64 {
        match *self {
            DistributionSpec::Exponential { mean } | DistributionSpec::Lognormal { mean, .. } => {
                mean
            }
            DistributionSpec::Deterministic { value } => value,
            DistributionSpec::Discrete { ref p, .. } => {
                p.iter().enumerate().map(|(i, &x)| i as f64 * x).sum()
            }
            DistributionSpec::Triangular { low, mode, high } => (low + mode + high) / 3.0,
            DistributionSpec::Uniform { low, high } => 0.5 * (low + high),
        }
    }

    /// Validates and compiles into a ready-to-draw sampler.
    pub fn sampler(&self) -> Result<Sampler, SpecError> {
        self.validate()?;
        let kind = match *self {
            DistributionSpec::Exponential { mean } => SamplerKind::Exponential(
                Exp::new(1.0 / mean).map_err(|e| SpecError::new("mean", e.to_string()))?,
            ),
            DistributionSpec::Lognormal { mean, sd } => {
                let p = LognormalParams::from_mean_sd(mean, sd)?;
                if p.sigma == 0.0 {
                    SamplerKind::Fixed(mean)
                } else {
                    SamplerKind::Lognormal(
                        LogNormal::new(p.mu, p.sigma)
                            .map_err(|e| SpecError::new("sd", e.to_string()))?,
                    )
                }
            }
            DistributionSpec::Deterministic { value } => SamplerKind::Fixed(value),
            DistributionSpec::Discrete { ref p, .. } => SamplerKind::Discrete(
                WeightedIndex::new(p).map_err(|e| SpecError::new("p", e.to_string()))?,
            ),
            DistributionSpec::Triangular { low, mode, high } => {
                if low == high {
                    SamplerKind::Fixed(low)
                } else {
                    SamplerKind::Triangular(
                        Triangular::new(low, high, mode)
                            .map_err(|e| SpecError::new("mode", e.to_string()))?,
                    )
                }
            }
            DistributionSpec::Uniform { low, high } => SamplerKind::Uniform(
                Uniform::new_inclusive(low, high)
                    .map_err(|e| SpecError::new("high", e.to_string()))?,
            ),
        };
        Ok(Sampler { kind })
    }
}

#[derive(Debug, Clone)]
enum SamplerKind {
    Exponential(Exp<f64>),
    Lognormal(LogNormal<f64>),
    Fixed(f64),
    Discrete(WeightedIndex<f64>),
    Triangular(Triangular<f64>),
    Uniform(Uniform<f64>),
}

/// A validated [`DistributionSpec`] ready to draw from a [`Stream`].
#[derive(Debug, Clone)]
pub struct Sampler {
    kind: SamplerKind,
}

impl Sampler {
    /// Draws one value. Discrete samplers return the drawn category index as
    /// a float; prefer [`Sampler::sample_index`] for those.
    pub fn sample(&self, stream: &mut Stream) -> f64 {
        match &self.kind {
            SamplerKind::Exponential(d) => d.sample(stream),
            SamplerKind::Lognormal(d) => d.sample(stream),
            SamplerKind::Fixed(v) => *v,
            SamplerKind::Discrete(d) => d.sample(stream) as f64,
            SamplerKind::Triangular(d) => d.sample(stream),
            SamplerKind::Uniform(d) => stream.sample(d),
        }
    }

    /// Draws a category index. Non-discrete samplers always return 0 without
    /// consuming randomness.
    pub fn sample_index(&self, stream: &mut Stream) -> usize {
        match &self.kind {
            SamplerKind::Discrete(d) => d.sample(stream),
            _ => 0,
        }
    }
}
