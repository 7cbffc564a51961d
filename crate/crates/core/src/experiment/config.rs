use std::fmt;

use serde::de::DeserializeOwned;
use thiserror::Error;

use crate::sampling::DistributionSpec;

/// One invalid field, addressed by its dotted path in the experiment document
/// (for example `los.AandE` or `arrivals.Ward.mean`).
#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct FieldError {
    pub path: String,
    pub message: String,
}

impl FieldError {
    pub fn new(path: impl Into<String>, message: impl Into<String>) -> Self {
        FieldError {
            path: path.into(),
            message: message.into(),
        }
    }
}

impl fmt::Display for FieldError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.path, self.message)
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConfigError {
    #[error("{}", join(.0))]
    Invalid(Vec<FieldError>),
}

fn join(errors: &[FieldError]) -> String {
    errors
        .iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join("; ")
}

impl ConfigError {
    pub fn single(path: impl Into<String>, message: impl Into<String>) -> Self {
        ConfigError::Invalid(vec![FieldError::new(path, message)])
    }

    pub fn errors(&self) -> &[FieldError] {
        match self {
            ConfigError::Invalid(e) => e,
        }
    }
}

/// Deserializes with the failing field's path attached to the error.
pub(crate) fn from_value_with_path<T: DeserializeOwned>(
    value: serde_json::Value,
) -> Result<T, ConfigError> {
    serde_path_to_error::deserialize(value).map_err(|e| {
        let path = e.path().to_string();
        let path = if path == "." { String::new() } else { path };
        ConfigError::single(path, e.into_inner().to_string())
    })
}

/// Accumulates field errors during validation.
#[derive(Debug, Default)]
pub(crate) struct Validator {
    errors: Vec<FieldError>,
}

impl Validator {
    pub fn push(&mut self, path: impl Into<String>, message: impl Into<String>) {
        self.errors.push(FieldError::new(path, message));
    }

    pub fn check(&mut self, ok: bool, path: &str, message: &str) {
        if !ok {
            self.push(path, message);
        }
    }

    pub fn finish(self) -> Result<(), ConfigError> {
        if self.errors.is_empty() {
            Ok(())
        } else {
            Err(ConfigError::Invalid(self.errors))
        }
    }

    /// A duration distribution: valid parameters, no negative draws.
    pub fn duration(&mut self, path: &str, spec: &DistributionSpec) {
        if let Err(e) = spec.validate() {
            self.push(format!("{path}.{}", e.field), e.message);
            return;
        }
        if matches!(spec, DistributionSpec::Discrete { .. }) {
            self.push(path, "a duration cannot use the discrete family");
        } else if spec.support_min() < 0.0 {
            self.push(path, "a duration cannot take negative values");
        }
    }

    /// An inter-arrival distribution: a duration with a strictly positive mean.
    pub fn inter_arrival(&mut self, path: &str, spec: &DistributionSpec) {
        let before = self.errors.len();
        self.duration(path, spec);
        if self.errors.len() == before && spec.mean() <= 0.0 {
            self.push(path, "inter-arrival times must have a positive mean");
        }
    }

    /// Shared run-control fields.
    pub fn run_control(
        &mut self,
        unit: &str,
        run_length: f64,
        warm_up: Option<f64>,
        audit_interval: f64,
        replications: u32,
    ) {
        let rl = format!("run_length_{unit}");
        let wu = format!("warm_up_{unit}");
        let ai = format!("audit_interval_{unit}");
        let rl_ok = run_length.is_finite() && run_length > 0.0;
        self.check(rl_ok, &rl, "must be a positive number");
        match warm_up {
            None => self.push(&wu, "required: set the warm-up period explicitly (0 for none)"),
            Some(w) if !(w.is_finite() && w >= 0.0) => self.push(&wu, "must be >= 0"),
            Some(w) if rl_ok && w >= run_length => {
                self.push(&wu, format!("must be shorter than {rl} ({run_length})"))
            }
            Some(_) => {}
        }
        self.check(
            audit_interval.is_finite() && audit_interval > 0.0,
            &ai,
            "must be a positive number",
        );
        self.check(replications >= 1, "replications", "must be at least 1");
    }
}
