//! Experiments: parameter sets kept apart from model logic, run over
//! independent replications and summarised as mean (sd).
//!
//! An [`Experiment`] is exactly what the JSON experiment document describes.
//! Running it spawns one set of streams per replication from
//! `(seed, replication)`, so runs are reproducible and scenarios that differ
//! in one parameter share every other random draw.

pub(crate) mod config;
mod results;

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Deserializer, Serialize};
use thiserror::Error;

use crate::models::ccu::{self, CcuExperiment};
use crate::models::stroke::{self, StrokeExperiment};

pub use config::{ConfigError, FieldError};
pub use results::{
    mean_sd, KpiSummary, KpiValue, ReplicationResult, ScenarioSummary, UnitOccupancy, UnitSummary,
};

/// Run control shared by every model, in the model's own time unit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RunSettings {
    pub run_length: f64,
    pub warm_up: f64,
    pub audit_interval: f64,
    pub replications: u32,
    pub seed: u64,
    pub trace: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelId {
    Ccu,
    Stroke,
}

impl ModelId {
    pub fn as_str(self) -> &'static str {
        match self {
            ModelId::Ccu => "ccu",
            ModelId::Stroke => "stroke",
        }
    }

    pub fn time_unit(self) -> &'static str {
        match self {
            ModelId::Ccu => "hours",
            ModelId::Stroke => "days",
        }
    }
}

impl fmt::Display for ModelId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ModelId {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "ccu" => Ok(ModelId::Ccu),
            "stroke" => Ok(ModelId::Stroke),
            other => Err(format!("unknown model {other:?} (expected ccu or stroke)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ExperimentError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("replication {rep} is out of range (experiment has {count})")]
    ReplicationOutOfRange { rep: u32, count: u32 },
    #[error("a sweep needs at least one value")]
    EmptySweep,
}

/// A complete, validated-on-demand parameter set for one model.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "model", rename_all = "lowercase")]
pub enum Experiment {
    Ccu(CcuExperiment),
    Stroke(StrokeExperiment),
}

impl<'de> Deserialize<'de> for Experiment {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let value = serde_json::Value::deserialize(d)?;
        Experiment::parse_value(value).map_err(serde::de::Error::custom)
    }
}

impl Experiment {
    /// Parses and validates a JSON experiment document.
    pub fn from_json(text: &str) -> Result<Self, ConfigError> {
        let value: serde_json::Value = serde_json::from_str(text).map_err(|e| {
            ConfigError::single("", format!("invalid JSON: {e}"))
        })?;
        let exp = Self::parse_value(value)?;
        exp.validate()?;
        Ok(exp)
    }

    /// Parses without validating field values.
    pub fn parse_value(value: serde_json::Value) -> Result<Self, ConfigError> {
        let serde_json::Value::Object(mut map) = value else {
            return Err(ConfigError::single("", "expected a JSON object"));
        };
        let model = match map.remove("model") {
            Some(serde_json::Value::String(s)) => s,
            Some(_) => return Err(ConfigError::single("model", "must be a string")),
            None => return Err(ConfigError::single("model", "required (ccu or stroke)")),
        };
        let model: ModelId = model
            .parse()
            .map_err(|e: String| ConfigError::single("model", e))?;
        let rest = serde_json::Value::Object(map);
        Ok(match model {
            ModelId::Ccu => Experiment::Ccu(config::from_value_with_path(rest)?),
            ModelId::Stroke => Experiment::Stroke(config::from_value_with_path(rest)?),
        })
    }

    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(self).expect("experiments always serialize")
    }

    pub fn to_value(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("experiments always serialize")
    }

    /// The shipped example document for `model` (illustrative parameters).
    pub fn example_json(model: ModelId) -> &'static str {
        match model {
            ModelId::Ccu => ccu::EXAMPLE_JSON,
            ModelId::Stroke => stroke::EXAMPLE_JSON,
        }
    }

    pub fn example(model: ModelId) -> Experiment {
        Experiment::from_json(Self::example_json(model)).expect("shipped example is valid")
    }

    pub fn model_id(&self) -> ModelId {
        match self {
            Experiment::Ccu(_) => ModelId::Ccu,
            Experiment::Stroke(_) => ModelId::Stroke,
        }
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        match self {
            Experiment::Ccu(e) => e.validate(),
            Experiment::Stroke(e) => e.validate(),
        }
    }

    pub fn settings(&self) -> RunSettings {
        match self {
            Experiment::Ccu(e) => e.settings(),
            Experiment::Stroke(e) => e.settings(),
        }
    }

    pub fn seed(&self) -> Option<u64> {
        match self {
            Experiment::Ccu(e) => e.seed,
            Experiment::Stroke(e) => e.seed,
        }
    }

    pub fn set_seed(&mut self, seed: u64) {
        match self {
            Experiment::Ccu(e) => e.seed = Some(seed),
            Experiment::Stroke(e) => e.seed = Some(seed),
        }
    }

    pub fn set_replications(&mut self, n: u32) {
        match self {
            Experiment::Ccu(e) => e.replications = n,
            Experiment::Stroke(e) => e.replications = n,
        }
    }

    pub fn set_run_length(&mut self, v: f64) {
        match self {
            Experiment::Ccu(e) => e.run_length_hours = v,
            Experiment::Stroke(e) => e.run_length_days = v,
        }
    }

    pub fn set_warm_up(&mut self, v: f64) {
        match self {
            Experiment::Ccu(e) => e.warm_up_hours = Some(v),
            Experiment::Stroke(e) => e.warm_up_days = Some(v),
        }
    }

    pub fn set_trace(&mut self, on: bool) {
        match self {
            Experiment::Ccu(e) => e.trace = on,
            Experiment::Stroke(e) => e.trace = on,
        }
    }

    /// Returns a copy with the numeric field at dotted `path` set to `value`,
    /// e.g. `n_beds`, `turnaround_hours` or `arrivals.Elective.mean`. The
    /// field must already exist in the document; the result is validated.
    pub fn with_param(&self, path: &str, value: f64) -> Result<Experiment, ConfigError> {
        let mut doc = self.to_value();
        let mut slot = &mut doc;
        for key in path.split('.') {
            slot = slot
                .get_mut(key)
                .filter(|_| key != "model")
                .ok_or_else(|| ConfigError::single(path, "no such parameter"))?;
        }
        if !slot.is_number() {
            return Err(ConfigError::single(path, "not a numeric parameter"));
        }
        *slot = json_number(value)
            .ok_or_else(|| ConfigError::single(path, "must be a finite number"))?;
        let exp = Experiment::parse_value(doc)?;
        exp.validate()?;
        Ok(exp)
    }

    /// Runs one replication; `rep` must be below the replication count.
    pub fn run_replication(&self, rep: u32) -> Result<ReplicationResult, ExperimentError> {
        self.validate()?;
        let count = self.settings().replications;
        if rep >= count {
            return Err(ExperimentError::ReplicationOutOfRange { rep, count });
        }
        Ok(self.run_unchecked(rep))
    }

    fn run_unchecked(&self, rep: u32) -> ReplicationResult {
        match self {
            Experiment::Ccu(e) => e.run_replication(rep),
            Experiment::Stroke(e) => e.run_replication(rep),
        }
    }

    /// Summarises results, adding delay curves for models that plan capacity
    /// from occupancy distributions.
    pub fn summarise(&self, label: &str, results: &[ReplicationResult]) -> ScenarioSummary {
        let mut summary = ScenarioSummary::from_results(label, results);
        if let Experiment::Stroke(e) = self {
            for u in &mut summary.units {
                if let Some(pmf) = &u.pmf {
                    let range = e.delay_capacities(&u.unit, pmf);
                    u.delay = pmf.delay_curve(range).ok();
                }
            }
        }
        summary
    }
}

/// Integers become JSON integers so integer fields (bed counts) accept them.
fn json_number(v: f64) -> Option<serde_json::Value> {
    if !v.is_finite() {
        return None;
    }
    if v.fract() == 0.0 && v.abs() < 9.0e15 {
        Some(serde_json::Value::from(v as i64))
    } else {
        serde_json::Number::from_f64(v).map(serde_json::Value::Number)
    }
}

/// All replications of one experiment plus their summary.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentRun {
    pub results: Vec<ReplicationResult>,
    pub summary: ScenarioSummary,
}

/// Runs every replication (in parallel) and summarises. Output is identical
/// to a serial run: results are ordered by replication index.
pub fn run_replications(exp: &Experiment) -> Result<ExperimentRun, ExperimentError> {
    run_labelled(exp, "base")
}

fn run_labelled(exp: &Experiment, label: &str) -> Result<ExperimentRun, ExperimentError> {
    exp.validate()?;
    let n = exp.settings().replications;
    let mut results: Vec<ReplicationResult> =
        (0..n).into_par_iter().map(|r| exp.run_unchecked(r)).collect();
    results.sort_by_key(|r| r.replication);
    let summary = exp.summarise(label, &results);
    Ok(ExperimentRun { results, summary })
}

/// A single-parameter sweep, e.g. `n_beds` over 23..=28.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepAxis {
    pub param: String,
    pub values: Vec<f64>,
}

impl SweepAxis {
    pub fn new(param: impl Into<String>, values: impl IntoIterator<Item = f64>) -> Self {
        SweepAxis {
            param: param.into(),
            values: values.into_iter().collect(),
        }
    }

    pub fn label(&self, value: f64) -> String {
        format!("{}={}", self.param, value)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScenarioRun {
    pub label: String,
    pub value: f64,
    pub run: ExperimentRun,
}

/// Scenario results keyed by label, in sweep order.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScenarioTable {
    pub param: String,
    pub scenarios: Vec<ScenarioRun>,
}

impl ScenarioTable {
    pub fn summaries(&self) -> Vec<&ScenarioSummary> {
        self.scenarios.iter().map(|s| &s.run.summary).collect()
    }

    pub fn get(&self, label: &str) -> Option<&ScenarioRun> {
        self.scenarios.iter().find(|s| s.label == label)
    }
}

/// Runs `base` once per sweep value. Every scenario reuses the same seed and
/// replication indices, so arrival-driven outputs match across scenarios.
pub fn run_scenarios(base: &Experiment, axis: &SweepAxis) -> Result<ScenarioTable, ExperimentError> {
    if axis.values.is_empty() {
        return Err(ExperimentError::EmptySweep);
    }
    base.validate()?;
    let experiments = axis
        .values
        .iter()
        .map(|&v| base.with_param(&axis.param, v).map(|e| (v, e)))
        .collect::<Result<Vec<_>, _>>()?;
    let scenarios = experiments
        .into_iter()
        .map(|(value, exp)| {
            let label = axis.label(value);
            run_labelled(&exp, &label).map(|run| ScenarioRun { label, value, run })
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(ScenarioTable {
        param: axis.param.clone(),
        scenarios,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn examples_round_trip_through_json() {
        for m in [ModelId::Ccu, ModelId::Stroke] {
            let e = Experiment::example(m);
            let again = Experiment::from_json(&e.to_json_pretty()).unwrap();
            assert_eq!(e, again);
            assert_eq!(e.model_id(), m);
        }
    }

    #[test]
    fn model_tag_required_and_checked() {
        assert!(Experiment::from_json("{}").is_err());
        let err = Experiment::from_json(r#"{"model":"xyz"}"#).unwrap_err();
        assert_eq!(err.errors()[0].path, "model");
    }

    #[test]
    fn parse_errors_carry_paths() {
        let doc = r#"{"model":"ccu","arrivals":{"AandE":{"family":"exponential","mean":"x"}}}"#;
        let err = Experiment::from_json(doc).unwrap_err();
        assert_eq!(err.errors()[0].path, "arrivals.AandE");
        let doc = r#"{"model":"ccu","n_beds":24,"bogus":1}"#;
        assert!(Experiment::from_json(doc).is_err());
        let doc = r#"{"model":"ccu","arrivals":{"Nowhere":{"family":"deterministic","value":1}}}"#;
        assert!(Experiment::from_json(doc).is_err());
    }

    #[test]
    fn warm_up_must_be_explicit() {
        let mut v: serde_json::Value = serde_json::from_str(ccu::EXAMPLE_JSON).unwrap();
        v.as_object_mut().unwrap().remove("warm_up_hours");
        let err = Experiment::from_json(&v.to_string()).unwrap_err();
        assert!(err.errors().iter().any(|e| e.path == "warm_up_hours"));
    }

    #[test]
    fn warm_up_not_before_run_length() {
        let mut e = Experiment::example(ModelId::Ccu);
        e.set_warm_up(8760.0);
        assert!(e.validate().is_err());
    }

    #[test]
    fn with_param_sets_integers_and_nested_fields() {
        let e = Experiment::example(ModelId::Ccu);
        let e23 = e.with_param("n_beds", 23.0).unwrap();
        match &e23 {
            Experiment::Ccu(c) => assert_eq!(c.n_beds, 23),
            _ => unreachable!(),
        }
        let e2 = e.with_param("arrivals.Elective.mean", 20.5).unwrap();
        assert_ne!(e2, e);
        assert!(e.with_param("n_beds", 23.5).is_err());
        assert!(e.with_param("n_beds", 0.0).is_err());
        assert!(e.with_param("nope", 1.0).is_err());
        assert!(e.with_param("arrivals", 1.0).is_err());
    }

    #[test]
    fn replication_index_bounds() {
        let e = Experiment::example(ModelId::Ccu);
        assert!(matches!(
            e.run_replication(5),
            Err(ExperimentError::ReplicationOutOfRange { .. })
        ));
    }

    #[test]
    fn empty_sweep_rejected() {
        let e = Experiment::example(ModelId::Ccu);
        assert_eq!(
            run_scenarios(&e, &SweepAxis::new("n_beds", [])),
            Err(ExperimentError::EmptySweep)
        );
    }
}
