//! The run pipeline shared by the command line and the HTTP service, so
//! both produce the same numbers for the same document.

use std::time::Instant;

use serde::{Deserialize, Serialize};
use wardsim::experiment::ExperimentRun;
use wardsim::reporting::{available_series, chart_series, ResultsTable, Series};
use wardsim::{run_replications, run_scenarios, Experiment, ExperimentError, ModelId, ScenarioSummary, SweepAxis};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioOutput {
    pub label: String,
    /// Sweep value of this scenario, absent for a single run.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub value: Option<f64>,
    pub summary: ScenarioSummary,
}

/// Everything a run reports, minus replication traces.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub model: ModelId,
    pub seed: u64,
    pub replications: u32,
    pub time_unit: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub sweep_param: Option<String>,
    pub scenarios: Vec<ScenarioOutput>,
    pub series: Vec<Series>,
}

impl RunReport {
    pub fn table(&self) -> ResultsTable {
        ResultsTable::from_summaries(self.scenarios.iter().map(|s| &s.summary))
            .expect("every run has at least one KPI and scenario")
    }
}

pub struct Execution {
    pub report: RunReport,
    pub runs: Vec<(String, ExperimentRun)>,
    pub elapsed_ms: f64,
}

/// Runs `exp` once, or once per value of `sweep`.
pub fn execute(exp: &Experiment, sweep: Option<&SweepAxis>) -> Result<Execution, ExperimentError> {
    let start = Instant::now();
    let settings = exp.settings();
    let (runs, values): (Vec<(String, ExperimentRun)>, Vec<Option<f64>>) = match sweep {
        None => {
            let run = run_replications(exp)?;
            (vec![(run.summary.label.clone(), run)], vec![None])
        }
        Some(axis) => {
            let table = run_scenarios(exp, axis)?;
            table
                .scenarios
                .into_iter()
                .map(|s| ((s.label, s.run), Some(s.value)))
                .unzip()
        }
    };
    let scenarios: Vec<ScenarioOutput> = runs
        .iter()
        .zip(&values)
        .map(|((label, run), value)| ScenarioOutput {
            label: label.clone(),
            value: *value,
            summary: run.summary.clone(),
        })
        .collect();
    let points: Vec<(f64, &ScenarioSummary)> = scenarios
        .iter()
        .enumerate()
        .map(|(i, s)| (s.value.unwrap_or(i as f64), &s.summary))
        .collect();
    let series = available_series(&points)
        .iter()
        .filter_map(|name| chart_series(&points, name).ok())
        .collect();
    let report = RunReport {
        model: exp.model_id(),
        seed: settings.seed,
        replications: settings.replications,
        time_unit: exp.model_id().time_unit().to_string(),
        sweep_param: sweep.map(|a| a.param.clone()),
        scenarios,
        series,
    };
    Ok(Execution {
        report,
        runs,
        elapsed_ms: start.elapsed().as_secs_f64() * 1000.0,
    })
}
