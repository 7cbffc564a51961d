use serde::{Deserialize, Serialize};

use crate::models::occupancy::{DelayCurve, OccupancyAudit, OccupancyPmf};

/// A named scalar output of one replication.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KpiValue {
    pub name: String,
    pub value: f64,
}

impl KpiValue {
    pub fn new(name: impl Into<String>, value: f64) -> Self {
        KpiValue {
            name: name.into(),
            value,
        }
    }
}

/// Occupancy samples of one unit for one replication.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UnitOccupancy {
    pub unit: String,
    pub audit: OccupancyAudit,
}

/// Everything one replication produces. KPIs only reflect the collection
/// window after warm-up.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReplicationResult {
    pub replication: u32,
    pub kpis: Vec<KpiValue>,
    pub occupancy: Vec<UnitOccupancy>,
    /// Whole-run bookkeeping (including warm-up), used by invariant checks.
    pub run_counts: Vec<KpiValue>,
    /// Set when a KPI had no observations and was reported as zero.
    pub warnings: Vec<String>,
    pub events_fired: u64,
    pub trace_emitted: u64,
    #[serde(skip)]
    pub trace: Vec<String>,
}

impl ReplicationResult {
    pub fn kpi(&self, name: &str) -> Option<f64> {
        self.kpis.iter().find(|k| k.name == name).map(|k| k.value)
    }

    pub fn count(&self, name: &str) -> Option<f64> {
        self.run_counts
            .iter()
            .find(|k| k.name == name)
            .map(|k| k.value)
    }

    pub fn occupancy(&self, unit: &str) -> Option<&OccupancyAudit> {
        self.occupancy
            .iter()
            .find(|o| o.unit == unit)
            .map(|o| &o.audit)
    }
}

/// Cross-replication mean and sample standard deviation of one KPI.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KpiSummary {
    pub name: String,
    pub mean: f64,
    pub sd: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UnitSummary {
    pub unit: String,
    /// Occupancy pmf pooled over every replication's audit samples.
    pub pmf: Option<OccupancyPmf>,
    pub delay: Option<DelayCurve>,
}

/// Aggregate of a set of replications.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioSummary {
    pub label: String,
    pub replications: usize,
    /// With a single replication the sd column is reported as 0.
    pub single_replication: bool,
    pub kpis: Vec<KpiSummary>,
    pub units: Vec<UnitSummary>,
    pub warnings: Vec<String>,
}

impl ScenarioSummary {
    /// Summarises `results`, which must share a KPI layout. Results are
    /// sorted by replication index first, so input order never matters.
    pub fn from_results(label: impl Into<String>, results: &[ReplicationResult]) -> Self {
        let mut sorted: Vec<&ReplicationResult> = results.iter().collect();
        sorted.sort_by_key(|r| r.replication);

        let names: Vec<String> = sorted
            .first()
            .map(|r| r.kpis.iter().map(|k| k.name.clone()).collect())
            .unwrap_or_default();
        let kpis = names
            .into_iter()
            .map(|name| {
                let values: Vec<f64> = sorted.iter().filter_map(|r| r.kpi(&name)).collect();
                let (mean, sd) = mean_sd(&values);
                KpiSummary { name, mean, sd }
            })
            .collect();

        let unit_names: Vec<String> = sorted
            .first()
            .map(|r| r.occupancy.iter().map(|o| o.unit.clone()).collect())
            .unwrap_or_default();
        let units = unit_names
            .into_iter()
            .map(|unit| {
                let mut pooled = OccupancyAudit::default();
                for r in &sorted {
                    if let Some(a) = r.occupancy(&unit) {
                        pooled.merge(a);
                    }
                }
                UnitSummary {
                    unit,
                    pmf: pooled.pmf().ok(),
                    delay: None,
                }
            })
            .collect();

        let mut warnings: Vec<String> = Vec::new();
        for r in &sorted {
            for w in &r.warnings {
                if !warnings.contains(w) {
                    warnings.push(w.clone());
                }
            }
        }
        if sorted.len() == 1 {
            warnings.push("single replication: standard deviations reported as 0".into());
        }

        ScenarioSummary {
            label: label.into(),
            replications: sorted.len(),
            single_replication: sorted.len() == 1,
            kpis,
            units,
            warnings,
        }
    }

    pub fn kpi(&self, name: &str) -> Option<&KpiSummary> {
        self.kpis.iter().find(|k| k.name == name)
    }

    pub fn unit(&self, name: &str) -> Option<&UnitSummary> {
        self.units.iter().find(|u| u.unit == name)
    }
}

/// Mean and sample (n − 1) standard deviation. `sd` is 0 for fewer than two
/// values; both are 0 for an empty slice.
pub fn mean_sd(values: &[f64]) -> (f64, f64) {
    let n = values.len();
    if n == 0 {
        return (0.0, 0.0);
    }
    // Identical values: report them exactly rather than a rounded sum.
    if values.iter().all(|v| *v == values[0]) {
        return (values[0], 0.0);
    }
    let mean = values.iter().sum::<f64>() / n as f64;
    let ss: f64 = values.iter().map(|v| (v - mean).powi(2)).sum();
    (mean, (ss / (n - 1) as f64).sqrt())
}
