use serde::{Deserialize, Serialize};

use super::ReportError;
use crate::experiment::ScenarioSummary;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeriesPoint {
    pub x: f64,
    pub y: f64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub err: Option<f64>,
}

/// A named `(x, y[, err])` data series ready for plotting.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Series {
    pub name: String,
    pub x_label: String,
    pub y_label: String,
    pub points: Vec<SeriesPoint>,
}

/// Names accepted by [`chart_series`] for these scenarios.
pub fn available_series(scenarios: &[(f64, &ScenarioSummary)]) -> Vec<String> {
    let Some((_, first)) = scenarios.first() else {
        return Vec::new();
    };
    let mut names: Vec<String> = first.kpis.iter().map(|k| format!("kpi/{}", k.name)).collect();
    for u in &first.units {
        if u.pmf.is_some() {
            names.push(format!("occupancy/{}", u.unit));
        }
        if u.delay.is_some() {
            names.push(format!("delay/{}", u.unit));
        }
    }
    names
}

/// Builds one series from scenario summaries keyed by their x value.
///
/// * `kpi/<name>`: one point per scenario, with the sd as the error.
/// * `occupancy/<unit>`: pooled occupancy pmf as bars.
/// * `delay/<unit>`: probability of delay against capacity.
///
/// Unit series read the first scenario unless the name ends in
/// `@<scenario label>`.
pub fn chart_series(
    scenarios: &[(f64, &ScenarioSummary)],
    name: &str,
) -> Result<Series, ReportError> {
    let unknown = || ReportError::UnknownSeries(name.to_string());
    let (kind, rest) = name.split_once('/').ok_or_else(unknown)?;
    if kind == "kpi" {
        let mut points = Vec::with_capacity(scenarios.len());
        for (x, s) in scenarios {
            let k = s.kpi(rest).ok_or_else(unknown)?;
            points.push(SeriesPoint {
                x: *x,
                y: k.mean,
                err: Some(k.sd),
            });
        }
        if points.is_empty() {
            return Err(unknown());
        }
        return Ok(Series {
            name: name.to_string(),
            x_label: "scenario".into(),
            y_label: rest.to_string(),
            points,
        });
    }

    let (unit, scenario) = match rest.split_once('@') {
        Some((u, label)) => (
            u,
            scenarios
                .iter()
                .find(|(_, s)| s.label == label)
                .map(|(_, s)| *s),
        ),
        None => (rest, scenarios.first().map(|(_, s)| *s)),
    };
    let unit = scenario.and_then(|s| s.unit(unit)).ok_or_else(unknown)?;
    match kind {
        "occupancy" => {
            let pmf = unit.pmf.as_ref().ok_or_else(unknown)?;
            Ok(Series {
                name: name.to_string(),
                x_label: "occupancy".into(),
                y_label: "probability".into(),
                points: pmf
                    .probabilities()
                    .iter()
                    .enumerate()
                    .map(|(k, &p)| SeriesPoint { x: k as f64, y: p, err: None })
                    .collect(),
            })
        }
        "delay" => {
            let curve = unit.delay.as_ref().ok_or_else(unknown)?;
            Ok(Series {
                name: name.to_string(),
                x_label: "capacity".into(),
                y_label: "p_delay".into(),
                points: curve
                    .points
                    .iter()
                    .map(|&(n, p)| SeriesPoint { x: f64::from(n), y: p, err: None })
                    .collect(),
            })
        }
        _ => Err(unknown()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiment::{KpiSummary, UnitSummary};
    use crate::models::occupancy::OccupancyPmf;

    fn summary(label: &str, cancelled: f64) -> ScenarioSummary {
        let pmf = OccupancyPmf::from_probabilities(vec![0.1, 0.2, 0.4, 0.3]);
        ScenarioSummary {
            label: label.into(),
            replications: 2,
            single_replication: false,
            kpis: vec![KpiSummary { name: "cancelled_electives".into(), mean: cancelled, sd: 1.5 }],
            units: vec![UnitSummary {
                unit: "ASU".into(),
                delay: Some(pmf.delay_curve(1..=5).unwrap()),
                pmf: Some(pmf),
            }],
            warnings: vec![],
        }
    }

    #[test]
    fn bed_sweep_series_has_one_point_per_scenario() {
        let sums: Vec<ScenarioSummary> =
            (23..=28).map(|n| summary(&format!("n_beds={n}"), 400.0 - 10.0 * n as f64)).collect();
        let input: Vec<(f64, &ScenarioSummary)> =
            sums.iter().zip(23..=28).map(|(s, n)| (n as f64, s)).collect();
        let s = chart_series(&input, "kpi/cancelled_electives").unwrap();
        assert_eq!(s.points.len(), 6);
        assert_eq!(s.points[0].x, 23.0);
        assert_eq!(s.points[5].err, Some(1.5));
    }

    #[test]
    fn occupancy_bars_sum_to_one_and_delay_is_non_increasing() {
        let s = summary("base", 1.0);
        let input = [(0.0, &s)];
        let occ = chart_series(&input, "occupancy/ASU").unwrap();
        assert!((occ.points.iter().map(|p| p.y).sum::<f64>() - 1.0).abs() < 1e-9);
        let delay = chart_series(&input, "delay/ASU@base").unwrap();
        for w in delay.points.windows(2) {
            assert!(w[0].x < w[1].x && w[1].y <= w[0].y);
        }
    }

    #[test]
    fn unknown_names_rejected() {
        let s = summary("base", 1.0);
        let input = [(0.0, &s)];
        for bad in ["kpi/nope", "occupancy/Rehab", "histogram/ASU", "delay/ASU@other", "kpi"] {
            assert_eq!(
                chart_series(&input, bad),
                Err(ReportError::UnknownSeries(bad.into()))
            );
        }
        assert_eq!(available_series(&input).len(), 3);
    }
}
