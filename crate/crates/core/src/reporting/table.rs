use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::ReportError;
use crate::experiment::ScenarioSummary;
use crate::models::occupancy::{DelayCurve, OccupancyPmf};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Cell {
    pub mean: f64,
    pub sd: f64,
}

/// KPI rows by scenario columns. A `None` cell is an explicitly missing value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultsTable {
    pub kpis: Vec<String>,
    pub scenarios: Vec<String>,
    pub cells: Vec<Vec<Option<Cell>>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TableFormat {
    Csv,
    Markdown,
}

/// Decimal places for a KPI mean in human-readable tables. Standard
/// deviations always get two.
pub fn mean_decimals(kpi: &str) -> usize {
    if kpi.contains("utilization") || kpi.contains("utilisation") {
        2
    } else {
        1
    }
}

/// `"mean (sd)"`, e.g. `390.6 (30.57)`.
pub fn format_cell(kpi: &str, cell: &Cell) -> String {
    format!("{:.*} ({:.2})", mean_decimals(kpi), cell.mean, cell.sd)
}

const MISSING: &str = "NA";

impl ResultsTable {
    /// Builds a table from scenario summaries; rows follow the first
    /// summary's KPI order, with KPIs only present later appended.
    pub fn from_summaries<'a>(
        summaries: impl IntoIterator<Item = &'a ScenarioSummary>,
    ) -> Result<Self, ReportError> {
        let summaries: Vec<&ScenarioSummary> = summaries.into_iter().collect();
        let mut kpis: Vec<String> = Vec::new();
        for s in &summaries {
            for k in &s.kpis {
                if !kpis.contains(&k.name) {
                    kpis.push(k.name.clone());
                }
            }
        }
        let table = ResultsTable {
            scenarios: summaries.iter().map(|s| s.label.clone()).collect(),
            cells: kpis
                .iter()
                .map(|name| {
                    summaries
                        .iter()
                        .map(|s| s.kpi(name).map(|k| Cell { mean: k.mean, sd: k.sd }))
                        .collect()
                })
                .collect(),
            kpis,
        };
        table.check()?;
        Ok(table)
    }

    fn check(&self) -> Result<(), ReportError> {
        if self.kpis.is_empty() || self.scenarios.is_empty() {
            return Err(ReportError::EmptyTable);
        }
        if self.cells.len() != self.kpis.len()
            || self.cells.iter().any(|r| r.len() != self.scenarios.len())
        {
            return Err(ReportError::NotRectangular);
        }
        Ok(())
    }

    pub fn cell(&self, kpi: &str, scenario: &str) -> Option<Cell> {
        let r = self.kpis.iter().position(|k| k == kpi)?;
        let c = self.scenarios.iter().position(|s| s == scenario)?;
        self.cells[r][c]
    }

    /// One KPI across all scenarios.
    pub fn row(&self, kpi: &str) -> Option<&[Option<Cell>]> {
        let r = self.kpis.iter().position(|k| k == kpi)?;
        Some(&self.cells[r])
    }

    /// Human-readable table with `mean (sd)` cells.
    pub fn render(&self, format: TableFormat) -> Result<String, ReportError> {
        self.check()?;
        let rows = self.kpis.iter().zip(&self.cells).map(|(kpi, cells)| {
            let rendered: Vec<String> = cells
                .iter()
                .map(|c| c.as_ref().map_or_else(|| MISSING.to_string(), |c| format_cell(kpi, c)))
                .collect();
            (kpi, rendered)
        });
        match format {
            TableFormat::Csv => {
                let mut w = csv::Writer::from_writer(Vec::new());
                let mut header = vec!["kpi".to_string()];
                header.extend(self.scenarios.iter().cloned());
                w.write_record(&header)?;
                for (kpi, cells) in rows {
                    let mut rec = vec![kpi.clone()];
                    rec.extend(cells);
                    w.write_record(&rec)?;
                }
                Ok(String::from_utf8(w.into_inner().map_err(|e| e.into_error())?)
                    .expect("csv output is UTF-8"))
            }
            TableFormat::Markdown => {
                let mut out = String::new();
                let _ = writeln!(out, "| KPI | {} |", self.scenarios.join(" | "));
                let _ = writeln!(
                    out,
                    "|---|{}",
                    "---:|".repeat(self.scenarios.len())
                );
                for (kpi, cells) in rows {
                    let _ = writeln!(out, "| {kpi} | {} |", cells.join(" | "));
                }
                Ok(out)
            }
        }
    }

    /// Full-precision long-format CSV: `kpi,scenario,mean,sd`. Missing cells
    /// have empty mean and sd fields.
    pub fn to_machine_csv(&self) -> Result<String, ReportError> {
        self.check()?;
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["kpi", "scenario", "mean", "sd"])?;
        for (kpi, cells) in self.kpis.iter().zip(&self.cells) {
            for (scenario, cell) in self.scenarios.iter().zip(cells) {
                let (m, s) = match cell {
                    Some(c) => (c.mean.to_string(), c.sd.to_string()),
                    None => (String::new(), String::new()),
                };
                w.write_record([kpi.as_str(), scenario.as_str(), &m, &s])?;
            }
        }
        Ok(String::from_utf8(w.into_inner().map_err(|e| e.into_error())?)
            .expect("csv output is UTF-8"))
    }

    pub fn from_machine_csv(text: &str) -> Result<Self, ReportError> {
        let mut r = csv::Reader::from_reader(text.as_bytes());
        let headers = r.headers()?.clone();
        if headers.iter().collect::<Vec<_>>() != ["kpi", "scenario", "mean", "sd"] {
            return Err(ReportError::Parse(
                "expected header kpi,scenario,mean,sd".into(),
            ));
        }
        let mut kpis: Vec<String> = Vec::new();
        let mut scenarios: Vec<String> = Vec::new();
        let mut entries: Vec<(usize, usize, Option<Cell>)> = Vec::new();
        for (line, rec) in r.records().enumerate() {
            let rec = rec?;
            let field = |i: usize| rec.get(i).unwrap_or("");
            let k = index_of(&mut kpis, field(0));
            let s = index_of(&mut scenarios, field(1));
            let parse = |i: usize| -> Result<f64, ReportError> {
                field(i).parse().map_err(|_| {
                    ReportError::Parse(format!("row {}: bad number {:?}", line + 2, field(i)))
                })
            };
            let cell = if field(2).is_empty() {
                None
            } else {
                Some(Cell {
                    mean: parse(2)?,
                    sd: parse(3)?,
                })
            };
            entries.push((k, s, cell));
        }
        let mut cells = vec![vec![None; scenarios.len()]; kpis.len()];
        for (k, s, c) in entries {
            cells[k][s] = c;
        }
        let table = ResultsTable {
            kpis,
            scenarios,
            cells,
        };
        table.check()?;
        Ok(table)
    }
}

fn index_of(list: &mut Vec<String>, value: &str) -> usize {
    match list.iter().position(|v| v == value) {
        Some(i) => i,
        None => {
            list.push(value.to_string());
            list.len() - 1
        }
    }
}

/// `occupancy,probability` rows.
pub fn occupancy_csv(pmf: &OccupancyPmf) -> String {
    let mut out = String::from("occupancy,probability\n");
    for (k, p) in pmf.probabilities().iter().enumerate() {
        let _ = writeln!(out, "{k},{p}");
    }
    out
}

/// `capacity,p_delay` rows.
pub fn delay_csv(curve: &DelayCurve) -> String {
    let mut out = String::from("capacity,p_delay\n");
    for (n, p) in &curve.points {
        let _ = writeln!(out, "{n},{p}");
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn one(kpi: &str, mean: f64, sd: f64) -> ResultsTable {
        ResultsTable {
            kpis: vec![kpi.into()],
            scenarios: vec!["23 beds".into()],
            cells: vec![vec![Some(Cell { mean, sd })]],
        }
    }

    #[test]
    fn cell_format_matches_published_convention() {
        let t = one("cancelled_electives", 390.62, 30.571);
        let csv = t.render(TableFormat::Csv).unwrap();
        assert_eq!(csv, "kpi,23 beds\ncancelled_electives,390.6 (30.57)\n");
        assert_eq!(
            format_cell("bed_utilization", &Cell { mean: 0.8861, sd: 0.0213 }),
            "0.89 (0.02)"
        );
    }

    #[test]
    fn markdown_has_header_separator_and_rows() {
        let t = ResultsTable {
            kpis: vec!["a".into(), "b".into()],
            scenarios: vec!["x".into(), "y".into()],
            cells: vec![
                vec![Some(Cell { mean: 1.0, sd: 0.0 }), None],
                vec![Some(Cell { mean: 2.0, sd: 0.5 }), Some(Cell { mean: 3.0, sd: 0.25 })],
            ],
        };
        let md = t.render(TableFormat::Markdown).unwrap();
        let lines: Vec<&str> = md.lines().collect();
        assert_eq!(lines.len(), 4);
        assert_eq!(lines[0], "| KPI | x | y |");
        assert_eq!(lines[1], "|---|---:|---:|");
        assert_eq!(lines[2], "| a | 1.0 (0.00) | NA |");
    }

    #[test]
    fn empty_table_rejected() {
        let t = ResultsTable {
            kpis: vec![],
            scenarios: vec![],
            cells: vec![],
        };
        assert_eq!(t.render(TableFormat::Csv), Err(ReportError::EmptyTable));
    }

    #[test]
    fn rendering_is_pure() {
        let t = one("k", 1.0 / 3.0, 2.0 / 3.0);
        assert_eq!(t.render(TableFormat::Markdown), t.render(TableFormat::Markdown));
        assert_eq!(t.to_machine_csv(), t.to_machine_csv());
    }

    proptest! {
        #[test]
        fn machine_csv_round_trips(
            values in prop::collection::vec((any::<f64>().prop_filter("finite", |v| v.is_finite()), 0.0f64..1e6, any::<bool>()), 1..30),
            width in 1usize..4,
        ) {
            let rows = values.len().div_ceil(width);
            let kpis: Vec<String> = (0..rows).map(|i| format!("kpi_{i}")).collect();
            let scenarios: Vec<String> = (0..width).map(|j| format!("n_beds={}", 20 + j)).collect();
            let mut cells = vec![vec![None; width]; rows];
            for (i, (m, s, present)) in values.iter().enumerate() {
                if *present {
                    cells[i / width][i % width] = Some(Cell { mean: *m, sd: *s });
                }
            }
            let t = ResultsTable { kpis, scenarios, cells };
            let back = ResultsTable::from_machine_csv(&t.to_machine_csv().unwrap()).unwrap();
            prop_assert_eq!(back, t);
        }
    }
}
