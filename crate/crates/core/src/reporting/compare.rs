use std::fmt;

use serde::Serialize;

use super::{ReportError, ResultsTable};

pub const DEFAULT_TOLERANCE: f64 = 0.05;

/// Differences below this are treated as equal when one side is zero.
const ZERO_THRESHOLD: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CellDiff {
    pub kpi: String,
    pub scenario: String,
    pub a: Option<f64>,
    pub b: Option<f64>,
    /// Relative difference of means; infinite when only one side is present.
    pub rel_diff: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CompareReport {
    pub tolerance: f64,
    pub pass: bool,
    pub max_rel_diff: f64,
    pub cells: Vec<CellDiff>,
}

impl CompareReport {
    pub fn failures(&self) -> impl Iterator<Item = &CellDiff> {
        self.cells.iter().filter(|c| !c.pass)
    }
}

fn rel_diff(a: f64, b: f64) -> f64 {
    let scale = a.abs().max(b.abs());
    if scale == 0.0 {
        0.0
    } else if a == 0.0 || b == 0.0 {
        if (a - b).abs() <= ZERO_THRESHOLD {
            0.0
        } else {
            1.0
        }
    } else {
        (a - b).abs() / scale
    }
}

/// Compares the means of two equally shaped tables cell by cell.
pub fn compare_results(
    a: &ResultsTable,
    b: &ResultsTable,
    tolerance: f64,
) -> Result<CompareReport, ReportError> {
    if a.kpis != b.kpis {
        return Err(ReportError::ShapeMismatch(format!(
            "KPI rows {:?} vs {:?}",
            a.kpis, b.kpis
        )));
    }
    if a.scenarios != b.scenarios {
        return Err(ReportError::ShapeMismatch(format!(
            "scenario columns {:?} vs {:?}",
            a.scenarios, b.scenarios
        )));
    }
    let mut cells = Vec::new();
    for (r, kpi) in a.kpis.iter().enumerate() {
        for (c, scenario) in a.scenarios.iter().enumerate() {
            let (ca, cb) = (a.cells[r][c], b.cells[r][c]);
            let (ma, mb) = (ca.map(|x| x.mean), cb.map(|x| x.mean));
            let d = match (ma, mb) {
                (Some(x), Some(y)) => rel_diff(x, y),
                (None, None) => 0.0,
                _ => f64::INFINITY,
            };
            cells.push(CellDiff {
                kpi: kpi.clone(),
                scenario: scenario.clone(),
                a: ma,
                b: mb,
                rel_diff: d,
                pass: d <= tolerance,
            });
        }
    }
    let max_rel_diff = cells.iter().map(|c| c.rel_diff).fold(0.0, f64::max);
    Ok(CompareReport {
        tolerance,
        pass: cells.iter().all(|c| c.pass),
        max_rel_diff,
        cells,
    })
}

fn show(v: Option<f64>) -> String {
    v.map_or_else(|| "NA".into(), |v| format!("{v:.4}"))
}

impl fmt::Display for CompareReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.cells {
            writeln!(
                f,
                "{} {} [{}]: {} vs {} ({:.2}%)",
                if c.pass { "ok  " } else { "FAIL" },
                c.kpi,
                c.scenario,
                show(c.a),
                show(c.b),
                c.rel_diff * 100.0
            )?;
        }
        let failed = self.failures().count();
        write!(
            f,
            "{}: {} of {} cells within {:.1}% (max difference {:.2}%)",
            if self.pass { "PASS" } else { "FAIL" },
            self.cells.len() - failed,
            self.cells.len(),
            self.tolerance * 100.0,
            self.max_rel_diff * 100.0
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::reporting::Cell;
    use proptest::prelude::*;

    fn table(means: &[f64]) -> ResultsTable {
        ResultsTable {
            kpis: (0..means.len()).map(|i| format!("k{i}")).collect(),
            scenarios: vec!["base".into()],
            cells: means.iter().map(|&m| vec![Some(Cell { mean: m, sd: 1.0 })]).collect(),
        }
    }

    #[test]
    fn identical_tables_pass_with_zero_difference() {
        let t = table(&[100.0, 0.0, 3.5]);
        let r = compare_results(&t, &t, DEFAULT_TOLERANCE).unwrap();
        assert!(r.pass);
        assert_eq!(r.max_rel_diff, 0.0);
    }

    #[test]
    fn four_percent_passes_six_fails_with_location() {
        let r = compare_results(&table(&[100.0]), &table(&[104.0]), 0.05).unwrap();
        assert!(r.pass);
        let r = compare_results(&table(&[1.0, 100.0]), &table(&[1.0, 106.0]), 0.05).unwrap();
        assert!(!r.pass);
        let bad: Vec<_> = r.failures().collect();
        assert_eq!(bad.len(), 1);
        assert_eq!((bad[0].kpi.as_str(), bad[0].scenario.as_str()), ("k1", "base"));
        assert!(r.to_string().contains("FAIL k1 [base]"));
    }

    #[test]
    fn zero_against_nonzero() {
        assert!(compare_results(&table(&[0.0]), &table(&[5e-10]), 0.05).unwrap().pass);
        assert!(!compare_results(&table(&[0.0]), &table(&[1e-6]), 0.05).unwrap().pass);
    }

    #[test]
    fn shape_mismatch_rejected() {
        let e = compare_results(&table(&[1.0]), &table(&[1.0, 2.0]), 0.05);
        assert!(matches!(e, Err(ReportError::ShapeMismatch(_))));
    }

    proptest! {
        #[test]
        fn outcome_is_symmetric(a in prop::collection::vec(-1e6f64..1e6, 1..8), noise in prop::collection::vec(0.8f64..1.2, 8)) {
            let b: Vec<f64> = a.iter().zip(&noise).map(|(x, n)| x * n).collect();
            let (ta, tb) = (table(&a), table(&b));
            let ab = compare_results(&ta, &tb, 0.05).unwrap();
            let ba = compare_results(&tb, &ta, 0.05).unwrap();
            prop_assert_eq!(ab.pass, ba.pass);
            prop_assert_eq!(ab.max_rel_diff, ba.max_rel_diff);
        }
    }
}
