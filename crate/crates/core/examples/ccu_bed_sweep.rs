//! Sweeps the critical care unit from 23 to 28 beds with common random
//! numbers and prints the results table plus a chart series.
//!
//! ```text
//! cargo run --release --example ccu_bed_sweep
//! ```

use wardsim::models::ccu::{KPI_CANCELLED, KPI_PATIENT_COUNT};
use wardsim::reporting::{chart_series, ResultsTable, TableFormat};
use wardsim::{run_scenarios, Experiment, ModelId, SweepAxis};

fn main() {
    let mut base = Experiment::example(ModelId::Ccu);
    base.set_replications(20);

    let axis = SweepAxis::new("n_beds", (23..=28).map(f64::from));
    let table = run_scenarios(&base, &axis).expect("example sweep runs");

    let results = ResultsTable::from_summaries(table.summaries()).expect("non-empty");
    println!("{}", results.render(TableFormat::Markdown).expect("non-empty"));

    // Arrivals use their own streams, so the patient count never moves.
    let counts: Vec<f64> = results
        .row(KPI_PATIENT_COUNT)
        .expect("kpi present")
        .iter()
        .map(|c| c.expect("cell present").mean)
        .collect();
    println!("patient count per scenario: {counts:?}\n");

    let points: Vec<_> = table
        .scenarios
        .iter()
        .map(|s| (s.value, &s.run.summary))
        .collect();
    let series = chart_series(&points, &format!("kpi/{KPI_CANCELLED}")).expect("known series");
    println!("{} against beds:", series.y_label);
    for p in &series.points {
        println!("  {:>4} {:>8.1} ± {:.1}", p.x, p.y, p.err.unwrap_or(0.0));
    }
}
