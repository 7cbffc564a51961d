//! Comparing two result sets at a 5% tolerance: first two seeds of the same
//! configuration, then a deliberately mis-parameterised run.
//!
//! ```text
//! cargo run --release --example compare_runs
//! ```

use wardsim::reporting::{compare_results, ResultsTable, DEFAULT_TOLERANCE};
use wardsim::{run_replications, Experiment, ModelId};

fn table(exp: &Experiment) -> ResultsTable {
    let run = run_replications(exp).expect("valid experiment");
    ResultsTable::from_summaries([&run.summary]).expect("non-empty")
}

fn main() {
    let mut a = Experiment::example(ModelId::Stroke);
    a.set_replications(50);
    let mut b = a.clone();
    b.set_seed(2024);

    let report = compare_results(&table(&a), &table(&b), DEFAULT_TOLERANCE).expect("same shape");
    println!("two seeds:\n{report}\n");

    let skewed = a
        .with_param("types.Stroke.asu_arrival.mean", 1.5)
        .expect("valid override");
    let report = compare_results(&table(&a), &table(&skewed), DEFAULT_TOLERANCE).expect("same shape");
    println!("slower stroke arrivals:\n{report}");
    for cell in report.failures() {
        println!("  outside tolerance: {} ({:.1}%)", cell.kpi, cell.rel_diff * 100.0);
    }
}
