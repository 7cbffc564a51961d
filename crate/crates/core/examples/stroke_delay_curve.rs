//! Runs the stroke pathway model and prints the occupancy distribution and
//! probability-of-delay curve for both units.
//!
//! ```text
//! cargo run --release --example stroke_delay_curve
//! ```

use wardsim::reporting::{delay_csv, ResultsTable, TableFormat};
use wardsim::{run_replications, Experiment, ModelId};

fn main() {
    let exp = Experiment::example(ModelId::Stroke);
    let run = run_replications(&exp).expect("example runs");

    let table = ResultsTable::from_summaries([&run.summary]).expect("non-empty");
    println!("{}", table.render(TableFormat::Markdown).expect("non-empty"));

    for unit in &run.summary.units {
        let pmf = unit.pmf.as_ref().expect("audits collected");
        println!(
            "{}: mean occupancy {:.2}, max observed {}",
            unit.unit,
            pmf.mean(),
            pmf.max_level()
        );
        let curve = unit.delay.as_ref().expect("delay curve");
        // Smallest capacity that keeps delays under 5% of the time.
        if let Some((n, p)) = curve.points.iter().find(|(_, p)| *p < 0.05) {
            println!("  {n} beds keep the probability of delay at {p:.3}");
        }
        print!("{}", delay_csv(curve));
        println!();
    }
}
