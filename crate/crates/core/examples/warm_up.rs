//! How the warm-up period affects results: the event sequence is identical,
//! only the collection window moves.
//!
//! ```text
//! cargo run --release --example warm_up
//! ```

use wardsim::models::ccu::{KPI_OCCUPANCY, KPI_PATIENT_COUNT};
use wardsim::{run_replications, Experiment, ModelId};

fn main() {
    let base = Experiment::example(ModelId::Ccu);
    println!("{:>10} {:>14} {:>15}", "warm-up h", "patient count", "mean occupancy");
    for warm_up in [0.0, 168.0, 720.0, 2160.0] {
        let mut e = base.clone();
        e.set_warm_up(warm_up);
        let run = run_replications(&e).expect("valid experiment");
        let s = &run.summary;
        println!(
            "{warm_up:>10} {:>14.1} {:>15.2}",
            s.kpi(KPI_PATIENT_COUNT).expect("kpi").mean,
            s.kpi(KPI_OCCUPANCY).expect("kpi").mean,
        );
    }

    let mut traced = base.clone();
    traced.set_trace(true);
    traced.set_run_length(1000.0);
    let mut shifted = traced.clone();
    shifted.set_warm_up(0.0);
    let a = traced.run_replication(0).expect("valid");
    let b = shifted.run_replication(0).expect("valid");
    println!("\ntraces identical with and without warm-up: {}", a.trace == b.trace);
    for line in a.trace.iter().take(5) {
        println!("  {line}");
    }
}
