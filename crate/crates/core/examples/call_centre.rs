//! A 13-operator call centre built directly on the event kernel, compared
//! with its offered-load utilisation.
//!
//! ```text
//! cargo run --release --example call_centre
//! ```

use wardsim::models::call_centre::CallCentre;

fn main() {
    let model = CallCentre {
        run_length: 10_000.0,
        ..CallCentre::default()
    };
    let r = model.run(0).expect("valid parameters");
    println!("callers arrived    {}", r.arrivals);
    println!("callers answered   {}", r.answered);
    println!("mean wait (min)    {:.2}", r.mean_wait);
    println!("utilisation        {:.4}", r.utilisation);
    println!("offered load / N   {:.4}", model.expected_utilisation());

    let traced = CallCentre {
        run_length: 5.0,
        trace: true,
        ..CallCentre::default()
    };
    println!("\nfirst minutes of a traced run:");
    for line in traced.run(0).expect("valid parameters").trace {
        println!("  {line}");
    }
}
