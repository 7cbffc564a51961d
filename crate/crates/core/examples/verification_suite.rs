//! Runs the built-in verification checks for both models and prints one
//! line per check.
//!
//! ```text
//! cargo run --release --example verification_suite
//! ```

use wardsim::verify::run_suite;
use wardsim::ModelId;

fn main() {
    let report = run_suite(&[ModelId::Ccu, ModelId::Stroke]);
    println!("{report}");
    if !report.all_passed() {
        std::process::exit(1);
    }
}
