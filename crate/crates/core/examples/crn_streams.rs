//! Common random numbers: every sampling activity owns a stream derived
//! from (seed, replication, stream index), so drawing more from one stream
//! never shifts another.
//!
//! ```text
//! cargo run --release --example crn_streams
//! ```

use rand::Rng;
use wardsim::models::ccu;
use wardsim::sampling::StreamAllocator;

fn main() {
    let alloc = StreamAllocator::new(42, 0);
    let arrivals = ccu::STREAMS.index_of("arrival.AandE").expect("registered slot");

    let mut untouched = alloc.stream(arrivals);
    let first: Vec<f64> = (0..3).map(|_| untouched.random()).collect();

    // Burn a thousand draws on a length-of-stay stream first.
    let mut los = alloc.stream(arrivals + 6);
    for _ in 0..1000 {
        let _: f64 = los.random();
    }
    let mut again = alloc.stream(arrivals);
    let second: Vec<f64> = (0..3).map(|_| again.random()).collect();
    println!("A&E arrival stream, fresh:        {first:.6?}");
    println!("after heavy use of another stream: {second:.6?}");
    assert_eq!(first, second);

    let mut next_rep = StreamAllocator::new(42, 1).stream(arrivals);
    let other: f64 = next_rep.random();
    println!("replication 1 starts at            {other:.6}");

    println!("\nCCU stream slots:");
    for (i, name) in ccu::STREAMS.slots().iter().enumerate() {
        println!("  {i:>2} {name}");
    }
}
