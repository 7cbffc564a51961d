//! Converting a length of stay given as mean and standard deviation into
//! the lognormal's underlying normal parameters, then sampling it.
//!
//! ```text
//! cargo run --release --example lognormal_conversion
//! ```

use wardsim::sampling::{DistributionSpec, LognormalParams, StreamAllocator};

fn main() {
    for (mean, sd) in [(10.0, 10.0), (128.0, 50.0), (7.0, 2.0)] {
        let p = LognormalParams::from_mean_sd(mean, sd).expect("positive moments");
        let sampler = DistributionSpec::lognormal(mean, sd)
            .sampler()
            .expect("valid spec");
        let mut stream = StreamAllocator::new(1, 0).stream(0);
        let n = 200_000;
        let draws: Vec<f64> = (0..n).map(|_| sampler.sample(&mut stream)).collect();
        let m = draws.iter().sum::<f64>() / n as f64;
        let s = (draws.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (n - 1) as f64).sqrt();
        println!(
            "mean {mean:>6} sd {sd:>5} -> mu {:.6} sigma {:.6}; sample mean {m:.2} sd {s:.2}",
            p.mu, p.sigma
        );
    }
}
