//! Analytic oracles: Poisson arrival counts, lognormal moments and the
//! M/G/∞ stationary law.

use statrs::distribution::{Discrete, Poisson};
use wardsim::models::ccu::{Source, HOURS_PER_YEAR, KPI_PATIENT_COUNT};
use wardsim::models::occupancy::{OccupancyAudit, OccupancyPmf};
use wardsim::models::stroke::UNIT_ASU;
use wardsim::sampling::{DistributionSpec, LognormalParams, StreamAllocator};
use wardsim::{run_replications, Experiment, ModelId};

const MGINF: &str = include_str!("../configs/stroke_mginf.json");

fn poisson(lambda: f64, max: u64) -> OccupancyPmf {
    let d = Poisson::new(lambda).unwrap();
    OccupancyPmf::from_probabilities((0..=max).map(|k| d.pmf(k)).collect())
}

fn sample_moments(spec: &DistributionSpec, n: usize) -> (f64, f64) {
    let sampler = spec.sampler().unwrap();
    let mut s = StreamAllocator::new(2024, 0).stream(3);
    let draws: Vec<f64> = (0..n).map(|_| sampler.sample(&mut s)).collect();
    let m = draws.iter().sum::<f64>() / n as f64;
    let v = draws.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (n - 1) as f64;
    (m, v.sqrt())
}

#[test]
fn exponential_sample_mean() {
    let (m, _) = sample_moments(&DistributionSpec::exponential(22.72), 1_000_000);
    assert!((m - 22.72).abs() < 0.1, "{m}");
}

#[test]
fn lognormal_conversion_moments() {
    for (mean, sd) in [(10.0, 10.0), (128.0, 50.0), (7.0, 2.0)] {
        let p = LognormalParams::from_mean_sd(mean, sd).unwrap();
        assert!((p.mean() - mean).abs() <= 1e-12 * mean);
        assert!((p.sd() - sd).abs() <= 1e-9 * sd);
        let (m, s) = sample_moments(&DistributionSpec::lognormal(mean, sd), 1_000_000);
        assert!((m - mean).abs() / mean < 0.01, "mean {m} vs {mean}");
        assert!((s - sd).abs() / sd < 0.02, "sd {s} vs {sd}");
    }
}

#[test]
fn unplanned_arrival_rate() {
    let Experiment::Ccu(mut e) = Experiment::example(ModelId::Ccu) else { unreachable!() };
    e.warm_up_hours = Some(0.0);
    e.replications = 100;
    e.arrivals.insert(Source::Elective, DistributionSpec::deterministic(1e9));
    let expected: f64 = Source::UNPLANNED
        .iter()
        .map(|s| HOURS_PER_YEAR / e.arrivals[s].mean())
        .sum();
    assert!((expected - 1160.07).abs() < 0.01);
    let run = run_replications(&Experiment::Ccu(e)).unwrap();
    let got = run.summary.kpi(KPI_PATIENT_COUNT).unwrap().mean;
    assert!((got - expected).abs() / expected < 0.03, "{got}");
}

#[test]
fn m_g_infinity_occupancy_is_poisson() {
    let exp = Experiment::from_json(MGINF).unwrap();
    let run = run_replications(&exp).unwrap();
    let mut pooled = OccupancyAudit::default();
    for r in &run.results {
        pooled.merge(r.occupancy(UNIT_ASU).unwrap());
    }
    let pmf = pooled.pmf().unwrap();
    let tv = pmf.total_variation(&poisson(5.0, 60));
    assert!(tv < 0.02, "TV {tv}");
    let p10 = run.summary.unit(UNIT_ASU).unwrap().delay.as_ref().unwrap().get(10).unwrap();
    assert!((p10 - 0.0318).abs() <= 0.01, "{p10}");
    assert_eq!(pmf.prob_delay(10).unwrap(), p10);
}

#[test]
fn poisson_tail_reference_value() {
    let p = poisson(5.0, 80).prob_delay(10).unwrap();
    assert!((p - 0.031_828_057_306_204_8).abs() < 1e-12);
}
