//! Experiment-level behaviour: determinism, common random numbers across
//! scenarios, capacity trends and override validation.

use wardsim::models::ccu::{KPI_CANCELLED, KPI_OCCUPANCY, KPI_PATIENT_COUNT, KPI_WAIT};
use wardsim::verify::run_suite;
use wardsim::{run_replications, run_scenarios, Experiment, ExperimentError, ModelId, SweepAxis};

fn beds() -> SweepAxis {
    SweepAxis::new("n_beds", (23..=28).map(f64::from))
}

#[test]
fn identical_seed_identical_results() {
    for m in [ModelId::Ccu, ModelId::Stroke] {
        let mut e = Experiment::example(m);
        e.set_trace(true);
        let (a, b) = (run_replications(&e).unwrap(), run_replications(&e).unwrap());
        assert_eq!(a, b);
        assert!(a.results.iter().all(|r| r.trace.len() as u64 == r.trace_emitted));
    }
}

#[test]
fn tracing_does_not_change_results() {
    let e = Experiment::example(ModelId::Ccu);
    let mut t = e.clone();
    t.set_trace(true);
    assert_eq!(
        run_replications(&e).unwrap().summary,
        run_replications(&t).unwrap().summary
    );
}

#[test]
fn patient_counts_identical_across_bed_scenarios() {
    let table = run_scenarios(&Experiment::example(ModelId::Ccu), &beds()).unwrap();
    assert_eq!(table.scenarios.len(), 6);
    let first: Vec<f64> = table.scenarios[0]
        .run
        .results
        .iter()
        .map(|r| r.kpi(KPI_PATIENT_COUNT).unwrap())
        .collect();
    for s in &table.scenarios[1..] {
        let counts: Vec<f64> = s.run.results.iter().map(|r| r.kpi(KPI_PATIENT_COUNT).unwrap()).collect();
        assert_eq!(counts, first, "{}", s.label);
    }
}

#[test]
fn capacity_trends_over_twenty_replications() {
    let mut e = Experiment::example(ModelId::Ccu);
    e.set_replications(20);
    let table = run_scenarios(&e, &beds()).unwrap();
    let means = |k: &str| -> Vec<f64> {
        table.summaries().iter().map(|s| s.kpi(k).unwrap().mean).collect()
    };
    let (c, w, o) = (means(KPI_CANCELLED), means(KPI_WAIT), means(KPI_OCCUPANCY));
    for i in 1..6 {
        assert!(c[i] <= c[i - 1], "cancellations {c:?}");
        assert!(w[i] <= w[i - 1], "waits {w:?}");
        assert!(o[i] >= o[i - 1], "occupancy {o:?}");
    }
}

#[test]
fn single_replication_reports_zero_sd() {
    let mut e = Experiment::example(ModelId::Stroke);
    e.set_replications(1);
    let run = run_replications(&e).unwrap();
    assert!(run.summary.single_replication);
    assert!(run.summary.kpis.iter().all(|k| k.sd == 0.0));
}

#[test]
fn sweep_rejects_unknown_parameter_and_bad_values() {
    let e = Experiment::example(ModelId::Stroke);
    let err = run_scenarios(&e, &SweepAxis::new("n_beds", [3.0])).unwrap_err();
    assert!(matches!(err, ExperimentError::Config(ref c) if c.errors()[0].path == "n_beds"));
    let ccu = Experiment::example(ModelId::Ccu);
    let err = run_scenarios(&ccu, &SweepAxis::new("n_beds", [0.0])).unwrap_err();
    assert!(matches!(err, ExperimentError::Config(_)));
    assert_eq!(
        run_scenarios(&ccu, &SweepAxis::new("n_beds", [])).unwrap_err(),
        ExperimentError::EmptySweep
    );
}

#[test]
fn negative_mean_override_names_field() {
    let e = Experiment::example(ModelId::Ccu);
    let err = e.with_param("arrivals.AandE.mean", -1.0).unwrap_err();
    assert_eq!(err.errors()[0].path, "arrivals.AandE.mean");
}

#[test]
fn verification_suite_scale_and_outcome() {
    let report = run_suite(&[ModelId::Ccu, ModelId::Stroke]);
    let (ccu_pass, ccu_n) = report.count_for(ModelId::Ccu);
    let (stroke_pass, stroke_n) = report.count_for(ModelId::Stroke);
    assert!(ccu_n >= 28 && stroke_n >= 34);
    assert_eq!((ccu_pass, stroke_pass), (ccu_n, stroke_n), "{report}");
}
