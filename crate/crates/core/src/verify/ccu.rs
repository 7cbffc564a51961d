use rayon::prelude::*;

use super::{ensure, trace_lines_well_formed, within, Category, Check};
use crate::experiment::{mean_sd, Experiment, ModelId, ReplicationResult};
use crate::models::ccu::*;
use crate::sampling::DistributionSpec;

use Category::*;

pub(super) fn checks() -> Vec<Check> {
    let c = |name, cat, f| Check::new(name, ModelId::Ccu, cat, f);
    vec![
        c("no_arrivals_all_kpis_zero", ExtremeValue, no_arrivals),
        c("zero_stay_zero_turnaround_no_cancellations", ExtremeValue, zero_stay_no_cancellations),
        c("zero_stay_zero_turnaround_no_waits", ExtremeValue, zero_stay_no_waits),
        c("saturated_single_bed_cancels_every_elective", ExtremeValue, saturated_single_bed),
        c("huge_capacity_no_cancellations", ExtremeValue, huge_capacity_no_cancellations),
        c("huge_capacity_no_waits", ExtremeValue, huge_capacity_no_waits),
        c("extreme_stay_fills_every_bed", ExtremeValue, extreme_stay_fills_unit),
        c("only_AandE_arrivals", ExtremeValue, || only_source(Source::AandE)),
        c("only_Ward_arrivals", ExtremeValue, || only_source(Source::Ward)),
        c("only_EmergencySurgery_arrivals", ExtremeValue, || only_source(Source::EmergencySurgery)),
        c("only_OtherHospital_arrivals", ExtremeValue, || only_source(Source::OtherHospital)),
        c("only_XRay_arrivals", ExtremeValue, || only_source(Source::XRay)),
        c("only_Elective_arrivals", ExtremeValue, || only_source(Source::Elective)),
        c("electives_off_no_cancellations", ComponentIsolation, electives_off),
        c("unplanned_off_no_waits", ComponentIsolation, unplanned_off),
        c("warm_up_leaves_trace_unchanged", WarmUp, warm_up_trace),
        c("warm_up_changes_kpis", WarmUp, warm_up_changes_kpis),
        c("longer_warm_up_counts_fewer_patients", WarmUp, longer_warm_up_fewer_patients),
        c("doubling_run_length_doubles_arrivals", WarmUp, doubling_run_length),
        c("beds_held_never_exceed_capacity", Conservation, beds_bounded),
        c("bed_flow_conserved", Conservation, bed_flow),
        c("arrivals_conserved", Conservation, arrivals_conserved),
        c("utilization_is_occupancy_over_beds", DataCollection, utilization_definition),
        c("audit_sample_count_matches_window", DataCollection, audit_count),
        c("trace_lines_well_formed", DataCollection, trace_format),
        c("deterministic_arrivals_counted_exactly", Oracle, deterministic_arrivals),
        c("bed_released_after_stay_plus_turnaround", Oracle, release_time),
        c("zero_turnaround_releases_at_end_of_stay", Oracle, zero_turnaround_release),
        c("unplanned_arrival_rate_matches_rates", Oracle, unplanned_rate),
        c("uncapacitated_occupancy_matches_littles_law", Oracle, littles_law),
        c("patient_count_invariant_to_beds", Oracle, crn_invariance),
        c("more_beds_fewer_cancellations", Oracle, more_beds_fewer_cancellations),
        c("more_beds_shorter_waits", Oracle, more_beds_shorter_waits),
        c("same_seed_reproduces_results", Oracle, same_seed),
        c("different_seed_changes_results", Oracle, different_seed),
        c("invalid_bed_count_rejected", Configuration, invalid_beds),
        c("missing_length_of_stay_rejected", Configuration, missing_los),
    ]
}

fn example() -> CcuExperiment {
    match Experiment::example(ModelId::Ccu) {
        Experiment::Ccu(e) => e,
        _ => unreachable!("ccu example"),
    }
}

fn det(v: f64) -> DistributionSpec {
    DistributionSpec::deterministic(v)
}

/// Every source effectively off (first arrival well after the run ends).
fn quiet(run_length: f64) -> CcuExperiment {
    let never = det(run_length * 10.0);
    CcuExperiment {
        n_beds: 2,
        turnaround_hours: 0.0,
        arrivals: Source::ALL.iter().map(|&s| (s, never.clone())).collect(),
        los: Source::ALL.iter().map(|&s| (s, det(1.0))).collect(),
        run_length_hours: run_length,
        warm_up_hours: Some(0.0),
        replications: 1,
        seed: Some(7),
        audit_interval_hours: 1.0,
        trace: false,
    }
}

fn turn_off(e: &mut CcuExperiment, sources: &[Source]) {
    let never = det(e.run_length_hours * 10.0);
    for s in sources {
        e.arrivals.insert(*s, never.clone());
    }
}

fn reps(e: &CcuExperiment, n: u32) -> Vec<ReplicationResult> {
    (0..n).into_par_iter().map(|r| e.run_replication(r)).collect()
}

fn kpi(r: &ReplicationResult, name: &str) -> f64 {
    r.kpi(name).unwrap_or(f64::NAN)
}

fn count(r: &ReplicationResult, name: &str) -> f64 {
    r.count(name).unwrap_or(f64::NAN)
}

fn mean_kpi(rs: &[ReplicationResult], name: &str) -> f64 {
    mean_sd(&rs.iter().map(|r| kpi(r, name)).collect::<Vec<_>>()).0
}

fn one_year() -> CcuExperiment {
    let mut e = example();
    e.run_length_hours = HOURS_PER_YEAR;
    e
}

fn no_arrivals() -> Result<String, String> {
    let r = quiet(500.0).run_replication(0);
    ensure(r.kpis.iter().all(|k| k.value == 0.0), || format!("non-zero KPIs: {:?}", r.kpis))?;
    ensure(!r.warnings.is_empty(), || "expected an undefined-mean warning".into())?;
    Ok("every KPI is 0 and a warning is raised".into())
}

fn zero_stay() -> CcuExperiment {
    let mut e = one_year();
    e.turnaround_hours = 0.0;
    e.n_beds = 1;
    for s in Source::ALL {
        e.los.insert(s, det(0.0));
    }
    e
}

fn zero_stay_no_cancellations() -> Result<String, String> {
    let r = zero_stay().run_replication(0);
    ensure(kpi(&r, KPI_CANCELLED) == 0.0, || format!("{} cancellations", kpi(&r, KPI_CANCELLED)))?;
    Ok(format!("0 of {} electives cancelled with 1 bed", kpi(&r, KPI_ELECTIVE_ARRIVALS)))
}

fn zero_stay_no_waits() -> Result<String, String> {
    let r = zero_stay().run_replication(0);
    ensure(kpi(&r, KPI_WAIT) == 0.0, || format!("mean wait {}", kpi(&r, KPI_WAIT)))?;
    Ok(format!("{} unplanned admissions, none waited", kpi(&r, KPI_UNPLANNED_ADMISSIONS)))
}

fn saturated_single_bed() -> Result<String, String> {
    let mut e = quiet(1000.0);
    e.n_beds = 1;
    e.arrivals.insert(Source::XRay, det(1.0));
    e.los.insert(Source::XRay, det(1e6));
    e.arrivals.insert(Source::Elective, DistributionSpec::exponential(3.0));
    let r = e.run_replication(0);
    let (arr, can) = (kpi(&r, KPI_ELECTIVE_ARRIVALS), kpi(&r, KPI_CANCELLED));
    ensure(arr > 0.0 && arr == can, || format!("{can} of {arr} cancelled"))?;
    Ok(format!("all {arr} electives cancelled"))
}

fn huge_capacity() -> Vec<ReplicationResult> {
    let mut e = one_year();
    e.n_beds = 1000;
    reps(&e, 3)
}

fn huge_capacity_no_cancellations() -> Result<String, String> {
    let rs = huge_capacity();
    let total: f64 = rs.iter().map(|r| kpi(r, KPI_CANCELLED)).sum();
    ensure(total == 0.0, || format!("{total} cancellations with 1000 beds"))?;
    Ok("no cancellations in 3 replications".into())
}

fn huge_capacity_no_waits() -> Result<String, String> {
    let rs = huge_capacity();
    let total: f64 = rs.iter().map(|r| kpi(r, KPI_WAIT)).sum();
    ensure(total == 0.0, || format!("mean waits sum to {total}"))?;
    Ok("every unplanned admission immediate".into())
}

fn extreme_stay_fills_unit() -> Result<String, String> {
    let mut e = one_year();
    for s in Source::ALL {
        e.los.insert(s, det(1e7));
    }
    let r = e.run_replication(0);
    let held = count(&r, "held_at_end");
    ensure(held == f64::from(e.n_beds), || format!("{held} beds held at end"))?;
    ensure(count(&r, "released") == 0.0, || "a bed was released".into())?;
    Ok(format!("all {} beds held, none released", e.n_beds))
}

fn only_source(source: Source) -> Result<String, String> {
    let mut e = one_year();
    e.warm_up_hours = Some(0.0);
    let others: Vec<Source> = Source::ALL.into_iter().filter(|&s| s != source).collect();
    turn_off(&mut e, &others);
    let r = e.run_replication(0);
    let patients = kpi(&r, KPI_PATIENT_COUNT);
    let electives = kpi(&r, KPI_ELECTIVE_ARRIVALS);
    let unplanned = kpi(&r, KPI_UNPLANNED_ADMISSIONS) + count(&r, "queued_at_end");
    ensure(patients > 0.0, || "no arrivals".into())?;
    if source.is_unplanned() {
        ensure(electives == 0.0 && kpi(&r, KPI_CANCELLED) == 0.0, || {
            format!("{electives} electives arrived")
        })?;
        ensure(unplanned == patients, || format!("{unplanned} unplanned of {patients}"))?;
    } else {
        ensure(electives == patients, || format!("{electives} electives of {patients}"))?;
        ensure(kpi(&r, KPI_UNPLANNED_ADMISSIONS) == 0.0, || "unplanned admission seen".into())?;
    }
    let expected = HOURS_PER_YEAR / e.arrivals[&source].mean();
    let tol = 5.0 * expected.sqrt();
    ensure((patients - expected).abs() <= tol, || {
        format!("{patients} arrivals, expected about {expected:.1}")
    })?;
    Ok(format!("{patients} {source} arrivals (expected about {expected:.1})"))
}

fn electives_off() -> Result<String, String> {
    let mut e = one_year();
    e.n_beds = 18;
    turn_off(&mut e, &[Source::Elective]);
    let r = e.run_replication(0);
    ensure(kpi(&r, KPI_ELECTIVE_ARRIVALS) == 0.0 && kpi(&r, KPI_CANCELLED) == 0.0, || {
        "electives still present".into()
    })?;
    ensure(kpi(&r, KPI_WAIT) > 0.0, || "18 beds should cause some unplanned waiting".into())?;
    Ok(format!("mean unplanned wait {:.2} h, no electives", kpi(&r, KPI_WAIT)))
}

fn unplanned_off() -> Result<String, String> {
    let mut e = one_year();
    e.n_beds = 4;
    turn_off(&mut e, &Source::UNPLANNED);
    let r = e.run_replication(0);
    ensure(kpi(&r, KPI_UNPLANNED_ADMISSIONS) == 0.0 && kpi(&r, KPI_WAIT) == 0.0, || {
        "unplanned activity seen".into()
    })?;
    ensure(count(&r, "queued_at_end") == 0.0, || "electives never queue".into())?;
    Ok(format!("{} electives cancelled, nobody queued", kpi(&r, KPI_CANCELLED)))
}

fn warm_up_trace() -> Result<String, String> {
    let mut a = one_year();
    a.trace = true;
    a.warm_up_hours = Some(0.0);
    let mut b = a.clone();
    b.warm_up_hours = Some(720.0);
    let (ra, rb) = (a.run_replication(0), b.run_replication(0));
    // Audits are not traced, so the event sequence is identical.
    ensure(ra.trace == rb.trace, || "traces differ".into())?;
    Ok(format!("{} identical trace lines", ra.trace.len()))
}

fn warm_up_changes_kpis() -> Result<String, String> {
    let a = one_year();
    let mut b = a.clone();
    b.warm_up_hours = Some(0.0);
    let (ra, rb) = (a.run_replication(0), b.run_replication(0));
    ensure(ra.kpis != rb.kpis, || "KPIs unchanged by warm-up".into())?;
    Ok(format!(
        "patient count {} with warm-up vs {} without",
        kpi(&ra, KPI_PATIENT_COUNT),
        kpi(&rb, KPI_PATIENT_COUNT)
    ))
}

fn longer_warm_up_fewer_patients() -> Result<String, String> {
    let mut counts = Vec::new();
    for w in [0.0, 720.0, 2000.0, 4000.0] {
        let mut e = one_year();
        e.warm_up_hours = Some(w);
        counts.push(kpi(&e.run_replication(0), KPI_PATIENT_COUNT));
    }
    ensure(counts.windows(2).all(|p| p[1] < p[0]), || format!("{counts:?}"))?;
    Ok(format!("patient counts {counts:?}"))
}

fn doubling_run_length() -> Result<String, String> {
    let mut e = one_year();
    e.warm_up_hours = Some(0.0);
    let short = mean_kpi(&reps(&e, 5), KPI_PATIENT_COUNT);
    e.run_length_hours *= 2.0;
    let long = mean_kpi(&reps(&e, 5), KPI_PATIENT_COUNT);
    within("arrival ratio", long / short, 2.0, 0.03)
}

fn example_reps() -> Vec<ReplicationResult> {
    reps(&one_year(), 3)
}

fn beds_bounded() -> Result<String, String> {
    let mut e = one_year();
    e.n_beds = 20;
    for r in reps(&e, 3) {
        let max = count(&r, "max_held");
        ensure(max <= 20.0, || format!("{max} beds held"))?;
        ensure(kpi(&r, KPI_UTILIZATION) <= 1.0, || "utilization above 1".into())?;
    }
    Ok("max held <= 20 in 3 replications".into())
}

fn bed_flow() -> Result<String, String> {
    for r in example_reps() {
        let (adm, rel, held) = (count(&r, "admitted"), count(&r, "released"), count(&r, "held_at_end"));
        ensure(adm == rel + held, || format!("admitted {adm} != released {rel} + held {held}"))?;
    }
    Ok("admitted = released + held at end".into())
}

fn arrivals_conserved() -> Result<String, String> {
    for r in example_reps() {
        let arr = count(&r, "arrivals");
        let out = count(&r, "admitted") + count(&r, "cancelled") + count(&r, "queued_at_end");
        ensure(arr == out, || format!("arrivals {arr} != admitted + cancelled + queued {out}"))?;
    }
    Ok("arrivals = admitted + cancelled + queued at end".into())
}

fn utilization_definition() -> Result<String, String> {
    for r in example_reps() {
        let u = kpi(&r, KPI_UTILIZATION);
        let o = kpi(&r, KPI_OCCUPANCY) / count(&r, "n_beds");
        ensure((u - o).abs() <= 1e-9, || format!("{u} vs {o}"))?;
    }
    Ok("utilization = occupancy / beds to 1e-9".into())
}

fn audit_count() -> Result<String, String> {
    let e = one_year();
    let r = e.run_replication(0);
    let n = r.occupancy(UNIT_CCU).map(|a| a.samples()).unwrap_or(0);
    let expected = (e.run_length_hours - e.warm_up_hours.unwrap_or(0.0)) / e.audit_interval_hours;
    ensure(n as f64 == expected, || format!("{n} samples, expected {expected}"))?;
    Ok(format!("{n} hourly audits after warm-up"))
}

fn trace_format() -> Result<String, String> {
    let mut e = one_year();
    e.trace = true;
    e.n_beds = 22;
    let r = e.run_replication(0);
    trace_lines_well_formed(&r.trace)?;
    for kind in ["arrival", "queued", "admission", "cancelled_operation", "discharge", "bed_ready"] {
        let tag = format!("event={kind}");
        ensure(r.trace.iter().any(|l| l.contains(&tag)), || format!("no {kind} events"))?;
    }
    Ok(format!("{} lines, every event kind present", r.trace.len()))
}

fn deterministic_arrivals() -> Result<String, String> {
    let mut e = quiet(100.0);
    e.arrivals.insert(Source::AandE, det(10.0));
    e.los.insert(Source::AandE, det(0.0));
    let r = e.run_replication(0);
    ensure(kpi(&r, KPI_PATIENT_COUNT) == 10.0, || format!("{} arrivals", kpi(&r, KPI_PATIENT_COUNT)))?;
    Ok("10 arrivals at t = 10..100".into())
}

fn traced_ward_patient(turnaround: f64) -> ReplicationResult {
    let mut e = quiet(30.0);
    e.trace = true;
    e.turnaround_hours = turnaround;
    e.arrivals.insert(Source::Ward, det(20.0));
    e.los.insert(Source::Ward, det(5.0));
    e.run_replication(0)
}

fn release_time() -> Result<String, String> {
    let r = traced_ward_patient(5.0);
    let want = "t=30.00 id=0 class=Ward event=bed_ready";
    ensure(r.trace.iter().any(|l| l == want), || format!("trace {:?}", r.trace))?;
    Ok("seized at 20, discharged at 25, bed ready at 30".into())
}

fn zero_turnaround_release() -> Result<String, String> {
    let r = traced_ward_patient(0.0);
    let want = "t=25.00 id=0 class=Ward event=bed_ready";
    ensure(r.trace.iter().any(|l| l == want), || format!("trace {:?}", r.trace))?;
    Ok("bed ready at end of stay".into())
}

fn unplanned_rate() -> Result<String, String> {
    let mut e = one_year();
    e.warm_up_hours = Some(0.0);
    turn_off(&mut e, &[Source::Elective]);
    let expected: f64 = Source::UNPLANNED
        .iter()
        .map(|s| HOURS_PER_YEAR / e.arrivals[s].mean())
        .sum();
    let got = mean_kpi(&reps(&e, 20), KPI_PATIENT_COUNT);
    within("unplanned arrivals per year", got, expected, 0.03)
}

fn littles_law() -> Result<String, String> {
    let mut e = example();
    e.n_beds = 2000;
    e.run_length_hours = 5.0 * HOURS_PER_YEAR;
    let expected: f64 = Source::ALL
        .iter()
        .map(|s| (e.los[s].mean() + e.turnaround_hours) / e.arrivals[s].mean())
        .sum();
    let got = mean_kpi(&reps(&e, 8), KPI_OCCUPANCY);
    within("mean occupancy", got, expected, 0.05)
}

fn sweep(beds: &[u32], n: u32) -> Vec<Vec<ReplicationResult>> {
    beds.iter()
        .map(|&b| {
            let mut e = one_year();
            e.n_beds = b;
            reps(&e, n)
        })
        .collect()
}

fn crn_invariance() -> Result<String, String> {
    let runs = sweep(&[23, 28], 3);
    for (a, b) in runs[0].iter().zip(&runs[1]) {
        ensure(kpi(a, KPI_PATIENT_COUNT) == kpi(b, KPI_PATIENT_COUNT), || {
            format!("replication {}: counts differ", a.replication)
        })?;
    }
    Ok("per-replication patient counts identical at 23 and 28 beds".into())
}

fn sweep_means(name: &str) -> Vec<f64> {
    sweep(&[22, 25, 28], 10).iter().map(|rs| mean_kpi(rs, name)).collect()
}

fn more_beds_fewer_cancellations() -> Result<String, String> {
    let m = sweep_means(KPI_CANCELLED);
    ensure(m.windows(2).all(|p| p[1] < p[0]), || format!("{m:?}"))?;
    Ok(format!("cancellations at 22/25/28 beds: {m:.1?}"))
}

fn more_beds_shorter_waits() -> Result<String, String> {
    let m = sweep_means(KPI_WAIT);
    ensure(m.windows(2).all(|p| p[1] < p[0]), || format!("{m:?}"))?;
    Ok(format!("mean waits at 22/25/28 beds: {m:.2?}"))
}

fn same_seed() -> Result<String, String> {
    let e = one_year();
    ensure(e.run_replication(2) == e.run_replication(2), || "results differ".into())?;
    Ok("identical replication results".into())
}

fn different_seed() -> Result<String, String> {
    let a = one_year();
    let mut b = a.clone();
    b.seed = Some(a.seed.unwrap_or(0) + 1);
    ensure(a.run_replication(0).kpis != b.run_replication(0).kpis, || "results identical".into())?;
    Ok("KPIs differ".into())
}

fn invalid_beds() -> Result<String, String> {
    let mut e = example();
    e.n_beds = 0;
    let err = e.validate().err().ok_or("zero beds accepted")?;
    ensure(err.errors().iter().any(|f| f.path == "n_beds"), || err.to_string())?;
    Ok(err.to_string())
}

fn missing_los() -> Result<String, String> {
    let mut e = example();
    e.los.remove(&Source::XRay);
    let err = e.validate().err().ok_or("missing stay accepted")?;
    ensure(err.errors().iter().any(|f| f.path == "los.XRay"), || err.to_string())?;
    Ok(err.to_string())
}
