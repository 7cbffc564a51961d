use rayon::prelude::*;

use super::{ensure, poisson_pmf, trace_lines_well_formed, within, Category, Check};
use crate::experiment::{mean_sd, Experiment, ModelId, ReplicationResult};
use crate::models::occupancy::OccupancyAudit;
use crate::models::stroke::*;
use crate::sampling::DistributionSpec;

use Category::*;

pub(super) fn checks() -> Vec<Check> {
    let c = |name, cat, f| Check::new(name, ModelId::Stroke, cat, f);
    vec![
        c("no_arrivals_units_stay_empty", ExtremeValue, no_arrivals),
        c("zero_asu_stay_empty_asu", ExtremeValue, zero_asu_stay),
        c("zero_rehab_stay_empty_rehab", ExtremeValue, zero_rehab_stay),
        c("extreme_asu_stay_accumulates_patients", ExtremeValue, extreme_asu_stay),
        c("all_routed_to_rehab", ExtremeValue, all_to_rehab),
        c("all_routed_to_other", ExtremeValue, all_to_other),
        c("all_routed_to_esd_leave_model", ExtremeValue, all_to_esd),
        c("no_external_rehab_arrivals", ExtremeValue, no_external_rehab),
        c("only_Stroke_asu_arrivals", ExtremeValue, || only_type_asu(PatientType::Stroke)),
        c("only_TIA_asu_arrivals", ExtremeValue, || only_type_asu(PatientType::Tia)),
        c("only_ComplexNeurological_asu_arrivals", ExtremeValue, || {
            only_type_asu(PatientType::ComplexNeurological)
        }),
        c("only_Other_asu_arrivals", ExtremeValue, || only_type_asu(PatientType::Other)),
        c("only_Stroke_rehab_external", ExtremeValue, || only_type_rehab(PatientType::Stroke)),
        c("only_TIA_rehab_external", ExtremeValue, || only_type_rehab(PatientType::Tia)),
        c("only_ComplexNeurological_rehab_external", ExtremeValue, || {
            only_type_rehab(PatientType::ComplexNeurological)
        }),
        c("only_Other_rehab_external", ExtremeValue, || only_type_rehab(PatientType::Other)),
        c("asu_alone_leaves_rehab_empty", ComponentIsolation, asu_alone),
        c("rehab_alone_leaves_asu_empty", ComponentIsolation, rehab_alone),
        c("asu_alone_is_poisson", ComponentIsolation, asu_poisson),
        c("rehab_alone_is_poisson", ComponentIsolation, rehab_poisson),
        c("occupancy_insensitive_to_stay_shape", ComponentIsolation, insensitivity),
        c("warm_up_leaves_trace_unchanged", WarmUp, warm_up_trace),
        c("longer_warm_up_counts_fewer_arrivals", WarmUp, longer_warm_up),
        c("doubling_run_length_doubles_arrivals", WarmUp, doubling_run_length),
        c("warm_up_barely_moves_occupancy", WarmUp, warm_up_occupancy),
        c("asu_flow_conserved", Conservation, asu_flow),
        c("rehab_flow_conserved", Conservation, rehab_flow),
        c("post_asu_destinations_cover_discharges", Conservation, destinations_sum),
        c("transfers_match_rehab_routing", Conservation, transfers_match),
        c("occupancy_pmfs_sum_to_one", DataCollection, pmfs_sum_to_one),
        c("delay_curves_non_increasing", DataCollection, delay_monotone),
        c("delay_curve_reaches_zero", DataCollection, delay_reaches_zero),
        c("audit_sample_count_matches_window", DataCollection, audit_count),
        c("mean_occupancy_matches_pmf_mean", DataCollection, mean_matches_pmf),
        c("trace_lines_well_formed", DataCollection, trace_format),
        c("deterministic_arrivals_counted_exactly", Oracle, deterministic_arrivals),
        c("delay_at_ten_matches_poisson_tail", Oracle, poisson_tail),
        c("rehab_routing_fraction_matches_pmf", Oracle, routing_fraction),
        c("asu_occupancy_matches_littles_law", Oracle, asu_littles_law),
        c("same_seed_reproduces_results", Oracle, same_seed),
        c("different_seed_changes_results", Oracle, different_seed),
        c("routing_not_summing_to_one_rejected", Configuration, bad_routing),
        c("missing_warm_up_rejected", Configuration, missing_warm_up),
    ]
}

fn example() -> StrokeExperiment {
    match Experiment::example(ModelId::Stroke) {
        Experiment::Stroke(e) => e,
        _ => unreachable!("stroke example"),
    }
}

fn det(v: f64) -> DistributionSpec {
    DistributionSpec::deterministic(v)
}

fn to(dest: Destination) -> Routing {
    [(dest, 1.0)].into_iter().collect()
}

fn single(params: PatientTypeParams, run_length: f64) -> StrokeExperiment {
    StrokeExperiment {
        types: [(PatientType::Stroke, params)].into_iter().collect(),
        run_length_days: run_length,
        warm_up_days: Some(0.0),
        audit_interval_days: 1.0,
        replications: 1,
        seed: Some(11),
        trace: false,
        delay_capacities: None,
    }
}

/// ASU-only type: exponential arrivals, given stay, given routing.
fn asu_type(mean_gap: f64, stay: DistributionSpec, post: Routing) -> PatientTypeParams {
    PatientTypeParams {
        asu_arrival: Some(DistributionSpec::exponential(mean_gap)),
        asu_los: Some(stay),
        post_asu: Some(post),
        rehab_los: Some(det(10.0)),
        ..Default::default()
    }
}

fn rehab_type(mean_gap: f64, stay: DistributionSpec) -> PatientTypeParams {
    PatientTypeParams {
        rehab_external_arrival: Some(DistributionSpec::exponential(mean_gap)),
        rehab_los: Some(stay),
        ..Default::default()
    }
}

fn reps(e: &StrokeExperiment, n: u32) -> Vec<ReplicationResult> {
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

fn pooled(rs: &[ReplicationResult], unit: &str) -> OccupancyAudit {
    let mut a = OccupancyAudit::default();
    for r in rs {
        if let Some(o) = r.occupancy(unit) {
            a.merge(o);
        }
    }
    a
}

fn only_zero(r: &ReplicationResult, unit: &str) -> Result<(), String> {
    let pmf = r.occupancy(unit).ok_or("unit missing")?.pmf().map_err(|e| e.to_string())?;
    ensure(pmf.probabilities() == [1.0], || {
        format!("{unit} occupancy pmf {:?}", pmf.probabilities())
    })
}

fn no_arrivals() -> Result<String, String> {
    let mut e = example();
    let never = det(e.run_length_days * 10.0);
    for p in e.types.values_mut() {
        p.asu_arrival = Some(never.clone());
        p.rehab_external_arrival = Some(never.clone());
    }
    let r = e.run_replication(0);
    only_zero(&r, UNIT_ASU)?;
    only_zero(&r, UNIT_REHAB)?;
    ensure(r.kpis.iter().all(|k| k.value == 0.0), || format!("{:?}", r.kpis))?;
    Ok("both units empty at every audit".into())
}

fn zero_asu_stay() -> Result<String, String> {
    let e = single(asu_type(1.0, det(0.0), to(Destination::Other)), 500.0);
    let r = e.run_replication(0);
    only_zero(&r, UNIT_ASU)?;
    Ok(format!("{} arrivals, ASU always empty", kpi(&r, KPI_ASU_ARRIVALS)))
}

fn zero_rehab_stay() -> Result<String, String> {
    let mut p = asu_type(1.0, det(3.0), to(Destination::Rehab));
    p.rehab_los = Some(det(0.0));
    p.rehab_external_arrival = Some(DistributionSpec::exponential(2.0));
    let r = single(p, 500.0).run_replication(0);
    only_zero(&r, UNIT_REHAB)?;
    Ok(format!("{} transfers, rehab always empty", kpi(&r, KPI_TRANSFERS)))
}

fn extreme_asu_stay() -> Result<String, String> {
    let e = single(asu_type(1.0, det(1e7), to(Destination::Other)), 365.0);
    let r = e.run_replication(0);
    let (adm, inside) = (count(&r, "asu_admissions"), count(&r, "asu_in_unit_at_end"));
    ensure(adm > 0.0 && adm == inside, || format!("{inside} in unit of {adm}"))?;
    Ok(format!("all {adm} admissions still in the ASU"))
}

fn all_to_rehab() -> Result<String, String> {
    let r = single(asu_type(1.0, det(2.0), to(Destination::Rehab)), 500.0).run_replication(0);
    ensure(count(&r, "asu_discharges") == count(&r, "rehab_transfers"), || {
        "not every discharge transferred".into()
    })?;
    Ok(format!("{} transfers", count(&r, "rehab_transfers")))
}

fn all_to_other() -> Result<String, String> {
    let r = single(asu_type(1.0, det(2.0), to(Destination::Other)), 500.0).run_replication(0);
    ensure(count(&r, "rehab_transfers") == 0.0, || "transfers seen".into())?;
    only_zero(&r, UNIT_REHAB)?;
    Ok("no transfers, rehab empty".into())
}

fn all_to_esd() -> Result<String, String> {
    let r = single(asu_type(1.0, det(2.0), to(Destination::Esd)), 500.0).run_replication(0);
    ensure(count(&r, "post_asu_esd") == count(&r, "asu_discharges"), || "not all ESD".into())?;
    only_zero(&r, UNIT_REHAB)?;
    Ok(format!("{} ESD discharges left the model", count(&r, "post_asu_esd")))
}

fn no_external_rehab() -> Result<String, String> {
    let mut e = example();
    for p in e.types.values_mut() {
        p.rehab_external_arrival = None;
    }
    e.validate().map_err(|e| e.to_string())?;
    let r = e.run_replication(0);
    ensure(kpi(&r, KPI_REHAB_EXTERNAL) == 0.0, || "external arrivals seen".into())?;
    ensure(kpi(&r, KPI_TRANSFERS) > 0.0, || "rehab should still see transfers".into())?;
    Ok(format!("rehab fed only by {} transfers", kpi(&r, KPI_TRANSFERS)))
}

fn keep_only(kind: PatientType) -> StrokeExperiment {
    let mut e = example();
    e.warm_up_days = Some(0.0);
    e.types.retain(|t, _| *t == kind);
    e
}

/// Mean count over replications against a Poisson expectation, allowing
/// five standard errors.
fn poisson_count(what: &str, rs: &[ReplicationResult], name: &str, expected: f64) -> Result<String, String> {
    let got = mean_kpi(rs, name);
    let se = (expected / rs.len() as f64).sqrt();
    let msg = format!("{what}: mean {got:.1}, expected {expected:.1}");
    if (got - expected).abs() <= 5.0 * se {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn only_type_asu(kind: PatientType) -> Result<String, String> {
    let e = keep_only(kind);
    let gap = e.types[&kind].asu_arrival.as_ref().ok_or("no ASU arrivals")?.mean();
    let rs = reps(&e, 5);
    poisson_count(&format!("{kind} ASU arrivals"), &rs, KPI_ASU_ARRIVALS, e.run_length_days / gap)
}

fn only_type_rehab(kind: PatientType) -> Result<String, String> {
    let mut e = keep_only(kind);
    e.types.get_mut(&kind).ok_or("type missing")?.asu_arrival = None;
    e.validate().map_err(|e| e.to_string())?;
    let gap = e.types[&kind]
        .rehab_external_arrival
        .as_ref()
        .ok_or("no rehab arrivals")?
        .mean();
    let rs = reps(&e, 5);
    ensure(rs.iter().all(|r| kpi(r, KPI_ASU_ARRIVALS) == 0.0), || "ASU arrivals seen".into())?;
    poisson_count(&format!("{kind} rehab arrivals"), &rs, KPI_REHAB_EXTERNAL, e.run_length_days / gap)
}

fn asu_alone() -> Result<String, String> {
    let mut e = example();
    for p in e.types.values_mut() {
        p.rehab_external_arrival = None;
        p.post_asu = Some(to(Destination::Other));
    }
    let r = e.run_replication(0);
    only_zero(&r, UNIT_REHAB)?;
    Ok(format!("ASU mean occupancy {:.2}, rehab empty", kpi(&r, KPI_ASU_OCCUPANCY)))
}

fn rehab_alone() -> Result<String, String> {
    let mut e = example();
    for p in e.types.values_mut() {
        p.asu_arrival = None;
    }
    e.validate().map_err(|e| e.to_string())?;
    let r = e.run_replication(0);
    only_zero(&r, UNIT_ASU)?;
    Ok(format!("rehab mean occupancy {:.2}, ASU empty", kpi(&r, KPI_REHAB_OCCUPANCY)))
}

const MGI_RUN: f64 = 20_000.0;

/// Total-variation distance of pooled occupancy to Poisson(5).
fn tv_to_poisson(rs: &[ReplicationResult], unit: &str) -> Result<f64, String> {
    let pmf = pooled(rs, unit).pmf().map_err(|e| e.to_string())?;
    Ok(pmf.total_variation(&poisson_pmf(5.0, pmf.max_level() + 30)))
}

fn mgi_asu(stay: DistributionSpec) -> Vec<ReplicationResult> {
    let mut e = single(asu_type(1.0, stay, to(Destination::Other)), MGI_RUN);
    e.warm_up_days = Some(100.0);
    reps(&e, 3)
}

fn asu_poisson() -> Result<String, String> {
    let tv = tv_to_poisson(&mgi_asu(DistributionSpec::lognormal(5.0, 2.0)), UNIT_ASU)?;
    ensure(tv < 0.02, || format!("TV distance {tv:.4}"))?;
    Ok(format!("TV distance to Poisson(5) = {tv:.4}"))
}

fn rehab_poisson() -> Result<String, String> {
    let mut e = single(rehab_type(1.0, DistributionSpec::lognormal(5.0, 2.0)), MGI_RUN);
    e.warm_up_days = Some(100.0);
    let tv = tv_to_poisson(&reps(&e, 3), UNIT_REHAB)?;
    ensure(tv < 0.02, || format!("TV distance {tv:.4}"))?;
    Ok(format!("TV distance to Poisson(5) = {tv:.4}"))
}

fn insensitivity() -> Result<String, String> {
    let a = pooled(&mgi_asu(DistributionSpec::exponential(5.0)), UNIT_ASU);
    let b = pooled(&mgi_asu(DistributionSpec::lognormal(5.0, 8.0)), UNIT_ASU);
    let (pa, pb) = (a.pmf().map_err(|e| e.to_string())?, b.pmf().map_err(|e| e.to_string())?);
    let tv = pa.total_variation(&pb);
    ensure(tv < 0.03, || format!("TV distance {tv:.4}"))?;
    Ok(format!("exponential vs lognormal stays: TV distance {tv:.4}"))
}

fn warm_up_trace() -> Result<String, String> {
    let mut a = example();
    a.trace = true;
    a.run_length_days = 730.0;
    a.warm_up_days = Some(0.0);
    let mut b = a.clone();
    b.warm_up_days = Some(365.0);
    let (ra, rb) = (a.run_replication(0), b.run_replication(0));
    ensure(ra.trace == rb.trace, || "traces differ".into())?;
    ensure(ra.kpis != rb.kpis, || "KPIs unchanged".into())?;
    Ok(format!("{} identical trace lines, KPIs differ", ra.trace.len()))
}

fn longer_warm_up() -> Result<String, String> {
    let mut counts = Vec::new();
    for w in [0.0, 365.0, 730.0, 1095.0] {
        let mut e = example();
        e.warm_up_days = Some(w);
        counts.push(kpi(&e.run_replication(0), KPI_ASU_ARRIVALS));
    }
    ensure(counts.windows(2).all(|p| p[1] < p[0]), || format!("{counts:?}"))?;
    Ok(format!("ASU arrivals {counts:?}"))
}

fn doubling_run_length() -> Result<String, String> {
    let mut e = example();
    e.warm_up_days = Some(0.0);
    let short = mean_kpi(&reps(&e, 5), KPI_ASU_ARRIVALS);
    e.run_length_days *= 2.0;
    let long = mean_kpi(&reps(&e, 5), KPI_ASU_ARRIVALS);
    within("arrival ratio", long / short, 2.0, 0.03)
}

fn warm_up_occupancy() -> Result<String, String> {
    let mut a = example();
    a.warm_up_days = Some(100.0);
    let mut b = a.clone();
    b.warm_up_days = Some(365.0);
    within(
        "ASU mean occupancy",
        mean_kpi(&reps(&b, 5), KPI_ASU_OCCUPANCY),
        mean_kpi(&reps(&a, 5), KPI_ASU_OCCUPANCY),
        0.05,
    )
}

fn example_reps() -> Vec<ReplicationResult> {
    reps(&example(), 3)
}

fn asu_flow() -> Result<String, String> {
    for r in example_reps() {
        let (a, d, i) = (count(&r, "asu_admissions"), count(&r, "asu_discharges"), count(&r, "asu_in_unit_at_end"));
        ensure(a == d + i, || format!("admissions {a} != discharges {d} + in unit {i}"))?;
    }
    Ok("ASU admissions = discharges + in unit at end".into())
}

fn rehab_flow() -> Result<String, String> {
    for r in example_reps() {
        let admitted = count(&r, "rehab_external") + count(&r, "rehab_transfers");
        let out = count(&r, "rehab_discharges") + count(&r, "rehab_in_unit_at_end");
        ensure(admitted == out, || format!("admitted {admitted} != out {out}"))?;
    }
    Ok("rehab external + transfers = discharges + in unit at end".into())
}

fn destinations_sum() -> Result<String, String> {
    for r in example_reps() {
        let sum = count(&r, "post_asu_rehab") + count(&r, "post_asu_esd") + count(&r, "post_asu_other");
        ensure(sum == count(&r, "asu_discharges"), || format!("{sum} routed"))?;
    }
    Ok("every ASU discharge routed exactly once".into())
}

fn transfers_match() -> Result<String, String> {
    for r in example_reps() {
        ensure(count(&r, "post_asu_rehab") == count(&r, "rehab_transfers"), || {
            "rehab routings and transfers differ".into()
        })?;
    }
    Ok("rehab routings = rehab transfers".into())
}

fn summary() -> crate::experiment::ScenarioSummary {
    let e = Experiment::Stroke(example());
    let rs = example_reps();
    e.summarise("base", &rs)
}

fn pmfs_sum_to_one() -> Result<String, String> {
    let s = summary();
    for u in &s.units {
        let pmf = u.pmf.as_ref().ok_or("missing pmf")?;
        let total: f64 = pmf.probabilities().iter().sum();
        ensure((total - 1.0).abs() < 1e-12, || format!("{} sums to {total}", u.unit))?;
    }
    Ok("ASU and rehab pmfs sum to 1".into())
}

fn delay_monotone() -> Result<String, String> {
    let s = summary();
    for u in &s.units {
        let curve = u.delay.as_ref().ok_or("missing delay curve")?;
        ensure(curve.points.windows(2).all(|w| w[0].0 < w[1].0 && w[1].1 <= w[0].1), || {
            format!("{} curve not monotone", u.unit)
        })?;
    }
    Ok("both curves non-increasing in capacity".into())
}

fn delay_reaches_zero() -> Result<String, String> {
    let rs = example_reps();
    let pmf = pooled(&rs, UNIT_ASU).pmf().map_err(|e| e.to_string())?;
    let mut e = example();
    e.delay_capacities = None;
    let range = e.delay_capacities(UNIT_ASU, &pmf);
    let curve = pmf.delay_curve(range).map_err(|e| e.to_string())?;
    let last = curve.points.last().ok_or("empty curve")?;
    ensure(last.1 == 0.0, || format!("p_delay({}) = {}", last.0, last.1))?;
    Ok(format!("p_delay({}) = 0 beyond the largest occupancy", last.0))
}

fn audit_count() -> Result<String, String> {
    let e = example();
    let r = e.run_replication(0);
    let expected = (e.run_length_days - e.warm_up_days.unwrap_or(0.0)) / e.audit_interval_days;
    for unit in [UNIT_ASU, UNIT_REHAB] {
        let n = r.occupancy(unit).map(|a| a.samples()).unwrap_or(0);
        ensure(n as f64 == expected, || format!("{unit}: {n} samples, expected {expected}"))?;
    }
    Ok(format!("{expected} daily audits per unit"))
}

fn mean_matches_pmf() -> Result<String, String> {
    let r = example().run_replication(0);
    for (unit, name) in [(UNIT_ASU, KPI_ASU_OCCUPANCY), (UNIT_REHAB, KPI_REHAB_OCCUPANCY)] {
        let pmf = r.occupancy(unit).ok_or("unit missing")?.pmf().map_err(|e| e.to_string())?;
        let k = kpi(&r, name);
        ensure((pmf.mean() - k).abs() < 1e-9, || format!("{unit}: {k} vs {}", pmf.mean()))?;
    }
    Ok("KPI means equal pmf means".into())
}

fn trace_format() -> Result<String, String> {
    let mut e = example();
    e.trace = true;
    e.run_length_days = 400.0;
    let r = e.run_replication(0);
    trace_lines_well_formed(&r.trace)?;
    for kind in ["asu_arrival", "asu_discharge", "rehab_arrival", "rehab_discharge"] {
        let tag = format!("event={kind}");
        ensure(r.trace.iter().any(|l| l.contains(&tag)), || format!("no {kind} events"))?;
    }
    Ok(format!("{} lines, every event kind present", r.trace.len()))
}

fn deterministic_arrivals() -> Result<String, String> {
    let mut p = asu_type(1.0, det(0.0), to(Destination::Other));
    p.asu_arrival = Some(det(1.0));
    let r = single(p, 100.0).run_replication(0);
    ensure(kpi(&r, KPI_ASU_ARRIVALS) == 100.0, || format!("{} arrivals", kpi(&r, KPI_ASU_ARRIVALS)))?;
    Ok("100 arrivals at t = 1..100".into())
}

fn poisson_tail() -> Result<String, String> {
    let pmf = pooled(&mgi_asu(DistributionSpec::lognormal(5.0, 2.0)), UNIT_ASU)
        .pmf()
        .map_err(|e| e.to_string())?;
    let p = pmf.prob_delay(10).map_err(|e| e.to_string())?;
    let exact = poisson_pmf(5.0, 80).prob_delay(10).map_err(|e| e.to_string())?;
    ensure((p - exact).abs() <= 0.01, || format!("p_delay(10) = {p:.4}, exact {exact:.4}"))?;
    Ok(format!("p_delay(10) = {p:.4}, exact {exact:.4}"))
}

fn routing_fraction() -> Result<String, String> {
    let post: Routing = [(Destination::Rehab, 0.24), (Destination::Other, 0.76)].into_iter().collect();
    let mut p = asu_type(0.2, det(0.5), post);
    p.rehab_los = Some(det(1.0));
    let r = single(p, MGI_RUN).run_replication(0);
    let n = count(&r, "asu_discharges");
    let frac = count(&r, "post_asu_rehab") / n;
    ensure(n > 90_000.0 && (frac - 0.24).abs() <= 0.005, || format!("{frac:.4} of {n}"))?;
    Ok(format!("transfer fraction {frac:.4} over {n} discharges"))
}

fn asu_littles_law() -> Result<String, String> {
    let mut e = example();
    e.run_length_days = 3650.0;
    let expected: f64 = e
        .types
        .values()
        .filter_map(|p| Some(p.asu_los.as_ref()?.mean() / p.asu_arrival.as_ref()?.mean()))
        .sum();
    within("ASU mean occupancy", mean_kpi(&reps(&e, 5), KPI_ASU_OCCUPANCY), expected, 0.03)
}

fn same_seed() -> Result<String, String> {
    let e = example();
    ensure(e.run_replication(1) == e.run_replication(1), || "results differ".into())?;
    Ok("identical replication results".into())
}

fn different_seed() -> Result<String, String> {
    let a = example();
    let mut b = a.clone();
    b.seed = Some(a.seed.unwrap_or(0) + 1);
    ensure(a.run_replication(0).kpis != b.run_replication(0).kpis, || "results identical".into())?;
    Ok("KPIs differ".into())
}

fn bad_routing() -> Result<String, String> {
    let mut e = example();
    let p = e.types.get_mut(&PatientType::Tia).ok_or("TIA missing")?;
    p.post_asu = Some([(Destination::Rehab, 0.5), (Destination::Other, 0.6)].into_iter().collect());
    let err = e.validate().err().ok_or("bad routing accepted")?;
    ensure(err.errors().iter().any(|f| f.path == "types.TIA.post_asu"), || err.to_string())?;
    Ok(err.to_string())
}

fn missing_warm_up() -> Result<String, String> {
    let mut e = example();
    e.warm_up_days = None;
    let err = e.validate().err().ok_or("missing warm-up accepted")?;
    ensure(err.errors().iter().any(|f| f.path == "warm_up_days"), || err.to_string())?;
    Ok(err.to_string())
}
