//! Critical care unit bed model.
//!
//! Five unplanned sources and one elective stream share a pool of beds.
//! Unplanned patients queue (priority 0) when every bed is held; electives
//! never queue and are cancelled instead. After each stay the bed stays
//! blocked for a deterministic turnaround. All times are in hours.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::engine::{Acquire, CountedResource, Handler, SimTime, Simulation, TraceRecord, Tracer};
use crate::experiment::config::Validator;
use crate::experiment::{ConfigError, KpiValue, ReplicationResult, RunSettings, UnitOccupancy};
use crate::models::occupancy::OccupancyAudit;
use crate::sampling::{DistributionSpec, Sampler, Stream, StreamAllocator, StreamRegistry};

pub const HOURS_PER_YEAR: f64 = 8760.0;

/// Where a CCU admission comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "String")]
pub enum Source {
    AandE,
    Ward,
    EmergencySurgery,
    OtherHospital,
    XRay,
    Elective,
}

impl Source {
    pub const ALL: [Source; 6] = [
        Source::AandE,
        Source::Ward,
        Source::EmergencySurgery,
        Source::OtherHospital,
        Source::XRay,
        Source::Elective,
    ];

    pub const UNPLANNED: [Source; 5] = [
        Source::AandE,
        Source::Ward,
        Source::EmergencySurgery,
        Source::OtherHospital,
        Source::XRay,
    ];

    pub fn label(self) -> &'static str {
        match self {
            Source::AandE => "AandE",
            Source::Ward => "Ward",
            Source::EmergencySurgery => "EmergencySurgery",
            Source::OtherHospital => "OtherHospital",
            Source::XRay => "XRay",
            Source::Elective => "Elective",
        }
    }

    pub fn is_unplanned(self) -> bool {
        self != Source::Elective
    }

    /// Queue priority; smaller is more urgent.
    pub fn priority(self) -> i32 {
        if self.is_unplanned() {
            0
        } else {
            1
        }
    }

    fn index(self) -> usize {
        self as usize
    }
}

impl TryFrom<String> for Source {
    type Error = String;

    fn try_from(s: String) -> Result<Self, String> {
        Source::ALL
            .into_iter()
            .find(|x| x.label() == s)
            .ok_or_else(|| format!("unknown source {s:?}"))
    }
}

impl fmt::Display for Source {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// Stream slots: 0–5 inter-arrival times, 6–11 lengths of stay, both in
/// [`Source::ALL`] order.
pub const STREAMS: StreamRegistry = StreamRegistry::new(&[
    "arrival.AandE",
    "arrival.Ward",
    "arrival.EmergencySurgery",
    "arrival.OtherHospital",
    "arrival.XRay",
    "arrival.Elective",
    "los.AandE",
    "los.Ward",
    "los.EmergencySurgery",
    "los.OtherHospital",
    "los.XRay",
    "los.Elective",
]);

pub const KPI_PATIENT_COUNT: &str = "patient_count";
pub const KPI_CANCELLED: &str = "cancelled_electives";
pub const KPI_UTILIZATION: &str = "bed_utilization";
pub const KPI_OCCUPANCY: &str = "mean_bed_occupancy";
pub const KPI_WAIT: &str = "mean_unplanned_wait";
pub const KPI_ELECTIVE_ARRIVALS: &str = "elective_arrivals";
pub const KPI_UNPLANNED_ADMISSIONS: &str = "unplanned_admissions";

pub const UNIT_CCU: &str = "CCU";

fn default_beds() -> u32 {
    24
}
fn default_turnaround() -> f64 {
    5.0
}
fn default_run_length() -> f64 {
    HOURS_PER_YEAR
}
fn default_replications() -> u32 {
    5
}
fn default_audit() -> f64 {
    1.0
}

/// A complete CCU experiment: model parameters plus run control.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CcuExperiment {
    #[serde(default = "default_beds")]
    pub n_beds: u32,
    #[serde(default = "default_turnaround")]
    pub turnaround_hours: f64,
    /// Inter-arrival time per source.
    #[serde(default)]
    pub arrivals: BTreeMap<Source, DistributionSpec>,
    /// Length of stay per source.
    #[serde(default)]
    pub los: BTreeMap<Source, DistributionSpec>,
    #[serde(default = "default_run_length")]
    pub run_length_hours: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub warm_up_hours: Option<f64>,
    #[serde(default = "default_replications")]
    pub replications: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default = "default_audit")]
    pub audit_interval_hours: f64,
    #[serde(default)]
    pub trace: bool,
}

impl CcuExperiment {
    pub(crate) fn validate_into(&self, v: &mut Validator) {
        v.check(self.n_beds >= 1, "n_beds", "must be at least 1");
        v.check(
            self.turnaround_hours.is_finite() && self.turnaround_hours >= 0.0,
            "turnaround_hours",
            "must be >= 0",
        );
        for s in Source::ALL {
            match self.arrivals.get(&s) {
                Some(spec) => v.inter_arrival(&format!("arrivals.{s}"), spec),
                None => v.push(format!("arrivals.{s}"), "required"),
            }
            match self.los.get(&s) {
                Some(spec) => v.duration(&format!("los.{s}"), spec),
                None => v.push(format!("los.{s}"), "required"),
            }
        }
        v.run_control(
            "hours",
            self.run_length_hours,
            self.warm_up_hours,
            self.audit_interval_hours,
            self.replications,
        );
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let mut v = Validator::default();
        self.validate_into(&mut v);
        v.finish()
    }

    pub fn settings(&self) -> RunSettings {
        RunSettings {
            run_length: self.run_length_hours,
            warm_up: self.warm_up_hours.unwrap_or(0.0),
            audit_interval: self.audit_interval_hours,
            replications: self.replications,
            seed: self.seed.unwrap_or(0),
            trace: self.trace,
        }
    }

    /// Runs one replication. The experiment must already be valid.
    pub fn run_replication(&self, replication: u32) -> ReplicationResult {
        let settings = self.settings();
        let alloc = StreamAllocator::new(settings.seed, u64::from(replication));
        let mut model = CcuRun::new(self, &settings, &alloc);
        let mut sim = Simulation::new();
        model.start(&mut sim);
        let end = SimTime::new(settings.run_length).expect("validated run length");
        sim.run_until(end, &mut model);
        model.finish(replication, sim.fired())
    }
}

#[derive(Debug, Clone, Copy)]
struct Patient {
    id: u64,
    source: Source,
}

#[derive(Debug, Clone, Copy)]
enum Event {
    Arrival(Source),
    Discharge(Patient),
    BedReady(Patient),
    Audit,
}

struct CcuRun {
    warm_up: SimTime,
    audit_interval: f64,
    turnaround: f64,
    beds: CountedResource<Patient>,
    arrival: Vec<Sampler>,
    los: Vec<Sampler>,
    streams: Vec<Stream>,
    next_id: u64,
    tracer: Tracer,
    // Collection-window accumulators.
    arrivals: [u64; 6],
    cancelled: u64,
    waits: Vec<f64>,
    audit: OccupancyAudit,
    // Whole-run bookkeeping.
    total_arrivals: u64,
    total_cancelled: u64,
    total_admitted: u64,
    total_released: u64,
    max_in_use: usize,
}

impl CcuRun {
    fn new(exp: &CcuExperiment, settings: &RunSettings, alloc: &StreamAllocator) -> Self {
        let compile = |m: &BTreeMap<Source, DistributionSpec>| -> Vec<Sampler> {
            Source::ALL
                .iter()
                .map(|s| m[s].sampler().expect("validated distribution"))
                .collect()
        };
        let warm_up = SimTime::new(settings.warm_up).expect("validated warm-up");
        CcuRun {
            warm_up,
            audit_interval: settings.audit_interval,
            turnaround: exp.turnaround_hours,
            beds: CountedResource::new(exp.n_beds as usize),
            arrival: compile(&exp.arrivals),
            los: compile(&exp.los),
            streams: alloc.spawn(STREAMS.len()).expect("non-empty registry"),
            next_id: 0,
            tracer: Tracer::new(settings.trace),
            arrivals: [0; 6],
            cancelled: 0,
            waits: Vec::new(),
            audit: OccupancyAudit::new(warm_up),
            total_arrivals: 0,
            total_cancelled: 0,
            total_admitted: 0,
            total_released: 0,
            max_in_use: 0,
        }
    }

    fn start(&mut self, sim: &mut Simulation<Event>) {
        for s in Source::ALL {
            self.schedule_arrival(sim, s);
        }
        sim.schedule(self.warm_up + 0.5 * self.audit_interval, Event::Audit)
            .expect("audit in the future");
    }

    fn in_window(&self, now: SimTime) -> bool {
        now >= self.warm_up
    }

    fn schedule_arrival(&mut self, sim: &mut Simulation<Event>, source: Source) {
        let i = source.index();
        let gap = self.arrival[i].sample(&mut self.streams[i]);
        sim.schedule_in(gap, Event::Arrival(source))
            .expect("non-negative inter-arrival time");
    }

    fn trace(&mut self, now: SimTime, p: Patient, kind: &'static str, detail: Option<String>) {
        let mut rec = TraceRecord::new(now, p.id, p.source.label(), kind);
        rec.detail = detail;
        self.tracer.emit(rec);
    }

    fn admit(&mut self, sim: &mut Simulation<Event>, patient: Patient, wait: f64) {
        let now = sim.now();
        self.total_admitted += 1;
        self.max_in_use = self.max_in_use.max(self.beds.in_use());
        if patient.source.is_unplanned() && self.in_window(now) {
            self.waits.push(wait);
        }
        let detail = self
            .tracer
            .is_verbose()
            .then(|| format!("wait={wait:.2} beds={}/{}", self.beds.in_use(), self.beds.capacity()));
        self.trace(now, patient, "admission", detail);
        let i = STREAMS.len() / 2 + patient.source.index();
        let stay = self.los[patient.source.index()].sample(&mut self.streams[i]);
        sim.schedule_in(stay, Event::Discharge(patient))
            .expect("non-negative length of stay");
    }

    fn on_arrival(&mut self, sim: &mut Simulation<Event>, source: Source) {
        let now = sim.now();
        let patient = Patient {
            id: self.next_id,
            source,
        };
        self.next_id += 1;
        self.total_arrivals += 1;
        if self.in_window(now) {
            self.arrivals[source.index()] += 1;
        }
        self.trace(now, patient, "arrival", None);
        self.schedule_arrival(sim, source);

        if source.is_unplanned() {
            match self.beds.request(patient, source.priority(), now) {
                Acquire::Granted => self.admit(sim, patient, 0.0),
                Acquire::Queued => {
                    let detail = self
                        .tracer
                        .is_verbose()
                        .then(|| format!("queue={}", self.beds.queue_len()));
                    self.trace(now, patient, "queued", detail);
                }
            }
        } else if self.beds.try_acquire() {
            self.admit(sim, patient, 0.0);
        } else {
            self.total_cancelled += 1;
            if self.in_window(now) {
                self.cancelled += 1;
            }
            self.trace(now, patient, "cancelled_operation", None);
        }
    }

    fn finish(self, replication: u32, events_fired: u64) -> ReplicationResult {
        let mut warnings = Vec::new();
        let occupancy = self.audit.mean().unwrap_or_else(|| {
            warnings.push(format!("{KPI_OCCUPANCY}: no audit samples in the collection window, reported as 0"));
            0.0
        });
        let wait = if self.waits.is_empty() {
            warnings.push(format!("{KPI_WAIT}: no unplanned admissions in the collection window, reported as 0"));
            0.0
        } else {
            self.waits.iter().sum::<f64>() / self.waits.len() as f64
        };
        let patient_count: u64 = self.arrivals.iter().sum();
        let n_beds = self.beds.capacity() as f64;
        let unplanned_admissions = self.waits.len();
        let trace_emitted = self.tracer.emitted();
        ReplicationResult {
            replication,
            kpis: vec![
                KpiValue::new(KPI_PATIENT_COUNT, patient_count as f64),
                KpiValue::new(KPI_CANCELLED, self.cancelled as f64),
                KpiValue::new(KPI_UTILIZATION, occupancy / n_beds),
                KpiValue::new(KPI_OCCUPANCY, occupancy),
                KpiValue::new(KPI_WAIT, wait),
                KpiValue::new(KPI_ELECTIVE_ARRIVALS, self.arrivals[Source::Elective.index()] as f64),
                KpiValue::new(KPI_UNPLANNED_ADMISSIONS, unplanned_admissions as f64),
            ],
            occupancy: vec![UnitOccupancy {
                unit: UNIT_CCU.into(),
                audit: self.audit,
            }],
            run_counts: vec![
                KpiValue::new("arrivals", self.total_arrivals as f64),
                KpiValue::new("cancelled", self.total_cancelled as f64),
                KpiValue::new("admitted", self.total_admitted as f64),
                KpiValue::new("released", self.total_released as f64),
                KpiValue::new("held_at_end", self.beds.in_use() as f64),
                KpiValue::new("queued_at_end", self.beds.queue_len() as f64),
                KpiValue::new("max_held", self.max_in_use as f64),
                KpiValue::new("n_beds", n_beds),
            ],
            warnings,
            events_fired,
            trace_emitted,
            trace: self.tracer.into_lines(),
        }
    }
}

impl Handler<Event> for CcuRun {
    fn handle(&mut self, sim: &mut Simulation<Event>, event: Event) {
        let now = sim.now();
        match event {
            Event::Arrival(source) => self.on_arrival(sim, source),
            Event::Discharge(patient) => {
                self.trace(now, patient, "discharge", None);
                sim.schedule_in(self.turnaround, Event::BedReady(patient))
                    .expect("non-negative turnaround");
            }
            Event::BedReady(patient) => {
                self.total_released += 1;
                self.trace(now, patient, "bed_ready", None);
                let grant = self.beds.release(now).expect("bed was held");
                if let Some(g) = grant {
                    let wait = g.wait();
                    self.admit(sim, g.token, wait);
                }
            }
            Event::Audit => {
                self.audit.record(now, self.beds.in_use() as u32);
                sim.schedule_in(self.audit_interval, Event::Audit)
                    .expect("positive audit interval");
            }
        }
    }
}

/// The shipped example document.
pub const EXAMPLE_JSON: &str = include_str!("../../configs/ccu.json");

#[cfg(test)]
mod tests {
    use super::*;

    fn det(v: f64) -> DistributionSpec {
        DistributionSpec::deterministic(v)
    }

    /// Every source off (first arrival after the run ends) unless overridden.
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
            seed: Some(1),
            audit_interval_hours: 1.0,
            trace: true,
        }
    }

    #[test]
    fn deterministic_arrivals_count() {
        let mut e = quiet(100.0);
        e.arrivals.insert(Source::AandE, det(10.0));
        e.los.insert(Source::AandE, det(0.0));
        let r = e.run_replication(0);
        assert_eq!(r.kpi(KPI_PATIENT_COUNT), Some(10.0));
    }

    #[test]
    fn bed_released_after_stay_plus_turnaround() {
        let mut e = quiet(30.0);
        e.arrivals.insert(Source::Ward, det(20.0));
        e.los.insert(Source::Ward, det(5.0));
        e.turnaround_hours = 5.0;
        let r = e.run_replication(0);
        assert!(r.trace.contains(&"t=20.00 id=0 class=Ward event=arrival".to_string()));
        assert!(r.trace.contains(&"t=25.00 id=0 class=Ward event=discharge".to_string()));
        assert!(r.trace.contains(&"t=30.00 id=0 class=Ward event=bed_ready".to_string()));
    }

    #[test]
    fn zero_turnaround_releases_at_end_of_stay() {
        let mut e = quiet(30.0);
        e.arrivals.insert(Source::Ward, det(20.0));
        e.los.insert(Source::Ward, det(5.0));
        let r = e.run_replication(0);
        assert!(r.trace.contains(&"t=25.00 id=0 class=Ward event=bed_ready".to_string()));
    }

    #[test]
    fn saturated_unit_cancels_every_elective() {
        let mut e = quiet(1000.0);
        e.n_beds = 1;
        e.arrivals.insert(Source::XRay, DistributionSpec::deterministic(1.0));
        e.los.insert(Source::XRay, det(1e6));
        e.arrivals.insert(Source::Elective, det(3.0));
        let r = e.run_replication(0);
        let electives = r.kpi(KPI_ELECTIVE_ARRIVALS).unwrap();
        assert_eq!(electives, 333.0);
        assert_eq!(r.kpi(KPI_CANCELLED), Some(electives));
    }

    #[test]
    fn unplanned_queue_then_admitted_with_wait() {
        let mut e = quiet(50.0);
        e.n_beds = 1;
        e.arrivals.insert(Source::AandE, det(10.0));
        e.los.insert(Source::AandE, det(15.0));
        let r = e.run_replication(0);
        // t=10 admit #0 (free at 25); t=20 #1 queues, admitted at 25 (wait 5,
        // free at 40); t=30 #2 queues, admitted at 40 (wait 10); t=40 #3 and
        // t=50 #4 still queued at the end.
        let wait = r.kpi(KPI_WAIT).unwrap();
        assert!((wait - 5.0).abs() < 1e-12, "{wait}");
        assert_eq!(r.count("queued_at_end"), Some(2.0));
    }

    #[test]
    fn empty_window_is_zero_with_warning() {
        let e = quiet(10.0);
        let r = e.run_replication(0);
        assert!(r.kpis.iter().all(|k| k.value == 0.0 || k.name == KPI_UTILIZATION));
        assert_eq!(r.kpi(KPI_WAIT), Some(0.0));
        assert!(!r.warnings.is_empty());
    }

    #[test]
    fn example_config_parses_and_validates() {
        let v: serde_json::Value = serde_json::from_str(EXAMPLE_JSON).unwrap();
        assert_eq!(v["n_beds"], 24);
        let mut map = v.as_object().unwrap().clone();
        map.remove("model");
        let e: CcuExperiment = serde_json::from_value(map.into()).unwrap();
        e.validate().unwrap();
    }

    #[test]
    fn missing_los_entry_is_named() {
        let mut e = quiet(10.0);
        e.los.remove(&Source::AandE);
        let err = e.validate().unwrap_err();
        assert!(err.errors().iter().any(|f| f.path == "los.AandE"), "{err}");
    }

    #[test]
    fn negative_mean_is_named() {
        let mut e = quiet(10.0);
        e.arrivals.insert(Source::Ward, DistributionSpec::exponential(-3.0));
        let err = e.validate().unwrap_err();
        assert!(err.errors().iter().any(|f| f.path == "arrivals.Ward.mean"), "{err}");
    }

    #[test]
    fn zero_gap_arrivals_rejected() {
        let mut e = quiet(10.0);
        e.arrivals.insert(Source::Ward, det(0.0));
        assert!(e.validate().is_err());
    }
}
