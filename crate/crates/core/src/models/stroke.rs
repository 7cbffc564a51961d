//! Acute stroke unit (ASU) and rehabilitation unit capacity model.
//!
//! Both units have unlimited beds. Patients arrive at the ASU, stay for a
//! type-specific length of stay, then are routed to rehab, early supported
//! discharge (ESD) or elsewhere. ESD and other destinations leave the model.
//! Rehab also receives external arrivals. Occupancy is audited once per
//! interval and the pooled occupancy distribution gives the probability of
//! delay for any candidate bed count. All times are in days.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::RangeInclusive;

use serde::{Deserialize, Serialize};

use crate::engine::{Handler, SimTime, Simulation, TraceRecord, Tracer};
use crate::experiment::config::Validator;
use crate::experiment::{ConfigError, KpiValue, ReplicationResult, RunSettings, UnitOccupancy};
use crate::models::occupancy::{OccupancyAudit, OccupancyPmf};
use crate::sampling::{DistributionSpec, Sampler, Stream, StreamAllocator, StreamRegistry};

pub const DAYS_PER_YEAR: f64 = 365.0;

/// Patient classification shared by both units.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "String")]
pub enum PatientType {
    Stroke,
    #[serde(rename = "TIA")]
    Tia,
    ComplexNeurological,
    Other,
}

impl PatientType {
    pub const ALL: [PatientType; 4] = [
        PatientType::Stroke,
        PatientType::Tia,
        PatientType::ComplexNeurological,
        PatientType::Other,
    ];

    pub fn label(self) -> &'static str {
        match self {
            PatientType::Stroke => "Stroke",
            PatientType::Tia => "TIA",
            PatientType::ComplexNeurological => "ComplexNeurological",
            PatientType::Other => "Other",
        }
    }

    fn index(self) -> usize {
        self as usize
    }
}

impl TryFrom<String> for PatientType {
    type Error = String;

    fn try_from(s: String) -> Result<Self, String> {
        PatientType::ALL
            .into_iter()
            .find(|x| x.label() == s)
            .ok_or_else(|| format!("unknown patient type {s:?}"))
    }
}

impl fmt::Display for PatientType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// Where a patient goes after a stay.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "String")]
pub enum Destination {
    Rehab,
    #[serde(rename = "ESD")]
    Esd,
    Other,
}

impl Destination {
    pub const ALL: [Destination; 3] = [Destination::Rehab, Destination::Esd, Destination::Other];

    pub fn label(self) -> &'static str {
        match self {
            Destination::Rehab => "Rehab",
            Destination::Esd => "ESD",
            Destination::Other => "Other",
        }
    }
}

impl TryFrom<String> for Destination {
    type Error = String;

    fn try_from(s: String) -> Result<Self, String> {
        Destination::ALL
            .into_iter()
            .find(|x| x.label() == s)
            .ok_or_else(|| format!("unknown destination {s:?}"))
    }
}

impl fmt::Display for Destination {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// Probabilities over destinations; absent destinations have probability 0.
pub type Routing = BTreeMap<Destination, f64>;

fn routing_spec(r: &Routing) -> DistributionSpec {
    DistributionSpec::discrete(
        Destination::ALL
            .iter()
            .map(|d| (d.label(), r.get(d).copied().unwrap_or(0.0))),
    )
}

/// Parameters of one patient type.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PatientTypeParams {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub asu_arrival: Option<DistributionSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub asu_los: Option<DistributionSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub post_asu: Option<Routing>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rehab_external_arrival: Option<DistributionSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rehab_los: Option<DistributionSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub post_rehab: Option<Routing>,
}

impl PatientTypeParams {
    fn reaches_rehab(&self) -> bool {
        self.rehab_external_arrival.is_some()
            || self
                .post_asu
                .as_ref()
                .and_then(|r| r.get(&Destination::Rehab))
                .is_some_and(|&p| p > 0.0)
    }
}

/// Candidate capacities for the delay curves.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CapacityRanges {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub asu: Option<[u32; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rehab: Option<[u32; 2]>,
}

pub const UNIT_ASU: &str = "ASU";
pub const UNIT_REHAB: &str = "Rehab";

pub const KPI_ASU_ARRIVALS: &str = "asu_arrivals";
pub const KPI_REHAB_EXTERNAL: &str = "rehab_external_arrivals";
pub const KPI_TRANSFERS: &str = "asu_to_rehab_transfers";
pub const KPI_ASU_OCCUPANCY: &str = "asu_mean_occupancy";
pub const KPI_REHAB_OCCUPANCY: &str = "rehab_mean_occupancy";

/// Six slots per patient type, in [`PatientType::ALL`] order:
/// ASU inter-arrival, ASU stay, post-ASU routing, external rehab
/// inter-arrival, rehab stay, post-rehab routing. Slot of type `t`, activity
/// `k` is `6t + k`, whether or not the type is configured.
pub const STREAMS: StreamRegistry = StreamRegistry::new(&[
    "Stroke.asu_arrival",
    "Stroke.asu_los",
    "Stroke.post_asu",
    "Stroke.rehab_external_arrival",
    "Stroke.rehab_los",
    "Stroke.post_rehab",
    "TIA.asu_arrival",
    "TIA.asu_los",
    "TIA.post_asu",
    "TIA.rehab_external_arrival",
    "TIA.rehab_los",
    "TIA.post_rehab",
    "ComplexNeurological.asu_arrival",
    "ComplexNeurological.asu_los",
    "ComplexNeurological.post_asu",
    "ComplexNeurological.rehab_external_arrival",
    "ComplexNeurological.rehab_los",
    "ComplexNeurological.post_rehab",
    "Other.asu_arrival",
    "Other.asu_los",
    "Other.post_asu",
    "Other.rehab_external_arrival",
    "Other.rehab_los",
    "Other.post_rehab",
]);

const SLOTS_PER_TYPE: usize = 6;
const SLOT_ASU_ARRIVAL: usize = 0;
const SLOT_ASU_LOS: usize = 1;
const SLOT_POST_ASU: usize = 2;
const SLOT_REHAB_ARRIVAL: usize = 3;
const SLOT_REHAB_LOS: usize = 4;
const SLOT_POST_REHAB: usize = 5;

fn default_run_length() -> f64 {
    5.0 * DAYS_PER_YEAR
}
fn default_replications() -> u32 {
    5
}
fn default_audit() -> f64 {
    1.0
}

/// A complete stroke-pathway experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StrokeExperiment {
    #[serde(default)]
    pub types: BTreeMap<PatientType, PatientTypeParams>,
    #[serde(default = "default_run_length")]
    pub run_length_days: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub warm_up_days: Option<f64>,
    #[serde(default = "default_audit")]
    pub audit_interval_days: f64,
    #[serde(default = "default_replications")]
    pub replications: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default)]
    pub trace: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delay_capacities: Option<CapacityRanges>,
}

fn validate_routing(v: &mut Validator, path: &str, routing: &Routing, allow_rehab: bool) {
    if !allow_rehab && routing.get(&Destination::Rehab).is_some_and(|&p| p > 0.0) {
        v.push(format!("{path}.Rehab"), "rehab cannot route back to rehab");
    }
    if let Err(e) = routing_spec(routing).validate() {
        v.push(path, e.message);
    }
}

impl StrokeExperiment {
    pub(crate) fn validate_into(&self, v: &mut Validator) {
        if self.types.is_empty() {
            v.push("types", "at least one patient type is required");
        }
        for (t, p) in &self.types {
            let base = format!("types.{t}");
            if p.asu_arrival.is_none() && p.rehab_external_arrival.is_none() {
                v.push(
                    format!("{base}.asu_arrival"),
                    "required unless rehab_external_arrival is given",
                );
            }
            if let Some(a) = &p.asu_arrival {
                v.inter_arrival(&format!("{base}.asu_arrival"), a);
                match &p.asu_los {
                    Some(l) => v.duration(&format!("{base}.asu_los"), l),
                    None => v.push(format!("{base}.asu_los"), "required"),
                }
                match &p.post_asu {
                    Some(r) => validate_routing(v, &format!("{base}.post_asu"), r, true),
                    None => v.push(format!("{base}.post_asu"), "required"),
                }
            }
            if let Some(a) = &p.rehab_external_arrival {
                v.inter_arrival(&format!("{base}.rehab_external_arrival"), a);
            }
            if p.reaches_rehab() {
                match &p.rehab_los {
                    Some(l) => v.duration(&format!("{base}.rehab_los"), l),
                    None => v.push(format!("{base}.rehab_los"), "required"),
                }
            }
            if let Some(r) = &p.post_rehab {
                validate_routing(v, &format!("{base}.post_rehab"), r, false);
            }
        }
        if let Some(c) = &self.delay_capacities {
            for (name, range) in [("asu", c.asu), ("rehab", c.rehab)] {
                if let Some([lo, hi]) = range {
                    v.check(
                        lo >= 1 && lo <= hi,
                        &format!("delay_capacities.{name}"),
                        "needs 1 <= min <= max",
                    );
                }
            }
        }
        v.run_control(
            "days",
            self.run_length_days,
            self.warm_up_days,
            self.audit_interval_days,
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
            run_length: self.run_length_days,
            warm_up: self.warm_up_days.unwrap_or(0.0),
            audit_interval: self.audit_interval_days,
            replications: self.replications,
            seed: self.seed.unwrap_or(0),
            trace: self.trace,
        }
    }

    /// Capacities to evaluate for `unit`: the configured range, else 1 up to
    /// one past the largest occupancy seen.
    pub fn delay_capacities(&self, unit: &str, pmf: &OccupancyPmf) -> RangeInclusive<u32> {
        let configured = self.delay_capacities.as_ref().and_then(|c| match unit {
            UNIT_ASU => c.asu,
            UNIT_REHAB => c.rehab,
            _ => None,
        });
        match configured {
            Some([lo, hi]) => lo..=hi,
            None => 1..=(pmf.max_level() as u32 + 1),
        }
    }

    /// Runs one replication. The experiment must already be valid.
    pub fn run_replication(&self, replication: u32) -> ReplicationResult {
        let settings = self.settings();
        let alloc = StreamAllocator::new(settings.seed, u64::from(replication));
        let mut model = StrokeRun::new(self, &settings, &alloc);
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
    kind: PatientType,
}

#[derive(Debug, Clone, Copy)]
enum Event {
    AsuArrival(PatientType),
    RehabArrival(PatientType),
    AsuDischarge(Patient),
    RehabDischarge(Patient),
    Audit,
}

#[derive(Default)]
struct TypeSamplers {
    asu_arrival: Option<Sampler>,
    asu_los: Option<Sampler>,
    post_asu: Option<Sampler>,
    rehab_arrival: Option<Sampler>,
    rehab_los: Option<Sampler>,
    post_rehab: Option<Sampler>,
}

fn compile(spec: Option<&DistributionSpec>) -> Option<Sampler> {
    spec.map(|s| s.sampler().expect("validated distribution"))
}

struct StrokeRun {
    warm_up: SimTime,
    audit_interval: f64,
    samplers: Vec<TypeSamplers>,
    streams: Vec<Stream>,
    tracer: Tracer,
    next_id: u64,
    asu_occupancy: u32,
    rehab_occupancy: u32,
    asu_audit: OccupancyAudit,
    rehab_audit: OccupancyAudit,
    // Collection-window counters.
    asu_arrivals: u64,
    rehab_external: u64,
    transfers: u64,
    // Whole-run counters.
    total_asu_admissions: u64,
    total_asu_discharges: u64,
    total_rehab_external: u64,
    total_transfers: u64,
    total_rehab_discharges: u64,
    asu_destinations: [u64; 3],
}

impl StrokeRun {
    fn new(exp: &StrokeExperiment, settings: &RunSettings, alloc: &StreamAllocator) -> Self {
        let samplers = PatientType::ALL
            .iter()
            .map(|t| match exp.types.get(t) {
                None => TypeSamplers::default(),
                Some(p) => TypeSamplers {
                    asu_arrival: compile(p.asu_arrival.as_ref()),
                    asu_los: compile(p.asu_los.as_ref()),
                    post_asu: p.post_asu.as_ref().map(|r| {
                        routing_spec(r).sampler().expect("validated routing")
                    }),
                    rehab_arrival: compile(p.rehab_external_arrival.as_ref()),
                    rehab_los: compile(p.rehab_los.as_ref()),
                    post_rehab: p.post_rehab.as_ref().map(|r| {
                        routing_spec(r).sampler().expect("validated routing")
                    }),
                },
            })
            .collect();
        let warm_up = SimTime::new(settings.warm_up).expect("validated warm-up");
        StrokeRun {
            warm_up,
            audit_interval: settings.audit_interval,
            samplers,
            streams: alloc.spawn(STREAMS.len()).expect("non-empty registry"),
            tracer: Tracer::new(settings.trace),
            next_id: 0,
            asu_occupancy: 0,
            rehab_occupancy: 0,
            asu_audit: OccupancyAudit::new(warm_up),
            rehab_audit: OccupancyAudit::new(warm_up),
            asu_arrivals: 0,
            rehab_external: 0,
            transfers: 0,
            total_asu_admissions: 0,
            total_asu_discharges: 0,
            total_rehab_external: 0,
            total_transfers: 0,
            total_rehab_discharges: 0,
            asu_destinations: [0; 3],
        }
    }

    fn draw(&mut self, kind: PatientType, slot: usize) -> f64 {
        let s = &self.samplers[kind.index()];
        let sampler = match slot {
            SLOT_ASU_ARRIVAL => &s.asu_arrival,
            SLOT_ASU_LOS => &s.asu_los,
            SLOT_REHAB_ARRIVAL => &s.rehab_arrival,
            SLOT_REHAB_LOS => &s.rehab_los,
            _ => unreachable!("not a continuous slot"),
        };
        let sampler = sampler.as_ref().expect("validated: sampler configured");
        sampler.sample(&mut self.streams[kind.index() * SLOTS_PER_TYPE + slot])
    }

    fn route(&mut self, kind: PatientType, slot: usize) -> Destination {
        let s = &self.samplers[kind.index()];
        let sampler = match slot {
            SLOT_POST_ASU => s.post_asu.as_ref(),
            SLOT_POST_REHAB => s.post_rehab.as_ref(),
            _ => unreachable!("not a routing slot"),
        };
        match sampler {
            Some(r) => {
                Destination::ALL[r.sample_index(&mut self.streams[kind.index() * SLOTS_PER_TYPE + slot])]
            }
            None => Destination::Other,
        }
    }

    fn start(&mut self, sim: &mut Simulation<Event>) {
        for t in PatientType::ALL {
            if self.samplers[t.index()].asu_arrival.is_some() {
                let gap = self.draw(t, SLOT_ASU_ARRIVAL);
                sim.schedule_in(gap, Event::AsuArrival(t)).expect("non-negative gap");
            }
            if self.samplers[t.index()].rehab_arrival.is_some() {
                let gap = self.draw(t, SLOT_REHAB_ARRIVAL);
                sim.schedule_in(gap, Event::RehabArrival(t)).expect("non-negative gap");
            }
        }
        sim.schedule(self.warm_up + 0.5 * self.audit_interval, Event::Audit)
            .expect("audit in the future");
    }

    fn new_patient(&mut self, kind: PatientType) -> Patient {
        let p = Patient {
            id: self.next_id,
            kind,
        };
        self.next_id += 1;
        p
    }

    fn trace(&mut self, now: SimTime, p: Patient, kind: &'static str, detail: Option<&'static str>) {
        let mut rec = TraceRecord::new(now, p.id, p.kind.label(), kind);
        rec.detail = detail.map(String::from);
        self.tracer.emit(rec);
    }

    fn enter_rehab(&mut self, sim: &mut Simulation<Event>, patient: Patient) {
        self.rehab_occupancy += 1;
        let stay = self.draw(patient.kind, SLOT_REHAB_LOS);
        sim.schedule_in(stay, Event::RehabDischarge(patient))
            .expect("non-negative stay");
    }

    fn finish(self, replication: u32, events_fired: u64) -> ReplicationResult {
        let mut warnings = Vec::new();
        let mut mean_of = |audit: &OccupancyAudit, kpi: &str| {
            audit.mean().unwrap_or_else(|| {
                warnings.push(format!(
                    "{kpi}: no audit samples in the collection window, reported as 0"
                ));
                0.0
            })
        };
        let asu_mean = mean_of(&self.asu_audit, KPI_ASU_OCCUPANCY);
        let rehab_mean = mean_of(&self.rehab_audit, KPI_REHAB_OCCUPANCY);
        let trace_emitted = self.tracer.emitted();
        ReplicationResult {
            replication,
            kpis: vec![
                KpiValue::new(KPI_ASU_ARRIVALS, self.asu_arrivals as f64),
                KpiValue::new(KPI_REHAB_EXTERNAL, self.rehab_external as f64),
                KpiValue::new(KPI_TRANSFERS, self.transfers as f64),
                KpiValue::new(KPI_ASU_OCCUPANCY, asu_mean),
                KpiValue::new(KPI_REHAB_OCCUPANCY, rehab_mean),
            ],
            occupancy: vec![
                UnitOccupancy {
                    unit: UNIT_ASU.into(),
                    audit: self.asu_audit,
                },
                UnitOccupancy {
                    unit: UNIT_REHAB.into(),
                    audit: self.rehab_audit,
                },
            ],
            run_counts: vec![
                KpiValue::new("asu_admissions", self.total_asu_admissions as f64),
                KpiValue::new("asu_discharges", self.total_asu_discharges as f64),
                KpiValue::new("asu_in_unit_at_end", f64::from(self.asu_occupancy)),
                KpiValue::new("rehab_external", self.total_rehab_external as f64),
                KpiValue::new("rehab_transfers", self.total_transfers as f64),
                KpiValue::new("rehab_discharges", self.total_rehab_discharges as f64),
                KpiValue::new("rehab_in_unit_at_end", f64::from(self.rehab_occupancy)),
                KpiValue::new("post_asu_rehab", self.asu_destinations[0] as f64),
                KpiValue::new("post_asu_esd", self.asu_destinations[1] as f64),
                KpiValue::new("post_asu_other", self.asu_destinations[2] as f64),
            ],
            warnings,
            events_fired,
            trace_emitted,
            trace: self.tracer.into_lines(),
        }
    }
}

impl Handler<Event> for StrokeRun {
    fn handle(&mut self, sim: &mut Simulation<Event>, event: Event) {
        let now = sim.now();
        let in_window = now >= self.warm_up;
        match event {
            Event::AsuArrival(kind) => {
                let gap = self.draw(kind, SLOT_ASU_ARRIVAL);
                sim.schedule_in(gap, Event::AsuArrival(kind)).expect("non-negative gap");
                let p = self.new_patient(kind);
                self.trace(now, p, "asu_arrival", None);
                self.total_asu_admissions += 1;
                if in_window {
                    self.asu_arrivals += 1;
                }
                self.asu_occupancy += 1;
                let stay = self.draw(kind, SLOT_ASU_LOS);
                sim.schedule_in(stay, Event::AsuDischarge(p)).expect("non-negative stay");
            }
            Event::AsuDischarge(p) => {
                self.asu_occupancy -= 1;
                self.total_asu_discharges += 1;
                let dest = self.route(p.kind, SLOT_POST_ASU);
                self.asu_destinations[dest as usize] += 1;
                self.trace(now, p, "asu_discharge", Some(dest.label()));
                if dest == Destination::Rehab {
                    self.total_transfers += 1;
                    if in_window {
                        self.transfers += 1;
                    }
                    self.trace(now, p, "rehab_arrival", Some("transfer"));
                    self.enter_rehab(sim, p);
                }
            }
            Event::RehabArrival(kind) => {
                let gap = self.draw(kind, SLOT_REHAB_ARRIVAL);
                sim.schedule_in(gap, Event::RehabArrival(kind)).expect("non-negative gap");
                let p = self.new_patient(kind);
                self.total_rehab_external += 1;
                if in_window {
                    self.rehab_external += 1;
                }
                self.trace(now, p, "rehab_arrival", Some("external"));
                self.enter_rehab(sim, p);
            }
            Event::RehabDischarge(p) => {
                self.rehab_occupancy -= 1;
                self.total_rehab_discharges += 1;
                let dest = self.route(p.kind, SLOT_POST_REHAB);
                self.trace(now, p, "rehab_discharge", Some(dest.label()));
            }
            Event::Audit => {
                self.asu_audit.record(now, self.asu_occupancy);
                self.rehab_audit.record(now, self.rehab_occupancy);
                sim.schedule_in(self.audit_interval, Event::Audit)
                    .expect("positive audit interval");
            }
        }
    }
}

/// The shipped example document.
pub const EXAMPLE_JSON: &str = include_str!("../../configs/stroke.json");
