//! A small urgent-care call centre: the kernel's tutorial model.
//!
//! Callers arrive with exponential gaps, wait FIFO for one of the operators
//! and hold them for a triangular call duration. Times are in minutes.

use crate::engine::{Acquire, CountedResource, Handler, SimTime, Simulation, TraceRecord, Tracer};
use crate::sampling::{DistributionSpec, Sampler, SpecError, Stream, StreamAllocator};

#[derive(Debug, Clone, PartialEq)]
pub struct CallCentre {
    pub operators: u32,
    pub inter_arrival: DistributionSpec,
    pub call_duration: DistributionSpec,
    pub run_length: f64,
    pub seed: u64,
    pub trace: bool,
}

impl Default for CallCentre {
    fn default() -> Self {
        CallCentre {
            operators: 13,
            inter_arrival: DistributionSpec::exponential(0.6),
            call_duration: DistributionSpec::Triangular {
                low: 5.0,
                mode: 7.0,
                high: 10.0,
            },
            run_length: 1000.0,
            seed: 0,
            trace: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CallCentreResult {
    pub arrivals: u64,
    pub answered: u64,
    pub mean_wait: f64,
    /// Time-integrated busy operators / (operators × run length).
    pub utilisation: f64,
    pub trace: Vec<String>,
}

impl CallCentre {
    /// Offered load divided by capacity: the long-run utilisation when the
    /// system is stable.
    pub fn expected_utilisation(&self) -> f64 {
        self.call_duration.mean() / self.inter_arrival.mean() / f64::from(self.operators)
    }

    pub fn run(&self, replication: u64) -> Result<CallCentreResult, SpecError> {
        if self.operators == 0 {
            return Err(SpecError::new("operators", "must be at least 1"));
        }
        let alloc = StreamAllocator::new(self.seed, replication);
        let mut model = CallRun {
            operators: CountedResource::new(self.operators as usize),
            arrival: self.inter_arrival.sampler()?,
            duration: self.call_duration.sampler()?,
            arrival_stream: alloc.stream(0),
            duration_stream: alloc.stream(1),
            tracer: Tracer::new(self.trace),
            next_id: 0,
            waits: Vec::new(),
            busy_area: 0.0,
            last_change: SimTime::ZERO,
        };
        let mut sim = Simulation::new();
        let gap = model.arrival.sample(&mut model.arrival_stream);
        sim.schedule_in(gap, Event::Arrival)
            .map_err(|e| SpecError::new("inter_arrival", e.to_string()))?;
        let end = SimTime::new(self.run_length)
            .map_err(|e| SpecError::new("run_length", e.to_string()))?;
        sim.run_until(end, &mut model);
        model.advance(end);

        let n = model.waits.len();
        Ok(CallCentreResult {
            arrivals: model.next_id,
            answered: n as u64,
            mean_wait: if n == 0 {
                0.0
            } else {
                model.waits.iter().sum::<f64>() / n as f64
            },
            utilisation: model.busy_area / (f64::from(self.operators) * self.run_length),
            trace: model.tracer.into_lines(),
        })
    }
}

#[derive(Debug, Clone, Copy)]
enum Event {
    Arrival,
    CallEnd(u64),
}

struct CallRun {
    operators: CountedResource<u64>,
    arrival: Sampler,
    duration: Sampler,
    arrival_stream: Stream,
    duration_stream: Stream,
    tracer: Tracer,
    next_id: u64,
    waits: Vec<f64>,
    busy_area: f64,
    last_change: SimTime,
}

impl CallRun {
    fn advance(&mut self, now: SimTime) {
        self.busy_area += self.operators.in_use() as f64 * (now - self.last_change);
        self.last_change = now;
    }

    fn answer(&mut self, sim: &mut Simulation<Event>, id: u64, wait: f64) {
        self.waits.push(wait);
        self.tracer.emit(
            TraceRecord::new(sim.now(), id, "caller", "answered").with_detail(format!("wait={wait:.2}")),
        );
        let d = self.duration.sample(&mut self.duration_stream);
        sim.schedule_in(d, Event::CallEnd(id)).expect("non-negative duration");
    }
}

impl Handler<Event> for CallRun {
    fn handle(&mut self, sim: &mut Simulation<Event>, event: Event) {
        let now = sim.now();
        self.advance(now);
        match event {
            Event::Arrival => {
                let id = self.next_id;
                self.next_id += 1;
                self.tracer.emit(TraceRecord::new(now, id, "caller", "arrival"));
                let gap = self.arrival.sample(&mut self.arrival_stream);
                sim.schedule_in(gap, Event::Arrival).expect("non-negative gap");
                if self.operators.request(id, 0, now) == Acquire::Granted {
                    self.answer(sim, id, 0.0);
                }
            }
            Event::CallEnd(id) => {
                self.tracer.emit(TraceRecord::new(now, id, "caller", "call_end"));
                if let Some(g) = self.operators.release(now).expect("operator was busy") {
                    let wait = g.wait();
                    self.answer(sim, g.token, wait);
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn utilisation_approaches_offered_load() {
        // Offered load 7.333 / 0.6 = 12.22 erlangs on 13 operators: rho = 0.940.
        let cc = CallCentre {
            run_length: 200_000.0,
            seed: 11,
            ..CallCentre::default()
        };
        let expected = cc.expected_utilisation();
        assert!((expected - 0.9401709401709402).abs() < 1e-12);
        let r = cc.run(0).unwrap();
        assert!((r.utilisation - expected).abs() < 0.01, "{}", r.utilisation);
    }

    #[test]
    fn trace_lines_follow_format() {
        let cc = CallCentre {
            run_length: 5.0,
            trace: true,
            ..CallCentre::default()
        };
        let r = cc.run(0).unwrap();
        assert!(!r.trace.is_empty());
        assert!(r.trace[0].starts_with("t="));
        assert!(r.trace[0].contains("id=0 class=caller event=arrival"));
    }

    #[test]
    fn zero_operators_rejected() {
        let cc = CallCentre {
            operators: 0,
            ..CallCentre::default()
        };
        assert!(cc.run(0).is_err());
    }
}
