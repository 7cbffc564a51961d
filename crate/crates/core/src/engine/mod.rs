//! Event-scheduling simulation kernel.
//!
//! A [`Simulation`] owns the clock and the future-event queue. Models are
//! plain state machines: they implement [`Handler`] for their own event enum
//! and schedule follow-up events from inside `handle`. Resources and the
//! event trace live next to the model state rather than inside the kernel, so
//! the kernel stays generic over the event payload.

mod queue;
mod resource;
mod trace;

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Sub};

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use queue::{EventHandle, EventQueue};
pub use resource::{Acquire, CountedResource, Grant};
pub use trace::{TraceRecord, Tracer};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EngineError {
    #[error("cannot schedule at t={at} before the current clock t={now}")]
    InPast { at: f64, now: f64 },
    #[error("simulation time must be finite and non-negative, got {0}")]
    InvalidTime(f64),
    #[error("release called on a resource with no units in use")]
    ReleaseIdle,
}

/// A point on the simulation clock. The unit (hours, days) is declared by the
/// model that owns the run.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct SimTime(f64);

impl SimTime {
    pub const ZERO: SimTime = SimTime(0.0);

    pub fn new(value: f64) -> Result<Self, EngineError> {
        if value.is_finite() && value >= 0.0 {
            Ok(SimTime(value))
        } else {
            Err(EngineError::InvalidTime(value))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

impl TryFrom<f64> for SimTime {
    type Error = EngineError;

    fn try_from(value: f64) -> Result<Self, Self::Error> {
        SimTime::new(value)
    }
}

impl From<SimTime> for f64 {
    fn from(t: SimTime) -> f64 {
        t.0
    }
}

impl Eq for SimTime {}

impl Ord for SimTime {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.total_cmp(&other.0)
    }
}

impl PartialOrd for SimTime {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Add<f64> for SimTime {
    type Output = SimTime;

    fn add(self, rhs: f64) -> SimTime {
        SimTime(self.0 + rhs)
    }
}

impl Sub for SimTime {
    type Output = f64;

    fn sub(self, rhs: SimTime) -> f64 {
        self.0 - rhs.0
    }
}

impl fmt::Display for SimTime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(&self.0, f)
    }
}

/// Receives events popped from the queue.
pub trait Handler<E> {
    fn handle(&mut self, sim: &mut Simulation<E>, event: E);
}

impl<E, F> Handler<E> for F
where
    F: FnMut(&mut Simulation<E>, E),
{
    fn handle(&mut self, sim: &mut Simulation<E>, event: E) {
        self(sim, event)
    }
}

/// Clock plus future-event list.
#[derive(Debug)]
pub struct Simulation<E> {
    now: SimTime,
    queue: EventQueue<E>,
    fired: u64,
}

impl<E> Default for Simulation<E> {
    fn default() -> Self {
        Self::new()
    }
}

impl<E> Simulation<E> {
    pub fn new() -> Self {
        Simulation {
            now: SimTime::ZERO,
            queue: EventQueue::new(),
            fired: 0,
        }
    }

    pub fn now(&self) -> SimTime {
        self.now
    }

    /// Number of events executed so far.
    pub fn fired(&self) -> u64 {
        self.fired
    }

    pub fn pending(&self) -> usize {
        self.queue.len()
    }

    pub fn schedule(&mut self, at: SimTime, event: E) -> Result<EventHandle, EngineError> {
        if at < self.now {
            return Err(EngineError::InPast {
                at: at.value(),
                now: self.now.value(),
            });
        }
        Ok(self.queue.push(at, event))
    }

    pub fn schedule_in(&mut self, delay: f64, event: E) -> Result<EventHandle, EngineError> {
        if !(delay.is_finite() && delay >= 0.0) {
            return Err(EngineError::InvalidTime(delay));
        }
        self.schedule(self.now + delay, event)
    }

    /// Cancels a pending event. Returns false if it already fired or was
    /// cancelled before.
    pub fn cancel(&mut self, handle: EventHandle) -> bool {
        self.queue.cancel(handle)
    }

    /// Pops the next event if it is due at or before `end`, advancing the clock.
    pub fn next_until(&mut self, end: SimTime) -> Option<E> {
        match self.queue.peek_time() {
            Some(t) if t <= end => {
                let (t, _, event) = self.queue.pop()?;
                self.now = t;
                self.fired += 1;
                Some(event)
            }
            _ => None,
        }
    }

    /// Runs every event with time <= `end`, then leaves the clock at `end`.
    /// Returns the number of events fired by this call.
    pub fn run_until<H: Handler<E>>(&mut self, end: SimTime, handler: &mut H) -> u64 {
        let start = self.fired;
        while let Some(event) = self.next_until(end) {
            handler.handle(self, event);
        }
        if end > self.now {
            self.now = end;
        }
        self.fired - start
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t(v: f64) -> SimTime {
        SimTime::new(v).unwrap()
    }

    #[test]
    fn equal_times_fire_in_insertion_order() {
        let mut sim = Simulation::new();
        sim.schedule(t(0.0), 'A').unwrap();
        sim.schedule(t(0.0), 'B').unwrap();
        let mut seen = Vec::new();
        sim.run_until(t(1.0), &mut |_: &mut Simulation<char>, e| seen.push(e));
        assert_eq!(seen, vec!['A', 'B']);
    }

    #[test]
    fn clock_equals_event_time_when_fired() {
        let mut sim = Simulation::new();
        sim.schedule(t(5.0), ()).unwrap();
        let mut at = None;
        sim.run_until(t(10.0), &mut |s: &mut Simulation<()>, _| at = Some(s.now()));
        assert_eq!(at, Some(t(5.0)));
        assert_eq!(sim.now(), t(10.0));
    }

    #[test]
    fn empty_queue_advances_clock_to_end() {
        let mut sim: Simulation<()> = Simulation::new();
        let fired = sim.run_until(t(100.0), &mut |_: &mut Simulation<()>, _| {});
        assert_eq!(fired, 0);
        assert_eq!(sim.now(), t(100.0));
    }

    #[test]
    fn events_beyond_end_do_not_fire() {
        let mut sim = Simulation::new();
        for v in [1.0, 2.0, 150.0] {
            sim.schedule(t(v), v).unwrap();
        }
        let fired = sim.run_until(t(100.0), &mut |_: &mut Simulation<f64>, _| {});
        assert_eq!(fired, 2);
        assert_eq!(sim.pending(), 1);
    }

    #[test]
    fn scheduling_in_the_past_is_an_error() {
        let mut sim = Simulation::new();
        sim.schedule(t(5.0), ()).unwrap();
        sim.run_until(t(5.0), &mut |_: &mut Simulation<()>, _| {});
        assert!(matches!(
            sim.schedule(t(4.0), ()),
            Err(EngineError::InPast { .. })
        ));
        assert!(sim.schedule_in(-1.0, ()).is_err());
        assert!(SimTime::new(-0.5).is_err());
        assert!(SimTime::new(f64::NAN).is_err());
    }

    #[test]
    fn cancelled_events_never_fire() {
        let mut sim = Simulation::new();
        let a = sim.schedule(t(1.0), 'A').unwrap();
        sim.schedule(t(2.0), 'B').unwrap();
        assert!(sim.cancel(a));
        assert!(!sim.cancel(a));
        let mut seen = Vec::new();
        sim.run_until(t(3.0), &mut |_: &mut Simulation<char>, e| seen.push(e));
        assert_eq!(seen, vec!['B']);
    }

    #[test]
    fn handlers_can_schedule_follow_ups() {
        let mut sim = Simulation::new();
        sim.schedule(t(0.0), 0u32).unwrap();
        let mut count = 0;
        sim.run_until(t(10.0), &mut |s: &mut Simulation<u32>, n| {
            count += 1;
            s.schedule_in(1.0, n + 1).unwrap();
        });
        // t = 0, 1, ..., 10
        assert_eq!(count, 11);
    }
}
