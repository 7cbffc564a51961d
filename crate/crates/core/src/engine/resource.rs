use std::cmp::Ordering;
use std::collections::BinaryHeap;

use super::{EngineError, SimTime};

/// Outcome of a queueing request.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Acquire {
    /// A unit was free and is now held by the requester (zero wait).
    Granted,
    /// No unit free; the requester joined the wait queue.
    Queued,
}

/// A unit handed to a waiter when another holder released it.
#[derive(Debug, Clone, PartialEq)]
pub struct Grant<T> {
    pub token: T,
    pub priority: i32,
    pub requested: SimTime,
    pub granted: SimTime,
}

impl<T> Grant<T> {
    pub fn wait(&self) -> f64 {
        self.granted - self.requested
    }
}

#[derive(Debug)]
struct Waiter<T> {
    priority: i32,
    requested: SimTime,
    seq: u64,
    token: T,
}

impl<T> PartialEq for Waiter<T> {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl<T> Eq for Waiter<T> {}

impl<T> PartialOrd for Waiter<T> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl<T> Ord for Waiter<T> {
    // Max-heap: smaller priority number, then earlier request, then earlier seq wins.
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .priority
            .cmp(&self.priority)
            .then_with(|| other.requested.cmp(&self.requested))
            .then_with(|| other.seq.cmp(&self.seq))
    }
}

/// A pool of identical units (beds, operators) with a priority wait queue.
///
/// Lower priority numbers are served first, FIFO within a priority level.
/// The queue is unbounded; callers that must not wait use
/// [`CountedResource::try_acquire`].
#[derive(Debug)]
pub struct CountedResource<T> {
    capacity: usize,
    in_use: usize,
    waiters: BinaryHeap<Waiter<T>>,
    next_seq: u64,
}

impl<T> CountedResource<T> {
    /// # Panics
    /// If `capacity` is zero.
    pub fn new(capacity: usize) -> Self {
        assert!(capacity >= 1, "resource capacity must be at least 1");
        CountedResource {
            capacity,
            in_use: 0,
            waiters: BinaryHeap::new(),
            next_seq: 0,
        }
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn in_use(&self) -> usize {
        self.in_use
    }

    pub fn free(&self) -> usize {
        self.capacity - self.in_use
    }

    pub fn queue_len(&self) -> usize {
        self.waiters.len()
    }

    /// Takes a unit if one is free, otherwise joins the wait queue.
    pub fn request(&mut self, token: T, priority: i32, now: SimTime) -> Acquire {
        if self.in_use < self.capacity {
            self.in_use += 1;
            Acquire::Granted
        } else {
            let seq = self.next_seq;
            self.next_seq += 1;
            self.waiters.push(Waiter {
                priority,
                requested: now,
                seq,
                token,
            });
            Acquire::Queued
        }
    }

    /// Takes a unit only if one is free right now. Never waits; a refusal
    /// leaves the resource untouched.
    pub fn try_acquire(&mut self) -> bool {
        if self.in_use < self.capacity {
            self.in_use += 1;
            true
        } else {
            false
        }
    }

    /// Returns a unit. If someone is waiting the unit passes straight to the
    /// head of the queue and that grant is returned.
    pub fn release(&mut self, now: SimTime) -> Result<Option<Grant<T>>, EngineError> {
        if self.in_use == 0 {
            return Err(EngineError::ReleaseIdle);
        }
        match self.waiters.pop() {
            Some(w) => Ok(Some(Grant {
                token: w.token,
                priority: w.priority,
                requested: w.requested,
                granted: now,
            })),
            None => {
                self.in_use -= 1;
                Ok(None)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn t(v: f64) -> SimTime {
        SimTime::new(v).unwrap()
    }

    #[test]
    fn free_unit_is_granted_immediately() {
        let mut r = CountedResource::new(1);
        assert_eq!(r.request("a", 0, t(3.0)), Acquire::Granted);
        assert_eq!(r.in_use(), 1);
    }

    #[test]
    fn lower_priority_number_served_first() {
        let mut r = CountedResource::new(1);
        r.request("holder", 0, t(0.0));
        assert_eq!(r.request("elective", 1, t(1.0)), Acquire::Queued);
        assert_eq!(r.request("urgent", 0, t(2.0)), Acquire::Queued);
        let g = r.release(t(5.0)).unwrap().unwrap();
        assert_eq!(g.token, "urgent");
        assert_eq!(g.wait(), 3.0);
        let g = r.release(t(6.0)).unwrap().unwrap();
        assert_eq!(g.token, "elective");
        assert_eq!(g.wait(), 5.0);
        assert_eq!(r.release(t(7.0)).unwrap(), None);
        assert_eq!(r.in_use(), 0);
    }

    #[test]
    fn fifo_within_priority() {
        let mut r = CountedResource::new(1);
        r.request(0, 0, t(0.0));
        for i in 1..=5 {
            r.request(i, 0, t(1.0));
        }
        let order: Vec<i32> = (0..5)
            .map(|_| r.release(t(2.0)).unwrap().unwrap().token)
            .collect();
        assert_eq!(order, vec![1, 2, 3, 4, 5]);
    }

    #[test]
    fn try_acquire_full_pool_is_refused() {
        let mut r: CountedResource<()> = CountedResource::new(24);
        for _ in 0..23 {
            assert!(r.try_acquire());
        }
        // 23 of 24 held: granted
        assert!(r.try_acquire());
        // 24 of 24 held: refused, state unchanged
        assert!(!r.try_acquire());
        assert_eq!(r.in_use(), 24);
        assert_eq!(r.queue_len(), 0);
    }

    #[test]
    fn try_acquire_single_unit() {
        let mut r: CountedResource<()> = CountedResource::new(1);
        assert!(r.try_acquire());
        assert_eq!(r.in_use(), 1);
    }

    #[test]
    fn release_of_idle_resource_is_an_error() {
        let mut r: CountedResource<()> = CountedResource::new(2);
        assert_eq!(r.release(t(0.0)), Err(EngineError::ReleaseIdle));
    }

    #[derive(Debug, Clone)]
    enum Op {
        Request(i32),
        Try,
        Release,
    }

    fn op() -> impl Strategy<Value = Op> {
        prop_oneof![
            (0i32..3).prop_map(Op::Request),
            Just(Op::Try),
            Just(Op::Release),
        ]
    }

    proptest! {
        // Replay checker: in_use stays within [0, capacity], in_use + free ==
        // capacity, and nobody waits while a unit is free.
        #[test]
        fn conservation_under_random_traffic(ops in prop::collection::vec(op(), 0..400)) {
            let cap = 3;
            let mut r = CountedResource::new(cap);
            for (i, o) in ops.into_iter().enumerate() {
                let now = t(i as f64);
                match o {
                    Op::Request(p) => { r.request(i, p, now); }
                    Op::Try => { r.try_acquire(); }
                    Op::Release => { let _ = r.release(now); }
                }
                prop_assert!(r.in_use() <= cap);
                prop_assert_eq!(r.in_use() + r.free(), cap);
                if r.queue_len() > 0 {
                    prop_assert_eq!(r.in_use(), cap);
                }
            }
        }
    }
}
