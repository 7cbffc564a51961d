use std::cmp::Ordering;
use std::collections::{BinaryHeap, HashSet};

use super::SimTime;

/// Identifies a scheduled event so it can be cancelled before it fires.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EventHandle(u64);

impl EventHandle {
    pub fn sequence(self) -> u64 {
        self.0
    }
}

#[derive(Debug)]
struct Entry<E> {
    time: SimTime,
    seq: u64,
    event: E,
}

impl<E> PartialEq for Entry<E> {
    fn eq(&self, other: &Self) -> bool {
        self.time == other.time && self.seq == other.seq
    }
}

impl<E> Eq for Entry<E> {}

impl<E> PartialOrd for Entry<E> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl<E> Ord for Entry<E> {
    // BinaryHeap is a max-heap; invert so the earliest (time, seq) pops first.
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .time
            .cmp(&self.time)
            .then_with(|| other.seq.cmp(&self.seq))
    }
}

/// Future-event list ordered by `(time, insertion sequence)`.
#[derive(Debug)]
pub struct EventQueue<E> {
    heap: BinaryHeap<Entry<E>>,
    cancelled: HashSet<u64>,
    next_seq: u64,
}

impl<E> Default for EventQueue<E> {
    fn default() -> Self {
        Self::new()
    }
}

impl<E> EventQueue<E> {
    pub fn new() -> Self {
        EventQueue {
            heap: BinaryHeap::new(),
            cancelled: HashSet::new(),
            next_seq: 0,
        }
    }

    pub fn push(&mut self, time: SimTime, event: E) -> EventHandle {
        let seq = self.next_seq;
        self.next_seq += 1;
        self.heap.push(Entry { time, seq, event });
        EventHandle(seq)
    }

    pub fn cancel(&mut self, handle: EventHandle) -> bool {
        let pending = self.heap.iter().any(|e| e.seq == handle.0);
        pending && self.cancelled.insert(handle.0)
    }

    fn discard_cancelled(&mut self) {
        while let Some(top) = self.heap.peek() {
            if self.cancelled.remove(&top.seq) {
                self.heap.pop();
            } else {
                break;
            }
        }
    }

    pub fn peek_time(&mut self) -> Option<SimTime> {
        self.discard_cancelled();
        self.heap.peek().map(|e| e.time)
    }

    pub fn pop(&mut self) -> Option<(SimTime, EventHandle, E)> {
        self.discard_cancelled();
        self.heap
            .pop()
            .map(|e| (e.time, EventHandle(e.seq), e.event))
    }

    pub fn len(&self) -> usize {
        self.heap.len() - self.cancelled.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    proptest! {
        #[test]
        fn dequeue_matches_sort_oracle(times in prop::collection::vec(0.0f64..1e4, 0..2000)) {
            let mut q = EventQueue::new();
            for (i, &t) in times.iter().enumerate() {
                q.push(SimTime::new(t).unwrap(), i);
            }
            // Oracle: stable sort by time keeps insertion order for ties.
            let mut expected: Vec<usize> = (0..times.len()).collect();
            expected.sort_by(|&a, &b| times[a].total_cmp(&times[b]));
            let mut got = Vec::with_capacity(times.len());
            while let Some((_, _, i)) = q.pop() {
                got.push(i);
            }
            prop_assert_eq!(got, expected);
        }
    }

    #[test]
    fn ten_thousand_random_events_dequeue_sorted() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_pcg::Pcg64::seed_from_u64(7);
        let times: Vec<f64> = (0..10_000).map(|_| rng.random_range(0.0..1000.0)).collect();
        let mut q = EventQueue::new();
        for &t in &times {
            q.push(SimTime::new(t).unwrap(), t);
        }
        let mut sorted = times.clone();
        sorted.sort_by(f64::total_cmp);
        let popped: Vec<f64> = std::iter::from_fn(|| q.pop().map(|(_, _, t)| t)).collect();
        assert_eq!(popped, sorted);
    }

    #[test]
    fn ties_with_integer_times_keep_insertion_order() {
        let mut q = EventQueue::new();
        for i in 0..50 {
            q.push(SimTime::new((i % 3) as f64).unwrap(), i);
        }
        let order: Vec<i32> = std::iter::from_fn(|| q.pop().map(|(_, _, i)| i)).collect();
        let mut expected: Vec<i32> = (0..50).collect();
        expected.sort_by_key(|i| i % 3);
        assert_eq!(order, expected);
    }

    #[test]
    fn len_excludes_cancelled() {
        let mut q = EventQueue::new();
        let h = q.push(SimTime::ZERO, ());
        q.push(SimTime::ZERO, ());
        assert!(q.cancel(h));
        assert_eq!(q.len(), 1);
        q.pop();
        assert!(q.is_empty());
        assert!(q.pop().is_none());
    }
}
