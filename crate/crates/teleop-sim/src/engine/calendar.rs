//! Event calendar.
//!
//! A binary heap ordered by (time, kind priority, insertion sequence). The
//! kind priority settles simultaneous events: trip completions release
//! operators before rests finish, rests finish before takeovers complete,
//! and new vehicle requests are looked at last. The insertion sequence makes
//! the remaining ties deterministic.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

/// What happens when an event fires. Lower `priority()` fires first among
/// events at the same instant.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EventKind {
    /// A vehicle finished its dwell and requests an operator.
    VehicleReady,
    /// The takeover handshake finished; driving starts.
    TakeoverComplete,
    /// The trip arrived at its stop.
    TripComplete,
    /// An operator finished resting.
    RestComplete,
}

impl EventKind {
    fn priority(self) -> u8 {
        match self {
            Self::TripComplete => 0,
            Self::RestComplete => 1,
            Self::TakeoverComplete => 2,
            Self::VehicleReady => 3,
        }
    }

    /// Stable name used in event log exports.
    #[must_use]
    pub fn name(self) -> &'static str {
        match self {
            Self::VehicleReady => "vehicle_ready",
            Self::TakeoverComplete => "takeover_complete",
            Self::TripComplete => "trip_complete",
            Self::RestComplete => "rest_complete",
        }
    }
}

/// A scheduled event. Vehicle and operator slots are indices into the run's
/// own tables; not every kind uses both.
#[derive(Debug, Clone, Copy)]
pub struct Event {
    pub time: f64,
    pub kind: EventKind,
    pub vehicle: Option<usize>,
    pub teleoperator: Option<usize>,
}

struct Entry {
    event: Event,
    seq: u64,
}

impl PartialEq for Entry {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Entry {}

impl PartialOrd for Entry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Entry {
    fn cmp(&self, other: &Self) -> Ordering {
        // BinaryHeap is a max-heap, so invert: smallest (time, priority, seq)
        // must compare greatest
        other
            .event
            .time
            .total_cmp(&self.event.time)
            .then_with(|| other.event.kind.priority().cmp(&self.event.kind.priority()))
            .then_with(|| other.seq.cmp(&self.seq))
    }
}

/// The future, as a priority queue of events.
#[derive(Default)]
pub struct Calendar {
    heap: BinaryHeap<Entry>,
    next_seq: u64,
    now: f64,
}

impl Calendar {
    #[must_use]
    pub fn new(start: f64) -> Self {
        Self {
            heap: BinaryHeap::new(),
            next_seq: 0,
            now: start,
        }
    }

    /// Schedule an event. Scheduling into the past is a logic error.
    pub fn schedule(&mut self, event: Event) {
        debug_assert!(
            event.time >= self.now,
            "event scheduled in the past: {} < {}",
            event.time,
            self.now
        );
        debug_assert!(event.time.is_finite());
        self.heap.push(Entry {
            event,
            seq: self.next_seq,
        });
        self.next_seq += 1;
    }

    /// Pop the next event and advance the clock to it.
    pub fn pop(&mut self) -> Option<Event> {
        let entry = self.heap.pop()?;
        self.now = entry.event.time;
        Some(entry.event)
    }

}

#[cfg(test)]
mod tests {
    use super::*;

    fn ev(time: f64, kind: EventKind) -> Event {
        Event {
            time,
            kind,
            vehicle: None,
            teleoperator: None,
        }
    }

    #[test]
    fn pops_in_time_order() {
        let mut cal = Calendar::new(0.0);
        cal.schedule(ev(5.0, EventKind::VehicleReady));
        cal.schedule(ev(1.0, EventKind::VehicleReady));
        cal.schedule(ev(3.0, EventKind::VehicleReady));
        let times: Vec<f64> = std::iter::from_fn(|| cal.pop().map(|e| e.time)).collect();
        assert_eq!(times, vec![1.0, 3.0, 5.0]);
    }

    #[test]
    fn simultaneous_events_follow_kind_priority() {
        let mut cal = Calendar::new(0.0);
        cal.schedule(ev(2.0, EventKind::VehicleReady));
        cal.schedule(ev(2.0, EventKind::TakeoverComplete));
        cal.schedule(ev(2.0, EventKind::TripComplete));
        cal.schedule(ev(2.0, EventKind::RestComplete));
        let kinds: Vec<EventKind> = std::iter::from_fn(|| cal.pop().map(|e| e.kind)).collect();
        assert_eq!(
            kinds,
            vec![
                EventKind::TripComplete,
                EventKind::RestComplete,
                EventKind::TakeoverComplete,
                EventKind::VehicleReady,
            ]
        );
    }

    #[test]
    fn equal_time_and_kind_fall_back_to_insertion_order() {
        let mut cal = Calendar::new(0.0);
        let mut first = ev(2.0, EventKind::VehicleReady);
        first.vehicle = Some(0);
        let mut second = ev(2.0, EventKind::VehicleReady);
        second.vehicle = Some(1);
        cal.schedule(first);
        cal.schedule(second);
        assert_eq!(cal.pop().unwrap().vehicle, Some(0));
        assert_eq!(cal.pop().unwrap().vehicle, Some(1));
    }

    #[test]
    fn clock_advances_with_pops() {
        let mut cal = Calendar::new(0.0);
        cal.schedule(ev(4.0, EventKind::VehicleReady));
        cal.pop();
        assert_eq!(cal.now, 4.0);
        assert!(cal.pop().is_none());
    }
}
