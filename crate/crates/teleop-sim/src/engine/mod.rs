//! Discrete-event simulation core.
//!
//! One run plays a tour set against a pool of teleoperators. Vehicles walk
//! through their trips: dwell, request an operator, take over, drive, dwell
//! again, and sign off after the last trip. Operators serve requests in FIFO
//! order, one vehicle at a time, and follow a rest policy modelled on driving
//! time regulation: at most `max_drive_min` minutes of accumulated driving
//! before a long rest, optionally split into short rests after every trip.
//!
//! The engine is strictly deterministic. Simultaneous events are ordered by
//! kind (trip completions first, then rest completions, then takeover
//! completions, then new requests) and by insertion order after that, so the
//! same inputs always produce the same trace, bit for bit.

mod calendar;
mod trace;

pub use calendar::{Event, EventKind};
pub use trace::{
    EventRecord, ServiceInterval, ServiceKind, SimulationTrace, Snapshot, TeleoperatorState,
    TripCompletion, VehicleRecord, VehicleState, WaitRecord,
};

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::engine::calendar::Calendar;
use crate::error::{Result, SimError};
use crate::tours::TourSet;

/// How operator rest is organised.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RestMode {
    /// No rest at all. Used for the baseline, where in-vehicle drivers are
    /// assumed to have their breaks baked into the tour plan already.
    Disabled,
    /// One long rest whenever the accumulated driving reaches the cap.
    Monolithic,
    /// A short rest after every trip, credited against the long rest; any
    /// residual is taken when the cap is reached.
    Split,
}

/// Rest policy parameters, minutes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RestPolicy {
    pub mode: RestMode,
    /// Maximum accumulated driving since the last long rest.
    pub max_drive_min: f64,
    pub long_rest_min: f64,
    pub short_rest_min: f64,
}

impl Default for RestPolicy {
    /// 4.5 h driving cap, 45 min long rest, 10 min short rest.
    fn default() -> Self {
        Self {
            mode: RestMode::Monolithic,
            max_drive_min: 270.0,
            long_rest_min: 45.0,
            short_rest_min: 10.0,
        }
    }
}

impl RestPolicy {
    /// No rests; also the baseline policy.
    #[must_use]
    pub fn disabled() -> Self {
        Self {
            mode: RestMode::Disabled,
            ..Self::default()
        }
    }

    #[must_use]
    pub fn monolithic() -> Self {
        Self::default()
    }

    #[must_use]
    pub fn split() -> Self {
        Self {
            mode: RestMode::Split,
            ..Self::default()
        }
    }

    fn validate(&self) -> Result<()> {
        if self.mode == RestMode::Disabled {
            return Ok(());
        }
        let positive = |name: &str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(SimError::Config(format!(
                    "rest policy: {name} must be positive, got {v}"
                )))
            }
        };
        positive("max_drive_min", self.max_drive_min)?;
        positive("long_rest_min", self.long_rest_min)?;
        if self.mode == RestMode::Split {
            positive("short_rest_min", self.short_rest_min)?;
        }
        Ok(())
    }
}

/// Engine tuning knobs with sensible defaults.
#[derive(Debug, Clone, Copy)]
pub struct SimOptions {
    /// Spacing of state snapshots, minutes.
    pub snapshot_interval_min: f64,
    /// Keep the per-event log. Sweeps switch this off to save memory;
    /// KPIs are unaffected.
    pub record_events: bool,
    /// Override for the runaway-simulation guard, absolute minutes.
    pub time_cap_min: Option<f64>,
}

impl Default for SimOptions {
    fn default() -> Self {
        Self {
            snapshot_interval_min: 1.0,
            record_events: true,
            time_cap_min: None,
        }
    }
}

/// Float slack for accumulated-duration comparisons.
const EPS: f64 = 1e-9;

/// Run one simulation with default options.
///
/// `tours` must already be penetration-sampled and window-filtered; every
/// tour is simulated as given. `seed` is carried for interface stability;
/// the current engine has no stochastic elements.
#[allow(clippy::too_many_arguments)]
pub fn run_simulation(
    tours: &TourSet,
    n_teleoperators: usize,
    takeover_min: f64,
    rest: &RestPolicy,
    shift_start_min: f64,
    shift_hours: f64,
    seed: u64,
) -> Result<SimulationTrace> {
    run_simulation_with(
        tours,
        n_teleoperators,
        takeover_min,
        rest,
        shift_start_min,
        shift_hours,
        seed,
        &SimOptions::default(),
    )
}

/// Run one simulation with explicit engine options.
#[allow(clippy::too_many_arguments)]
pub fn run_simulation_with(
    tours: &TourSet,
    n_teleoperators: usize,
    takeover_min: f64,
    rest: &RestPolicy,
    shift_start_min: f64,
    shift_hours: f64,
    seed: u64,
    options: &SimOptions,
) -> Result<SimulationTrace> {
    let _ = seed;
    if tours.is_empty() {
        return Err(SimError::Validation(
            "cannot simulate an empty tour set".to_string(),
        ));
    }
    tours.validate()?;
    if n_teleoperators == 0 {
        return Err(SimError::Config(
            "at least one teleoperator is required".to_string(),
        ));
    }
    if !(takeover_min >= 0.0 && takeover_min.is_finite()) {
        return Err(SimError::Config(format!(
            "takeover time must be non-negative, got {takeover_min}"
        )));
    }
    if !(shift_start_min >= 0.0 && shift_start_min.is_finite()) {
        return Err(SimError::Config(format!(
            "shift start must be non-negative, got {shift_start_min}"
        )));
    }
    if !(shift_hours > 0.0 && shift_hours.is_finite()) {
        return Err(SimError::Config(format!(
            "shift length must be positive, got {shift_hours}"
        )));
    }
    rest.validate()?;
    if !(options.snapshot_interval_min > 0.0 && options.snapshot_interval_min.is_finite()) {
        return Err(SimError::Config(format!(
            "snapshot interval must be positive, got {}",
            options.snapshot_interval_min
        )));
    }

    let mut sim = Sim::new(
        tours,
        n_teleoperators,
        takeover_min,
        rest,
        shift_start_min,
        shift_hours,
        options,
    );
    sim.run()?;
    Ok(sim.finish())
}

struct Vehicle {
    state: VehicleState,
    current_trip: usize,
}

struct Teleoperator {
    state: TeleoperatorState,
    /// Start of the current takeover/drive/rest phase.
    phase_start: f64,
    /// Which rest this phase is, when resting.
    rest_kind: ServiceKind,
    /// When the operator last became idle; drives longest-idle-first picks.
    idle_since: f64,
    /// Accumulated driving since the last long rest. Takeovers do not count.
    drive_since_long_rest: f64,
    /// Short-rest minutes credited against the next long rest (split mode).
    short_rest_credit: f64,
}

struct Sim<'a> {
    tours: &'a TourSet,
    takeover_min: f64,
    rest: RestPolicy,
    shift_start_min: f64,
    shift_hours: f64,
    options: SimOptions,

    calendar: Calendar,
    vehicles: Vec<Vehicle>,
    teleoperators: Vec<Teleoperator>,
    queue: VecDeque<(usize, f64)>,

    veh_counts: [usize; 5],
    to_counts: [usize; 4],

    events: Vec<EventRecord>,
    snapshots: Vec<Snapshot>,
    waits: Vec<WaitRecord>,
    service_intervals: Vec<ServiceInterval>,
    vehicle_records: Vec<VehicleRecord>,
    trip_completions: Vec<TripCompletion>,

    next_sample: f64,
    last_event_time: f64,
    queue_integral: f64,
    max_queue_length: usize,
    completion_min: f64,
    remaining_vehicles: usize,
    time_cap: f64,
}

impl<'a> Sim<'a> {
    fn new(
        tours: &'a TourSet,
        n_teleoperators: usize,
        takeover_min: f64,
        rest: &RestPolicy,
        shift_start_min: f64,
        shift_hours: f64,
        options: &SimOptions,
    ) -> Self {
        let k = tours.len();
        let vehicles = (0..k)
            .map(|_| Vehicle {
                state: VehicleState::Idle,
                current_trip: 0,
            })
            .collect();
        let teleoperators = (0..n_teleoperators)
            .map(|_| Teleoperator {
                state: TeleoperatorState::Idle,
                phase_start: shift_start_min,
                rest_kind: ServiceKind::LongRest,
                idle_since: shift_start_min,
                drive_since_long_rest: 0.0,
                short_rest_credit: 0.0,
            })
            .collect();
        let vehicle_records = tours
            .tours
            .iter()
            .map(|t| VehicleRecord {
                vehicle_id: t.vehicle_id.clone(),
                tour_id: t.tour_id.clone(),
                n_trips: t.trips.len(),
                total_travel_min: t.total_travel_min(),
                total_distance_km: t.total_distance_km(),
                signoff_min: f64::NAN,
            })
            .collect();

        // guard against a stuck event loop, not against slow scenarios: far
        // more than any backlog of this work could ever need
        let earliest = tours
            .tours
            .iter()
            .map(|t| t.start_min)
            .fold(f64::INFINITY, f64::min);
        let latest = tours.tours.iter().map(|t| t.start_min).fold(0.0, f64::max);
        let total_work: f64 = tours
            .tours
            .iter()
            .map(|t| t.planned_duration_min() + takeover_min * t.trips.len() as f64)
            .sum();
        let origin = shift_start_min.min(earliest);
        let time_cap = options
            .time_cap_min
            .unwrap_or(origin + 1440.0 + 10.0 * (latest - origin + total_work));

        let mut sim = Self {
            tours,
            takeover_min,
            rest: *rest,
            shift_start_min,
            shift_hours,
            options: *options,
            calendar: Calendar::new(origin),
            vehicles,
            teleoperators,
            queue: VecDeque::new(),
            veh_counts: [k, 0, 0, 0, 0],
            to_counts: [n_teleoperators, 0, 0, 0],
            events: Vec::new(),
            snapshots: Vec::new(),
            waits: Vec::new(),
            service_intervals: Vec::new(),
            vehicle_records,
            trip_completions: Vec::new(),
            next_sample: shift_start_min,
            last_event_time: origin,
            queue_integral: 0.0,
            max_queue_length: 0,
            completion_min: shift_start_min,
            remaining_vehicles: k,
            time_cap,
        };

        for (v, tour) in tours.tours.iter().enumerate() {
            sim.calendar.schedule(Event {
                time: tour.start_min + tour.trips[0].dwell_before_min,
                kind: EventKind::VehicleReady,
                vehicle: Some(v),
                teleoperator: None,
            });
        }
        sim
    }

    fn run(&mut self) -> Result<()> {
        while let Some(event) = self.calendar.pop() {
            let now = event.time;
            if now > self.time_cap {
                return Err(SimError::TimeCapExceeded {
                    cap_min: self.time_cap,
                    time_min: now,
                });
            }

            self.queue_integral += self.queue.len() as f64 * (now - self.last_event_time);
            self.last_event_time = now;
            while self.next_sample < now {
                self.emit_snapshot();
            }

            match event.kind {
                EventKind::VehicleReady => self.handle_vehicle_ready(event, now),
                EventKind::TakeoverComplete => self.handle_takeover_complete(event, now),
                EventKind::TripComplete => self.handle_trip_complete(event, now),
                EventKind::RestComplete => self.handle_rest_complete(event, now),
            }
        }

        while self.next_sample <= self.completion_min + EPS {
            self.emit_snapshot();
        }
        self.snapshots
            .retain(|s| s.time_min <= self.completion_min + EPS);
        Ok(())
    }

    fn handle_vehicle_ready(&mut self, event: Event, now: f64) {
        let v = event.vehicle.expect("vehicle_ready carries a vehicle");
        debug_assert_eq!(self.vehicles[v].state, VehicleState::Idle);
        match self.pick_idle_teleoperator() {
            Some(to) => {
                self.start_takeover(v, to, now);
                self.log(now, event.kind, Some(v), Some(to), || {
                    "assigned_direct".to_string()
                });
            }
            None => {
                self.set_vehicle_state(v, VehicleState::InQueue);
                self.queue.push_back((v, now));
                self.max_queue_length = self.max_queue_length.max(self.queue.len());
                let len = self.queue.len();
                self.log(now, event.kind, Some(v), None, || format!("queued len={len}"));
            }
        }
    }

    fn handle_takeover_complete(&mut self, event: Event, now: f64) {
        let v = event.vehicle.expect("takeover carries a vehicle");
        let to = event.teleoperator.expect("takeover carries a teleoperator");
        debug_assert_eq!(self.vehicles[v].state, VehicleState::Takeover);
        debug_assert_eq!(self.teleoperators[to].state, TeleoperatorState::Takeover);

        self.set_vehicle_state(v, VehicleState::Teleoperated);
        self.close_interval(to, ServiceKind::Takeover, now);
        self.set_to_state(to, TeleoperatorState::Busy);
        self.teleoperators[to].phase_start = now;

        let trip = &self.tours.tours[v].trips[self.vehicles[v].current_trip];
        self.calendar.schedule(Event {
            time: now + trip.travel_time_min,
            kind: EventKind::TripComplete,
            vehicle: Some(v),
            teleoperator: Some(to),
        });
        let idx = trip.index;
        self.log(now, event.kind, Some(v), Some(to), || {
            format!("driving trip={idx}")
        });
    }

    fn handle_trip_complete(&mut self, event: Event, now: f64) {
        let v = event.vehicle.expect("trip carries a vehicle");
        let to = event.teleoperator.expect("trip carries a teleoperator");
        debug_assert_eq!(self.vehicles[v].state, VehicleState::Teleoperated);
        debug_assert_eq!(self.teleoperators[to].state, TeleoperatorState::Busy);

        let tour = &self.tours.tours[v];
        let trip_idx = self.vehicles[v].current_trip;
        let trip = &tour.trips[trip_idx];
        self.trip_completions.push(TripCompletion {
            vehicle_id: tour.vehicle_id.clone(),
            trip_index: trip.index,
            completion_min: now,
            travel_time_min: trip.travel_time_min,
            distance_km: trip.distance_km,
        });

        // vehicle side: sign off after the last trip, otherwise dwell
        let mut detail = String::new();
        if trip_idx + 1 == tour.trips.len() {
            self.set_vehicle_state(v, VehicleState::SignedOff);
            self.vehicle_records[v].signoff_min = now;
            self.completion_min = self.completion_min.max(now);
            self.remaining_vehicles -= 1;
            detail.push_str("signed_off");
        } else {
            self.set_vehicle_state(v, VehicleState::Idle);
            self.vehicles[v].current_trip += 1;
            let ready = now + tour.trips[trip_idx + 1].dwell_before_min;
            self.calendar.schedule(Event {
                time: ready,
                kind: EventKind::VehicleReady,
                vehicle: Some(v),
                teleoperator: None,
            });
            detail.push_str(&format!("dwell next_ready={ready:.3}"));
        }

        // operator side: count the driving, then rest or return to the pool
        self.close_interval(to, ServiceKind::Drive, now);
        self.teleoperators[to].drive_since_long_rest += trip.travel_time_min;
        match self.rest_after_trip(to, now) {
            Some((kind, until)) => {
                let label = match kind {
                    ServiceKind::ShortRest => "rest_short",
                    _ => "rest_long",
                };
                detail.push_str(&format!(" {label}_until={until:.3}"));
            }
            None => {
                if let Some(assigned) = self.make_idle_and_serve(to, now) {
                    let id = self.tours.tours[assigned].vehicle_id.clone();
                    detail.push_str(&format!(" assigned={id}"));
                }
            }
        }
        let d = detail;
        self.log(now, event.kind, Some(v), Some(to), move || d);
    }

    fn handle_rest_complete(&mut self, event: Event, now: f64) {
        let to = event.teleoperator.expect("rest carries a teleoperator");
        debug_assert_eq!(self.teleoperators[to].state, TeleoperatorState::Resting);
        let kind = self.teleoperators[to].rest_kind;
        self.close_interval(to, kind, now);
        let assigned = self.make_idle_and_serve(to, now);
        self.log(now, event.kind, None, Some(to), || match assigned {
            Some(v) => format!("idle assigned=v{v}"),
            None => "idle".to_string(),
        });
    }

    /// Decide rest after a completed trip. Returns the rest kind and end time
    /// if the operator goes resting, `None` if it returns to the pool.
    fn rest_after_trip(&mut self, to: usize, now: f64) -> Option<(ServiceKind, f64)> {
        let policy = self.rest;
        let cap_reached =
            self.teleoperators[to].drive_since_long_rest >= policy.max_drive_min - EPS;
        match policy.mode {
            RestMode::Disabled => None,
            RestMode::Monolithic => {
                if cap_reached {
                    self.teleoperators[to].drive_since_long_rest = 0.0;
                    Some(self.start_rest(to, ServiceKind::LongRest, policy.long_rest_min, now))
                } else {
                    None
                }
            }
            RestMode::Split => {
                if cap_reached {
                    let residual =
                        (policy.long_rest_min - self.teleoperators[to].short_rest_credit).max(0.0);
                    self.teleoperators[to].drive_since_long_rest = 0.0;
                    self.teleoperators[to].short_rest_credit = 0.0;
                    if residual > 0.0 {
                        Some(self.start_rest(to, ServiceKind::LongRest, residual, now))
                    } else {
                        None
                    }
                } else {
                    self.teleoperators[to].short_rest_credit += policy.short_rest_min;
                    Some(self.start_rest(to, ServiceKind::ShortRest, policy.short_rest_min, now))
                }
            }
        }
    }

    fn start_rest(&mut self, to: usize, kind: ServiceKind, duration: f64, now: f64) -> (ServiceKind, f64) {
        self.set_to_state(to, TeleoperatorState::Resting);
        self.teleoperators[to].phase_start = now;
        self.teleoperators[to].rest_kind = kind;
        let until = now + duration;
        self.calendar.schedule(Event {
            time: until,
            kind: EventKind::RestComplete,
            vehicle: None,
            teleoperator: Some(to),
        });
        (kind, until)
    }

    /// Return an operator to the pool and immediately serve the queue head,
    /// if any. Work conservation: the pool never sits idle next to a
    /// non-empty queue.
    fn make_idle_and_serve(&mut self, to: usize, now: f64) -> Option<usize> {
        self.set_to_state(to, TeleoperatorState::Idle);
        self.teleoperators[to].idle_since = now;
        match self.queue.front().copied() {
            Some((v, enqueue_min)) if self.is_eligible(to) => {
                self.queue.pop_front();
                let tour = &self.tours.tours[v];
                self.waits.push(WaitRecord {
                    vehicle_id: tour.vehicle_id.clone(),
                    trip_index: self.vehicles[v].current_trip,
                    enqueue_min,
                    assign_min: now,
                });
                self.start_takeover(v, to, now);
                Some(v)
            }
            _ => None,
        }
    }

    /// Longest-idle eligible operator, ties broken by the lower id.
    fn pick_idle_teleoperator(&self) -> Option<usize> {
        self.teleoperators
            .iter()
            .enumerate()
            .filter(|(_, t)| t.state == TeleoperatorState::Idle)
            .filter(|(i, _)| self.is_eligible(*i))
            .min_by(|(_, a), (_, b)| a.idle_since.total_cmp(&b.idle_since))
            .map(|(i, _)| i)
    }

    /// An operator may start a trip only while under the driving cap.
    fn is_eligible(&self, to: usize) -> bool {
        self.rest.mode == RestMode::Disabled
            || self.teleoperators[to].drive_since_long_rest < self.rest.max_drive_min - EPS
    }

    fn start_takeover(&mut self, v: usize, to: usize, now: f64) {
        self.set_vehicle_state(v, VehicleState::Takeover);
        self.set_to_state(to, TeleoperatorState::Takeover);
        self.teleoperators[to].phase_start = now;
        self.calendar.schedule(Event {
            time: now + self.takeover_min,
            kind: EventKind::TakeoverComplete,
            vehicle: Some(v),
            teleoperator: Some(to),
        });
    }

    fn close_interval(&mut self, to: usize, kind: ServiceKind, now: f64) {
        let start = self.teleoperators[to].phase_start;
        self.service_intervals.push(ServiceInterval {
            teleoperator_id: to,
            kind,
            start_min: start,
            end_min: now,
        });
    }

    fn set_vehicle_state(&mut self, v: usize, state: VehicleState) {
        self.veh_counts[self.vehicles[v].state as usize] -= 1;
        self.veh_counts[state as usize] += 1;
        self.vehicles[v].state = state;
    }

    fn set_to_state(&mut self, to: usize, state: TeleoperatorState) {
        self.to_counts[self.teleoperators[to].state as usize] -= 1;
        self.to_counts[state as usize] += 1;
        self.teleoperators[to].state = state;
    }

    fn emit_snapshot(&mut self) {
        self.snapshots.push(Snapshot {
            time_min: self.next_sample,
            veh_idle: self.veh_counts[VehicleState::Idle as usize],
            veh_inqueue: self.veh_counts[VehicleState::InQueue as usize],
            veh_takeover: self.veh_counts[VehicleState::Takeover as usize],
            veh_teleoperated: self.veh_counts[VehicleState::Teleoperated as usize],
            veh_signedoff: self.veh_counts[VehicleState::SignedOff as usize],
            to_idle: self.to_counts[TeleoperatorState::Idle as usize],
            to_takeover: self.to_counts[TeleoperatorState::Takeover as usize],
            to_busy: self.to_counts[TeleoperatorState::Busy as usize],
            to_resting: self.to_counts[TeleoperatorState::Resting as usize],
            queue_len: self.queue.len(),
        });
        self.next_sample += self.options.snapshot_interval_min;
    }

    fn log<F: FnOnce() -> String>(
        &mut self,
        time: f64,
        kind: EventKind,
        vehicle: Option<usize>,
        teleoperator: Option<usize>,
        detail: F,
    ) {
        if !self.options.record_events {
            return;
        }
        self.events.push(EventRecord {
            time_min: time,
            kind,
            vehicle_id: vehicle.map(|v| self.tours.tours[v].vehicle_id.clone()),
            teleoperator_id: teleoperator,
            detail: detail(),
        });
    }

    fn finish(self) -> SimulationTrace {
        debug_assert_eq!(self.remaining_vehicles, 0, "a vehicle never signed off");
        debug_assert!(self.queue.is_empty(), "queue not drained at the end");
        SimulationTrace {
            shift_start_min: self.shift_start_min,
            shift_hours: self.shift_hours,
            takeover_min: self.takeover_min,
            n_vehicles: self.vehicles.len(),
            n_teleoperators: self.teleoperators.len(),
            events: self.events,
            snapshots: self.snapshots,
            waits: self.waits,
            service_intervals: self.service_intervals,
            vehicles: self.vehicle_records,
            trip_completions: self.trip_completions,
            completion_min: self.completion_min,
            completion_makespan: self.completion_min - self.shift_start_min,
            queue_integral_veh_min: self.queue_integral,
            max_queue_length: self.max_queue_length,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tours::{Tour, Trip};

    fn trip(index: usize, dwell: f64, travel: f64) -> Trip {
        Trip {
            index,
            dwell_before_min: dwell,
            travel_time_min: travel,
            distance_km: travel,
        }
    }

    fn tour(id: &str, start: f64, trips: Vec<Trip>) -> Tour {
        Tour {
            tour_id: format!("T{id}"),
            vehicle_id: format!("V{id}"),
            start_min: start,
            trips,
        }
    }

    fn two_vehicle_set() -> TourSet {
        TourSet::new(
            vec![
                tour("A", 0.0, vec![trip(0, 0.0, 10.0)]),
                tour("B", 5.0, vec![trip(0, 0.0, 10.0)]),
            ],
            "test",
        )
        .unwrap()
    }

    #[test]
    fn ready_vehicle_takes_an_idle_operator_directly() {
        let set = two_vehicle_set();
        let trace =
            run_simulation(&set, 2, 1.0, &RestPolicy::disabled(), 0.0, 9.0, 1).unwrap();
        assert!(trace.waits.is_empty());
        assert_eq!(trace.completion_makespan, 16.0);
    }

    #[test]
    fn ready_vehicle_queues_when_all_operators_are_busy() {
        let set = two_vehicle_set();
        let trace =
            run_simulation(&set, 1, 1.0, &RestPolicy::disabled(), 0.0, 9.0, 1).unwrap();
        assert_eq!(trace.waits.len(), 1);
        assert_eq!(trace.waits[0].vehicle_id, "VB");
        assert_eq!(trace.waits[0].wait_min(), 6.0);
        assert_eq!(trace.completion_makespan, 22.0);
    }

    #[test]
    fn vehicle_queues_while_every_operator_rests() {
        // one operator, resting after trip one when the second vehicle asks
        let set = TourSet::new(
            vec![
                tour("A", 0.0, vec![trip(0, 0.0, 300.0)]),
                tour("B", 310.0, vec![trip(0, 0.0, 30.0)]),
            ],
            "test",
        )
        .unwrap();
        let trace =
            run_simulation(&set, 1, 0.0, &RestPolicy::monolithic(), 0.0, 24.0, 1).unwrap();
        // rest runs 300..345, vehicle B asks at 310 and waits 35
        assert_eq!(trace.waits.len(), 1);
        assert_eq!(trace.waits[0].enqueue_min, 310.0);
        assert_eq!(trace.waits[0].assign_min, 345.0);
        let resting: Vec<&ServiceInterval> = trace
            .service_intervals
            .iter()
            .filter(|i| i.kind == ServiceKind::LongRest)
            .collect();
        assert_eq!(resting.len(), 1);
        assert_eq!((resting[0].start_min, resting[0].end_min), (300.0, 345.0));
    }

    #[test]
    fn queue_is_served_fifo() {
        let set = TourSet::new(
            vec![
                tour("A", 0.0, vec![trip(0, 0.0, 10.0)]),
                tour("B", 5.0, vec![trip(0, 0.0, 10.0)]),
                tour("C", 6.0, vec![trip(0, 0.0, 10.0)]),
            ],
            "test",
        )
        .unwrap();
        let trace =
            run_simulation(&set, 1, 1.0, &RestPolicy::disabled(), 0.0, 9.0, 1).unwrap();
        assert_eq!(trace.waits.len(), 2);
        assert_eq!(trace.waits[0].vehicle_id, "VB");
        assert_eq!(trace.waits[0].assign_min, 11.0);
        assert_eq!(trace.waits[1].vehicle_id, "VC");
        assert_eq!(trace.waits[1].assign_min, 22.0);
    }

    #[test]
    fn longest_idle_operator_is_picked_with_id_tiebreak() {
        // two operators idle since t=0: the first request goes to id 0;
        // id 1 serves the second vehicle, so id 0 has been idle longer when
        // the third request arrives after id 0 finished earlier
        let set = TourSet::new(
            vec![
                tour("A", 0.0, vec![trip(0, 0.0, 5.0)]),
                tour("B", 1.0, vec![trip(0, 0.0, 20.0)]),
                tour("C", 10.0, vec![trip(0, 0.0, 5.0)]),
            ],
            "test",
        )
        .unwrap();
        let trace =
            run_simulation(&set, 2, 0.0, &RestPolicy::disabled(), 0.0, 9.0, 1).unwrap();
        let mut drives: Vec<(usize, f64)> = trace
            .service_intervals
            .iter()
            .filter(|i| i.kind == ServiceKind::Drive)
            .map(|i| (i.teleoperator_id, i.start_min))
            .collect();
        drives.sort_by(|a, b| a.1.total_cmp(&b.1));
        // A -> op 0 (tie, lower id), B -> op 1, C -> op 0 (idle since 5)
        assert_eq!(drives, vec![(0, 0.0), (1, 1.0), (0, 10.0)]);
    }

    #[test]
    fn last_trip_signs_the_vehicle_off() {
        let set = TourSet::new(vec![tour("A", 0.0, vec![trip(0, 0.0, 10.0)])], "test").unwrap();
        let trace =
            run_simulation(&set, 1, 0.0, &RestPolicy::disabled(), 0.0, 9.0, 1).unwrap();
        assert_eq!(trace.vehicles[0].signoff_min, 10.0);
        let last = trace.snapshots.last().unwrap();
        assert_eq!(last.veh_signedoff, 1);
        assert_eq!(last.queue_len, 0);
    }

    #[test]
    fn split_rest_credits_short_rests_against_the_long_rest() {
        // two 140 min trips: short rest after the first, residual 35 min
        // after the cap is crossed on the second
        let set = TourSet::new(
            vec![tour("A", 0.0, vec![trip(0, 0.0, 140.0), trip(1, 30.0, 140.0)])],
            "test",
        )
        .unwrap();
        let trace =
            run_simulation(&set, 1, 0.0, &RestPolicy::split(), 0.0, 24.0, 1).unwrap();
        let rests: Vec<(ServiceKind, f64, f64)> = trace
            .service_intervals
            .iter()
            .filter(|i| i.kind.is_rest())
            .map(|i| (i.kind, i.start_min, i.end_min))
            .collect();
        assert_eq!(
            rests,
            vec![
                (ServiceKind::ShortRest, 140.0, 150.0),
                (ServiceKind::LongRest, 310.0, 345.0),
            ]
        );
        assert_eq!(trace.completion_makespan, 310.0);
    }

    #[test]
    fn identical_inputs_give_identical_traces() {
        let set = TourSet::new(
            vec![
                tour("A", 0.0, vec![trip(0, 5.0, 47.5), trip(1, 12.0, 33.0)]),
                tour("B", 3.0, vec![trip(0, 0.0, 61.0)]),
                tour("C", 8.0, vec![trip(0, 2.0, 15.0), trip(1, 6.0, 88.0)]),
            ],
            "test",
        )
        .unwrap();
        let a = run_simulation(&set, 2, 2.0, &RestPolicy::monolithic(), 0.0, 9.0, 1).unwrap();
        let b = run_simulation(&set, 2, 2.0, &RestPolicy::monolithic(), 0.0, 9.0, 1).unwrap();
        assert_eq!(a, b);
        let a_json = serde_json::to_string(&a).unwrap();
        let b_json = serde_json::to_string(&b).unwrap();
        assert_eq!(a_json, b_json);
    }

    #[test]
    fn empty_tour_set_is_rejected() {
        let set = TourSet {
            tours: vec![],
            provenance: "test".to_string(),
        };
        assert!(run_simulation(&set, 1, 0.0, &RestPolicy::disabled(), 0.0, 9.0, 1).is_err());
    }

    #[test]
    fn zero_operators_is_rejected() {
        let set = two_vehicle_set();
        assert!(run_simulation(&set, 0, 0.0, &RestPolicy::disabled(), 0.0, 9.0, 1).is_err());
    }

    #[test]
    fn snapshot_counts_always_sum_to_the_populations() {
        let set = TourSet::new(
            vec![
                tour("A", 0.0, vec![trip(0, 5.0, 47.5), trip(1, 12.0, 33.0)]),
                tour("B", 3.0, vec![trip(0, 0.0, 61.0)]),
                tour("C", 8.0, vec![trip(0, 2.0, 15.0), trip(1, 6.0, 88.0)]),
                tour("D", 30.0, vec![trip(0, 0.0, 200.0), trip(1, 1.0, 120.0)]),
            ],
            "test",
        )
        .unwrap();
        let trace = run_simulation(&set, 2, 1.5, &RestPolicy::split(), 0.0, 9.0, 1).unwrap();
        for s in &trace.snapshots {
            assert_eq!(
                s.veh_idle + s.veh_inqueue + s.veh_takeover + s.veh_teleoperated + s.veh_signedoff,
                4
            );
            assert_eq!(s.to_idle + s.to_takeover + s.to_busy + s.to_resting, 2);
            assert_eq!(s.veh_inqueue, s.queue_len);
        }
    }
}
