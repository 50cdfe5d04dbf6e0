//! Simulation trace: everything a run leaves behind.
//!
//! The trace is the only simulation output; KPI computation, plotting and
//! the invariant checks all read from it. It carries the processed event
//! log, periodic state snapshots, queue wait records, operator service
//! intervals and per-vehicle outcomes.

use std::io::Write;
use std::path::Path;

use serde::Serialize;

use crate::engine::calendar::EventKind;
use crate::error::Result;

/// Vehicle life cycle. `SignedOff` is terminal.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum VehicleState {
    /// Dwelling at a stop (or not yet started).
    Idle,
    /// Waiting for an operator.
    InQueue,
    /// Takeover handshake in progress.
    Takeover,
    /// Being driven remotely.
    Teleoperated,
    /// Tour finished.
    SignedOff,
}

/// Operator life cycle.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TeleoperatorState {
    Idle,
    Takeover,
    /// Driving a vehicle.
    Busy,
    Resting,
}

/// One processed event, in processing order.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EventRecord {
    pub time_min: f64,
    pub kind: EventKind,
    pub vehicle_id: Option<String>,
    pub teleoperator_id: Option<usize>,
    /// Human-readable outcome, including state transitions.
    pub detail: String,
}

impl Serialize for EventKind {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(self.name())
    }
}

/// Population counts at one sample instant.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Snapshot {
    pub time_min: f64,
    pub veh_idle: usize,
    pub veh_inqueue: usize,
    pub veh_takeover: usize,
    pub veh_teleoperated: usize,
    pub veh_signedoff: usize,
    pub to_idle: usize,
    pub to_takeover: usize,
    pub to_busy: usize,
    pub to_resting: usize,
    pub queue_len: usize,
}

/// One stint in the queue. Waits are strictly positive: a vehicle that finds
/// a free operator immediately never enters the queue.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WaitRecord {
    pub vehicle_id: String,
    pub trip_index: usize,
    pub enqueue_min: f64,
    pub assign_min: f64,
}

impl WaitRecord {
    #[must_use]
    pub fn wait_min(&self) -> f64 {
        self.assign_min - self.enqueue_min
    }
}

/// What an operator was doing during a closed interval.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ServiceKind {
    Takeover,
    /// Driving; the only kind that counts against the rest clock.
    Drive,
    ShortRest,
    LongRest,
}

impl ServiceKind {
    #[must_use]
    pub fn is_rest(self) -> bool {
        matches!(self, Self::ShortRest | Self::LongRest)
    }
}

/// A closed operator activity interval.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ServiceInterval {
    pub teleoperator_id: usize,
    pub kind: ServiceKind,
    pub start_min: f64,
    pub end_min: f64,
}

/// Per-vehicle outcome of the run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VehicleRecord {
    pub vehicle_id: String,
    pub tour_id: String,
    pub n_trips: usize,
    pub total_travel_min: f64,
    pub total_distance_km: f64,
    pub signoff_min: f64,
}

/// Completion of a single trip.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TripCompletion {
    pub vehicle_id: String,
    pub trip_index: usize,
    pub completion_min: f64,
    pub travel_time_min: f64,
    pub distance_km: f64,
}

/// Full record of one simulation run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimulationTrace {
    /// Origin of the makespan measurement, minutes since midnight.
    pub shift_start_min: f64,
    pub shift_hours: f64,
    pub takeover_min: f64,
    pub n_vehicles: usize,
    pub n_teleoperators: usize,
    pub events: Vec<EventRecord>,
    pub snapshots: Vec<Snapshot>,
    pub waits: Vec<WaitRecord>,
    pub service_intervals: Vec<ServiceInterval>,
    pub vehicles: Vec<VehicleRecord>,
    pub trip_completions: Vec<TripCompletion>,
    /// Absolute time of the last tour sign-off.
    pub completion_min: f64,
    /// `completion_min - shift_start_min`; the run's makespan.
    pub completion_makespan: f64,
    /// Integral of queue length over time, vehicle-minutes.
    pub queue_integral_veh_min: f64,
    pub max_queue_length: usize,
}

impl SimulationTrace {
    /// Sum of all recorded queue waits, minutes.
    #[must_use]
    pub fn total_wait_min(&self) -> f64 {
        self.waits.iter().map(WaitRecord::wait_min).sum()
    }

    /// Write the event log as CSV: `time_min,kind,vehicle_id,teleoperator_id,detail`.
    pub fn write_events_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        let mut out = std::io::BufWriter::new(std::fs::File::create(path)?);
        writeln!(out, "time_min,kind,vehicle_id,teleoperator_id,detail")?;
        for ev in &self.events {
            writeln!(
                out,
                "{:.6},{},{},{},{}",
                ev.time_min,
                ev.kind.name(),
                ev.vehicle_id.as_deref().unwrap_or(""),
                ev.teleoperator_id.map_or(String::new(), |i| i.to_string()),
                csv_quote(&ev.detail),
            )?;
        }
        out.flush()?;
        Ok(())
    }

    /// Write the snapshot series as CSV, one row per sample instant.
    pub fn write_snapshots_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        let mut out = std::io::BufWriter::new(std::fs::File::create(path)?);
        writeln!(
            out,
            "time_min,veh_idle,veh_inqueue,veh_takeover,veh_teleoperated,veh_signedoff,\
             to_idle,to_takeover,to_busy,to_resting,queue_len"
        )?;
        for s in &self.snapshots {
            writeln!(
                out,
                "{},{},{},{},{},{},{},{},{},{},{}",
                s.time_min,
                s.veh_idle,
                s.veh_inqueue,
                s.veh_takeover,
                s.veh_teleoperated,
                s.veh_signedoff,
                s.to_idle,
                s.to_takeover,
                s.to_busy,
                s.to_resting,
                s.queue_len,
            )?;
        }
        out.flush()?;
        Ok(())
    }
}

fn csv_quote(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}
