//! Discrete-event simulation of teleoperated truck fleets.
//!
//! A fleet of trucks works through a day of delivery tours. Instead of one
//! driver per truck, a shared pool of remote operators drives the trucks over
//! a network link. Each trip of a tour needs an operator: the truck requests
//! one when it is ready to leave, waits in a FIFO queue if none is free, goes
//! through a takeover handshake, and is then driven to the next stop. After
//! the trip the operator is released back to the pool (or sent to rest) and
//! the truck dwells at the stop until its next trip.
//!
//! The crate answers the sizing question behind that setup: how small can the
//! operator pool be, relative to the fleet, before queueing delay eats the
//! savings? It provides:
//!
//! * [`tours`]: tour data model, CSV/JSON import and export, and a calibrated
//!   synthetic tour generator.
//! * [`engine`]: the event-driven simulation core producing a full trace
//!   (event log, state snapshots, waits, service intervals).
//! * [`kpi`]: per-run indicators (waiting times, utilizations, completion
//!   rates, delay) and replication statistics.
//! * [`scenario`]: replication runs, Cartesian parameter sweeps and minimal
//!   operator-to-vehicle ratio search against a service-level target.
//! * [`cli`]: the command line front end used by the `teleop-sim` binary.
//!
//! Everything is deterministic: the same inputs and seeds produce bit
//! identical traces and output files.
//!
//! The `examples/` directory is the best starting point; each example is a
//! small self-contained study built on the library API.

pub mod cli;
pub mod clock;
pub mod engine;
pub mod error;
pub mod kpi;
pub mod scenario;
pub mod seed;
pub mod tours;

pub use engine::{run_simulation, RestMode, RestPolicy, SimulationTrace};
pub use error::SimError;
pub use kpi::{compute_kpis, KpiReport, ReplicationSummary};
pub use scenario::{run_scenario, run_sweep, ScenarioConfig, SweepResult};
pub use tours::{generate_tours, load_tours, GeneratorProfile, Tour, TourSet, Trip};
