//! Tour data model.
//!
//! A tour is one truck's work for the day: an ordered list of trips, each
//! preceded by a dwell (loading, unloading, waiting at the dock). Times are
//! minutes, distances kilometres. Tour sets are immutable once validated;
//! sampling and filtering return new sets.

mod generate;
mod io;

pub use generate::{generate_tours, DurationDistribution, GeneratorProfile};
pub use io::{load_tours, write_tours, TourFormat};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Result, SimError};

/// One leg of a tour. The dwell happens before the trip starts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trip {
    /// Position within the tour, consecutive from 0.
    #[serde(rename = "trip_index")]
    pub index: usize,
    /// Stand-still time at the stop before this trip, minutes.
    pub dwell_before_min: f64,
    /// Driving time of the trip, minutes. Strictly positive.
    pub travel_time_min: f64,
    /// Driven distance, kilometres. Strictly positive.
    pub distance_km: f64,
}

/// One vehicle's tour: start time plus its trips in order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tour {
    pub tour_id: String,
    pub vehicle_id: String,
    /// Clock time at which the first dwell begins, minutes since midnight.
    #[serde(rename = "tour_start_min")]
    pub start_min: f64,
    pub trips: Vec<Trip>,
}

impl Tour {
    /// Total driving time over all trips, minutes.
    #[must_use]
    pub fn total_travel_min(&self) -> f64 {
        self.trips.iter().map(|t| t.travel_time_min).sum()
    }

    /// Total planned distance over all trips, kilometres.
    #[must_use]
    pub fn total_distance_km(&self) -> f64 {
        self.trips.iter().map(|t| t.distance_km).sum()
    }

    /// Tour duration if nothing ever waits: sum of dwells and travel times.
    #[must_use]
    pub fn planned_duration_min(&self) -> f64 {
        self.trips
            .iter()
            .map(|t| t.dwell_before_min + t.travel_time_min)
            .sum()
    }
}

/// A validated collection of tours.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TourSet {
    pub tours: Vec<Tour>,
    /// Where the set came from, e.g. "generated" or "loaded".
    pub provenance: String,
}

impl TourSet {
    /// Build a set, rejecting structurally broken input.
    pub fn new(tours: Vec<Tour>, provenance: impl Into<String>) -> Result<Self> {
        let set = Self {
            tours,
            provenance: provenance.into(),
        };
        set.validate()?;
        Ok(set)
    }

    /// Number of tours (one vehicle each).
    #[must_use]
    pub fn len(&self) -> usize {
        self.tours.len()
    }

    #[must_use]
    pub fn is_empty(&self) -> bool {
        self.tours.is_empty()
    }

    /// Mean number of trips per tour.
    #[must_use]
    pub fn mean_trips_per_tour(&self) -> f64 {
        if self.tours.is_empty() {
            return 0.0;
        }
        let trips: usize = self.tours.iter().map(|t| t.trips.len()).sum();
        trips as f64 / self.tours.len() as f64
    }

    /// Mean planned tour duration in hours.
    #[must_use]
    pub fn mean_duration_hours(&self) -> f64 {
        if self.tours.is_empty() {
            return 0.0;
        }
        let total: f64 = self.tours.iter().map(Tour::planned_duration_min).sum();
        total / self.tours.len() as f64 / 60.0
    }

    /// Check every structural invariant of the set.
    pub fn validate(&self) -> Result<()> {
        let mut tour_ids = std::collections::HashSet::new();
        let mut vehicle_ids = std::collections::HashSet::new();
        for tour in &self.tours {
            if !tour_ids.insert(tour.tour_id.as_str()) {
                return Err(SimError::Validation(format!(
                    "duplicate tour_id `{}`",
                    tour.tour_id
                )));
            }
            if !vehicle_ids.insert(tour.vehicle_id.as_str()) {
                return Err(SimError::Validation(format!(
                    "vehicle_id `{}` appears in more than one tour",
                    tour.vehicle_id
                )));
            }
            if tour.trips.is_empty() {
                return Err(SimError::Validation(format!(
                    "tour `{}` has no trips",
                    tour.tour_id
                )));
            }
            if !tour.start_min.is_finite() || tour.start_min < 0.0 {
                return Err(SimError::Validation(format!(
                    "tour `{}` has invalid start time {}",
                    tour.tour_id, tour.start_min
                )));
            }
            for (pos, trip) in tour.trips.iter().enumerate() {
                if trip.index != pos {
                    return Err(SimError::Validation(format!(
                        "tour `{}` has non-consecutive trip index {} at position {}",
                        tour.tour_id, trip.index, pos
                    )));
                }
                if !(trip.travel_time_min.is_finite() && trip.travel_time_min > 0.0) {
                    return Err(SimError::Validation(format!(
                        "tour `{}` trip {} has non-positive travel time",
                        tour.tour_id, trip.index
                    )));
                }
                if !(trip.distance_km.is_finite() && trip.distance_km > 0.0) {
                    return Err(SimError::Validation(format!(
                        "tour `{}` trip {} has non-positive distance",
                        tour.tour_id, trip.index
                    )));
                }
                if !(trip.dwell_before_min.is_finite() && trip.dwell_before_min >= 0.0) {
                    return Err(SimError::Validation(format!(
                        "tour `{}` trip {} has negative dwell",
                        tour.tour_id, trip.index
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Keep a uniformly chosen fraction of the tours.
///
/// Exactly `floor(rate * n)` tours survive, drawn without replacement with
/// the given seed; original order is preserved among the survivors. A rate of
/// 1.0 returns the set unchanged. This models a low penetration of
/// teleoperated trucks inside a larger conventional fleet.
pub fn sample_penetration(tours: &TourSet, rate: f64, seed: u64) -> Result<TourSet> {
    if !(rate > 0.0 && rate <= 1.0) {
        return Err(SimError::Config(format!(
            "penetration rate must be in (0, 1], got {rate}"
        )));
    }
    if rate == 1.0 {
        return Ok(tours.clone());
    }
    let keep = (rate * tours.len() as f64).floor() as usize;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut indices: Vec<usize> = (0..tours.len()).collect();
    indices.shuffle(&mut rng);
    let mut chosen: Vec<usize> = indices.into_iter().take(keep).collect();
    chosen.sort_unstable();
    let selected = chosen.into_iter().map(|i| tours.tours[i].clone()).collect();
    TourSet::new(selected, tours.provenance.clone())
}

/// Keep the tours whose start time falls in `[start, start + hours)`.
///
/// The window is half open: a tour starting exactly at the end of the window
/// is excluded. Order is preserved. The window does not wrap past midnight;
/// a 24-hour window starting at 0:00 therefore retains every same-day tour.
pub fn filter_window(tours: &TourSet, start_min: f64, hours: f64) -> Result<TourSet> {
    if !(start_min.is_finite() && start_min >= 0.0) {
        return Err(SimError::Config(format!(
            "window start must be non-negative, got {start_min}"
        )));
    }
    if !(hours.is_finite() && hours > 0.0) {
        return Err(SimError::Config(format!(
            "window length must be positive, got {hours} h"
        )));
    }
    let end = start_min + hours * 60.0;
    let kept = tours
        .tours
        .iter()
        .filter(|t| t.start_min >= start_min && t.start_min < end)
        .cloned()
        .collect();
    TourSet::new(kept, tours.provenance.clone())
}
