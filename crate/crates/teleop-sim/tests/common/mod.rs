//! Fixture builders shared by the integration test binaries.

#![allow(dead_code)]

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use teleop_sim::tours::{Tour, TourSet, Trip};

pub fn trip(index: usize, dwell: f64, travel: f64, distance: f64) -> Trip {
    Trip {
        index,
        dwell_before_min: dwell,
        travel_time_min: travel,
        distance_km: distance,
    }
}

pub fn tour(label: &str, start: f64, trips: Vec<Trip>) -> Tour {
    Tour {
        tour_id: format!("T{label}"),
        vehicle_id: format!("V{label}"),
        start_min: start,
        trips,
    }
}

pub fn fixture_set(tours: Vec<Tour>) -> TourSet {
    TourSet::new(tours, "fixture").unwrap()
}

/// A random but valid tour set for invariant sweeps: `k` tours starting
/// within the first twelve hours, one to five trips each.
pub fn random_set(rng: &mut ChaCha8Rng, k: usize) -> TourSet {
    let tours = (0..k)
        .map(|i| {
            let n_trips = rng.gen_range(1..=5);
            let trips = (0..n_trips)
                .map(|j| {
                    let dwell = if j == 0 {
                        0.0
                    } else {
                        rng.gen_range(0.0..60.0)
                    };
                    let travel = rng.gen_range(5.0..240.0);
                    trip(j, dwell, travel, travel)
                })
                .collect();
            tour(&format!("{i:04}"), rng.gen_range(0.0..720.0), trips)
        })
        .collect();
    fixture_set(tours)
}
