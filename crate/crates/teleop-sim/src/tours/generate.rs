//! Synthetic tour generation.
//!
//! Real tour plans are rarely shareable, so the generator produces a stand-in
//! population with the same coarse shape: most tours have a handful of trips
//! (shifted geometric count, mean 4), trip driving times and dwells are
//! lognormal, and departures cluster in the early morning. With the default
//! profile the mean planned tour duration lands at about 7.37 hours, the
//! figure the rest of the crate is calibrated against.
//!
//! These are daily tours, so the defaults also bound each one: at most eight
//! trips, and the plan has to finish by the end of the day it starts, with a
//! shorter overnight allowance for late departures. The geometric success
//! probability is re-solved under the trip cap so the capped distribution
//! still hits the configured mean.

use rand::distributions::{Distribution, WeightedIndex};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Exp, LogNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Result, SimError};
use crate::tours::{Tour, TourSet, Trip};

/// A positive duration distribution, minutes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DurationDistribution {
    /// Lognormal with the given sample mean (not the log-scale mean).
    Lognormal { mean_min: f64, sigma: f64 },
    Exponential { mean_min: f64 },
    Uniform { min_min: f64, max_min: f64 },
    Constant { value_min: f64 },
}

impl DurationDistribution {
    fn validate(&self, what: &str) -> Result<()> {
        let bad = |msg: String| Err(SimError::Config(format!("{what}: {msg}")));
        match *self {
            Self::Lognormal { mean_min, sigma } => {
                if !(mean_min > 0.0 && mean_min.is_finite()) {
                    return bad(format!("lognormal mean must be positive, got {mean_min}"));
                }
                if !(sigma > 0.0 && sigma.is_finite()) {
                    return bad(format!("lognormal sigma must be positive, got {sigma}"));
                }
            }
            Self::Exponential { mean_min } => {
                if !(mean_min > 0.0 && mean_min.is_finite()) {
                    return bad(format!("exponential mean must be positive, got {mean_min}"));
                }
            }
            Self::Uniform { min_min, max_min } => {
                if !(min_min >= 0.0 && max_min > min_min && max_min.is_finite()) {
                    return bad(format!("uniform bounds must satisfy 0 <= min < max, got [{min_min}, {max_min})"));
                }
            }
            Self::Constant { value_min } => {
                if !(value_min >= 0.0 && value_min.is_finite()) {
                    return bad(format!("constant must be non-negative, got {value_min}"));
                }
            }
        }
        Ok(())
    }

    fn sample(&self, rng: &mut ChaCha8Rng) -> f64 {
        match *self {
            Self::Lognormal { mean_min, sigma } => {
                // parameterized by the sample mean: mu = ln(mean) - sigma^2/2
                let mu = mean_min.ln() - sigma * sigma / 2.0;
                LogNormal::new(mu, sigma).expect("validated").sample(rng)
            }
            Self::Exponential { mean_min } => {
                Exp::new(1.0 / mean_min).expect("validated").sample(rng)
            }
            Self::Uniform { min_min, max_min } => rng.gen_range(min_min..max_min),
            Self::Constant { value_min } => value_min,
        }
    }
}

/// Everything the generator needs to know about the tour population.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GeneratorProfile {
    /// Mean of the shifted geometric trip count (minimum one trip per tour).
    pub mean_trips_per_tour: f64,
    /// Hard upper bound on trips per tour. The geometric is truncated here
    /// and re-centered so its mean still equals `mean_trips_per_tour`.
    pub max_trips_per_tour: usize,
    /// Driving time of a single trip.
    pub trip_time: DurationDistribution,
    /// Dwell before each trip, the first one included.
    pub dwell: DurationDistribution,
    /// Hard cap on the planned dwell plus driving time; longer draws are
    /// redrawn.
    pub max_tour_duration_min: f64,
    /// Tours are planned to end by midnight of the day they start. Departures
    /// too late to fit anything useful before midnight get this allowance
    /// instead, so overnight tours stay possible but short.
    pub overnight_duration_min: f64,
    /// Relative departure weight for each of the 24 hours of the day.
    pub departure_weights: Vec<f64>,
    /// Cruise speed used to turn travel time into distance.
    pub distance_speed_kmh: f64,
}

impl Default for GeneratorProfile {
    fn default() -> Self {
        Self {
            mean_trips_per_tour: 4.0,
            max_trips_per_tour: 8,
            // 4 trips x (30 min dwell + 80.55 min driving) = 442.2 min,
            // i.e. a 7.37 h mean tour
            trip_time: DurationDistribution::Lognormal {
                mean_min: 80.55,
                sigma: 0.5,
            },
            dwell: DurationDistribution::Lognormal {
                mean_min: 30.0,
                sigma: 0.5,
            },
            max_tour_duration_min: 1100.0,
            overnight_duration_min: 600.0,
            departure_weights: vec![
                0.2, 0.2, 0.2, 0.5, 2.5, 6.5, 7.5, 5.0, 1.5, 0.5, 0.35, 0.25, // 00..11
                0.2, 0.2, 0.2, 0.2, 0.2, 0.2, 0.2, 0.2, 0.2, 0.2, 0.2, 0.2, // 12..23
            ],
            distance_speed_kmh: 60.0,
        }
    }
}

impl GeneratorProfile {
    fn validate(&self) -> Result<()> {
        if !(self.mean_trips_per_tour >= 1.0 && self.mean_trips_per_tour.is_finite()) {
            return Err(SimError::Config(format!(
                "mean trips per tour must be at least 1, got {}",
                self.mean_trips_per_tour
            )));
        }
        if self.max_trips_per_tour == 0 {
            return Err(SimError::Config(
                "max trips per tour must be at least 1".to_string(),
            ));
        }
        // the capped geometric tops out at the uniform mean (cap + 1) / 2,
        // so larger targets cannot be reached no matter the parameter
        let reachable = (self.max_trips_per_tour as f64 + 1.0) / 2.0;
        if self.mean_trips_per_tour > 1.0 && self.mean_trips_per_tour >= reachable {
            return Err(SimError::Config(format!(
                "mean of {} trips is not reachable with at most {} per tour",
                self.mean_trips_per_tour, self.max_trips_per_tour
            )));
        }
        self.trip_time.validate("trip time")?;
        self.dwell.validate("dwell")?;
        if !(self.max_tour_duration_min > 0.0 && self.max_tour_duration_min.is_finite()) {
            return Err(SimError::Config(format!(
                "max tour duration must be positive, got {} min",
                self.max_tour_duration_min
            )));
        }
        if !(self.overnight_duration_min > 0.0 && self.overnight_duration_min.is_finite()) {
            return Err(SimError::Config(format!(
                "overnight duration allowance must be positive, got {} min",
                self.overnight_duration_min
            )));
        }
        if self.departure_weights.len() != 24 {
            return Err(SimError::Config(format!(
                "departure profile needs 24 hourly weights, got {}",
                self.departure_weights.len()
            )));
        }
        if self.departure_weights.iter().any(|w| !(*w >= 0.0 && w.is_finite())) {
            return Err(SimError::Config(
                "departure weights must be non-negative".to_string(),
            ));
        }
        if self.departure_weights.iter().sum::<f64>() <= 0.0 {
            return Err(SimError::Config(
                "departure weights must not all be zero".to_string(),
            ));
        }
        if !(self.distance_speed_kmh > 0.0 && self.distance_speed_kmh.is_finite()) {
            return Err(SimError::Config(format!(
                "distance speed must be positive, got {} km/h",
                self.distance_speed_kmh
            )));
        }
        Ok(())
    }

    /// Planned-duration allowance for a departure at `start_min`: the rest of
    /// the day, at least the overnight allowance, at most the hard cap.
    fn duration_bound(&self, start_min: f64) -> f64 {
        let to_midnight = 1440.0 - start_min;
        self.max_tour_duration_min
            .min(to_midnight.max(self.overnight_duration_min))
    }
}

/// Shifted geometric on {1, ..., cap}, re-centered so the capped mean hits
/// the configured target.
struct TripCountDist {
    q: f64,
    cap: usize,
    /// total probability mass inside the cap, 1 - q^cap
    mass: f64,
}

/// Mean of the geometric restricted to {1, ..., cap} for success probability
/// `p`. Summed directly; the closed form cancels badly for small p.
fn capped_mean(p: f64, cap: usize) -> f64 {
    let q = 1.0 - p;
    let (mut weight, mut mass, mut first_moment) = (1.0, 0.0, 0.0);
    for n in 1..=cap {
        mass += weight;
        first_moment += weight * n as f64;
        weight *= q;
    }
    first_moment / mass
}

impl TripCountDist {
    fn new(mean: f64, cap: usize) -> Self {
        if mean <= 1.0 || cap == 1 {
            return Self { q: 0.0, cap: 1, mass: 1.0 };
        }
        // with the cap far out in the tail truncation is immaterial and the
        // plain 1/mean parameter already lands on target
        let p0 = 1.0 / mean;
        if cap as f64 * (1.0 - p0).ln() < -30.0 {
            let q = 1.0 - p0;
            return Self { q, cap, mass: 1.0 - q.powf(cap as f64) };
        }
        // capping drags the mean down, so bisect towards a smaller p; the
        // capped mean falls from (cap + 1) / 2 at p -> 0 to 1 at p -> 1
        let (mut lo, mut hi) = (1e-9, 1.0 - 1e-9);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if capped_mean(mid, cap) > mean {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let q = 1.0 - 0.5 * (lo + hi);
        Self { q, cap, mass: 1.0 - q.powf(cap as f64) }
    }

    fn sample(&self, rng: &mut ChaCha8Rng) -> usize {
        if self.cap == 1 {
            return 1;
        }
        let u: f64 = rng.gen_range(0.0..1.0);
        let n = 1 + ((1.0 - u * self.mass).ln() / self.q.ln()).floor() as usize;
        n.clamp(1, self.cap)
    }
}

fn round3(x: f64) -> f64 {
    (x * 1000.0).round() / 1000.0
}

/// Generate `count` tours from the profile, deterministically per seed.
pub fn generate_tours(profile: &GeneratorProfile, count: usize, seed: u64) -> Result<TourSet> {
    profile.validate()?;
    if count == 0 {
        return Err(SimError::Config("tour count must be at least 1".to_string()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let hour_weights = WeightedIndex::new(&profile.departure_weights)
        .map_err(|e| SimError::Config(format!("departure profile: {e}")))?;
    let trip_count = TripCountDist::new(profile.mean_trips_per_tour, profile.max_trips_per_tour);

    let width = count.to_string().len().max(4);
    let mut tours = Vec::with_capacity(count);
    for i in 0..count {
        let hour = hour_weights.sample(&mut rng);
        let minute: f64 = rng.gen_range(0.0..60.0);
        let start_min = round3(hour as f64 * 60.0 + minute);
        let duration_bound = profile.duration_bound(start_min);

        let mut trips = Vec::new();
        for attempt in 0.. {
            if attempt == 1000 {
                return Err(SimError::Config(format!(
                    "could not draw a tour within {duration_bound} min after 1000 \
                     attempts; the duration bounds are too tight for the trip \
                     distributions"
                )));
            }
            let n_trips = trip_count.sample(&mut rng);
            trips.clear();
            let mut planned = 0.0;
            for index in 0..n_trips {
                let travel_time_min = round3(profile.trip_time.sample(&mut rng)).max(0.001);
                let dwell_before_min = round3(profile.dwell.sample(&mut rng)).max(0.0);
                let distance_km =
                    round3(travel_time_min * profile.distance_speed_kmh / 60.0).max(0.001);
                planned += dwell_before_min + travel_time_min;
                trips.push(Trip {
                    index,
                    dwell_before_min,
                    travel_time_min,
                    distance_km,
                });
            }
            if planned <= duration_bound {
                break;
            }
        }

        tours.push(Tour {
            tour_id: format!("T{:0width$}", i + 1, width = width),
            vehicle_id: format!("V{:0width$}", i + 1, width = width),
            start_min,
            trips,
        });
    }

    TourSet::new(tours, "generated")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn calibration_hits_the_published_population_shape() {
        let set = generate_tours(&GeneratorProfile::default(), 10_000, 1).unwrap();
        let mean_trips = set.mean_trips_per_tour();
        assert!(
            (mean_trips - 4.0).abs() / 4.0 < 0.05,
            "mean trips per tour {mean_trips} not within 5% of 4"
        );
        let mean_hours = set.mean_duration_hours();
        assert!(
            (mean_hours - 7.37).abs() / 7.37 < 0.10,
            "mean tour duration {mean_hours} h not within 10% of 7.37 h"
        );
    }

    #[test]
    fn daily_bounds_hold_without_dragging_the_mean_off_target() {
        let profile = GeneratorProfile::default();
        let set = generate_tours(&profile, 10_000, 2).unwrap();
        for tour in &set.tours {
            assert!(tour.trips.len() <= profile.max_trips_per_tour);
            let duration = tour.planned_duration_min();
            assert!(duration <= profile.max_tour_duration_min);
            // a tour ends the day it starts unless it runs on the shorter
            // overnight allowance
            assert!(
                tour.start_min + duration <= 1440.0
                    || duration <= profile.overnight_duration_min,
                "tour starting at {} runs {duration} min",
                tour.start_min
            );
        }
        // the re-centered parameter keeps the capped mean on target
        let mean_trips = set.mean_trips_per_tour();
        assert!(
            (mean_trips - 4.0).abs() / 4.0 < 0.05,
            "capped mean trips per tour {mean_trips} drifted from 4"
        );
    }

    #[test]
    fn unreachable_bounds_are_rejected() {
        // a cap of 5 tops out at a mean of 3, below the target of 4
        let mut p = GeneratorProfile::default();
        p.max_trips_per_tour = 5;
        assert!(generate_tours(&p, 10, 1).is_err());

        let mut p = GeneratorProfile::default();
        p.max_trips_per_tour = 0;
        assert!(generate_tours(&p, 10, 1).is_err());

        // every draw is longer than the bound, so generation gives up
        let mut p = GeneratorProfile::default();
        p.trip_time = DurationDistribution::Constant { value_min: 2000.0 };
        assert!(generate_tours(&p, 10, 1).is_err());
    }

    #[test]
    fn generation_is_deterministic_per_seed() {
        let profile = GeneratorProfile::default();
        let a = generate_tours(&profile, 50, 7).unwrap();
        let b = generate_tours(&profile, 50, 7).unwrap();
        let c = generate_tours(&profile, 50, 8).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn single_tour_generation_works() {
        let set = generate_tours(&GeneratorProfile::default(), 1, 7).unwrap();
        assert_eq!(set.len(), 1);
        assert!(!set.tours[0].trips.is_empty());
        set.validate().unwrap();
    }

    #[test]
    fn zero_count_is_rejected() {
        assert!(generate_tours(&GeneratorProfile::default(), 0, 1).is_err());
    }

    #[test]
    fn broken_profiles_are_rejected() {
        let mut p = GeneratorProfile::default();
        p.mean_trips_per_tour = 0.5;
        assert!(generate_tours(&p, 10, 1).is_err());

        let mut p = GeneratorProfile::default();
        p.departure_weights = vec![1.0; 23];
        assert!(generate_tours(&p, 10, 1).is_err());

        let mut p = GeneratorProfile::default();
        p.trip_time = DurationDistribution::Lognormal {
            mean_min: -3.0,
            sigma: 0.5,
        };
        assert!(generate_tours(&p, 10, 1).is_err());
    }

    #[test]
    fn departures_follow_the_weight_profile() {
        // all weight on hour 6 puts every start inside [360, 420)
        let mut p = GeneratorProfile::default();
        p.departure_weights = vec![0.0; 24];
        p.departure_weights[6] = 1.0;
        let set = generate_tours(&p, 200, 3).unwrap();
        assert!(set
            .tours
            .iter()
            .all(|t| t.start_min >= 360.0 && t.start_min < 420.0));
    }

    #[test]
    fn distance_tracks_travel_time_at_cruise_speed() {
        let mut p = GeneratorProfile::default();
        p.distance_speed_kmh = 90.0;
        let set = generate_tours(&p, 20, 5).unwrap();
        for tour in &set.tours {
            for trip in &tour.trips {
                let expected = trip.travel_time_min * 1.5;
                assert!((trip.distance_km - expected).abs() < 0.002);
            }
        }
    }
}
