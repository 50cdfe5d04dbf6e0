//! Build a synthetic tour population and look at its shape.
//!
//! Run with `cargo run --example generate_tours`. Writes the population as
//! CSV next to your temp directory and prints the statistics worth checking
//! before using a population in a study: trip count and duration means, and
//! the departure histogram.

use teleop_sim::error::Result;
use teleop_sim::tours::{generate_tours, write_tours, GeneratorProfile, TourFormat};

fn main() -> Result<()> {
    let profile = GeneratorProfile::default();
    let set = generate_tours(&profile, 2000, 42)?;

    println!("{} tours, provenance `{}`", set.len(), set.provenance);
    println!("mean trips per tour:  {:.3} (target {})", set.mean_trips_per_tour(), profile.mean_trips_per_tour);
    println!("mean tour duration:   {:.2} h", set.mean_duration_hours());

    // departures by hour; the default profile concentrates them in the
    // early morning like a freight depot
    let mut per_hour = [0usize; 24];
    for tour in &set.tours {
        per_hour[(tour.start_min / 60.0) as usize % 24] += 1;
    }
    println!("\ndepartures by hour:");
    for (hour, n) in per_hour.iter().enumerate() {
        println!("{hour:>4}:00 {:<50} {n}", "#".repeat((n / 12).min(50)));
    }

    // a population with slower trucks covers less distance per trip
    let slow = GeneratorProfile {
        distance_speed_kmh: 40.0,
        ..GeneratorProfile::default()
    };
    let slow_set = generate_tours(&slow, 2000, 42)?;
    let km = |s: &teleop_sim::TourSet| {
        s.tours
            .iter()
            .flat_map(|t| &t.trips)
            .map(|t| t.distance_km)
            .sum::<f64>()
            / s.len() as f64
    };
    println!("\nmean km per tour at 60 km/h: {:.1}", km(&set));
    println!("mean km per tour at 40 km/h: {:.1}", km(&slow_set));

    let out = std::env::temp_dir().join("teleop_sim_tours.csv");
    write_tours(&set, &out, TourFormat::Csv)?;
    println!("\nwrote {}", out.display());
    Ok(())
}
