//! One simulated day, beginning to end.
//!
//! Run with `cargo run --example simulate_day`. Generates a morning-heavy
//! population, admits the tours starting in a 05:00 + 9 h window, and runs
//! it with an operator pool sized at 30% of the fleet against the
//! one-driver-per-truck baseline. Prints the KPI report and an hourly view
//! of the operator queue building up and draining.

use teleop_sim::engine::{run_simulation, RestPolicy};
use teleop_sim::error::Result;
use teleop_sim::kpi::compute_kpis;
use teleop_sim::tours::{filter_window, generate_tours, GeneratorProfile};

fn main() -> Result<()> {
    let start_min = 5.0 * 60.0;
    let shift_hours = 9.0;
    let population = generate_tours(&GeneratorProfile::default(), 600, 42)?;
    let admitted = filter_window(&population, start_min, shift_hours)?;
    let k = admitted.len();
    let n_to = (0.3 * k as f64).ceil() as usize;
    println!("{k} of {} tours start inside the window; pool of {n_to} operators", population.len());

    let rest = RestPolicy::default();
    let trace = run_simulation(&admitted, n_to, 3.0, &rest, start_min, shift_hours, 1)?;
    // the baseline has one dedicated driver per truck: full pool, no
    // takeover handshake, no remote-workstation rest breaks
    let baseline = run_simulation(&admitted, k, 0.0, &RestPolicy::disabled(), start_min, shift_hours, 1)?;
    let kpis = compute_kpis(&trace, &baseline)?;

    println!("\naverage wait per vehicle:    {:>8.2} min", kpis.avg_wait_per_vehicle);
    println!("average wait per queue stint:{:>8.2} min over {} stints", kpis.avg_wait_per_queue_entry, kpis.queue_entry_count);
    println!("longest wait:                {:>8.2} min", kpis.max_wait);
    println!("vehicle utilization (mean):  {:>8.3}", kpis.mean_vehicle_utilization);
    println!("operator utilization (mean): {:>8.3}", kpis.mean_teleoperator_utilization);
    println!("makespan:                    {:>8.1} min (baseline {:.1})", kpis.completion_makespan, kpis.baseline_completion_makespan);
    println!("delay:                       {:>8.3}", kpis.delay);
    println!("completed tours:             {:>8.1}%", kpis.tour_completion_rate * 100.0);
    println!("completed distance:          {:>8.1}%", kpis.distance_completion_rate * 100.0);

    // snapshots are sampled every simulated minute; print every 60th to
    // watch the morning peak pile up and drain after it
    println!("\n  time  queue  busy operators");
    for s in trace.snapshots.iter().step_by(60) {
        let clock = format!("{:02}:{:02}", (s.time_min / 60.0) as usize % 24, (s.time_min % 60.0) as usize);
        println!("{clock:>6} {:>6} {:>5}  {}", s.queue_len, s.to_busy, "#".repeat(s.queue_len / 4));
    }
    Ok(())
}
