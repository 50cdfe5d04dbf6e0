//! How operator rest rules change the picture.
//!
//! Run with `cargo run --example rest_policies`. Operators driving from a
//! remote workstation still accumulate driving time against the 4.5 h cap.
//! The monolithic policy takes the full 45 min rest once the cap is hit; the
//! split policy spreads it as 10 min micro-breaks after trips, settling any
//! remainder at the cap. This example runs the same congested day under no
//! rest, monolithic rest and split rest, and compares the fallout.

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
    let n_to = (0.4 * k as f64).ceil() as usize;

    let baseline = run_simulation(&admitted, k, 0.0, &RestPolicy::disabled(), start_min, shift_hours, 1)?;

    println!("{k} vehicles, {n_to} operators, takeover 3 min\n");
    println!(
        "{:<12} {:>12} {:>10} {:>10} {:>12} {:>10}",
        "rest policy", "makespan_min", "delay", "wt_k_min", "util_to", "rest_min"
    );
    for (name, rest) in [
        ("disabled", RestPolicy::disabled()),
        ("monolithic", RestPolicy::monolithic()),
        ("split", RestPolicy::split()),
    ] {
        let trace = run_simulation(&admitted, n_to, 3.0, &rest, start_min, shift_hours, 1)?;
        let kpis = compute_kpis(&trace, &baseline)?;
        let rest_min = trace
            .service_intervals
            .iter()
            .filter(|iv| iv.kind.is_rest())
            .map(|iv| iv.end_min - iv.start_min)
            .sum::<f64>()
            .max(0.0);
        println!(
            "{name:<12} {:>12.1} {:>10.3} {:>10.2} {:>12.3} {:>10.0}",
            kpis.completion_makespan,
            kpis.delay,
            kpis.avg_wait_per_vehicle,
            kpis.mean_teleoperator_utilization,
            rest_min,
        );
    }
    println!("\nrest time counts as operator busy time, so utilization rises with");
    println!("the stricter policies while throughput drops.");
    Ok(())
}
