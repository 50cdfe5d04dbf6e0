//! Size the operator pool against a service level.
//!
//! Run with `cargo run --example service_level`. The sizing question is:
//! what is the smallest operator-to-vehicle ratio that still meets a target,
//! and how much headcount does it save over one driver per truck? This
//! example sweeps the ratio axis for one morning shift, then queries the
//! sweep for two targets: no delay at all, and an average queue wait below
//! 20 minutes.

use teleop_sim::error::Result;
use teleop_sim::kpi::{gain_simple, gain_weighted, GainInputs, Statistic};
use teleop_sim::scenario::{
    min_ratio_for_target, run_sweep, Comparator, ServiceLevelTarget, SweepConfig, TourSource,
};

fn main() -> Result<()> {
    let config = SweepConfig {
        start_times: vec!["05:00".into()],
        shift_hours: vec![9.0],
        ratios: (30..=100).step_by(5).map(|p| p as f64 / 100.0).collect(),
        takeover_minutes: vec![3.0],
        penetration: 1.0,
        replications: 2,
        rest_policy: Default::default(),
        master_seed: 7,
        tours: TourSource::generated(1000),
    };
    let sweep = run_sweep(&config)?;

    println!("{:>6} {:>12} {:>14}", "ratio", "mean delay", "mean wt_Q min");
    for cell in &sweep.cells {
        let summary = &cell.result.as_ref().expect("cell ran").summary;
        println!(
            "{:>6.2} {:>12.4} {:>14.2}",
            cell.key.ratio,
            summary.statistic("delay", Statistic::Mean)?,
            summary.statistic("avg_wait_per_queue_entry", Statistic::Mean)?,
        );
    }

    // the delay floor at ratio 1.0 is what the takeover handshake and rest
    // breaks cost even without any queueing; "no delay" means not a second
    // worse than that
    let full_pool = sweep
        .cells
        .iter()
        .find(|c| c.key.ratio == 1.0)
        .expect("ratio 1.0 swept");
    let floor = full_pool
        .result
        .as_ref()
        .expect("cell ran")
        .summary
        .statistic("delay", Statistic::Mean)?;

    for (label, target) in [
        (
            "delay at the full-pool floor",
            ServiceLevelTarget {
                kpi: "delay".into(),
                comparator: Comparator::Le,
                threshold: floor + 1e-9,
                statistic: Statistic::Mean,
            },
        ),
        (
            "avg queue wait <= 20 min",
            ServiceLevelTarget {
                kpi: "avg_wait_per_queue_entry".into(),
                comparator: Comparator::Le,
                threshold: 20.0,
                statistic: Statistic::Mean,
            },
        ),
    ] {
        for entry in min_ratio_for_target(&sweep, &target)? {
            match entry.min_ratio {
                Some(ratio) => println!(
                    "\nsmallest ratio with {label}: {ratio:.2} \
                     (headcount gain {:.0}%)",
                    gain_simple(1.0, ratio)? * 100.0
                ),
                None => println!("\nno swept ratio achieves {label}"),
            }
        }
    }

    // the wage-bill comparison also weighs the longer day the smaller pool
    // produces; here with equal wages and a 0.5 pool
    let half_pool = sweep
        .cells
        .iter()
        .find(|c| c.key.ratio == 0.5)
        .expect("ratio 0.5 swept");
    let result = half_pool.result.as_ref().expect("cell ran");
    let run = &result.runs[0];
    let report = &result.reports[0];
    let gain = gain_weighted(&GainInputs {
        n_base: run.k_admitted as f64,
        n_to: run.n_teleoperators as f64,
        ms_base: report.baseline_completion_makespan,
        ms_to: report.completion_makespan,
        wage_base: 1.0,
        wage_to: 1.0,
    })?;
    println!(
        "\nwage-bill gain at ratio 0.5 (replication 0, equal wages): {:.1}%",
        gain * 100.0
    );
    Ok(())
}
