//! Key performance indicators.
//!
//! Every indicator is computed from a pair of traces: the scenario run and
//! its baseline. The baseline replays the identical tour set with one
//! dedicated in-vehicle driver per truck, zero takeover time and no rest
//! constraints; it is the yardstick for completion rates and delay.
//!
//! Notation used in the field docs: `K` is the number of vehicles, `N_Q` the
//! number of queue entries, `ST` the run's own completion makespan.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::engine::{ServiceKind, SimulationTrace};
use crate::error::{Result, SimError};

const EPS: f64 = 1e-9;

/// Indicators of one simulation run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KpiReport {
    /// Total queue waiting time divided by `K`, minutes.
    pub avg_wait_per_vehicle: f64,
    /// Total queue waiting time divided by `N_Q`, minutes; 0 when nothing
    /// ever queued.
    pub avg_wait_per_queue_entry: f64,
    /// `N_Q`: queue entries with strictly positive wait.
    pub queue_entry_count: usize,
    /// Per-vehicle driving time over `ST`.
    pub vehicle_utilization: Vec<f64>,
    pub mean_vehicle_utilization: f64,
    /// Per-operator (takeover + driving + rest) time over `ST`, intervals
    /// clipped at the completion instant.
    pub teleoperator_utilization: Vec<f64>,
    pub mean_teleoperator_utilization: f64,
    /// Sum over trips of travel + takeover + wait, minutes. A volume-of-work
    /// reading of makespan, distinct from the completion makespan.
    pub makespan_sum: f64,
    /// Time from shift start to the last sign-off, minutes.
    pub completion_makespan: f64,
    /// Same for the baseline run, kept as the reference marker.
    pub baseline_completion_makespan: f64,
    /// Share of tours signed off by the baseline completion instant.
    pub tour_completion_rate: f64,
    /// Share of planned distance driven by the baseline completion instant.
    pub distance_completion_rate: f64,
    /// Relative makespan stretch against the baseline.
    pub delay: f64,
    /// Time-average queue length over the run.
    pub avg_queue_length: f64,
    pub max_queue_length: usize,
    pub max_wait: f64,
}

/// KPI computation switches.
#[derive(Debug, Clone, Copy, Default)]
pub struct KpiOptions {
    /// Credit trips still driving at the baseline completion instant with
    /// their elapsed fraction of distance. Off by default: only fully
    /// completed trips count.
    pub prorate_distance: bool,
}

/// Reads one scalar KPI out of a report.
pub type KpiAccessor = fn(&KpiReport) -> f64;

/// Scalar KPI accessors, in canonical output order. The names are the
/// vocabulary for summary files and service-level targets.
pub const KPI_FIELDS: &[(&str, KpiAccessor)] = &[
    ("avg_wait_per_vehicle", |r| r.avg_wait_per_vehicle),
    ("avg_wait_per_queue_entry", |r| r.avg_wait_per_queue_entry),
    ("queue_entry_count", |r| r.queue_entry_count as f64),
    ("mean_vehicle_utilization", |r| r.mean_vehicle_utilization),
    ("mean_teleoperator_utilization", |r| r.mean_teleoperator_utilization),
    ("makespan_sum", |r| r.makespan_sum),
    ("completion_makespan", |r| r.completion_makespan),
    ("tour_completion_rate", |r| r.tour_completion_rate),
    ("distance_completion_rate", |r| r.distance_completion_rate),
    ("delay", |r| r.delay),
    ("avg_queue_length", |r| r.avg_queue_length),
    ("max_queue_length", |r| r.max_queue_length as f64),
    ("max_wait", |r| r.max_wait),
];

/// Look up a KPI accessor by name.
pub fn kpi_field(name: &str) -> Result<fn(&KpiReport) -> f64> {
    KPI_FIELDS
        .iter()
        .find(|(n, _)| *n == name)
        .map(|(_, f)| *f)
        .ok_or_else(|| SimError::UnknownKpi {
            name: name.to_string(),
            valid: KPI_FIELDS
                .iter()
                .map(|(n, _)| *n)
                .collect::<Vec<_>>()
                .join(", "),
        })
}

/// Compute the indicators for a scenario run against its baseline,
/// with default options.
pub fn compute_kpis(trace: &SimulationTrace, baseline: &SimulationTrace) -> Result<KpiReport> {
    compute_kpis_with(trace, baseline, &KpiOptions::default())
}

/// Compute the indicators with explicit options.
pub fn compute_kpis_with(
    trace: &SimulationTrace,
    baseline: &SimulationTrace,
    options: &KpiOptions,
) -> Result<KpiReport> {
    check_same_tours(trace, baseline)?;

    let k = trace.n_vehicles as f64;
    let st = trace.completion_makespan;
    if !(st > 0.0 && st.is_finite()) {
        return Err(SimError::Validation(format!(
            "trace has non-positive completion makespan {st}"
        )));
    }

    let total_wait = trace.total_wait_min();
    let queue_entry_count = trace
        .waits
        .iter()
        .filter(|w| w.wait_min() > 0.0)
        .count();
    let avg_wait_per_queue_entry = if queue_entry_count == 0 {
        0.0
    } else {
        total_wait / queue_entry_count as f64
    };

    let vehicle_utilization: Vec<f64> = trace
        .vehicles
        .iter()
        .map(|v| v.total_travel_min / st)
        .collect();
    let mean_vehicle_utilization =
        vehicle_utilization.iter().sum::<f64>() / vehicle_utilization.len() as f64;

    // operator time on duty: takeover + driving + rest, clipped at the
    // completion instant so a rest outlasting the last tour does not push
    // utilization past 1
    let mut on_duty = vec![0.0f64; trace.n_teleoperators];
    let mut total_takeover = 0.0;
    for interval in &trace.service_intervals {
        if interval.kind == ServiceKind::Takeover {
            total_takeover += interval.end_min - interval.start_min;
        }
        let end = interval.end_min.min(trace.completion_min);
        let span = (end - interval.start_min).max(0.0);
        on_duty[interval.teleoperator_id] += span;
    }
    let teleoperator_utilization: Vec<f64> = on_duty.iter().map(|t| t / st).collect();
    let mean_teleoperator_utilization =
        teleoperator_utilization.iter().sum::<f64>() / teleoperator_utilization.len() as f64;

    let total_travel: f64 = trace.vehicles.iter().map(|v| v.total_travel_min).sum();
    let makespan_sum = total_travel + total_takeover + total_wait;

    // completion rates are evaluated at the instant the baseline finished
    let reference = baseline.completion_min;
    let completed_tours = trace
        .vehicles
        .iter()
        .filter(|v| v.signoff_min <= reference + EPS)
        .count();
    let tour_completion_rate = completed_tours as f64 / k;

    let total_distance: f64 = trace.vehicles.iter().map(|v| v.total_distance_km).sum();
    let mut done_distance = 0.0;
    for trip in &trace.trip_completions {
        if trip.completion_min <= reference + EPS {
            done_distance += trip.distance_km;
        } else if options.prorate_distance {
            let drive_start = trip.completion_min - trip.travel_time_min;
            if drive_start < reference {
                let fraction = (reference - drive_start) / trip.travel_time_min;
                done_distance += trip.distance_km * fraction.clamp(0.0, 1.0);
            }
        }
    }
    let distance_completion_rate = done_distance / total_distance;

    let delay =
        (trace.completion_makespan - baseline.completion_makespan)
            / baseline.completion_makespan;

    let max_wait = trace
        .waits
        .iter()
        .map(|w| w.wait_min())
        .fold(0.0, f64::max);

    Ok(KpiReport {
        avg_wait_per_vehicle: total_wait / k,
        avg_wait_per_queue_entry,
        queue_entry_count,
        mean_vehicle_utilization,
        vehicle_utilization,
        mean_teleoperator_utilization,
        teleoperator_utilization,
        makespan_sum,
        completion_makespan: trace.completion_makespan,
        baseline_completion_makespan: baseline.completion_makespan,
        tour_completion_rate,
        distance_completion_rate,
        delay,
        avg_queue_length: trace.queue_integral_veh_min / st,
        max_queue_length: trace.max_queue_length,
        max_wait,
    })
}

fn check_same_tours(trace: &SimulationTrace, baseline: &SimulationTrace) -> Result<()> {
    if trace.shift_start_min != baseline.shift_start_min {
        return Err(SimError::Validation(format!(
            "trace and baseline have different shift starts ({} vs {})",
            trace.shift_start_min, baseline.shift_start_min
        )));
    }
    fn key(t: &SimulationTrace) -> Vec<(&str, &str, usize)> {
        let mut v: Vec<(&str, &str, usize)> = t
            .vehicles
            .iter()
            .map(|r| (r.tour_id.as_str(), r.vehicle_id.as_str(), r.n_trips))
            .collect();
        v.sort_unstable();
        v
    }
    if key(trace) != key(baseline) {
        return Err(SimError::Validation(
            "trace and baseline were produced from different tour sets".to_string(),
        ));
    }
    Ok(())
}

/// Share of tours signed off at instant `t` (absolute minutes).
#[must_use]
pub fn tour_completion_at(trace: &SimulationTrace, t: f64) -> f64 {
    let done = trace
        .vehicles
        .iter()
        .filter(|v| v.signoff_min <= t + EPS)
        .count();
    done as f64 / trace.n_vehicles as f64
}

/// Share of planned distance completed at instant `t` (absolute minutes).
#[must_use]
pub fn distance_completion_at(trace: &SimulationTrace, t: f64, prorate: bool) -> f64 {
    let total: f64 = trace.vehicles.iter().map(|v| v.total_distance_km).sum();
    let mut done = 0.0;
    for trip in &trace.trip_completions {
        if trip.completion_min <= t + EPS {
            done += trip.distance_km;
        } else if prorate {
            let drive_start = trip.completion_min - trip.travel_time_min;
            if drive_start < t {
                done += trip.distance_km
                    * ((t - drive_start) / trip.travel_time_min).clamp(0.0, 1.0);
            }
        }
    }
    done / total
}

/// Inputs of the personnel cost comparison.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GainInputs {
    /// Drivers employed in the baseline.
    pub n_base: f64,
    /// Teleoperators employed in the scenario.
    pub n_to: f64,
    /// Baseline completion makespan.
    pub ms_base: f64,
    /// Scenario completion makespan.
    pub ms_to: f64,
    pub wage_base: f64,
    pub wage_to: f64,
}

/// Headcount gain `(n_base - n_to) / n_base`, as a fraction.
pub fn gain_simple(n_base: f64, n_to: f64) -> Result<f64> {
    if !(n_base > 0.0 && n_base.is_finite()) || !(n_to > 0.0 && n_to.is_finite()) {
        return Err(SimError::Validation(format!(
            "headcounts must be positive, got n_base={n_base}, n_to={n_to}"
        )));
    }
    if n_to > n_base {
        return Err(SimError::Validation(format!(
            "teleoperator count {n_to} exceeds baseline driver count {n_base}"
        )));
    }
    Ok((n_base - n_to) / n_base)
}

/// Cost-weighted gain: reduction of the wage bill
/// `(n_base ms_base w_base - n_to ms_to w_to) / (n_base ms_base w_base)`.
///
/// With equal wages this reduces to `1 - (n_to ms_to) / (n_base ms_base)`.
/// The result can be negative when the scenario costs more.
pub fn gain_weighted(inputs: &GainInputs) -> Result<f64> {
    let fields = [
        ("n_base", inputs.n_base),
        ("n_to", inputs.n_to),
        ("ms_base", inputs.ms_base),
        ("ms_to", inputs.ms_to),
        ("wage_base", inputs.wage_base),
        ("wage_to", inputs.wage_to),
    ];
    for (name, value) in fields {
        if !(value > 0.0 && value.is_finite()) {
            return Err(SimError::Validation(format!(
                "{name} must be positive, got {value}"
            )));
        }
    }
    let base_cost = inputs.n_base * inputs.ms_base * inputs.wage_base;
    let to_cost = inputs.n_to * inputs.ms_to * inputs.wage_to;
    Ok((base_cost - to_cost) / base_cost)
}

/// The seven statistics reported per KPI across replications.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SummaryStats {
    pub mean: f64,
    /// Sample standard deviation (n-1); 0 for a single replication.
    pub std: f64,
    pub min: f64,
    pub p25: f64,
    pub p50: f64,
    pub p75: f64,
    pub max: f64,
}

impl SummaryStats {
    /// Pick one statistic by selector.
    #[must_use]
    pub fn get(&self, statistic: Statistic) -> f64 {
        match statistic {
            Statistic::Mean => self.mean,
            Statistic::Std => self.std,
            Statistic::Min => self.min,
            Statistic::P25 => self.p25,
            Statistic::P50 => self.p50,
            Statistic::P75 => self.p75,
            Statistic::Max => self.max,
        }
    }

    fn from_values(values: &[f64]) -> Self {
        let n = values.len();
        let mut sorted = values.to_vec();
        sorted.sort_by(f64::total_cmp);
        let mean = sorted.iter().sum::<f64>() / n as f64;
        let std = if n < 2 {
            0.0
        } else {
            let ss: f64 = sorted.iter().map(|v| (v - mean) * (v - mean)).sum();
            (ss / (n - 1) as f64).sqrt()
        };
        Self {
            mean,
            std,
            min: sorted[0],
            p25: percentile(&sorted, 0.25),
            p50: percentile(&sorted, 0.50),
            p75: percentile(&sorted, 0.75),
            max: sorted[n - 1],
        }
    }
}

/// Linear-interpolation percentile on a sorted slice, `q` in [0, 1].
fn percentile(sorted: &[f64], q: f64) -> f64 {
    let n = sorted.len();
    if n == 1 {
        return sorted[0];
    }
    let pos = q * (n - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    let frac = pos - lo as f64;
    sorted[lo] + (sorted[hi] - sorted[lo]) * frac
}

/// Statistic selector for service-level targets and reporting.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Statistic {
    #[default]
    Mean,
    Std,
    Min,
    P25,
    P50,
    P75,
    Max,
}

impl Statistic {
    #[must_use]
    pub fn name(self) -> &'static str {
        match self {
            Self::Mean => "mean",
            Self::Std => "std",
            Self::Min => "min",
            Self::P25 => "p25",
            Self::P50 => "p50",
            Self::P75 => "p75",
            Self::Max => "max",
        }
    }

    pub const ALL: [Statistic; 7] = [
        Self::Mean,
        Self::Std,
        Self::Min,
        Self::P25,
        Self::P50,
        Self::P75,
        Self::Max,
    ];
}

impl std::str::FromStr for Statistic {
    type Err = SimError;

    fn from_str(s: &str) -> Result<Self> {
        Statistic::ALL
            .into_iter()
            .find(|st| st.name() == s)
            .ok_or_else(|| {
                SimError::Config(format!(
                    "unknown statistic `{s}`; valid: mean, std, min, p25, p50, p75, max"
                ))
            })
    }
}

/// Per-KPI statistics over a set of replications.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReplicationSummary {
    pub n_replications: usize,
    /// Keyed by KPI name; see [`KPI_FIELDS`] for the canonical order.
    pub stats: BTreeMap<String, SummaryStats>,
}

impl ReplicationSummary {
    /// Look up one statistic of one KPI.
    pub fn statistic(&self, kpi: &str, statistic: Statistic) -> Result<f64> {
        kpi_field(kpi)?;
        Ok(self
            .stats
            .get(kpi)
            .map(|s| s.get(statistic))
            .expect("all KPI fields are aggregated"))
    }

    /// Write as CSV, one row per KPI with the seven statistic columns.
    pub fn write_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        let mut out = std::io::BufWriter::new(std::fs::File::create(path)?);
        writeln!(out, "kpi,mean,std,min,p25,p50,p75,max")?;
        for (name, _) in KPI_FIELDS {
            let s = &self.stats[*name];
            writeln!(
                out,
                "{},{:.6},{:.6},{:.6},{:.6},{:.6},{:.6},{:.6}",
                name, s.mean, s.std, s.min, s.p25, s.p50, s.p75, s.max
            )?;
        }
        out.flush()?;
        Ok(())
    }
}

/// Aggregate replication reports into per-KPI statistics.
pub fn aggregate(reports: &[KpiReport]) -> Result<ReplicationSummary> {
    if reports.is_empty() {
        return Err(SimError::Validation(
            "cannot aggregate zero replications".to_string(),
        ));
    }
    let mut stats = BTreeMap::new();
    for (name, accessor) in KPI_FIELDS {
        let values: Vec<f64> = reports.iter().map(*accessor).collect();
        stats.insert((*name).to_string(), SummaryStats::from_values(&values));
    }
    Ok(ReplicationSummary {
        n_replications: reports.len(),
        stats,
    })
}
