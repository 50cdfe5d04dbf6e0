//! Scenario runs, parameter sweeps and ratio search.
//!
//! A scenario fixes one parameter point: shift window, operator-to-vehicle
//! ratio, takeover time, rest policy, penetration. Each replication samples
//! its own teleoperated subset of the tour population, filters it to the
//! shift window, runs the simulation and its baseline, and computes KPIs.
//! A sweep runs the Cartesian grid of scenario cells; all randomness flows
//! from one master seed so any cell can be reproduced in isolation.
//!
//! Replication `i` of every cell uses the same derived seed stream, which
//! gives common random numbers across cells: ratio comparisons see the same
//! sampled tours, making small differences between neighbouring cells
//! meaningful.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::clock::{format_clock, parse_clock};
use crate::engine::{run_simulation_with, RestPolicy, SimOptions};
use crate::error::{Result, SimError};
use crate::kpi::{
    aggregate, compute_kpis, kpi_field, KpiReport, ReplicationSummary, Statistic, KPI_FIELDS,
};
use crate::seed::derive_seed;
use crate::tours::{
    filter_window, generate_tours, load_tours, sample_penetration, GeneratorProfile, TourFormat,
    TourSet,
};

/// Environment variable capping sweep worker threads; unset or `0` lets the
/// runtime decide.
pub const THREADS_ENV: &str = "TELEOP_SIM_THREADS";

/// Where a scenario gets its tour population from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TourSource {
    /// Tour file, CSV or JSON by extension.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub path: Option<PathBuf>,
    /// Synthetic population, generated from the master seed.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub generator: Option<GeneratorSpec>,
}

/// Synthetic population request.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeneratorSpec {
    pub count: usize,
    #[serde(default)]
    pub profile: GeneratorProfile,
}

impl TourSource {
    /// A file-backed source.
    #[must_use]
    pub fn from_path(path: impl Into<PathBuf>) -> Self {
        Self {
            path: Some(path.into()),
            generator: None,
        }
    }

    /// A generated population with the default profile.
    #[must_use]
    pub fn generated(count: usize) -> Self {
        Self {
            path: None,
            generator: Some(GeneratorSpec {
                count,
                profile: GeneratorProfile::default(),
            }),
        }
    }

    fn validate(&self) -> Result<()> {
        match (&self.path, &self.generator) {
            (Some(_), None) | (None, Some(_)) => Ok(()),
            _ => Err(SimError::Config(
                "tours: give exactly one of `path` or `generator`".to_string(),
            )),
        }
    }

    /// Resolve the tour population. Generation is seeded from stream 0 of
    /// the master seed, so every cell of a sweep shares the population.
    pub fn resolve(&self, master_seed: u64) -> Result<TourSet> {
        self.validate()?;
        if let Some(path) = &self.path {
            load_tours(path, TourFormat::from_path(path))
        } else {
            let spec = self.generator.as_ref().expect("validated");
            generate_tours(&spec.profile, spec.count, derive_seed(master_seed, 0))
        }
    }
}

/// One parameter point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioConfig {
    /// Shift start, minutes since midnight.
    pub start_min: f64,
    pub shift_hours: f64,
    /// Teleoperator pool size as a fraction of admitted vehicles.
    pub ratio: f64,
    pub takeover_min: f64,
    /// Share of the tour population that is teleoperated.
    pub penetration: f64,
    pub replications: usize,
    pub rest: RestPolicy,
    pub master_seed: u64,
    pub tours: TourSource,
}

impl ScenarioConfig {
    fn validate(&self) -> Result<()> {
        if !(self.start_min >= 0.0 && self.start_min.is_finite()) {
            return Err(SimError::Config(format!(
                "shift start must be non-negative, got {}",
                self.start_min
            )));
        }
        if !(self.shift_hours > 0.0 && self.shift_hours.is_finite()) {
            return Err(SimError::Config(format!(
                "shift length must be positive, got {} h",
                self.shift_hours
            )));
        }
        if !(self.ratio > 0.0 && self.ratio.is_finite()) {
            return Err(SimError::Config(format!(
                "ratio must be positive, got {}",
                self.ratio
            )));
        }
        if !(self.takeover_min >= 0.0 && self.takeover_min.is_finite()) {
            return Err(SimError::Config(format!(
                "takeover time must be non-negative, got {}",
                self.takeover_min
            )));
        }
        if !(self.penetration > 0.0 && self.penetration <= 1.0) {
            return Err(SimError::Config(format!(
                "penetration must be in (0, 1], got {}",
                self.penetration
            )));
        }
        if self.replications == 0 {
            return Err(SimError::Config(
                "at least one replication is required".to_string(),
            ));
        }
        self.tours.validate()
    }
}

/// Per-replication bookkeeping.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub replication: usize,
    pub seed: u64,
    /// Vehicles admitted after penetration sampling and window filtering.
    pub k_admitted: usize,
    /// `ceil(ratio * k_admitted)`.
    pub n_teleoperators: usize,
}

/// Outcome of one scenario: replication KPIs and their statistics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioResult {
    pub summary: ReplicationSummary,
    pub reports: Vec<KpiReport>,
    pub runs: Vec<RunRecord>,
}

/// Ceiling that forgives float noise just below an integer.
fn ceil_count(x: f64) -> usize {
    (x - 1e-9).ceil().max(1.0) as usize
}

/// Run all replications of one scenario.
pub fn run_scenario(cfg: &ScenarioConfig) -> Result<ScenarioResult> {
    cfg.validate()?;
    let base = cfg.tours.resolve(cfg.master_seed)?;
    run_scenario_with_base(cfg, &base)
}

/// Run a scenario against an already resolved tour population. Sweeps use
/// this to share one population across cells.
pub fn run_scenario_with_base(cfg: &ScenarioConfig, base: &TourSet) -> Result<ScenarioResult> {
    cfg.validate()?;
    // events are not needed for KPIs; keep sweep memory flat
    let options = SimOptions {
        record_events: false,
        ..SimOptions::default()
    };

    let mut reports = Vec::with_capacity(cfg.replications);
    let mut runs = Vec::with_capacity(cfg.replications);
    for i in 0..cfg.replications {
        let seed = derive_seed(cfg.master_seed, 1 + i as u64);
        let sampled = sample_penetration(base, cfg.penetration, seed)?;
        let admitted = filter_window(&sampled, cfg.start_min, cfg.shift_hours)?;
        if admitted.is_empty() {
            return Err(SimError::EmptyWindow {
                start: format_clock(cfg.start_min),
                hours: cfg.shift_hours,
            });
        }
        let k = admitted.len();
        let n_to = ceil_count(cfg.ratio * k as f64);

        let trace = run_simulation_with(
            &admitted,
            n_to,
            cfg.takeover_min,
            &cfg.rest,
            cfg.start_min,
            cfg.shift_hours,
            seed,
            &options,
        )?;
        let baseline = run_simulation_with(
            &admitted,
            k,
            0.0,
            &RestPolicy::disabled(),
            cfg.start_min,
            cfg.shift_hours,
            seed,
            &options,
        )?;
        reports.push(compute_kpis(&trace, &baseline)?);
        runs.push(RunRecord {
            replication: i,
            seed,
            k_admitted: k,
            n_teleoperators: n_to,
        });
    }

    Ok(ScenarioResult {
        summary: aggregate(&reports)?,
        reports,
        runs,
    })
}

/// Sweep definition: the parameter grid plus everything shared by its cells.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    /// Shift starts as `HH:MM` strings.
    pub start_times: Vec<String>,
    pub shift_hours: Vec<f64>,
    pub ratios: Vec<f64>,
    pub takeover_minutes: Vec<f64>,
    #[serde(default = "default_penetration")]
    pub penetration: f64,
    #[serde(default = "default_replications")]
    pub replications: usize,
    #[serde(default)]
    pub rest_policy: RestPolicy,
    #[serde(default = "default_master_seed")]
    pub master_seed: u64,
    pub tours: TourSource,
}

fn default_penetration() -> f64 {
    0.01
}

fn default_replications() -> usize {
    5
}

fn default_master_seed() -> u64 {
    1
}

impl SweepConfig {
    /// The reference grid: three shift starts, two shift lengths, ratios
    /// 0.30 to 1.00 in steps of 0.05, takeovers 0 to 3 minutes. 360 cells.
    #[must_use]
    pub fn reference_grid(tours: TourSource) -> Self {
        Self {
            start_times: vec!["00:00".into(), "05:00".into(), "08:00".into()],
            shift_hours: vec![9.0, 24.0],
            ratios: (30..=100).step_by(5).map(|p| p as f64 / 100.0).collect(),
            takeover_minutes: vec![0.0, 1.0, 2.0, 3.0],
            penetration: default_penetration(),
            replications: default_replications(),
            rest_policy: RestPolicy::default(),
            master_seed: default_master_seed(),
            tours,
        }
    }

    /// Load from JSON, rejecting unknown keys.
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let text = std::fs::read_to_string(path.as_ref())?;
        let cfg: Self = serde_json::from_str(&text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let text = serde_json::to_string_pretty(self)?;
        std::fs::write(path.as_ref(), text + "\n")?;
        Ok(())
    }

    fn validate(&self) -> Result<()> {
        for (name, list) in [
            ("start_times", self.start_times.len()),
            ("shift_hours", self.shift_hours.len()),
            ("ratios", self.ratios.len()),
            ("takeover_minutes", self.takeover_minutes.len()),
        ] {
            if list == 0 {
                return Err(SimError::Config(format!("{name} must not be empty")));
            }
        }
        for s in &self.start_times {
            parse_clock(s)?;
        }
        // cell expansion validates the numeric ranges
        for cell in self.cells()? {
            cell.validate()?;
        }
        Ok(())
    }

    /// Expand the grid into scenario cells, in deterministic product order:
    /// start time, then shift length, then ratio, then takeover.
    pub fn cells(&self) -> Result<Vec<ScenarioConfig>> {
        let mut cells = Vec::new();
        for start in &self.start_times {
            let start_min = parse_clock(start)?;
            for &shift in &self.shift_hours {
                for &ratio in &self.ratios {
                    for &takeover in &self.takeover_minutes {
                        cells.push(ScenarioConfig {
                            start_min,
                            shift_hours: shift,
                            ratio,
                            takeover_min: takeover,
                            penetration: self.penetration,
                            replications: self.replications,
                            rest: self.rest_policy,
                            master_seed: self.master_seed,
                            tours: self.tours.clone(),
                        });
                    }
                }
            }
        }
        Ok(cells)
    }
}

/// Grid coordinates of one cell.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CellKey {
    pub start_min: f64,
    pub shift_hours: f64,
    pub ratio: f64,
    pub takeover_min: f64,
}

/// One evaluated cell. Failures are recorded, not fatal: a bad cell must not
/// sink the other 359.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepCell {
    pub key: CellKey,
    pub result: std::result::Result<ScenarioResult, String>,
}

/// A finished sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub config: SweepConfig,
    pub cells: Vec<SweepCell>,
    pub tool_version: String,
    /// Seed stream used by replication `i` in every cell.
    pub replication_seeds: Vec<u64>,
}

/// Run the full grid. Cells run in parallel; `TELEOP_SIM_THREADS` caps the
/// worker count (0 or unset: automatic). Cell order in the result follows
/// the grid product order regardless of scheduling.
pub fn run_sweep(cfg: &SweepConfig) -> Result<SweepResult> {
    cfg.validate()?;
    let base = cfg.tours.resolve(cfg.master_seed)?;
    let cells_cfg = cfg.cells()?;

    let run_all = || -> Vec<SweepCell> {
        cells_cfg
            .par_iter()
            .map(|cell| SweepCell {
                key: CellKey {
                    start_min: cell.start_min,
                    shift_hours: cell.shift_hours,
                    ratio: cell.ratio,
                    takeover_min: cell.takeover_min,
                },
                result: run_scenario_with_base(cell, &base).map_err(|e| e.to_string()),
            })
            .collect()
    };

    let cells = match thread_cap()? {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| SimError::Config(format!("thread pool: {e}")))?
            .install(run_all),
        None => run_all(),
    };

    Ok(SweepResult {
        config: cfg.clone(),
        cells,
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
        replication_seeds: (0..cfg.replications)
            .map(|i| derive_seed(cfg.master_seed, 1 + i as u64))
            .collect(),
    })
}

fn thread_cap() -> Result<Option<usize>> {
    match std::env::var(THREADS_ENV) {
        Ok(raw) => {
            let n: usize = raw.trim().parse().map_err(|_| {
                SimError::Config(format!("{THREADS_ENV} must be a non-negative integer, got `{raw}`"))
            })?;
            Ok(if n == 0 { None } else { Some(n) })
        }
        Err(_) => Ok(None),
    }
}

impl SweepResult {
    /// Number of cells that failed.
    #[must_use]
    pub fn error_count(&self) -> usize {
        self.cells.iter().filter(|c| c.result.is_err()).count()
    }

    /// Write `results.csv`: one row per (cell, replication, KPI).
    pub fn write_results_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        let mut out = std::io::BufWriter::new(std::fs::File::create(path)?);
        writeln!(out, "start,shift_hours,ratio,takeover_min,replication,kpi,value")?;
        for cell in &self.cells {
            let Ok(result) = &cell.result else { continue };
            for (i, report) in result.reports.iter().enumerate() {
                for (name, accessor) in KPI_FIELDS {
                    writeln!(
                        out,
                        "{},{},{},{},{},{},{:.6}",
                        format_clock(cell.key.start_min),
                        cell.key.shift_hours,
                        cell.key.ratio,
                        cell.key.takeover_min,
                        i,
                        name,
                        accessor(report),
                    )?;
                }
            }
        }
        out.flush()?;
        Ok(())
    }

    /// Write `summary.csv`: one row per cell, with the seven statistics of
    /// every KPI as `<kpi>_<statistic>` columns.
    pub fn write_summary_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        let mut out = std::io::BufWriter::new(std::fs::File::create(path)?);
        let mut header = String::from("start,shift_hours,ratio,takeover_min,n_replications");
        for (name, _) in KPI_FIELDS {
            for stat in Statistic::ALL {
                header.push(',');
                header.push_str(name);
                header.push('_');
                header.push_str(stat.name());
            }
        }
        writeln!(out, "{header}")?;
        for cell in &self.cells {
            let Ok(result) = &cell.result else { continue };
            let mut row = format!(
                "{},{},{},{},{}",
                format_clock(cell.key.start_min),
                cell.key.shift_hours,
                cell.key.ratio,
                cell.key.takeover_min,
                result.summary.n_replications,
            );
            for (name, _) in KPI_FIELDS {
                let stats = &result.summary.stats[*name];
                for stat in Statistic::ALL {
                    row.push_str(&format!(",{:.6}", stats.get(stat)));
                }
            }
            writeln!(out, "{row}")?;
        }
        out.flush()?;
        Ok(())
    }
}

/// Comparator of a service-level target.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Comparator {
    /// KPI must be at most the threshold.
    Le,
    /// KPI must be at least the threshold.
    Ge,
}

impl Comparator {
    fn holds(self, value: f64, threshold: f64) -> bool {
        match self {
            Self::Le => value <= threshold,
            Self::Ge => value >= threshold,
        }
    }
}

/// A service level to reach: compare one statistic of one KPI against a
/// threshold.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ServiceLevelTarget {
    pub kpi: String,
    pub comparator: Comparator,
    pub threshold: f64,
    #[serde(default)]
    pub statistic: Statistic,
}

/// Result row of the minimal-ratio search: one per (start, shift, takeover)
/// group.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MinRatioEntry {
    pub start_min: f64,
    pub shift_hours: f64,
    pub takeover_min: f64,
    /// Smallest grid ratio meeting the target; `None` if no ratio does.
    pub min_ratio: Option<f64>,
    /// Headcount gain `1 - ratio` implied by that pool size, as a fraction.
    pub implied_gain: Option<f64>,
}

/// Find, per (start, shift, takeover) group, the smallest swept ratio whose
/// summary statistic meets the target. Errored cells never qualify.
pub fn min_ratio_for_target(
    sweep: &SweepResult,
    target: &ServiceLevelTarget,
) -> Result<Vec<MinRatioEntry>> {
    kpi_field(&target.kpi)?;
    if !target.threshold.is_finite() {
        return Err(SimError::Config(format!(
            "threshold must be finite, got {}",
            target.threshold
        )));
    }

    // group key ordered by (start, shift, takeover)
    let mut groups: BTreeMap<(u64, u64, u64), Vec<&SweepCell>> = BTreeMap::new();
    let order = |v: f64| v.to_bits(); // non-negative floats sort correctly by bits
    for cell in &sweep.cells {
        groups
            .entry((
                order(cell.key.start_min),
                order(cell.key.shift_hours),
                order(cell.key.takeover_min),
            ))
            .or_default()
            .push(cell);
    }

    let mut entries = Vec::with_capacity(groups.len());
    for cells in groups.into_values() {
        let mut sorted = cells;
        sorted.sort_by(|a, b| a.key.ratio.total_cmp(&b.key.ratio));
        let found = sorted.iter().find(|cell| {
            cell.result.as_ref().is_ok_and(|r| {
                let value = r
                    .summary
                    .statistic(&target.kpi, target.statistic)
                    .expect("kpi validated above");
                target.comparator.holds(value, target.threshold)
            })
        });
        let key = sorted[0].key;
        let min_ratio = found.map(|c| c.key.ratio);
        entries.push(MinRatioEntry {
            start_min: key.start_min,
            shift_hours: key.shift_hours,
            takeover_min: key.takeover_min,
            min_ratio,
            implied_gain: min_ratio.map(|r| 1.0 - r),
        });
    }
    Ok(entries)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tours::{Tour, Trip};

    fn quick_source() -> TourSource {
        // small generated population, penetration 1.0 keeps runs tiny
        TourSource::generated(60)
    }

    fn quick_config() -> ScenarioConfig {
        ScenarioConfig {
            start_min: 300.0,
            shift_hours: 9.0,
            ratio: 0.5,
            takeover_min: 1.0,
            penetration: 1.0,
            replications: 2,
            rest: RestPolicy::default(),
            master_seed: 42,
            tours: quick_source(),
        }
    }

    #[test]
    fn full_pool_without_takeover_matches_the_baseline() {
        let cfg = ScenarioConfig {
            ratio: 1.0,
            takeover_min: 0.0,
            rest: RestPolicy::disabled(),
            ..quick_config()
        };
        let result = run_scenario(&cfg).unwrap();
        assert_eq!(result.summary.statistic("delay", Statistic::Mean).unwrap(), 0.0);
        assert_eq!(
            result
                .summary
                .statistic("avg_wait_per_vehicle", Statistic::Mean)
                .unwrap(),
            0.0
        );
        assert_eq!(
            result
                .summary
                .statistic("tour_completion_rate", Statistic::Min)
                .unwrap(),
            1.0
        );
    }

    #[test]
    fn scenario_is_deterministic_per_master_seed() {
        let cfg = quick_config();
        let a = run_scenario(&cfg).unwrap();
        let b = run_scenario(&cfg).unwrap();
        assert_eq!(
            serde_json::to_string(&a).unwrap(),
            serde_json::to_string(&b).unwrap()
        );
        let c = run_scenario(&ScenarioConfig {
            master_seed: 43,
            ..cfg
        })
        .unwrap();
        assert_ne!(
            serde_json::to_string(&a).unwrap(),
            serde_json::to_string(&c).unwrap()
        );
    }

    #[test]
    fn operator_pool_is_the_ceiling_of_ratio_times_fleet() {
        // 250 identical in-window tours, ratio 0.5 -> 125 operators
        let tours: Vec<Tour> = (0..250)
            .map(|i| Tour {
                tour_id: format!("T{i:03}"),
                vehicle_id: format!("V{i:03}"),
                start_min: 300.0 + (i % 60) as f64,
                trips: vec![Trip {
                    index: 0,
                    dwell_before_min: 0.0,
                    travel_time_min: 30.0,
                    distance_km: 30.0,
                }],
            })
            .collect();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("tours.csv");
        let set = TourSet::new(tours, "test").unwrap();
        crate::tours::write_tours(&set, &path, TourFormat::Csv).unwrap();

        let cfg = ScenarioConfig {
            ratio: 0.5,
            penetration: 1.0,
            replications: 1,
            tours: TourSource::from_path(&path),
            ..quick_config()
        };
        let result = run_scenario(&cfg).unwrap();
        assert_eq!(result.runs[0].k_admitted, 250);
        assert_eq!(result.runs[0].n_teleoperators, 125);
    }

    #[test]
    fn ceil_count_resists_float_noise() {
        assert_eq!(ceil_count(0.3 * 1.0), 1);
        assert_eq!(ceil_count(0.5 * 250.0), 125);
        // 0.35 * 20 = 7.000000000000001 in floats; must stay 7
        assert_eq!(ceil_count(0.35 * 20.0), 7);
        assert_eq!(ceil_count(0.30 * 21.0), 7); // 6.3 -> 7
    }

    #[test]
    fn reference_grid_expands_to_360_cells() {
        let cfg = SweepConfig::reference_grid(quick_source());
        assert_eq!(cfg.cells().unwrap().len(), 360);
        assert_eq!(cfg.ratios.len(), 15);
        assert_eq!(cfg.ratios[0], 0.30);
        assert_eq!(*cfg.ratios.last().unwrap(), 1.00);
    }

    #[test]
    fn single_point_grid_expands_to_one_cell() {
        let cfg = SweepConfig {
            start_times: vec!["05:00".into()],
            shift_hours: vec![9.0],
            ratios: vec![0.5],
            takeover_minutes: vec![1.0],
            ..SweepConfig::reference_grid(quick_source())
        };
        assert_eq!(cfg.cells().unwrap().len(), 1);
    }

    #[test]
    fn sweep_records_cell_errors_without_aborting() {
        // tours start in the morning; the 23:00 window is empty and must
        // fail alone
        let cfg = SweepConfig {
            start_times: vec!["23:30".into(), "05:00".into()],
            shift_hours: vec![0.25],
            ratios: vec![1.0],
            takeover_minutes: vec![0.0],
            penetration: 1.0,
            replications: 1,
            rest_policy: RestPolicy::disabled(),
            master_seed: 5,
            tours: quick_source(),
        };
        let sweep = run_sweep(&cfg).unwrap();
        assert_eq!(sweep.cells.len(), 2);
        assert!(sweep.cells[0].result.is_err());
        assert!(sweep.cells[1].result.is_ok());
        assert_eq!(sweep.error_count(), 1);
    }

    #[test]
    fn longer_takeover_never_shortens_the_makespan() {
        let base = SweepConfig {
            start_times: vec!["05:00".into()],
            shift_hours: vec![9.0],
            ratios: vec![0.5],
            takeover_minutes: vec![0.0, 3.0],
            penetration: 1.0,
            replications: 2,
            rest_policy: RestPolicy::default(),
            master_seed: 11,
            tours: quick_source(),
        };
        let sweep = run_sweep(&base).unwrap();
        let slow = sweep.cells[1].result.as_ref().unwrap();
        let fast = sweep.cells[0].result.as_ref().unwrap();
        for (a, b) in fast.reports.iter().zip(&slow.reports) {
            assert!(b.completion_makespan >= a.completion_makespan - 1e-9);
        }
    }

    #[test]
    fn min_ratio_picks_the_smallest_qualifying_ratio() {
        let cfg = SweepConfig {
            start_times: vec!["05:00".into()],
            shift_hours: vec![9.0],
            ratios: vec![0.3, 0.5, 0.7, 1.0],
            takeover_minutes: vec![1.0],
            penetration: 1.0,
            replications: 2,
            rest_policy: RestPolicy::disabled(),
            master_seed: 9,
            tours: quick_source(),
        };
        let sweep = run_sweep(&cfg).unwrap();

        // a threshold nothing can miss: the whole grid qualifies at 0.3
        let lax = min_ratio_for_target(
            &sweep,
            &ServiceLevelTarget {
                kpi: "delay".to_string(),
                comparator: Comparator::Le,
                threshold: f64::MAX,
                statistic: Statistic::Mean,
            },
        )
        .unwrap();
        assert_eq!(lax.len(), 1);
        assert_eq!(lax[0].min_ratio, Some(0.3));
        assert!((lax[0].implied_gain.unwrap() - 0.7).abs() < 1e-12);

        // an impossible target yields None
        let impossible = min_ratio_for_target(
            &sweep,
            &ServiceLevelTarget {
                kpi: "delay".to_string(),
                comparator: Comparator::Le,
                threshold: -1.0,
                statistic: Statistic::Mean,
            },
        )
        .unwrap();
        assert_eq!(impossible[0].min_ratio, None);
        assert_eq!(impossible[0].implied_gain, None);

        // tightening the threshold never lowers the minimal ratio
        let mut last = 0.0;
        for threshold in [10.0, 1.0, 0.5, 0.1, 0.01] {
            let entries = min_ratio_for_target(
                &sweep,
                &ServiceLevelTarget {
                    kpi: "delay".to_string(),
                    comparator: Comparator::Le,
                    threshold,
                    statistic: Statistic::Mean,
                },
            )
            .unwrap();
            let ratio = entries[0].min_ratio.unwrap_or(f64::INFINITY);
            assert!(ratio >= last);
            last = ratio;
        }
    }

    #[test]
    fn min_ratio_rejects_unknown_kpi_names() {
        let sweep = SweepResult {
            config: SweepConfig::reference_grid(quick_source()),
            cells: vec![],
            tool_version: "0".to_string(),
            replication_seeds: vec![],
        };
        let err = min_ratio_for_target(
            &sweep,
            &ServiceLevelTarget {
                kpi: "nonsense".to_string(),
                comparator: Comparator::Le,
                threshold: 0.0,
                statistic: Statistic::Mean,
            },
        )
        .unwrap_err();
        assert!(err.to_string().contains("delay"));
    }

    #[test]
    fn config_file_round_trip_and_unknown_key_rejection() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("sweep.json");
        let cfg = SweepConfig::reference_grid(quick_source());
        cfg.save(&path).unwrap();
        let loaded = SweepConfig::load(&path).unwrap();
        assert_eq!(loaded, cfg);

        let bad = path.with_file_name("bad.json");
        std::fs::write(
            &bad,
            r#"{"start_times":["05:00"],"shift_hours":[9],"ratios":[0.5],
                "takeover_minutes":[1],"tours":{"generator":{"count":10}},
                "surprise_key":true}"#,
        )
        .unwrap();
        let err = SweepConfig::load(&bad).unwrap_err();
        assert!(err.to_string().contains("surprise_key"), "{err}");
    }

    #[test]
    fn tour_source_requires_exactly_one_kind() {
        let both = TourSource {
            path: Some("x.csv".into()),
            generator: Some(GeneratorSpec {
                count: 5,
                profile: GeneratorProfile::default(),
            }),
        };
        assert!(both.validate().is_err());
        let neither = TourSource {
            path: None,
            generator: None,
        };
        assert!(neither.validate().is_err());
    }
}
