//! Command line front end.
//!
//! Five subcommands: `gen-tours` builds a synthetic tour file, `simulate`
//! runs one scenario and dumps KPI JSON plus event and snapshot CSVs,
//! `sweep` runs a parameter grid from a JSON config, `min-ratio` queries a
//! finished sweep for the smallest operator-to-vehicle ratio meeting a
//! service level, and `report` pretty-prints sweep summaries.
//!
//! Exit codes: 0 on success, 1 on runtime failure, 2 on a malformed command
//! line. All output files are written atomically (temp file + rename) and
//! with fixed formatting, so reruns produce byte-identical files.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::clock::{format_clock, parse_clock, parse_duration_min};
use crate::engine::{run_simulation, RestMode, RestPolicy};
use crate::error::{Result, SimError};
use crate::kpi::{compute_kpis, KpiReport, Statistic, KPI_FIELDS};
use crate::scenario::{
    run_sweep, Comparator, ServiceLevelTarget, SweepConfig, THREADS_ENV,
};
use crate::tours::{
    filter_window, generate_tours, load_tours, write_tours, DurationDistribution,
    GeneratorProfile, TourFormat,
};

/// Simulate teleoperated truck fleets served by a shared operator pool.
#[derive(Debug, Parser)]
#[command(name = "teleop-sim", version, about, max_term_width = 100)]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Generate a synthetic tour population file.
    GenTours(GenToursArgs),
    /// Run one scenario and write KPIs, event log and snapshots.
    Simulate(SimulateArgs),
    /// Run a scenario grid from a JSON config into an output directory.
    Sweep(SweepArgs),
    /// Find the smallest ratio meeting a service-level target per group.
    MinRatio(MinRatioArgs),
    /// Pretty-print per-cell KPI statistics of a finished sweep.
    Report(ReportArgs),
}

#[derive(Debug, Args)]
struct GenToursArgs {
    /// Number of tours to generate.
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    count: u64,
    /// Generator seed.
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Output file; format follows the extension unless --format is given.
    #[arg(long)]
    out: PathBuf,
    /// Output format.
    #[arg(long, value_enum)]
    format: Option<FileFormat>,
    /// Mean trips per tour (shifted geometric, minimum 1).
    #[arg(long, default_value_t = 4.0)]
    mean_trips: f64,
    /// Hard cap on trips per tour.
    #[arg(long, default_value_t = 8)]
    max_trips: usize,
    /// Mean driving time of one trip, minutes (lognormal).
    #[arg(long, default_value_t = 80.55)]
    trip_time_mean: f64,
    /// Lognormal sigma of the trip driving time.
    #[arg(long, default_value_t = 0.5)]
    trip_time_sigma: f64,
    /// Mean dwell before each trip, minutes (lognormal).
    #[arg(long, default_value_t = 30.0)]
    dwell_mean: f64,
    /// Lognormal sigma of the dwell.
    #[arg(long, default_value_t = 0.5)]
    dwell_sigma: f64,
    /// Hard cap on the planned tour duration, minutes.
    #[arg(long, default_value_t = 1100.0)]
    max_tour_minutes: f64,
    /// Planned-duration allowance for departures too late to finish before
    /// midnight, minutes.
    #[arg(long, default_value_t = 600.0)]
    overnight_minutes: f64,
    /// Cruise speed turning travel time into distance, km/h.
    #[arg(long, default_value_t = 60.0)]
    speed_kmh: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FileFormat {
    Csv,
    Json,
}

#[derive(Debug, Args)]
struct SimulateArgs {
    /// Tour file (CSV or JSON).
    #[arg(long)]
    tours: PathBuf,
    /// Teleoperator pool size as a fraction of admitted vehicles.
    #[arg(long)]
    ratio: f64,
    /// Takeover handshake time, minutes.
    #[arg(long, default_value_t = 0.0)]
    takeover: f64,
    /// Shift start as HH:MM.
    #[arg(long, default_value = "00:00")]
    start: String,
    /// Shift length: minutes or `<hours>h`.
    #[arg(long, default_value = "9h")]
    shift: String,
    /// Rest policy mode.
    #[arg(long, value_enum, default_value_t = RestModeArg::Monolithic)]
    rest_mode: RestModeArg,
    /// Driving cap between long rests, minutes.
    #[arg(long, default_value_t = 270.0)]
    max_drive_min: f64,
    /// Long rest length, minutes.
    #[arg(long, default_value_t = 45.0)]
    long_rest_min: f64,
    /// Short rest length (split mode), minutes.
    #[arg(long, default_value_t = 10.0)]
    short_rest_min: f64,
    /// Simulation seed.
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Output prefix; writes <prefix>.kpi.json, .events.csv, .snapshots.csv.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum RestModeArg {
    Monolithic,
    Split,
    Disabled,
}

impl From<RestModeArg> for RestMode {
    fn from(value: RestModeArg) -> Self {
        match value {
            RestModeArg::Monolithic => RestMode::Monolithic,
            RestModeArg::Split => RestMode::Split,
            RestModeArg::Disabled => RestMode::Disabled,
        }
    }
}

#[derive(Debug, Args)]
struct SweepArgs {
    /// Sweep config JSON.
    #[arg(long)]
    config: PathBuf,
    /// Output directory for results.csv, summary.csv and manifest.json.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct MinRatioArgs {
    /// Directory holding a sweep's summary.csv.
    #[arg(long)]
    sweep: PathBuf,
    /// KPI to test.
    #[arg(long, value_parser = kpi_name_parser())]
    kpi: String,
    /// Comparison direction.
    #[arg(long, value_enum, default_value_t = OpArg::Le)]
    op: OpArg,
    /// Threshold the KPI statistic must meet.
    #[arg(long, allow_negative_numbers = true)]
    threshold: f64,
    /// Which replication statistic to test.
    #[arg(long, value_enum, default_value_t = StatArg::Mean)]
    stat: StatArg,
}

#[derive(Debug, Args)]
struct ReportArgs {
    /// Directory holding a sweep's summary.csv.
    #[arg(long)]
    sweep: PathBuf,
    /// Only cells with this shift start (HH:MM).
    #[arg(long)]
    start: Option<String>,
    /// Only cells with this shift length in hours.
    #[arg(long)]
    shift: Option<f64>,
    /// Only cells with this ratio.
    #[arg(long)]
    ratio: Option<f64>,
    /// Only cells with this takeover time in minutes.
    #[arg(long)]
    takeover: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OpArg {
    Le,
    Ge,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
#[value(rename_all = "lower")]
enum StatArg {
    Mean,
    Std,
    Min,
    P25,
    P50,
    P75,
    Max,
}

impl From<StatArg> for Statistic {
    fn from(value: StatArg) -> Self {
        match value {
            StatArg::Mean => Statistic::Mean,
            StatArg::Std => Statistic::Std,
            StatArg::Min => Statistic::Min,
            StatArg::P25 => Statistic::P25,
            StatArg::P50 => Statistic::P50,
            StatArg::P75 => Statistic::P75,
            StatArg::Max => Statistic::Max,
        }
    }
}

fn kpi_name_parser() -> clap::builder::PossibleValuesParser {
    clap::builder::PossibleValuesParser::new(KPI_FIELDS.iter().map(|(n, _)| *n))
}

/// Binary entry point: parse (clap exits 2 on usage errors), execute, map
/// runtime failures to exit code 1.
pub fn main() -> i32 {
    let cli = Cli::parse();
    match cli.execute() {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}

impl Cli {
    /// Run the parsed command.
    pub fn execute(&self) -> Result<()> {
        match &self.command {
            Command::GenTours(args) => cmd_gen_tours(args),
            Command::Simulate(args) => cmd_simulate(args),
            Command::Sweep(args) => cmd_sweep(args),
            Command::MinRatio(args) => cmd_min_ratio(args),
            Command::Report(args) => cmd_report(args),
        }
    }
}

fn cmd_gen_tours(args: &GenToursArgs) -> Result<()> {
    let profile = GeneratorProfile {
        mean_trips_per_tour: args.mean_trips,
        max_trips_per_tour: args.max_trips,
        trip_time: DurationDistribution::Lognormal {
            mean_min: args.trip_time_mean,
            sigma: args.trip_time_sigma,
        },
        dwell: DurationDistribution::Lognormal {
            mean_min: args.dwell_mean,
            sigma: args.dwell_sigma,
        },
        max_tour_duration_min: args.max_tour_minutes,
        overnight_duration_min: args.overnight_minutes,
        distance_speed_kmh: args.speed_kmh,
        ..GeneratorProfile::default()
    };
    let set = generate_tours(&profile, args.count as usize, args.seed)?;
    let format = match args.format {
        Some(FileFormat::Csv) => TourFormat::Csv,
        Some(FileFormat::Json) => TourFormat::Json,
        None => TourFormat::from_path(&args.out),
    };
    atomic_write_via(&args.out, |tmp| write_tours(&set, tmp, format))?;
    println!(
        "generated {} tours: mean {:.2} trips/tour, mean duration {:.2} h",
        set.len(),
        set.mean_trips_per_tour(),
        set.mean_duration_hours(),
    );
    println!("wrote {}", args.out.display());
    Ok(())
}

/// Top-level structure of `<prefix>.kpi.json`.
#[derive(Debug, Serialize)]
struct SimulateOutput {
    n_vehicles: usize,
    n_teleoperators: usize,
    shift_start_min: f64,
    shift_hours: f64,
    takeover_min: f64,
    rest: RestPolicy,
    seed: u64,
    kpis: KpiReport,
}

fn cmd_simulate(args: &SimulateArgs) -> Result<()> {
    let start_min = parse_clock(&args.start)?;
    let shift_hours = parse_duration_min(&args.shift)? / 60.0;
    if !(args.ratio > 0.0 && args.ratio.is_finite()) {
        return Err(SimError::Config(format!(
            "ratio must be positive, got {}",
            args.ratio
        )));
    }
    let rest = RestPolicy {
        mode: args.rest_mode.into(),
        max_drive_min: args.max_drive_min,
        long_rest_min: args.long_rest_min,
        short_rest_min: args.short_rest_min,
    };

    let set = load_tours(&args.tours, TourFormat::from_path(&args.tours))?;
    let admitted = filter_window(&set, start_min, shift_hours)?;
    if admitted.is_empty() {
        return Err(SimError::EmptyWindow {
            start: format_clock(start_min),
            hours: shift_hours,
        });
    }
    let k = admitted.len();
    let n_to = ((args.ratio * k as f64) - 1e-9).ceil().max(1.0) as usize;

    let trace = run_simulation(
        &admitted,
        n_to,
        args.takeover,
        &rest,
        start_min,
        shift_hours,
        args.seed,
    )?;
    let baseline = run_simulation(
        &admitted,
        k,
        0.0,
        &RestPolicy::disabled(),
        start_min,
        shift_hours,
        args.seed,
    )?;
    let kpis = compute_kpis(&trace, &baseline)?;

    let output = SimulateOutput {
        n_vehicles: k,
        n_teleoperators: n_to,
        shift_start_min: start_min,
        shift_hours,
        takeover_min: args.takeover,
        rest,
        seed: args.seed,
        kpis,
    };

    let kpi_path = suffixed(&args.out, ".kpi.json");
    let events_path = suffixed(&args.out, ".events.csv");
    let snapshots_path = suffixed(&args.out, ".snapshots.csv");
    atomic_write(&kpi_path, (serde_json::to_string_pretty(&output)? + "\n").as_bytes())?;
    atomic_write_via(&events_path, |tmp| trace.write_events_csv(tmp))?;
    atomic_write_via(&snapshots_path, |tmp| trace.write_snapshots_csv(tmp))?;

    println!(
        "simulated {} vehicles with {} teleoperators: makespan {:.1} min (baseline {:.1}), \
         delay {:.4}, avg wait/vehicle {:.2} min",
        k,
        n_to,
        output.kpis.completion_makespan,
        output.kpis.baseline_completion_makespan,
        output.kpis.delay,
        output.kpis.avg_wait_per_vehicle,
    );
    println!(
        "wrote {}, {}, {}",
        kpi_path.display(),
        events_path.display(),
        snapshots_path.display()
    );
    Ok(())
}

/// Sweep provenance sidecar.
#[derive(Debug, Serialize)]
struct Manifest<'a> {
    tool_version: &'a str,
    master_seed: u64,
    replication_seeds: &'a [u64],
    config: &'a SweepConfig,
    cells: usize,
    failed_cells: Vec<FailedCell<'a>>,
}

#[derive(Debug, Serialize)]
struct FailedCell<'a> {
    start: String,
    shift_hours: f64,
    ratio: f64,
    takeover_min: f64,
    error: &'a str,
}

fn cmd_sweep(args: &SweepArgs) -> Result<()> {
    let cfg = SweepConfig::load(&args.config)?;
    let sweep = run_sweep(&cfg)?;
    std::fs::create_dir_all(&args.out)?;

    let results = args.out.join("results.csv");
    let summary = args.out.join("summary.csv");
    let manifest_path = args.out.join("manifest.json");

    atomic_write_via(&results, |tmp| sweep.write_results_csv(tmp))?;
    atomic_write_via(&summary, |tmp| sweep.write_summary_csv(tmp))?;

    let manifest = Manifest {
        tool_version: &sweep.tool_version,
        master_seed: cfg.master_seed,
        replication_seeds: &sweep.replication_seeds,
        config: &sweep.config,
        cells: sweep.cells.len(),
        failed_cells: sweep
            .cells
            .iter()
            .filter_map(|c| {
                c.result.as_ref().err().map(|e| FailedCell {
                    start: format_clock(c.key.start_min),
                    shift_hours: c.key.shift_hours,
                    ratio: c.key.ratio,
                    takeover_min: c.key.takeover_min,
                    error: e,
                })
            })
            .collect(),
    };
    atomic_write(
        &manifest_path,
        (serde_json::to_string_pretty(&manifest)? + "\n").as_bytes(),
    )?;

    println!(
        "swept {} cells ({} failed), {} replications each (threads capped by {})",
        sweep.cells.len(),
        sweep.error_count(),
        cfg.replications,
        THREADS_ENV,
    );
    println!(
        "wrote {}, {}, {}",
        results.display(),
        summary.display(),
        manifest_path.display()
    );
    Ok(())
}

fn cmd_min_ratio(args: &MinRatioArgs) -> Result<()> {
    let summary = read_summary(&args.sweep.join("summary.csv"))?;
    let target = ServiceLevelTarget {
        kpi: args.kpi.clone(),
        comparator: match args.op {
            OpArg::Le => Comparator::Le,
            OpArg::Ge => Comparator::Ge,
        },
        threshold: args.threshold,
        statistic: args.stat.into(),
    };
    let entries = min_ratio_from_summary(&summary, &target)?;

    println!(
        "minimal ratio where {} of `{}` {} {}",
        Statistic::from(args.stat).name(),
        target.kpi,
        match args.op {
            OpArg::Le => "<=",
            OpArg::Ge => ">=",
        },
        args.threshold
    );
    println!("{:<7} {:>8} {:>13} {:>10} {:>13}", "start", "shift_h", "takeover_min", "min_ratio", "implied_gain");
    for e in entries {
        match e.min_ratio {
            Some(ratio) => println!(
                "{:<7} {:>8} {:>13} {:>10.2} {:>12.1}%",
                e.start,
                e.shift_hours,
                e.takeover_min,
                ratio,
                (1.0 - ratio) * 100.0
            ),
            None => println!(
                "{:<7} {:>8} {:>13} {:>10} {:>13}",
                e.start, e.shift_hours, e.takeover_min, "none", "-"
            ),
        }
    }
    Ok(())
}

fn cmd_report(args: &ReportArgs) -> Result<()> {
    let summary = read_summary(&args.sweep.join("summary.csv"))?;
    let close = |a: f64, b: f64| (a - b).abs() < 1e-9;
    let mut shown = 0;
    for row in &summary.rows {
        if let Some(start) = &args.start {
            if parse_clock(start)? != parse_clock(&row.start)? {
                continue;
            }
        }
        if args.shift.is_some_and(|s| !close(s, row.shift_hours)) {
            continue;
        }
        if args.ratio.is_some_and(|r| !close(r, row.ratio)) {
            continue;
        }
        if args.takeover.is_some_and(|t| !close(t, row.takeover_min)) {
            continue;
        }
        shown += 1;
        println!(
            "cell start={} shift={}h ratio={} takeover={}min ({} replications)",
            row.start, row.shift_hours, row.ratio, row.takeover_min, row.n_replications
        );
        println!(
            "  {:<30} {:>12} {:>12} {:>12} {:>12} {:>12} {:>12} {:>12}",
            "kpi", "mean", "std", "min", "p25", "p50", "p75", "max"
        );
        for (name, _) in KPI_FIELDS {
            print!("  {name:<30}");
            for stat in Statistic::ALL {
                let v = row.value(name, stat, &summary.columns)?;
                print!(" {v:>12.4}");
            }
            println!();
        }
    }
    if shown == 0 {
        return Err(SimError::Validation(
            "no sweep cells match the given filters".to_string(),
        ));
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// summary.csv access shared by min-ratio and report

struct SummaryFile {
    columns: Vec<String>,
    rows: Vec<SummaryRow>,
}

struct SummaryRow {
    start: String,
    shift_hours: f64,
    ratio: f64,
    takeover_min: f64,
    n_replications: usize,
    values: Vec<f64>,
}

impl SummaryRow {
    fn value(&self, kpi: &str, stat: Statistic, columns: &[String]) -> Result<f64> {
        let name = format!("{kpi}_{}", stat.name());
        let idx = columns
            .iter()
            .position(|c| *c == name)
            .ok_or_else(|| SimError::Validation(format!("summary.csv has no column `{name}`")))?;
        Ok(self.values[idx])
    }
}

fn read_summary(path: &Path) -> Result<SummaryFile> {
    let display = path.display().to_string();
    let mut reader = csv::Reader::from_path(path)?;
    let headers = reader.headers()?.clone();
    let fixed = ["start", "shift_hours", "ratio", "takeover_min", "n_replications"];
    for (i, name) in fixed.iter().enumerate() {
        if headers.get(i) != Some(*name) {
            return Err(SimError::Validation(format!(
                "{display}: expected column {i} to be `{name}`"
            )));
        }
    }
    let columns: Vec<String> = headers.iter().skip(fixed.len()).map(String::from).collect();

    let mut rows = Vec::new();
    for record in reader.records() {
        let record = record?;
        let line = record.position().map_or(0, |p| p.line());
        let parse_f64 = |i: usize| -> Result<f64> {
            record
                .get(i)
                .and_then(|v| v.parse().ok())
                .ok_or_else(|| SimError::Validation(format!("{display} line {line}: bad number")))
        };
        rows.push(SummaryRow {
            start: record.get(0).unwrap_or_default().to_string(),
            shift_hours: parse_f64(1)?,
            ratio: parse_f64(2)?,
            takeover_min: parse_f64(3)?,
            n_replications: parse_f64(4)? as usize,
            values: (fixed.len()..headers.len())
                .map(parse_f64)
                .collect::<Result<_>>()?,
        });
    }
    Ok(SummaryFile { columns, rows })
}

struct MinRatioRow {
    start: String,
    shift_hours: f64,
    takeover_min: f64,
    min_ratio: Option<f64>,
}

/// The same search as [`crate::scenario::min_ratio_for_target`], but over a
/// summary.csv read back from disk.
fn min_ratio_from_summary(
    summary: &SummaryFile,
    target: &ServiceLevelTarget,
) -> Result<Vec<MinRatioRow>> {
    crate::kpi::kpi_field(&target.kpi)?;
    let mut groups: std::collections::BTreeMap<(String, u64, u64), Vec<&SummaryRow>> =
        std::collections::BTreeMap::new();
    for row in &summary.rows {
        groups
            .entry((
                row.start.clone(),
                row.shift_hours.to_bits(),
                row.takeover_min.to_bits(),
            ))
            .or_default()
            .push(row);
    }
    let mut out = Vec::new();
    for rows in groups.into_values() {
        let mut sorted = rows;
        sorted.sort_by(|a, b| a.ratio.total_cmp(&b.ratio));
        let mut found = None;
        for row in &sorted {
            let value = row.value(&target.kpi, target.statistic, &summary.columns)?;
            let holds = match target.comparator {
                Comparator::Le => value <= target.threshold,
                Comparator::Ge => value >= target.threshold,
            };
            if holds {
                found = Some(row.ratio);
                break;
            }
        }
        out.push(MinRatioRow {
            start: sorted[0].start.clone(),
            shift_hours: sorted[0].shift_hours,
            takeover_min: sorted[0].takeover_min,
            min_ratio: found,
        });
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// atomic file writing

/// `run` + `.kpi.json` -> `run.kpi.json`, keeping any directory part.
fn suffixed(prefix: &Path, suffix: &str) -> PathBuf {
    let name = prefix
        .file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_default();
    prefix.with_file_name(format!("{name}{suffix}"))
}

fn temp_path(path: &Path) -> PathBuf {
    let name = path
        .file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_default();
    path.with_file_name(format!("{name}.tmp"))
}

/// Write bytes to a temp file in the target directory, then rename.
fn atomic_write(path: &Path, bytes: &[u8]) -> Result<()> {
    let tmp = temp_path(path);
    std::fs::write(&tmp, bytes)?;
    std::fs::rename(&tmp, path)?;
    Ok(())
}

/// Run a writer against a temp path, then rename into place.
fn atomic_write_via<F: FnOnce(&Path) -> Result<()>>(path: &Path, write: F) -> Result<()> {
    let tmp = temp_path(path);
    write(&tmp)?;
    std::fs::rename(&tmp, path)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn usage_parses_all_subcommands() {
        Cli::try_parse_from([
            "teleop-sim",
            "gen-tours",
            "--count",
            "10",
            "--out",
            "x.csv",
        ])
        .unwrap();
        Cli::try_parse_from([
            "teleop-sim",
            "simulate",
            "--tours",
            "x.csv",
            "--ratio",
            "0.5",
            "--out",
            "run",
        ])
        .unwrap();
        Cli::try_parse_from(["teleop-sim", "sweep", "--config", "c.json", "--out", "d"]).unwrap();
        Cli::try_parse_from([
            "teleop-sim",
            "min-ratio",
            "--sweep",
            "d",
            "--kpi",
            "delay",
            "--threshold",
            "0.01",
        ])
        .unwrap();
        Cli::try_parse_from(["teleop-sim", "report", "--sweep", "d"]).unwrap();
    }

    #[test]
    fn zero_count_is_a_usage_error() {
        let err = Cli::try_parse_from([
            "teleop-sim",
            "gen-tours",
            "--count",
            "0",
            "--out",
            "x.csv",
        ])
        .unwrap_err();
        assert_eq!(err.exit_code(), 2);
    }

    #[test]
    fn unknown_kpi_is_a_usage_error_listing_valid_names() {
        let err = Cli::try_parse_from([
            "teleop-sim",
            "min-ratio",
            "--sweep",
            "d",
            "--kpi",
            "nonsense",
            "--threshold",
            "1",
        ])
        .unwrap_err();
        assert_eq!(err.exit_code(), 2);
        let rendered = err.to_string();
        assert!(rendered.contains("delay"), "{rendered}");
    }
}
