//! Tour file import and export.
//!
//! Two on-disk forms carry the same content. The CSV form is flat, one row
//! per trip:
//!
//! ```text
//! tour_id,vehicle_id,tour_start_min,trip_index,dwell_before_min,travel_time_min,distance_km
//! ```
//!
//! Rows of one tour are contiguous and ordered by trip index; the writer
//! sorts by `(tour_id, trip_index)`. The JSON form nests the trips inside
//! their tour objects and mirrors the field names. Numbers are written with
//! the shortest representation that parses back to the identical value, so a
//! load/write cycle is lossless and reruns produce identical bytes.

use std::fs;
use std::path::Path;

use crate::error::{Result, SimError};
use crate::tours::{Tour, TourSet, Trip};

/// On-disk format of a tour file.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TourFormat {
    Csv,
    Json,
}

impl TourFormat {
    /// Guess the format from a file extension, defaulting to CSV.
    #[must_use]
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some(ext) if ext.eq_ignore_ascii_case("json") => Self::Json,
            _ => Self::Csv,
        }
    }
}

const CSV_HEADER: [&str; 7] = [
    "tour_id",
    "vehicle_id",
    "tour_start_min",
    "trip_index",
    "dwell_before_min",
    "travel_time_min",
    "distance_km",
];

/// Load a tour file, validating the full set of structural invariants.
pub fn load_tours(path: impl AsRef<Path>, format: TourFormat) -> Result<TourSet> {
    let path = path.as_ref();
    match format {
        TourFormat::Csv => load_csv(path),
        TourFormat::Json => load_json(path),
    }
}

/// Write a tour set. The CSV writer sorts rows by `(tour_id, trip_index)`.
pub fn write_tours(tours: &TourSet, path: impl AsRef<Path>, format: TourFormat) -> Result<()> {
    let path = path.as_ref();
    match format {
        TourFormat::Csv => write_csv(tours, path),
        TourFormat::Json => write_json(tours, path),
    }
}

fn load_csv(path: &Path) -> Result<TourSet> {
    let display = path.display().to_string();
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_path(path)?;

    let headers = reader.headers()?.clone();
    let mut column = [0usize; 7];
    for (slot, name) in column.iter_mut().zip(CSV_HEADER) {
        *slot = headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| SimError::Validation(format!("{display}: missing column `{name}`")))?;
    }

    let mut tours: Vec<Tour> = Vec::new();
    let mut seen_ids = std::collections::HashSet::new();
    for record in reader.records() {
        let record = record?;
        let line = record.position().map_or(0, |p| p.line());
        let field = |slot: usize| -> Result<&str> {
            record.get(column[slot]).ok_or_else(|| SimError::Parse {
                path: display.clone(),
                line,
                field: CSV_HEADER[slot].to_string(),
                message: "missing field".to_string(),
            })
        };
        let number = |slot: usize| -> Result<f64> {
            let raw = field(slot)?;
            raw.parse::<f64>().map_err(|_| SimError::Parse {
                path: display.clone(),
                line,
                field: CSV_HEADER[slot].to_string(),
                message: format!("`{raw}` is not a number"),
            })
        };
        let index = {
            let raw = field(3)?;
            raw.parse::<usize>().map_err(|_| SimError::Parse {
                path: display.clone(),
                line,
                field: "trip_index".to_string(),
                message: format!("`{raw}` is not a non-negative integer"),
            })?
        };

        let tour_id = field(0)?.to_string();
        let vehicle_id = field(1)?.to_string();
        let start_min = number(2)?;
        let trip = Trip {
            index,
            dwell_before_min: number(4)?,
            travel_time_min: number(5)?,
            distance_km: number(6)?,
        };

        match tours.last_mut() {
            Some(current) if current.tour_id == tour_id => {
                if current.vehicle_id != vehicle_id || current.start_min != start_min {
                    return Err(SimError::Validation(format!(
                        "{display} line {line}: tour `{tour_id}` changes vehicle or start time mid-file"
                    )));
                }
                current.trips.push(trip);
            }
            _ => {
                // a tour id resurfacing after another tour means split or
                // duplicated groups; the set validation reports it
                if !seen_ids.insert(tour_id.clone()) {
                    return Err(SimError::Validation(format!(
                        "{display} line {line}: duplicate tour_id `{tour_id}` (rows of one tour must be contiguous)"
                    )));
                }
                tours.push(Tour {
                    tour_id,
                    vehicle_id,
                    start_min,
                    trips: vec![trip],
                });
            }
        }
    }

    if tours.is_empty() {
        return Err(SimError::Validation(format!("{display}: no tour rows")));
    }
    TourSet::new(tours, "loaded")
}

fn write_csv(tours: &TourSet, path: &Path) -> Result<()> {
    let mut rows: Vec<&Tour> = tours.tours.iter().collect();
    rows.sort_by(|a, b| a.tour_id.cmp(&b.tour_id));

    let mut writer = csv::Writer::from_path(path)?;
    writer.write_record(CSV_HEADER)?;
    for tour in rows {
        for trip in &tour.trips {
            writer.write_record([
                tour.tour_id.as_str(),
                tour.vehicle_id.as_str(),
                &tour.start_min.to_string(),
                &trip.index.to_string(),
                &trip.dwell_before_min.to_string(),
                &trip.travel_time_min.to_string(),
                &trip.distance_km.to_string(),
            ])?;
        }
    }
    writer.flush().map_err(SimError::from)?;
    Ok(())
}

fn load_json(path: &Path) -> Result<TourSet> {
    let text = fs::read_to_string(path)?;
    let set: TourSet = serde_json::from_str(&text)?;
    set.validate()?;
    if set.is_empty() {
        return Err(SimError::Validation(format!(
            "{}: no tours",
            path.display()
        )));
    }
    Ok(set)
}

fn write_json(tours: &TourSet, path: &Path) -> Result<()> {
    let mut sorted = tours.clone();
    sorted.tours.sort_by(|a, b| a.tour_id.cmp(&b.tour_id));
    let text = serde_json::to_string_pretty(&sorted)?;
    fs::write(path, text + "\n")?;
    Ok(())
}
