//! Clock-time helpers.
//!
//! All simulation times are `f64` minutes counted from midnight of the
//! simulated day. These helpers convert between that representation and the
//! `HH:MM` strings used in configuration files and on the command line.

use crate::error::{Result, SimError};

/// Parse an `HH:MM` clock time into minutes since midnight.
///
/// Hours up to 47 are accepted so that windows reaching into the next day can
/// be expressed, matching what the tour generator can produce.
pub fn parse_clock(s: &str) -> Result<f64> {
    let err = || SimError::Config(format!("expected clock time as HH:MM, got `{s}`"));
    let (h, m) = s.split_once(':').ok_or_else(err)?;
    let h: u32 = h.trim().parse().map_err(|_| err())?;
    let m: u32 = m.trim().parse().map_err(|_| err())?;
    if h > 47 || m > 59 {
        return Err(err());
    }
    Ok((h * 60 + m) as f64)
}

/// Format minutes since midnight as `HH:MM`, rounding to the nearest minute.
pub fn format_clock(minutes: f64) -> String {
    let total = minutes.round().max(0.0) as u64;
    format!("{:02}:{:02}", total / 60, total % 60)
}

/// Parse a duration given either as plain minutes (`90`, `90.5`) or as hours
/// with an `h` suffix (`9h`, `1.5h`). Returns minutes.
pub fn parse_duration_min(s: &str) -> Result<f64> {
    let err = || SimError::Config(format!("expected a duration in minutes or `<hours>h`, got `{s}`"));
    let t = s.trim();
    let value = if let Some(hours) = t.strip_suffix(['h', 'H']) {
        hours.trim().parse::<f64>().map_err(|_| err())? * 60.0
    } else {
        t.parse::<f64>().map_err(|_| err())?
    };
    if !value.is_finite() || value < 0.0 {
        return Err(err());
    }
    Ok(value)
}
