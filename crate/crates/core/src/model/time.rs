// Copyright 2026 The Cohana Authors. Licensed under Apache-2.0.

use std::fmt;
use std::str::FromStr;

use chrono::{DateTime, NaiveDate, NaiveDateTime};
use thiserror::Error;

/// Seconds since the Unix epoch, UTC.
pub type Timestamp = i64;

/// Granularity used to normalize ages. A month is a fixed 30 days.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum TimeUnit {
    #[default]
    Day,
    Week,
    Month,
}

impl TimeUnit {
    pub const fn seconds(self) -> i64 {
        match self {
            TimeUnit::Day => 86_400,
            TimeUnit::Week => 7 * 86_400,
            TimeUnit::Month => 30 * 86_400,
        }
    }
}

impl FromStr for TimeUnit {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "day" | "days" => Ok(TimeUnit::Day),
            "week" | "weeks" => Ok(TimeUnit::Week),
            "month" | "months" => Ok(TimeUnit::Month),
            other => Err(format!("unknown time unit `{other}` (expected day, week or month)")),
        }
    }
}

impl fmt::Display for TimeUnit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TimeUnit::Day => "day",
            TimeUnit::Week => "week",
            TimeUnit::Month => "month",
        })
    }
}

/// Whole time units elapsed since a user's birth.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Age(pub u32);

impl fmt::Display for Age {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
#[error("negative age delta {0}s: tuple precedes the birth tuple")]
pub struct NegativeDelta(pub i64);

/// Ceiling of `delta_seconds / unit`: zero only at the birth instant, and any
/// strictly later timestamp is at least age 1.
pub fn normalize_age(delta_seconds: i64, unit: TimeUnit) -> Result<Age, NegativeDelta> {
    if delta_seconds < 0 {
        return Err(NegativeDelta(delta_seconds));
    }
    let units = (delta_seconds as u64).div_ceil(unit.seconds() as u64);
    Ok(Age(u32::try_from(units).unwrap_or(u32::MAX)))
}

const DATETIME_FORMATS: &[&str] = &[
    "%Y/%m/%d:%H%M",
    "%Y-%m-%dT%H:%M:%S",
    "%Y-%m-%d %H:%M:%S",
    "%Y-%m-%dT%H:%M",
    "%Y-%m-%d %H:%M",
];

const DATE_FORMATS: &[&str] = &["%Y-%m-%d", "%Y/%m/%d"];

/// Parses a calendar date with no time-of-day, returning its midnight.
pub fn parse_day(s: &str) -> Option<Timestamp> {
    let s = s.trim();
    DATE_FORMATS.iter().find_map(|fmt| {
        NaiveDate::parse_from_str(s, fmt)
            .ok()
            .and_then(|d| d.and_hms_opt(0, 0, 0))
            .map(|dt| dt.and_utc().timestamp())
    })
}

/// Parses `YYYY/MM/DD:HHMM`, ISO-8601 (with or without offset), a bare date,
/// or raw epoch seconds.
pub fn parse_timestamp(s: &str) -> Option<Timestamp> {
    let s = s.trim();
    if let Ok(v) = s.parse::<i64>() {
        return Some(v);
    }
    if let Ok(dt) = DateTime::parse_from_rfc3339(s) {
        return Some(dt.timestamp());
    }
    let trimmed = s.strip_suffix('Z').unwrap_or(s);
    DATETIME_FORMATS
        .iter()
        .find_map(|fmt| NaiveDateTime::parse_from_str(trimmed, fmt).ok())
        .map(|dt| dt.and_utc().timestamp())
        .or_else(|| parse_day(s))
}

/// ISO-8601 rendering in UTC, e.g. `2013-05-19T10:00:00`.
pub fn format_timestamp(ts: Timestamp) -> String {
    match DateTime::from_timestamp(ts, 0) {
        Some(dt) => dt.naive_utc().format("%Y-%m-%dT%H:%M:%S").to_string(),
        None => ts.to_string(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn birth_instant_is_age_zero() {
        assert_eq!(normalize_age(0, TimeUnit::Day), Ok(Age(0)));
    }

    #[test]
    fn ceiling_boundaries() {
        // 22 hours after birth lands in day 1.
        assert_eq!(normalize_age(79_200, TimeUnit::Day), Ok(Age(1)));
        assert_eq!(normalize_age(86_400, TimeUnit::Day), Ok(Age(1)));
        assert_eq!(normalize_age(86_401, TimeUnit::Day), Ok(Age(2)));
        assert_eq!(normalize_age(1, TimeUnit::Week), Ok(Age(1)));
        assert_eq!(normalize_age(30 * 86_400 + 1, TimeUnit::Month), Ok(Age(2)));
    }

    #[test]
    fn negative_delta_rejected() {
        assert_eq!(normalize_age(-1, TimeUnit::Day), Err(NegativeDelta(-1)));
    }

    #[test]
    fn parses_slash_and_iso_formats() {
        let t1 = parse_timestamp("2013/05/19:1000").unwrap();
        assert_eq!(t1, 1_368_957_600);
        assert_eq!(parse_timestamp("2013-05-19T10:00:00"), Some(t1));
        assert_eq!(parse_timestamp("2013-05-19T10:00:00Z"), Some(t1));
        assert_eq!(parse_timestamp("2013-05-19T12:00:00+02:00"), Some(t1));
        assert_eq!(parse_timestamp("2013-05-19 10:00"), Some(t1));
        assert_eq!(parse_timestamp("2013-05-19"), Some(t1 - 10 * 3600));
        assert_eq!(parse_timestamp("1368957600"), Some(t1));
        assert_eq!(parse_timestamp("yesterday"), None);
        assert_eq!(format_timestamp(t1), "2013-05-19T10:00:00");
    }

    #[test]
    fn day_literals_only_accept_dates() {
        assert!(parse_day("2013-05-21").is_some());
        assert!(parse_day("2013/05/21").is_some());
        assert!(parse_day("2013/05/21:1000").is_none());
    }

    proptest! {
        #[test]
        fn monotone_in_delta(a in 0i64..10_000_000, b in 0i64..10_000_000) {
            let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
            for unit in [TimeUnit::Day, TimeUnit::Week, TimeUnit::Month] {
                prop_assert!(normalize_age(lo, unit).unwrap() <= normalize_age(hi, unit).unwrap());
            }
        }

        #[test]
        fn whole_units_are_exact(k in 0u32..100_000) {
            for unit in [TimeUnit::Day, TimeUnit::Week, TimeUnit::Month] {
                prop_assert_eq!(normalize_age(k as i64 * unit.seconds(), unit).unwrap(), Age(k));
            }
        }
    }
}
