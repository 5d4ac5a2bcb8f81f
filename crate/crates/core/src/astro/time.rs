use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Sub};
use std::str::FromStr;

use chrono::{DateTime, Duration, NaiveDate, NaiveDateTime, TimeZone, Utc};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::AstroError;

/// Julian date of the J2000.0 reference epoch (2000-01-01 12:00:00).
pub const JD_J2000: f64 = 2_451_545.0;
pub const SECONDS_PER_DAY: f64 = 86_400.0;

/// A UTC instant stored as seconds relative to J2000.0.
///
/// Leap seconds are ignored: a day is always 86400 s. The value is always
/// finite, which is what makes the total order below sound.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EpochUtc(f64);

impl EpochUtc {
    pub const J2000: EpochUtc = EpochUtc(0.0);

    pub fn from_seconds(seconds_since_j2000: f64) -> Self {
        assert!(
            seconds_since_j2000.is_finite(),
            "epoch must be finite, got {seconds_since_j2000}"
        );
        EpochUtc(seconds_since_j2000)
    }

    pub fn seconds(self) -> f64 {
        self.0
    }

    pub fn julian_date(self) -> f64 {
        JD_J2000 + self.0 / SECONDS_PER_DAY
    }

    pub fn from_julian_date(jd: f64) -> Self {
        Self::from_seconds((jd - JD_J2000) * SECONDS_PER_DAY)
    }

    fn reference() -> DateTime<Utc> {
        Utc.with_ymd_and_hms(2000, 1, 1, 12, 0, 0).unwrap()
    }

    pub fn from_datetime(dt: DateTime<Utc>) -> Self {
        let delta = dt - Self::reference();
        let whole = delta.num_seconds();
        let nanos = (delta - Duration::seconds(whole)).num_nanoseconds().unwrap_or(0);
        Self::from_seconds(whole as f64 + nanos as f64 * 1e-9)
    }

    /// Nearest-millisecond calendar representation.
    pub fn to_datetime(self) -> DateTime<Utc> {
        let millis = (self.0 * 1000.0).round() as i64;
        Self::reference() + Duration::milliseconds(millis)
    }

    /// Calendar year and fractional day-of-year (1-based), the TLE epoch form.
    pub fn from_year_day(year: i32, day_of_year: f64) -> Result<Self, AstroError> {
        let jan1 = NaiveDate::from_yo_opt(year, 1)
            .ok_or_else(|| AstroError::InvalidEpoch(format!("year {year} out of range")))?;
        let jan1 = Utc.from_utc_datetime(&jan1.and_hms_opt(0, 0, 0).unwrap());
        let base = Self::from_datetime(jan1);
        Ok(base + (day_of_year - 1.0) * SECONDS_PER_DAY)
    }

    pub fn parse_iso(text: &str) -> Result<Self, AstroError> {
        let trimmed = text.trim();
        if let Ok(dt) = DateTime::parse_from_rfc3339(trimmed) {
            return Ok(Self::from_datetime(dt.with_timezone(&Utc)));
        }
        let bare = trimmed
            .trim_end_matches("UTC")
            .trim_end_matches('Z')
            .trim();
        for fmt in ["%Y-%m-%dT%H:%M:%S%.f", "%Y-%m-%d %H:%M:%S%.f"] {
            if let Ok(naive) = NaiveDateTime::parse_from_str(bare, fmt) {
                return Ok(Self::from_datetime(Utc.from_utc_datetime(&naive)));
            }
        }
        if let Ok(date) = NaiveDate::parse_from_str(bare, "%Y-%m-%d") {
            let naive = date.and_hms_opt(0, 0, 0).unwrap();
            return Ok(Self::from_datetime(Utc.from_utc_datetime(&naive)));
        }
        Err(AstroError::InvalidEpoch(format!(
            "cannot parse '{text}' as an ISO-8601 UTC timestamp"
        )))
    }

    /// ISO-8601 with millisecond precision and a `Z` suffix.
    pub fn to_iso(self) -> String {
        self.to_datetime()
            .format("%Y-%m-%dT%H:%M:%S%.3fZ")
            .to_string()
    }

    /// Greenwich mean sidereal time (IAU 1982 polynomial), radians in [0, 2π).
    ///
    /// UT1 is taken equal to UTC.
    pub fn gmst(self) -> f64 {
        gmst_from_jd(self.julian_date())
    }
}

pub fn gmst_from_jd(jd_ut1: f64) -> f64 {
    let tut1 = (jd_ut1 - JD_J2000) / 36_525.0;
    let seconds = -6.2e-6 * tut1 * tut1 * tut1
        + 0.093_104 * tut1 * tut1
        + (876_600.0 * 3600.0 + 8_640_184.812_866) * tut1
        + 67_310.548_41;
    let two_pi = std::f64::consts::TAU;
    // 240 s of sidereal time per degree.
    let mut theta = (seconds.to_radians() / 240.0) % two_pi;
    if theta < 0.0 {
        theta += two_pi;
    }
    theta
}

impl Eq for EpochUtc {}

impl PartialOrd for EpochUtc {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for EpochUtc {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.total_cmp(&other.0)
    }
}

impl Add<f64> for EpochUtc {
    type Output = EpochUtc;
    fn add(self, seconds: f64) -> EpochUtc {
        EpochUtc::from_seconds(self.0 + seconds)
    }
}

impl Sub<f64> for EpochUtc {
    type Output = EpochUtc;
    fn sub(self, seconds: f64) -> EpochUtc {
        EpochUtc::from_seconds(self.0 - seconds)
    }
}

impl Sub for EpochUtc {
    type Output = f64;
    fn sub(self, other: EpochUtc) -> f64 {
        self.0 - other.0
    }
}

impl fmt::Display for EpochUtc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_iso())
    }
}

impl FromStr for EpochUtc {
    type Err = AstroError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::parse_iso(s)
    }
}

impl Serialize for EpochUtc {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_iso())
    }
}

impl<'de> Deserialize<'de> for EpochUtc {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let text = String::deserialize(deserializer)?;
        EpochUtc::parse_iso(&text).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn j2000_reference() {
        let e = EpochUtc::parse_iso("2000-01-01T12:00:00Z").unwrap();
        assert_eq!(e.seconds(), 0.0);
        assert_eq!(e.julian_date(), JD_J2000);
    }

    #[test]
    fn tabulated_epochs_parse_in_both_styles() {
        let a = EpochUtc::parse_iso("2024-09-11 00:00:00 UTC").unwrap();
        let b = EpochUtc::parse_iso("2024-09-11T00:00:00Z").unwrap();
        assert_eq!(a, b);
        let c = EpochUtc::parse_iso("2024-09-18T00:00:00Z").unwrap();
        assert_eq!(c - a, 7.0 * SECONDS_PER_DAY);
    }

    #[test]
    fn year_day_matches_calendar() {
        let e = EpochUtc::from_year_day(2024, 255.0).unwrap();
        assert_eq!(e.to_iso(), "2024-09-11T00:00:00.000Z");
    }

    #[test]
    fn gmst_at_j2000() {
        // 280.46061837 degrees at J2000.0.
        let g = EpochUtc::J2000.gmst().to_degrees();
        assert!((g - 280.460_618_37).abs() < 1e-6, "{g}");
    }

    #[test]
    fn garbage_is_rejected() {
        assert!(EpochUtc::parse_iso("next tuesday").is_err());
    }

    proptest! {
        #[test]
        fn iso_round_trip_within_a_millisecond(s in -3.0e9f64..3.0e9) {
            let e = EpochUtc::from_seconds(s);
            let back = EpochUtc::parse_iso(&e.to_iso()).unwrap();
            prop_assert!((back.seconds() - s).abs() <= 5e-4 + 1e-6);
        }

        #[test]
        fn order_matches_calendar(a in -3.0e9f64..3.0e9, b in -3.0e9f64..3.0e9) {
            let (ea, eb) = (EpochUtc::from_seconds(a), EpochUtc::from_seconds(b));
            let (da, db) = (ea.to_datetime(), eb.to_datetime());
            if (a - b).abs() > 1e-3 {
                prop_assert_eq!(ea.cmp(&eb), da.cmp(&db));
            }
        }
    }
}
