//! Two-line element sets: parsing with checksum validation, and formatting.

use std::fmt;

use serde::{Deserialize, Serialize};

use super::time::EpochUtc;
use super::{AstroError, MU_EARTH_KM3_S2, WGS84_A_KM};

/// Mean orbital elements of one TLE record.
///
/// Angles are degrees and mean motion is revolutions per day, exactly as
/// printed in the element set. The raw lines are kept so the record can be
/// re-emitted unchanged.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "TleLines", into = "TleLines")]
pub struct TleRecord {
    pub name: Option<String>,
    pub norad_id: u32,
    pub classification: char,
    pub international_designator: String,
    pub epoch: EpochUtc,
    pub mean_motion_dot: f64,
    pub mean_motion_ddot: f64,
    pub bstar: f64,
    pub element_set_number: u32,
    pub inclination: f64,
    pub raan: f64,
    pub eccentricity: f64,
    pub arg_perigee: f64,
    pub mean_anomaly: f64,
    pub mean_motion: f64,
    pub revolution_number: u32,
    line1: String,
    line2: String,
}

/// Why a record in a catalog was skipped.
#[derive(Clone, Debug, PartialEq)]
pub struct TleDiagnostic {
    /// 1-based line number of the record's first element line.
    pub line: usize,
    pub message: String,
}

impl fmt::Display for TleDiagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}: {}", self.line, self.message)
    }
}

#[derive(Clone, Debug, Default)]
pub struct TleCatalog {
    pub records: Vec<TleRecord>,
    pub diagnostics: Vec<TleDiagnostic>,
}

/// Standard mod-10 checksum over the first 68 columns: digits count their
/// value, minus signs count one, everything else zero.
pub fn tle_checksum(line: &str) -> u32 {
    line.chars()
        .take(68)
        .map(|c| match c {
            '0'..='9' => c as u32 - '0' as u32,
            '-' => 1,
            _ => 0,
        })
        .sum::<u32>()
        % 10
}

fn checksum_ok(line: &str) -> bool {
    match line.chars().nth(68).and_then(|c| c.to_digit(10)) {
        Some(d) => d == tle_checksum(line),
        None => false,
    }
}

fn field(line: &str, start: usize, end: usize) -> &str {
    // Columns are 1-based and inclusive; lines were checked to be ASCII.
    line.get(start - 1..end).unwrap_or("").trim()
}

fn parse_f64(line: &str, start: usize, end: usize, what: &str) -> Result<f64, String> {
    let s = field(line, start, end);
    s.parse::<f64>()
        .map_err(|_| format!("{what}: cannot parse '{s}'"))
}

fn parse_u32(line: &str, start: usize, end: usize, what: &str) -> Result<u32, String> {
    let s = field(line, start, end);
    if s.is_empty() {
        return Ok(0);
    }
    s.parse::<u32>()
        .map_err(|_| format!("{what}: cannot parse '{s}'"))
}

/// Decodes the "assumed decimal point" exponent notation, e.g. `-11606-4`.
fn parse_exp_field(line: &str, start: usize, end: usize, what: &str) -> Result<f64, String> {
    let raw = field(line, start, end);
    if raw.is_empty() {
        return Ok(0.0);
    }
    let (sign, body) = match raw.as_bytes()[0] {
        b'-' => (-1.0, &raw[1..]),
        b'+' => (1.0, &raw[1..]),
        _ => (1.0, raw),
    };
    let split = body
        .rfind(['-', '+'])
        .filter(|&i| i > 0)
        .ok_or_else(|| format!("{what}: missing exponent in '{raw}'"))?;
    let mantissa: f64 = format!("0.{}", body[..split].trim())
        .parse()
        .map_err(|_| format!("{what}: bad mantissa in '{raw}'"))?;
    let exponent: i32 = body[split..]
        .parse()
        .map_err(|_| format!("{what}: bad exponent in '{raw}'"))?;
    Ok(sign * mantissa * 10f64.powi(exponent))
}

impl TleRecord {
    /// Parses one element set. Validates length, line numbers, checksums,
    /// matching catalog numbers and the value ranges of the elements.
    pub fn from_lines(name: Option<&str>, line1: &str, line2: &str) -> Result<Self, AstroError> {
        Self::parse_lines(name, line1, line2).map_err(AstroError::InvalidTle)
    }

    fn parse_lines(name: Option<&str>, line1: &str, line2: &str) -> Result<Self, String> {
        let l1 = line1.trim_end();
        let l2 = line2.trim_end();
        for (n, l) in [(1, l1), (2, l2)] {
            if !l.is_ascii() {
                return Err(format!("line {n} contains non-ASCII characters"));
            }
            if l.len() != 69 {
                return Err(format!("line {n} has length {} (expected 69)", l.len()));
            }
            if !l.starts_with(&format!("{n} ")) {
                return Err(format!("line {n} does not start with '{n} '"));
            }
            if !checksum_ok(l) {
                return Err(format!(
                    "line {n} checksum mismatch (computed {})",
                    tle_checksum(l)
                ));
            }
        }

        let norad_id = parse_u32(l1, 3, 7, "catalog number")?;
        let norad2 = parse_u32(l2, 3, 7, "catalog number")?;
        if norad_id != norad2 {
            return Err(format!("catalog numbers differ ({norad_id} vs {norad2})"));
        }
        let classification = l1.chars().nth(7).unwrap_or('U');
        let international_designator = field(l1, 10, 17).to_string();
        let yy = parse_u32(l1, 19, 20, "epoch year")? as i32;
        let year = if yy < 57 { 2000 + yy } else { 1900 + yy };
        let day = parse_f64(l1, 21, 32, "epoch day")?;
        if !(1.0..367.0).contains(&day) {
            return Err(format!("epoch day {day} out of range"));
        }
        let epoch = EpochUtc::from_year_day(year, day).map_err(|e| e.to_string())?;
        let mean_motion_dot = parse_f64(l1, 34, 43, "first derivative of mean motion")?;
        let mean_motion_ddot = parse_exp_field(l1, 45, 52, "second derivative of mean motion")?;
        let bstar = parse_exp_field(l1, 54, 61, "bstar")?;
        let element_set_number = parse_u32(l1, 65, 68, "element set number")?;

        let inclination = parse_f64(l2, 9, 16, "inclination")?;
        let raan = parse_f64(l2, 18, 25, "right ascension")?;
        let ecc_digits = field(l2, 27, 33);
        if ecc_digits.is_empty() || !ecc_digits.bytes().all(|b| b.is_ascii_digit()) {
            return Err(format!("eccentricity: cannot parse '{ecc_digits}'"));
        }
        let eccentricity: f64 = format!("0.{ecc_digits}").parse().unwrap();
        let arg_perigee = parse_f64(l2, 35, 42, "argument of perigee")?;
        let mean_anomaly = parse_f64(l2, 44, 51, "mean anomaly")?;
        let mean_motion = parse_f64(l2, 53, 63, "mean motion")?;
        let revolution_number = parse_u32(l2, 64, 68, "revolution number")?;

        if !(0.0..=180.0).contains(&inclination) {
            return Err(format!("inclination {inclination} outside [0, 180]"));
        }
        for (what, v) in [
            ("right ascension", raan),
            ("argument of perigee", arg_perigee),
            ("mean anomaly", mean_anomaly),
        ] {
            if !(0.0..360.0).contains(&v) {
                return Err(format!("{what} {v} outside [0, 360)"));
            }
        }
        if !(mean_motion > 0.0 && mean_motion.is_finite()) {
            return Err(format!("mean motion {mean_motion} must be positive"));
        }

        let record = TleRecord {
            name: name
                .map(|n| n.trim().trim_start_matches("0 ").trim().to_string())
                .filter(|n| !n.is_empty()),
            norad_id,
            classification,
            international_designator,
            epoch,
            mean_motion_dot,
            mean_motion_ddot,
            bstar,
            element_set_number,
            inclination,
            raan,
            eccentricity,
            arg_perigee,
            mean_anomaly,
            mean_motion,
            revolution_number,
            line1: l1.to_string(),
            line2: l2.to_string(),
        };
        let a = record.semi_major_axis_km();
        if !(a.is_finite() && a > 0.0) {
            return Err(format!("derived semi-major axis {a} km is not positive"));
        }
        Ok(record)
    }

    /// Builds a record from elements and renders canonical element lines.
    #[allow(clippy::too_many_arguments)]
    pub fn from_elements(
        name: Option<&str>,
        norad_id: u32,
        epoch: EpochUtc,
        inclination: f64,
        raan: f64,
        eccentricity: f64,
        arg_perigee: f64,
        mean_anomaly: f64,
        mean_motion: f64,
        bstar: f64,
    ) -> Result<Self, AstroError> {
        let (line1, line2) = format_tle_lines(&TleFields {
            norad_id,
            epoch,
            bstar,
            inclination,
            raan,
            eccentricity,
            arg_perigee,
            mean_anomaly,
            mean_motion,
        })?;
        Self::from_lines(name, &line1, &line2)
    }

    pub fn line1(&self) -> &str {
        &self.line1
    }

    pub fn line2(&self) -> &str {
        &self.line2
    }

    /// Kepler semi-major axis from the mean motion, km.
    pub fn semi_major_axis_km(&self) -> f64 {
        let n = self.mean_motion * std::f64::consts::TAU / 86_400.0;
        (MU_EARTH_KM3_S2 / (n * n)).cbrt()
    }

    pub fn period_minutes(&self) -> f64 {
        1440.0 / self.mean_motion
    }

    /// Perigee and apogee heights above the equatorial radius, km.
    pub fn perigee_apogee_altitude_km(&self) -> (f64, f64) {
        let a = self.semi_major_axis_km();
        (
            a * (1.0 - self.eccentricity) - WGS84_A_KM,
            a * (1.0 + self.eccentricity) - WGS84_A_KM,
        )
    }

    /// True when the whole orbit stays within `[lo_km, hi_km]` altitude.
    pub fn within_altitude_band(&self, lo_km: f64, hi_km: f64) -> bool {
        let (perigee, apogee) = self.perigee_apogee_altitude_km();
        perigee >= lo_km && apogee <= hi_km
    }
}

#[derive(Serialize, Deserialize)]
struct TleLines {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    name: Option<String>,
    line1: String,
    line2: String,
}

impl TryFrom<TleLines> for TleRecord {
    type Error = AstroError;
    fn try_from(lines: TleLines) -> Result<Self, Self::Error> {
        TleRecord::from_lines(lines.name.as_deref(), &lines.line1, &lines.line2)
    }
}

impl From<TleRecord> for TleLines {
    fn from(r: TleRecord) -> Self {
        TleLines {
            name: r.name,
            line1: r.line1,
            line2: r.line2,
        }
    }
}

struct TleFields {
    norad_id: u32,
    epoch: EpochUtc,
    bstar: f64,
    inclination: f64,
    raan: f64,
    eccentricity: f64,
    arg_perigee: f64,
    mean_anomaly: f64,
    mean_motion: f64,
}

fn format_exp_field(value: f64) -> String {
    if value == 0.0 {
        return " 00000-0".to_string();
    }
    let sign = if value < 0.0 { '-' } else { ' ' };
    let mut exponent = value.abs().log10().floor() as i32 + 1;
    let mut mantissa = (value.abs() / 10f64.powi(exponent) * 1e5).round() as i64;
    if mantissa >= 100_000 {
        mantissa /= 10;
        exponent += 1;
    }
    let exp_sign = if exponent < 0 { '-' } else { '+' };
    format!("{sign}{mantissa:05}{exp_sign}{}", exponent.abs())
}

fn with_checksum(mut body: String) -> String {
    let sum = tle_checksum(&body);
    body.push(char::from_digit(sum, 10).unwrap());
    body
}

fn format_tle_lines(f: &TleFields) -> Result<(String, String), AstroError> {
    if f.norad_id > 99_999 {
        return Err(AstroError::InvalidTle(format!(
            "catalog number {} does not fit five columns",
            f.norad_id
        )));
    }
    if !(0.0..1.0).contains(&f.eccentricity) {
        return Err(AstroError::InvalidTle(format!(
            "eccentricity {} outside [0, 1)",
            f.eccentricity
        )));
    }
    let dt = f.epoch.to_datetime();
    let year = chrono::Datelike::year(&dt);
    let jan1 = EpochUtc::from_year_day(year, 1.0)?;
    let day = (f.epoch - jan1) / 86_400.0 + 1.0;
    let line1 = format!(
        "1 {:05}U 24001A   {:02}{:012.8}  .00000000  00000-0 {} 0  999",
        f.norad_id,
        year % 100,
        day,
        format_exp_field(f.bstar),
    );
    let ecc = format!("{:.7}", f.eccentricity);
    let line2 = format!(
        "2 {:05} {:8.4} {:8.4} {} {:8.4} {:8.4} {:11.8}    1",
        f.norad_id,
        f.inclination,
        f.raan,
        &ecc[2..],
        f.arg_perigee,
        f.mean_anomaly,
        f.mean_motion,
    );
    Ok((with_checksum(line1), with_checksum(line2)))
}

/// Parses a catalog of 2-line or 3-line element sets.
///
/// Records that fail validation are skipped and reported; the altitude band
/// is not applied here.
pub fn parse_tle_catalog(text: &str) -> TleCatalog {
    let mut catalog = TleCatalog::default();
    let lines: Vec<(usize, &str)> = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim_end()))
        .filter(|(_, l)| !l.trim().is_empty())
        .collect();

    let mut i = 0;
    let mut pending_name: Option<&str> = None;
    while i < lines.len() {
        let (lineno, line) = lines[i];
        if line.starts_with("1 ") {
            match lines.get(i + 1) {
                Some(&(_, next)) if next.starts_with("2 ") => {
                    match TleRecord::parse_lines(pending_name, line, next) {
                        Ok(rec) => catalog.records.push(rec),
                        Err(message) => catalog.diagnostics.push(TleDiagnostic {
                            line: lineno,
                            message,
                        }),
                    }
                    i += 2;
                }
                _ => {
                    catalog.diagnostics.push(TleDiagnostic {
                        line: lineno,
                        message: "element line 1 is not followed by line 2".into(),
                    });
                    i += 1;
                }
            }
            pending_name = None;
        } else if line.starts_with("2 ") {
            catalog.diagnostics.push(TleDiagnostic {
                line: lineno,
                message: "orphan element line 2".into(),
            });
            pending_name = None;
            i += 1;
        } else {
            pending_name = Some(line);
            i += 1;
        }
    }
    catalog
}

#[cfg(test)]
mod tests {
    use super::*;

    // Vanguard 1 element set from the SGP4 verification suite.
    const L1: &str = "1 00005U 58002B   00179.78495062  .00000023  00000-0  28098-4 0  4753";
    const L2: &str = "2 00005  34.2682 348.7242 1859667 331.7664  19.3264 10.82419157413667";

    #[test]
    fn reference_record_fields() {
        let cat = parse_tle_catalog(&format!("{L1}\n{L2}\n"));
        assert!(cat.diagnostics.is_empty(), "{:?}", cat.diagnostics);
        let r = &cat.records[0];
        assert_eq!(r.norad_id, 5);
        assert_eq!(r.international_designator, "58002B");
        assert_eq!(r.inclination, 34.2682);
        assert_eq!(r.raan, 348.7242);
        assert_eq!(r.eccentricity, 0.1859667);
        assert_eq!(r.arg_perigee, 331.7664);
        assert_eq!(r.mean_anomaly, 19.3264);
        assert_eq!(r.mean_motion, 10.82419157);
        assert!((r.bstar - 0.28098e-4).abs() < 1e-15);
        assert_eq!(r.revolution_number, 41366);
        // 2000 day 179.78495062 -> 2000-06-27T18:50:19.734 UTC
        assert_eq!(r.epoch.to_iso(), "2000-06-27T18:50:19.734Z");
    }

    #[test]
    fn empty_input_is_empty_catalog() {
        let cat = parse_tle_catalog("");
        assert!(cat.records.is_empty());
        assert!(cat.diagnostics.is_empty());
    }

    #[test]
    fn corrupted_checksum_is_skipped_with_one_diagnostic() {
        let bad = format!("{}{}", &L2[..68], (L2.as_bytes()[68] - b'0' + 1) % 10);
        let cat = parse_tle_catalog(&format!("{L1}\n{bad}\n"));
        assert!(cat.records.is_empty());
        assert_eq!(cat.diagnostics.len(), 1);
        assert!(cat.diagnostics[0].message.contains("checksum"));
    }

    #[test]
    fn three_line_sets_carry_names_and_bad_records_do_not_poison_others() {
        let text = format!("VANGUARD 1\n{L1}\n{L2}\n1 short line\n2 another\n0 VANGUARD AGAIN\n{L1}\n{L2}\n");
        let cat = parse_tle_catalog(&text);
        assert_eq!(cat.records.len(), 2);
        assert_eq!(cat.records[0].name.as_deref(), Some("VANGUARD 1"));
        assert_eq!(cat.records[1].name.as_deref(), Some("VANGUARD AGAIN"));
        assert_eq!(cat.diagnostics.len(), 1);
    }

    #[test]
    fn exponent_fields() {
        assert_eq!(parse_exp_field(" 00000-0", 1, 8, "x").unwrap(), 0.0);
        let v = parse_exp_field("-11606-4", 1, 8, "x").unwrap();
        assert!((v + 0.11606e-4).abs() < 1e-18);
        assert_eq!(format_exp_field(-0.11606e-4), "-11606-4");
        assert_eq!(format_exp_field(0.28098e-4), " 28098-4");
    }

    #[test]
    fn formatted_elements_parse_back() {
        let epoch = EpochUtc::parse_iso("2024-09-10T12:00:00Z").unwrap();
        let r = TleRecord::from_elements(
            Some("SYNTH"),
            90001,
            epoch,
            97.45,
            123.4567,
            0.0012345,
            90.0,
            270.0,
            15.2,
            3.5e-5,
        )
        .unwrap();
        assert_eq!(r.line1().len(), 69);
        assert_eq!(r.epoch, epoch);
        assert_eq!(r.inclination, 97.45);
        assert_eq!(r.eccentricity, 0.0012345);
        assert!((r.bstar - 3.5e-5).abs() < 1e-12);
        let (perigee, apogee) = r.perigee_apogee_altitude_km();
        assert!(perigee > 480.0 && apogee < 530.0, "{perigee} {apogee}");
    }

    #[test]
    fn serde_uses_raw_lines() {
        let r = TleRecord::from_lines(Some("V1"), L1, L2).unwrap();
        let json = serde_json::to_string(&r).unwrap();
        assert!(json.contains("line1"));
        let back: TleRecord = serde_json::from_str(&json).unwrap();
        assert_eq!(back, r);
    }
}
