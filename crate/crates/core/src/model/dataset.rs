use std::collections::BTreeSet;
use std::path::Path;

use super::{Band, ModelError, Provider, StationLocation, StationStatus};
use crate::astro::GeodeticPoint;

/// The provider station table shipped with the crate.
pub const BUNDLED_STATIONS_CSV: &str = include_str!("../../data/stations.csv");

/// Synthetic LEO catalog used when no TLE file is given.
pub const BUNDLED_SAMPLE_TLES: &str = include_str!("../../data/sample_catalog.tle");

const HEADER: [&str; 7] = [
    "provider",
    "location",
    "country",
    "longitude_deg",
    "latitude_deg",
    "bands",
    "status",
];

// Midpoints of the randomisation ranges, used until a scenario is randomised.
pub(crate) const DEFAULT_INTEGRATION_COST: f64 = 125_000.0;
pub(crate) const DEFAULT_SETUP_COST: f64 = 55_000.0;
pub(crate) const DEFAULT_MONTHLY_COST: f64 = 2_600.0;
pub(crate) const DEFAULT_LICENSE_COST: f64 = 3_000.0;
pub(crate) const DEFAULT_PASS_COST: f64 = 100.0;
pub(crate) const DEFAULT_STATION_RATE: f64 = 1.5e9;

#[derive(Clone, Debug, Default)]
pub struct StationDataset {
    pub providers: Vec<Provider>,
    pub stations: Vec<StationLocation>,
    /// One message per rejected row.
    pub diagnostics: Vec<String>,
}

impl StationDataset {
    pub fn count_with_status(&self, status: StationStatus) -> usize {
        self.stations.iter().filter(|s| s.status == status).count()
    }

    pub fn provider(&self, id: u32) -> Option<&Provider> {
        self.providers.iter().find(|p| p.id == id)
    }
}

pub fn load_station_dataset(path: impl AsRef<Path>) -> Result<StationDataset, ModelError> {
    let text = std::fs::read_to_string(path)?;
    parse_station_csv(&text)
}

pub fn bundled_station_dataset() -> StationDataset {
    parse_station_csv(BUNDLED_STATIONS_CSV).expect("bundled station table is well-formed")
}

/// Parses the station table. Bad rows are skipped and reported; a missing or
/// wrong header is an error.
pub fn parse_station_csv(text: &str) -> Result<StationDataset, ModelError> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .flexible(true)
        .from_reader(text.as_bytes());
    let headers = reader
        .headers()
        .map_err(|e| ModelError::Dataset(e.to_string()))?
        .clone();
    let found: Vec<&str> = headers.iter().collect();
    if found != HEADER {
        return Err(ModelError::Dataset(format!(
            "expected header '{}', found '{}'",
            HEADER.join(","),
            found.join(",")
        )));
    }

    let mut out = StationDataset::default();
    for (row, record) in reader.records().enumerate() {
        let line = row + 2;
        let record = match record {
            Ok(r) => r,
            Err(e) => {
                out.diagnostics.push(format!("line {line}: {e}"));
                continue;
            }
        };
        if record.len() != HEADER.len() {
            out.diagnostics.push(format!(
                "line {line}: expected {} fields, found {}",
                HEADER.len(),
                record.len()
            ));
            continue;
        }
        match parse_row(&record) {
            Ok((provider, mut station)) => {
                let provider_id = match out.providers.iter().find(|p| p.name == provider) {
                    Some(p) => p.id,
                    None => {
                        let id = out.providers.len() as u32;
                        out.providers.push(Provider {
                            id,
                            name: provider,
                            integration_cost: DEFAULT_INTEGRATION_COST,
                        });
                        id
                    }
                };
                station.id = out.stations.len() as u32;
                station.provider_id = provider_id;
                out.stations.push(station);
            }
            Err(msg) => out.diagnostics.push(format!("line {line}: {msg}")),
        }
    }
    Ok(out)
}

fn parse_row(r: &csv::StringRecord) -> Result<(String, StationLocation), String> {
    let provider = r[0].to_string();
    let name = r[1].to_string();
    if provider.is_empty() || name.is_empty() {
        return Err("provider and location are required".into());
    }
    let coord = |idx: usize, what: &str| -> Result<f64, String> {
        let field = &r[idx];
        if field.is_empty() {
            return Err(format!("missing {what}"));
        }
        field
            .parse::<f64>()
            .map_err(|_| format!("bad {what} '{field}'"))
    };
    let longitude = coord(3, "longitude")?;
    let latitude = coord(4, "latitude")?;
    let geodetic = GeodeticPoint::new(latitude, longitude, 0.0).map_err(|e| e.to_string())?;
    let bands = r[5]
        .split(';')
        .filter(|t| !t.trim().is_empty())
        .map(|t| t.parse::<Band>().map_err(|e| e.to_string()))
        .collect::<Result<BTreeSet<_>, _>>()?;
    let status = r[6].parse::<StationStatus>().map_err(|e| e.to_string())?;
    Ok((
        provider,
        StationLocation {
            id: 0,
            provider_id: 0,
            name,
            country: r[2].to_string(),
            geodetic,
            bands,
            status,
            data_rate: DEFAULT_STATION_RATE,
            setup_cost: DEFAULT_SETUP_COST,
            monthly_cost: DEFAULT_MONTHLY_COST,
            license_cost: DEFAULT_LICENSE_COST,
            per_pass_cost: DEFAULT_PASS_COST,
            per_minute_cost: 0.0,
        },
    ))
}

/// Stations supporting every band in `required`. Only operational stations are
/// kept unless `include_non_operational` is set.
pub fn filter_stations_by_bands(
    stations: &[StationLocation],
    required: &BTreeSet<Band>,
    include_non_operational: bool,
) -> Vec<StationLocation> {
    stations
        .iter()
        .filter(|s| include_non_operational || s.status == StationStatus::Operational)
        .filter(|s| required.is_subset(&s.bands))
        .cloned()
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bundled_table_has_six_providers() {
        let d = bundled_station_dataset();
        assert!(d.diagnostics.is_empty(), "{:?}", d.diagnostics);
        let names: Vec<_> = d.providers.iter().map(|p| p.name.as_str()).collect();
        assert_eq!(names, ["Atlas", "AWS", "Azure", "KSAT", "Leaf", "Viasat"]);
    }

    #[test]
    fn svalbard_row() {
        let d = bundled_station_dataset();
        let s = d.stations.iter().find(|s| s.name == "Svalbard").unwrap();
        assert_eq!(d.provider(s.provider_id).unwrap().name, "KSAT");
        assert_eq!((s.geodetic.longitude, s.geodetic.latitude), (15.41, 78.23));
        assert_eq!(s.bands, BTreeSet::from([Band::S, Band::X, Band::Ka]));
        assert_eq!(s.status, StationStatus::Operational);
    }

    #[test]
    fn s_and_x_filter_drops_single_band_sites() {
        let d = bundled_station_dataset();
        let kept = filter_stations_by_bands(&d.stations, &BTreeSet::from([Band::S, Band::X]), false);
        assert!(!kept.iter().any(|s| s.name == "Sunyani"));
        assert!(!kept.iter().any(|s| s.name == "Vardo"));
        assert!(kept.iter().any(|s| s.name == "Svalbard"));
    }

    #[test]
    fn empty_requirement_keeps_all_operational() {
        let d = bundled_station_dataset();
        let kept = filter_stations_by_bands(&d.stations, &BTreeSet::new(), false);
        assert_eq!(kept.len(), d.count_with_status(StationStatus::Operational));
    }

    #[test]
    fn ka_filter_matches_recount_of_raw_text() {
        let d = bundled_station_dataset();
        let kept = filter_stations_by_bands(&d.stations, &BTreeSet::from([Band::Ka]), false);
        let recount = BUNDLED_STATIONS_CSV
            .lines()
            .skip(1)
            .filter(|l| l.ends_with(",Operational"))
            .filter(|l| l.rsplit(',').nth(1).unwrap().split(';').any(|b| b == "Ka"))
            .count();
        assert_eq!(kept.len(), recount);
        assert_eq!(recount, 14);
    }

    #[test]
    fn bad_rows_are_reported_not_fatal() {
        let text = "provider,location,country,longitude_deg,latitude_deg,bands,status\n\
                    P,A,C,1.0,2.0,S;Q,Operational\n\
                    P,B,C,,2.0,S,Operational\n\
                    P,D,C,1.0,2.0,S;X,Operational\n";
        let d = parse_station_csv(text).unwrap();
        assert_eq!(d.stations.len(), 1);
        assert_eq!(d.diagnostics.len(), 2);
        assert!(d.diagnostics[0].contains("band"));
        assert!(d.diagnostics[1].contains("longitude"));
    }

    #[test]
    fn wrong_header_is_an_error() {
        assert!(parse_station_csv("a,b\n1,2\n").is_err());
    }
}
