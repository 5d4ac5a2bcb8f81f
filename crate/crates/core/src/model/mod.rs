//! Providers, stations, satellites, cost constants and scenario configuration.

mod config;
mod dataset;
mod scenario;

pub use config::{ConstraintConfig, ContactSettings, Objective};
pub use dataset::{
    bundled_station_dataset, filter_stations_by_bands, load_station_dataset, parse_station_csv,
    StationDataset, BUNDLED_SAMPLE_TLES, BUNDLED_STATIONS_CSV,
};
pub use scenario::{randomize_scenario, sample_satellites, Scenario, ALTITUDE_BAND_KM};

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::astro::{GeodeticPoint, TleRecord};

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("station dataset: {0}")]
    Dataset(String),
    #[error("configuration: {0}")]
    Config(String),
    #[error("scenario: {0}")]
    Scenario(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Band {
    #[serde(rename = "UHF")]
    Uhf,
    L,
    S,
    X,
    Ka,
}

impl FromStr for Band {
    type Err = ModelError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_uppercase().as_str() {
            "UHF" => Ok(Band::Uhf),
            "L" => Ok(Band::L),
            "S" => Ok(Band::S),
            "X" => Ok(Band::X),
            "KA" => Ok(Band::Ka),
            other => Err(ModelError::Dataset(format!("unknown band '{other}'"))),
        }
    }
}

impl fmt::Display for Band {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Band::Uhf => "UHF",
            Band::L => "L",
            Band::S => "S",
            Band::X => "X",
            Band::Ka => "Ka",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum StationStatus {
    Operational,
    Planned,
    Potential,
    Decommissioned,
}

impl FromStr for StationStatus {
    type Err = ModelError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "operational" => Ok(StationStatus::Operational),
            "planned" => Ok(StationStatus::Planned),
            "potential" => Ok(StationStatus::Potential),
            // The source table spells it with one 'm'.
            "decommissioned" | "decomissioned" => Ok(StationStatus::Decommissioned),
            other => Err(ModelError::Dataset(format!("unknown status '{other}'"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Provider {
    pub id: u32,
    pub name: String,
    pub integration_cost: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StationLocation {
    pub id: u32,
    pub provider_id: u32,
    pub name: String,
    pub country: String,
    pub geodetic: GeodeticPoint,
    pub bands: BTreeSet<Band>,
    pub status: StationStatus,
    /// bits/s
    pub data_rate: f64,
    pub setup_cost: f64,
    pub monthly_cost: f64,
    pub license_cost: f64,
    pub per_pass_cost: f64,
    pub per_minute_cost: f64,
}

impl StationLocation {
    pub fn validate(&self) -> Result<(), ModelError> {
        let costs = [
            self.setup_cost,
            self.monthly_cost,
            self.license_cost,
            self.per_pass_cost,
            self.per_minute_cost,
        ];
        if costs.iter().any(|c| !c.is_finite() || *c < 0.0) {
            return Err(ModelError::Scenario(format!(
                "station {} has a negative or non-finite cost",
                self.name
            )));
        }
        if !(self.data_rate.is_finite() && self.data_rate > 0.0) {
            return Err(ModelError::Scenario(format!(
                "station {} needs a positive data rate",
                self.name
            )));
        }
        if (self.per_pass_cost != 0.0) == (self.per_minute_cost != 0.0) {
            return Err(ModelError::Scenario(format!(
                "station {} must have exactly one of per-pass or per-minute pricing",
                self.name
            )));
        }
        self.geodetic
            .validate()
            .map_err(|e| ModelError::Scenario(format!("station {}: {e}", self.name)))
    }

    /// Cost of taking one contact of `duration_s` seconds.
    pub fn contact_cost(&self, duration_s: f64) -> f64 {
        self.per_minute_cost * duration_s / 60.0 + self.per_pass_cost
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Satellite {
    pub id: u32,
    pub name: String,
    pub tle: TleRecord,
    /// bits/s
    pub data_rate: f64,
    pub supported_bands: BTreeSet<Band>,
}

impl Satellite {
    pub fn validate(&self) -> Result<(), ModelError> {
        if self.data_rate.is_finite() && self.data_rate > 0.0 {
            Ok(())
        } else {
            Err(ModelError::Scenario(format!(
                "satellite {} needs a positive data rate",
                self.name
            )))
        }
    }
}

/// Identifier-safe rendering of a display name (used for model tags).
pub fn sanitize_tag(name: &str) -> String {
    let mut out: String = name
        .chars()
        .map(|c| if c.is_ascii_alphanumeric() { c } else { '_' })
        .collect();
    if out.is_empty() {
        out.push('_');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn band_tokens() {
        assert_eq!("ka".parse::<Band>().unwrap(), Band::Ka);
        assert_eq!("UHF".parse::<Band>().unwrap(), Band::Uhf);
        assert!("C".parse::<Band>().is_err());
    }

    #[test]
    fn status_accepts_source_spelling() {
        assert_eq!(
            "Decomissioned".parse::<StationStatus>().unwrap(),
            StationStatus::Decommissioned
        );
    }

    #[test]
    fn tags_are_identifier_safe() {
        assert_eq!(sanitize_tag("Punta Arenas"), "Punta_Arenas");
        assert_eq!(sanitize_tag("Leaf"), "Leaf");
    }
}
