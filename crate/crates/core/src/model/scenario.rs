use std::collections::BTreeSet;
use std::path::Path;

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::config::{ConstraintConfig, ContactSettings};
use super::dataset::filter_stations_by_bands;
use super::{Band, ModelError, Provider, Satellite, StationLocation};
use crate::astro::{EpochUtc, TleRecord};

/// Perigee/apogee band for experiment satellites, km.
pub const ALTITUDE_BAND_KM: (f64, f64) = (300.0, 1000.0);

const DEFAULT_SATELLITE_RATE: f64 = 1.35e9;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub satellites: Vec<Satellite>,
    pub providers: Vec<Provider>,
    pub stations: Vec<StationLocation>,
    pub t_sim_start: EpochUtc,
    pub t_sim_end: EpochUtc,
    pub t_opt_start: EpochUtc,
    pub t_opt_end: EpochUtc,
    pub config: ConstraintConfig,
    #[serde(default)]
    pub contact: ContactSettings,
    pub seed: u64,
}

impl Scenario {
    /// Scenario over the default one-week simulation and one-year mission.
    pub fn new(
        providers: Vec<Provider>,
        stations: Vec<StationLocation>,
        satellites: Vec<Satellite>,
    ) -> Self {
        let start = EpochUtc::parse_iso("2024-09-11T00:00:00Z").expect("constant epoch");
        Scenario {
            satellites,
            providers,
            stations,
            t_sim_start: start,
            t_sim_end: EpochUtc::parse_iso("2024-09-18T00:00:00Z").expect("constant epoch"),
            t_opt_start: start,
            t_opt_end: EpochUtc::parse_iso("2025-09-11T00:00:00Z").expect("constant epoch"),
            config: ConstraintConfig::default(),
            contact: ContactSettings::default(),
            seed: 0,
        }
    }

    pub fn t_sim(&self) -> f64 {
        self.t_sim_end - self.t_sim_start
    }

    pub fn t_opt(&self) -> f64 {
        self.t_opt_end - self.t_opt_start
    }

    pub fn provider(&self, id: u32) -> Option<&Provider> {
        self.providers.iter().find(|p| p.id == id)
    }

    pub fn station(&self, id: u32) -> Option<&StationLocation> {
        self.stations.iter().find(|s| s.id == id)
    }

    pub fn satellite(&self, id: u32) -> Option<&Satellite> {
        self.satellites.iter().find(|s| s.id == id)
    }

    pub fn provider_name(&self, id: u32) -> &str {
        self.provider(id).map(|p| p.name.as_str()).unwrap_or("?")
    }

    /// `provider/location`, the form used by `required_locations`.
    pub fn station_key(&self, station: &StationLocation) -> String {
        format!("{}/{}", self.provider_name(station.provider_id), station.name)
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        if self.t_sim() <= 0.0 {
            return Err(ModelError::Scenario(
                "simulation end must be after simulation start".into(),
            ));
        }
        if self.t_opt() < self.t_sim() {
            return Err(ModelError::Scenario(
                "mission span must be at least the simulation span".into(),
            ));
        }
        if !(self.contact.coarse_step_s.is_finite() && self.contact.coarse_step_s > 0.0) {
            return Err(ModelError::Config("coarse_step_s must be positive".into()));
        }
        if !(-90.0..=90.0).contains(&self.contact.min_elevation_deg) {
            return Err(ModelError::Config(
                "min_elevation_deg must lie in [-90, 90]".into(),
            ));
        }
        self.config.validate(self.t_sim())?;
        for p in &self.providers {
            if !(p.integration_cost.is_finite() && p.integration_cost >= 0.0) {
                return Err(ModelError::Scenario(format!(
                    "provider {} has a negative integration cost",
                    p.name
                )));
            }
        }
        let mut seen = BTreeSet::new();
        for s in &self.stations {
            s.validate()?;
            if self.provider(s.provider_id).is_none() {
                return Err(ModelError::Scenario(format!(
                    "station {} refers to unknown provider id {}",
                    s.name, s.provider_id
                )));
            }
            if !seen.insert(s.id) {
                return Err(ModelError::Scenario(format!("duplicate station id {}", s.id)));
            }
        }
        for sat in &self.satellites {
            sat.validate()?;
        }
        for name in &self.config.required_providers {
            if !self.providers.iter().any(|p| &p.name == name) {
                return Err(ModelError::Config(format!("required provider '{name}' is unknown")));
            }
        }
        for key in &self.config.required_locations {
            if !self.stations.iter().any(|s| &self.station_key(s) == key) {
                return Err(ModelError::Config(format!(
                    "required location '{key}' is unknown (expected provider/location)"
                )));
            }
        }
        Ok(())
    }

    /// Applies the band and status pre-filter from the configuration.
    pub fn prefiltered(&self) -> Scenario {
        let mut out = self.clone();
        out.stations = filter_stations_by_bands(
            &self.stations,
            &self.config.required_bands,
            self.config.include_non_operational,
        );
        out
    }

    /// Copy restricted to the given providers and their stations.
    pub fn restricted_to_providers(&self, provider_ids: &BTreeSet<u32>) -> Scenario {
        let mut out = self.clone();
        out.providers.retain(|p| provider_ids.contains(&p.id));
        out.stations.retain(|s| provider_ids.contains(&s.provider_id));
        out
    }

    pub fn to_json(&self) -> Result<String, ModelError> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self, ModelError> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<(), ModelError> {
        std::fs::write(path, self.to_json()? + "\n")?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, ModelError> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }
}

/// Resamples every cost and rate constant uniformly from its scenario range.
///
/// Each station flips a fair coin between per-pass and per-minute pricing and
/// the other rate is zeroed. Deterministic in `seed`.
pub fn randomize_scenario(base: &Scenario, seed: u64) -> Scenario {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = base.clone();
    out.seed = seed;
    for p in &mut out.providers {
        p.integration_cost = rng.random_range(50_000.0..=200_000.0);
    }
    for s in &mut out.stations {
        s.setup_cost = rng.random_range(10_000.0..=100_000.0);
        s.monthly_cost = rng.random_range(200.0..=5_000.0);
        s.license_cost = rng.random_range(1_000.0..=5_000.0);
        let pass = rng.random_range(25.0..=175.0);
        let minute = rng.random_range(5.0..=35.0);
        s.data_rate = rng.random_range(1.2e9..=1.8e9);
        if rng.random_bool(0.5) {
            s.per_pass_cost = pass;
            s.per_minute_cost = 0.0;
        } else {
            s.per_pass_cost = 0.0;
            s.per_minute_cost = minute;
        }
    }
    for sat in &mut out.satellites {
        sat.data_rate = rng.random_range(9e8..=1.8e9);
    }
    out
}

/// Draws `n` distinct catalog objects whose whole orbit lies in the
/// [`ALTITUDE_BAND_KM`] band, in draw order, with ids `0..n`.
pub fn sample_satellites(
    records: &[TleRecord],
    n: usize,
    seed: u64,
) -> Result<Vec<Satellite>, ModelError> {
    let eligible: Vec<&TleRecord> = records
        .iter()
        .filter(|r| r.within_altitude_band(ALTITUDE_BAND_KM.0, ALTITUDE_BAND_KM.1))
        .collect();
    if n > eligible.len() {
        return Err(ModelError::Scenario(format!(
            "asked for {n} satellites but only {} catalog objects lie in {}-{} km",
            eligible.len(),
            ALTITUDE_BAND_KM.0,
            ALTITUDE_BAND_KM.1
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let picks = index::sample(&mut rng, eligible.len(), n);
    Ok(picks
        .iter()
        .enumerate()
        .map(|(id, k)| satellite_from_record(id as u32, eligible[k]))
        .collect())
}

pub(crate) fn satellite_from_record(id: u32, record: &TleRecord) -> Satellite {
    Satellite {
        id,
        name: record
            .name
            .clone()
            .unwrap_or_else(|| format!("NORAD {}", record.norad_id)),
        tle: record.clone(),
        data_rate: DEFAULT_SATELLITE_RATE,
        supported_bands: BTreeSet::from([Band::S, Band::X]),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::bundled_station_dataset;

    fn base() -> Scenario {
        let d = bundled_station_dataset();
        let e = EpochUtc::parse_iso("2024-09-10T00:00:00Z").unwrap();
        let recs: Vec<TleRecord> = (0..4)
            .map(|k| {
                TleRecord::from_elements(None, 100 + k, e, 50.0 + k as f64, 10.0, 0.001, 0.0, 0.0, 15.0, 1e-4)
                    .unwrap()
            })
            .collect();
        let sats = sample_satellites(&recs, 2, 3).unwrap();
        Scenario::new(d.providers, d.stations, sats)
    }

    #[test]
    fn sampled_values_lie_in_ranges_and_pricing_is_exclusive() {
        let s = randomize_scenario(&base(), 11);
        s.validate().unwrap();
        for p in &s.providers {
            assert!((50_000.0..=200_000.0).contains(&p.integration_cost));
        }
        let mut modes = BTreeSet::new();
        for st in &s.stations {
            assert!((10_000.0..=100_000.0).contains(&st.setup_cost));
            assert!((200.0..=5_000.0).contains(&st.monthly_cost));
            assert!((1_000.0..=5_000.0).contains(&st.license_cost));
            assert!((1.2e9..=1.8e9).contains(&st.data_rate));
            if st.per_pass_cost != 0.0 {
                assert!((25.0..=175.0).contains(&st.per_pass_cost));
                assert_eq!(st.per_minute_cost, 0.0);
                modes.insert("pass");
            } else {
                assert!((5.0..=35.0).contains(&st.per_minute_cost));
                modes.insert("minute");
            }
        }
        assert_eq!(modes.len(), 2);
        for sat in &s.satellites {
            assert!((9e8..=1.8e9).contains(&sat.data_rate));
        }
    }

    #[test]
    fn same_seed_same_scenario() {
        let b = base();
        assert_eq!(randomize_scenario(&b, 5), randomize_scenario(&b, 5));
    }

    #[test]
    fn different_seeds_differ() {
        let b = base();
        for k in 0..10u64 {
            let (x, y) = (randomize_scenario(&b, 2 * k), randomize_scenario(&b, 2 * k + 1));
            assert_ne!(x.stations, y.stations);
        }
    }

    #[test]
    fn json_round_trip_is_lossless() {
        let s = randomize_scenario(&base(), 99);
        let back = Scenario::from_json(&s.to_json().unwrap()).unwrap();
        assert_eq!(s, back);
    }

    #[test]
    fn default_spans() {
        let s = base();
        assert_eq!(s.t_sim(), 7.0 * 86_400.0);
        assert_eq!(s.t_opt(), 365.0 * 86_400.0);
    }

    #[test]
    fn sampling_respects_altitude_band_and_is_without_replacement() {
        let e = EpochUtc::parse_iso("2024-09-10T00:00:00Z").unwrap();
        let mut recs = Vec::new();
        for k in 0..30u32 {
            // Alternate 15 rev/day (about 550 km) with 12 rev/day (about 1600 km).
            let n = if k % 2 == 0 { 15.0 } else { 12.0 };
            recs.push(TleRecord::from_elements(None, k + 1, e, 60.0, 0.0, 0.001, 0.0, 0.0, n, 0.0).unwrap());
        }
        let sats = sample_satellites(&recs, 15, 1).unwrap();
        let ids: BTreeSet<_> = sats.iter().map(|s| s.tle.norad_id).collect();
        assert_eq!(ids.len(), 15);
        assert!(sats.iter().all(|s| s.tle.mean_motion == 15.0));
        assert!(sample_satellites(&recs, 16, 1).is_err());
    }

    #[test]
    fn unknown_required_location_is_a_config_error() {
        let mut s = base();
        s.config.required_locations = vec!["KSAT/Atlantis".into()];
        assert!(matches!(s.validate(), Err(ModelError::Config(_))));
        s.config.required_locations = vec!["KSAT/Svalbard".into()];
        s.validate().unwrap();
    }
}
