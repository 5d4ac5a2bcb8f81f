use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{Band, ModelError};
use crate::astro::PropagatorKind;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Objective {
    #[default]
    MinCost,
    MaxData,
    MinMaxGap,
}

impl FromStr for Objective {
    type Err = ModelError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "min_cost" => Ok(Objective::MinCost),
            "max_data" => Ok(Objective::MaxData),
            "min_max_gap" => Ok(Objective::MinMaxGap),
            other => Err(ModelError::Config(format!(
                "unknown objective '{other}' (expected min_cost, max_data or min_max_gap)"
            ))),
        }
    }
}

impl fmt::Display for Objective {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Objective::MinCost => "min_cost",
            Objective::MaxData => "max_data",
            Objective::MinMaxGap => "min_max_gap",
        })
    }
}

/// Problem variant plus the design constants of every constraint family.
///
/// The per-satellite downlink floor (`d_s_min`) and the monthly cost cap
/// (`e_max`) are part of the composed problem of each objective: min-cost
/// uses the floor, max-data uses the cap, min-max-gap uses both. A value set
/// for a family outside that list is ignored by the builders. Every other
/// optional family is added whenever its field is present.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ConstraintConfig {
    pub objective: Objective,
    /// Constellation downlink floor per sliding window, bits.
    pub d_min: Option<f64>,
    /// Per-satellite downlink floor per sliding window, bits.
    pub d_s_min: Option<f64>,
    /// Sliding window length, seconds.
    pub t_period: f64,
    /// Sliding window start increment, seconds.
    pub t_step: f64,
    /// Monthly operational cost cap.
    pub e_max: Option<f64>,
    pub station_exclusion: bool,
    pub satellite_exclusion: bool,
    /// Upper bound on any gap between consecutive selected contacts, seconds.
    pub g_max_limit: Option<f64>,
    pub p_max: Option<u32>,
    /// Contacts shorter than this many seconds are never selected.
    pub t_min: f64,
    pub n_min: Option<u32>,
    /// Provider names that must be selected.
    pub required_providers: Vec<String>,
    /// Stations that must be selected, as `provider/location`.
    pub required_locations: Vec<String>,
    pub m_min: Option<u32>,
    pub m_max: Option<u32>,
    pub required_bands: BTreeSet<Band>,
    pub include_non_operational: bool,
    /// Count the gaps from the simulation start to the first contact and from
    /// the last contact to the simulation end.
    pub count_boundary_gaps: bool,
    /// Successor pairs considered per contact in the gap machinery.
    pub gap_successor_horizon: usize,
}

impl Default for ConstraintConfig {
    fn default() -> Self {
        ConstraintConfig {
            objective: Objective::MinCost,
            d_min: None,
            d_s_min: Some(1e11),
            t_period: 86_400.0,
            t_step: 3_600.0,
            e_max: Some(1e6),
            station_exclusion: true,
            satellite_exclusion: true,
            g_max_limit: None,
            p_max: None,
            t_min: 180.0,
            n_min: None,
            required_providers: Vec::new(),
            required_locations: Vec::new(),
            m_min: None,
            m_max: None,
            required_bands: BTreeSet::new(),
            include_non_operational: false,
            count_boundary_gaps: false,
            gap_successor_horizon: 25,
        }
    }
}

impl ConstraintConfig {
    pub fn uses_satellite_downlink_floor(&self) -> bool {
        matches!(self.objective, Objective::MinCost | Objective::MinMaxGap)
    }

    pub fn uses_monthly_cost_cap(&self) -> bool {
        matches!(self.objective, Objective::MaxData | Objective::MinMaxGap)
    }

    /// Checks internal consistency against a simulation span of `t_sim` seconds.
    pub fn validate(&self, t_sim: f64) -> Result<(), ModelError> {
        let err = |m: String| Err(ModelError::Config(m));
        if !(self.t_step.is_finite() && self.t_step > 0.0) {
            return err(format!("t_step must be positive, got {}", self.t_step));
        }
        if !(self.t_period.is_finite() && self.t_period > 0.0) {
            return err(format!("t_period must be positive, got {}", self.t_period));
        }
        if self.t_period > t_sim {
            return err(format!(
                "t_period {} s exceeds the simulation span {} s",
                self.t_period, t_sim
            ));
        }
        if !(self.t_min.is_finite() && self.t_min >= 0.0) {
            return err(format!("t_min must be non-negative, got {}", self.t_min));
        }
        for (name, v) in [
            ("d_min", self.d_min),
            ("d_s_min", self.d_s_min),
            ("e_max", self.e_max),
            ("g_max_limit", self.g_max_limit),
        ] {
            if let Some(v) = v {
                if !(v.is_finite() && v >= 0.0) {
                    return err(format!("{name} must be finite and non-negative, got {v}"));
                }
            }
        }
        if let (Some(lo), Some(hi)) = (self.m_min, self.m_max) {
            if lo > hi {
                return err(format!("m_min {lo} exceeds m_max {hi}"));
            }
        }
        if self.gap_successor_horizon == 0 {
            return err("gap_successor_horizon must be at least 1".into());
        }
        match self.objective {
            Objective::MaxData if self.e_max.is_none() => err(
                "objective max_data requires the maximum monthly operational cost constraint \
                 (e_max); without it every station would be selected"
                    .into(),
            ),
            Objective::MinMaxGap if self.e_max.is_none() || self.d_s_min.is_none() => err(
                "objective min_max_gap requires both e_max (monthly operational cost cap) and \
                 d_s_min (per-satellite downlink floor)"
                    .into(),
            ),
            Objective::MinMaxGap if self.g_max_limit.is_some() => err(
                "g_max_limit duplicates the min_max_gap objective; drop one of them".into(),
            ),
            _ => Ok(()),
        }
    }
}

/// Visibility search parameters.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ContactSettings {
    pub min_elevation_deg: f64,
    pub coarse_step_s: f64,
    pub propagator: PropagatorKind,
}

impl Default for ContactSettings {
    fn default() -> Self {
        ContactSettings {
            min_elevation_deg: 10.0,
            coarse_step_s: 30.0,
            propagator: PropagatorKind::Sgp4,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const WEEK: f64 = 7.0 * 86_400.0;

    #[test]
    fn defaults_are_the_design_table() {
        let c = ConstraintConfig::default();
        assert_eq!(c.d_s_min, Some(1e11));
        assert_eq!(c.t_period, 86_400.0);
        assert_eq!(c.t_step, 3_600.0);
        assert_eq!(c.t_min, 180.0);
        assert_eq!(c.e_max, Some(1e6));
        c.validate(WEEK).unwrap();
    }

    #[test]
    fn max_data_without_cap_is_rejected() {
        let c = ConstraintConfig {
            objective: Objective::MaxData,
            e_max: None,
            ..Default::default()
        };
        let msg = c.validate(WEEK).unwrap_err().to_string();
        assert!(msg.contains("e_max"), "{msg}");
    }

    #[test]
    fn inverted_station_count_bounds_are_rejected() {
        let c = ConstraintConfig {
            m_min: Some(3),
            m_max: Some(2),
            ..Default::default()
        };
        assert!(c.validate(WEEK).is_err());
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let r: Result<ConstraintConfig, _> = serde_json::from_str(r#"{"objectiv": "max_data"}"#);
        assert!(r.is_err());
    }

    #[test]
    fn period_longer_than_simulation_is_rejected() {
        assert!(ConstraintConfig::default().validate(3_600.0).is_err());
    }
}
