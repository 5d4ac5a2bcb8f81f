use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use crate::contacts::ContactWindow;
use crate::formulation::{scale_factors, IpModel, VarKind};
use crate::model::Scenario;

/// Mission-level figures recomputed from an assignment.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MissionMetrics {
    pub total_mission_cost: f64,
    /// Bits over the mission span.
    pub total_data_downlink: f64,
    pub max_gap: f64,
    pub mean_gap: f64,
    pub max_gap_per_satellite: BTreeMap<u32, f64>,
    /// Per satellite, simulation start to first selected contact and last
    /// selected contact to simulation end; not part of `max_gap`.
    pub boundary_gaps: BTreeMap<u32, [f64; 2]>,
    pub monthly_operational_cost: f64,
    pub contacts_per_day: f64,
    pub selected_contacts: usize,
    pub selected_stations: usize,
    pub selected_providers: usize,
}

/// Gaps between consecutive selected contacts of each satellite, ordered by
/// start time; overlapping successors contribute nothing.
pub(crate) fn satellite_gaps(selected: &[&ContactWindow]) -> BTreeMap<u32, Vec<f64>> {
    let mut by_sat: BTreeMap<u32, Vec<&ContactWindow>> = BTreeMap::new();
    for c in selected {
        by_sat.entry(c.satellite_id).or_default().push(c);
    }
    by_sat
        .into_iter()
        .map(|(sat, mut cs)| {
            cs.sort_by(|a, b| (a.start, a.id).cmp(&(b.start, b.id)));
            let gaps = cs.windows(2).map(|w| (w[1].start - w[0].end).max(0.0)).collect();
            (sat, gaps)
        })
        .collect()
}

pub fn compute_metrics(model: &IpModel, x: &[f64], scenario: &Scenario, contacts: &[ContactWindow]) -> MissionMetrics {
    let f = scale_factors(scenario.t_sim(), scenario.t_opt());
    let by_id: HashMap<u32, &ContactWindow> = contacts.iter().map(|c| (c.id, c)).collect();
    let mut one_time = 0.0;
    let mut monthly_fees = 0.0;
    let mut sim_contact_cost = 0.0;
    let mut sim_bits = 0.0;
    let mut chosen: Vec<&ContactWindow> = Vec::new();
    let (mut stations, mut providers) = (0, 0);
    for v in &model.variables {
        if x[v.index] <= 0.5 {
            continue;
        }
        match v.kind {
            VarKind::Provider { provider_id } => {
                providers += 1;
                one_time += scenario.provider(provider_id).map_or(0.0, |p| p.integration_cost);
            }
            VarKind::Location { station_id } => {
                stations += 1;
                if let Some(s) = scenario.station(station_id) {
                    one_time += s.setup_cost;
                    monthly_fees += s.monthly_cost;
                }
            }
            VarKind::VehicleLicense { station_id, .. } => {
                one_time += scenario.station(station_id).map_or(0.0, |s| s.license_cost);
            }
            VarKind::Contact { contact_id } => {
                if let Some(c) = by_id.get(&contact_id) {
                    chosen.push(c);
                    sim_bits += c.data_volume();
                    sim_contact_cost += scenario.station(c.station_id).map_or(0.0, |s| s.contact_cost(c.duration));
                }
            }
            _ => {}
        }
    }
    let gaps = satellite_gaps(&chosen);
    let max_gap_per_satellite: BTreeMap<u32, f64> = gaps
        .iter()
        .map(|(s, g)| (*s, g.iter().copied().fold(0.0, f64::max)))
        .collect();
    let all: Vec<f64> = gaps.values().flatten().copied().collect();
    let boundary_gaps = scenario
        .satellites
        .iter()
        .map(|sat| {
            let mine = chosen.iter().filter(|c| c.satellite_id == sat.id);
            let first = mine.clone().map(|c| c.start).min();
            let last = mine.map(|c| c.end).max();
            let edges = match (first, last) {
                (Some(a), Some(b)) => [(a - scenario.t_sim_start).max(0.0), (scenario.t_sim_end - b).max(0.0)],
                _ => [scenario.t_sim(); 2],
            };
            (sat.id, edges)
        })
        .collect();
    MissionMetrics {
        total_mission_cost: one_time + f.months_in_mission * monthly_fees + f.mission_over_sim * sim_contact_cost,
        total_data_downlink: f.mission_over_sim * sim_bits,
        max_gap: max_gap_per_satellite.values().copied().fold(0.0, f64::max),
        mean_gap: if all.is_empty() { 0.0 } else { all.iter().sum::<f64>() / all.len() as f64 },
        max_gap_per_satellite,
        boundary_gaps,
        monthly_operational_cost: f.per_month_from_sim * sim_contact_cost + monthly_fees,
        contacts_per_day: chosen.len() as f64 / (scenario.t_sim() / 86_400.0),
        selected_contacts: chosen.len(),
        selected_stations: stations,
        selected_providers: providers,
    }
}
