use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};

use super::{
    scale_factors, FormulationError, GapEvent, Integrality, IpModel, ObjectiveSense, Sense, VarKind,
};
use crate::astro::EpochUtc;
use crate::contacts::ContactWindow;
use crate::model::{sanitize_tag, Objective, Scenario, StationLocation};

/// Variable lookup by domain identity.
#[derive(Clone, Debug, Default)]
pub struct VarIndex {
    pub provider: BTreeMap<u32, usize>,
    pub location: BTreeMap<u32, usize>,
    pub contact: BTreeMap<u32, usize>,
    pub license: BTreeMap<(u32, u32), usize>,
    pub gap_max: Option<usize>,
}

impl VarIndex {
    pub fn of(model: &IpModel) -> Self {
        let mut idx = VarIndex::default();
        for v in &model.variables {
            match v.kind {
                VarKind::Provider { provider_id } => {
                    idx.provider.insert(provider_id, v.index);
                }
                VarKind::Location { station_id } => {
                    idx.location.insert(station_id, v.index);
                }
                VarKind::Contact { contact_id } => {
                    idx.contact.insert(contact_id, v.index);
                }
                VarKind::VehicleLicense {
                    satellite_id,
                    station_id,
                } => {
                    idx.license.insert((satellite_id, station_id), v.index);
                }
                VarKind::GapMax => idx.gap_max = Some(v.index),
                VarKind::GapSuccessor { .. } => {}
            }
        }
        idx
    }
}

/// Window starts `t_s, t_s + step, ..., t_e - period`.
pub fn window_starts(t_start: EpochUtc, t_end: EpochUtc, period: f64, step: f64) -> Vec<EpochUtc> {
    let span = t_end - t_start - period;
    if span < 0.0 {
        return Vec::new();
    }
    let n = (span / step + 1e-9).floor() as usize + 1;
    (0..n).map(|k| t_start + k as f64 * step).collect()
}

/// The contacts a scenario's model is built over: those whose station and
/// satellite belong to the scenario, in id order.
fn relevant<'a>(scenario: &Scenario, contacts: &'a [ContactWindow]) -> Vec<&'a ContactWindow> {
    let stations: HashSet<u32> = scenario.stations.iter().map(|s| s.id).collect();
    let sats: HashSet<u32> = scenario.satellites.iter().map(|s| s.id).collect();
    let mut out: Vec<&ContactWindow> = contacts
        .iter()
        .filter(|c| stations.contains(&c.station_id) && sats.contains(&c.satellite_id))
        .collect();
    out.sort_by_key(|c| c.id);
    out
}

fn eligible(scenario: &Scenario, c: &ContactWindow) -> bool {
    c.duration >= scenario.config.t_min
}

fn eligible_contacts<'a>(scenario: &Scenario, contacts: &'a [ContactWindow]) -> Vec<&'a ContactWindow> {
    relevant(scenario, contacts)
        .into_iter()
        .filter(|c| eligible(scenario, c))
        .collect()
}

fn intersects(c: &ContactWindow, start: EpochUtc, end: EpochUtc) -> bool {
    c.start <= end && c.end >= start
}

fn describe(model: &mut IpModel, family: &str, text: &str) {
    model
        .provenance
        .entry(family.to_string())
        .or_insert_with(|| text.to_string());
}

struct Tags(HashSet<String>);

impl Tags {
    fn of(model: &IpModel) -> Self {
        Tags(model.variables.iter().map(|v| v.tag.clone()).collect())
    }

    fn unique(&mut self, base: String) -> String {
        let mut tag = base.clone();
        let mut k = 1;
        while self.0.contains(&tag) {
            k += 1;
            tag = format!("{base}_{k}");
        }
        self.0.insert(tag.clone());
        tag
    }
}

fn station_label(scenario: &Scenario, s: &StationLocation) -> String {
    format!(
        "{}_{}",
        sanitize_tag(scenario.provider_name(s.provider_id)),
        sanitize_tag(&s.name)
    )
}

/// Selection variables in the order providers, locations, contacts, licenses.
fn base_model(scenario: &Scenario, contacts: &[ContactWindow], sense: ObjectiveSense) -> IpModel {
    let mut model = IpModel::new(sense);
    let mut tags = Tags(HashSet::new());
    let with_stations: BTreeSet<u32> = scenario.stations.iter().map(|s| s.provider_id).collect();
    for p in &scenario.providers {
        if with_stations.contains(&p.id) || scenario.config.required_providers.contains(&p.name) {
            let tag = tags.unique(format!("p_{}", sanitize_tag(&p.name)));
            model.add_var(VarKind::Provider { provider_id: p.id }, Integrality::Binary, 0.0, 1.0, tag);
        }
    }
    for s in &scenario.stations {
        let tag = tags.unique(format!("l_{}", station_label(scenario, s)));
        model.add_var(VarKind::Location { station_id: s.id }, Integrality::Binary, 0.0, 1.0, tag);
    }
    let rel = relevant(scenario, contacts);
    let mut pairs = BTreeSet::new();
    for c in &rel {
        let hi = if eligible(scenario, c) { 1.0 } else { 0.0 };
        let tag = tags.unique(format!("c{}", c.id));
        model.add_var(VarKind::Contact { contact_id: c.id }, Integrality::Binary, 0.0, hi, tag);
        if hi > 0.0 {
            pairs.insert((c.satellite_id, c.station_id));
        }
    }
    if rel.iter().any(|c| !eligible(scenario, c)) {
        describe(&mut model, "min_duration", "contacts shorter than t_min are fixed to zero through their bounds");
    }
    for (sat, st) in pairs {
        let station = scenario.station(st).expect("relevant contact has a scenario station");
        let tag = tags.unique(format!("v_{}_{}", sat, station_label(scenario, station)));
        model.add_var(
            VarKind::VehicleLicense {
                satellite_id: sat,
                station_id: st,
            },
            Integrality::Binary,
            0.0,
            1.0,
            tag,
        );
    }
    model
}

/// Big-M links from contacts to their station, stations to their provider, and
/// contacts to the satellite/station license indicator.
pub fn linking_constraints(model: &mut IpModel, scenario: &Scenario, contacts: &[ContactWindow]) {
    let idx = VarIndex::of(model);
    let elig = eligible_contacts(scenario, contacts);

    let mut by_station: BTreeMap<u32, Vec<usize>> = BTreeMap::new();
    let mut by_pair: BTreeMap<(u32, u32), Vec<usize>> = BTreeMap::new();
    for c in &elig {
        let j = idx.contact[&c.id];
        by_station.entry(c.station_id).or_default().push(j);
        by_pair.entry((c.satellite_id, c.station_id)).or_default().push(j);
    }
    for s in &scenario.stations {
        if let Some(cs) = by_station.get(&s.id) {
            let l = idx.location[&s.id];
            let mut terms: Vec<(usize, f64)> = cs.iter().map(|j| (*j, 1.0)).collect();
            terms.push((l, -(cs.len() as f64)));
            let tag = format!("location_link_{}", &model.variables[l].tag[2..]);
            model.add_constraint("location_link", tag, terms, Sense::Le, 0.0);
        }
    }
    for p in &scenario.providers {
        let Some(&pv) = idx.provider.get(&p.id) else { continue };
        let ls: Vec<usize> = scenario
            .stations
            .iter()
            .filter(|s| s.provider_id == p.id)
            .map(|s| idx.location[&s.id])
            .collect();
        if ls.is_empty() {
            continue;
        }
        let mut terms: Vec<(usize, f64)> = ls.iter().map(|j| (*j, 1.0)).collect();
        terms.push((pv, -(ls.len() as f64)));
        let tag = format!("provider_link_{}", &model.variables[pv].tag[2..]);
        model.add_constraint("provider_link", tag, terms, Sense::Le, 0.0);
    }
    for (key, cs) in &by_pair {
        let v = idx.license[key];
        let mut terms: Vec<(usize, f64)> = cs.iter().map(|j| (*j, 1.0)).collect();
        terms.push((v, -(cs.len() as f64)));
        let tag = format!("license_link_{}", &model.variables[v].tag[2..]);
        model.add_constraint("license_link", tag, terms, Sense::Le, 0.0);
    }
    describe(model, "location_link", "a selected contact selects its station");
    describe(model, "provider_link", "a selected station selects its provider");
    describe(model, "license_link", "a selected contact selects the satellite/station license");
}

/// Pairwise conflicts between time-overlapping contacts on one station and on
/// one satellite, found with a start-sorted sweep.
pub fn exclusion_constraints(model: &mut IpModel, scenario: &Scenario, contacts: &[ContactWindow]) {
    let idx = VarIndex::of(model);
    let elig = eligible_contacts(scenario, contacts);
    let families: [(&str, bool, fn(&ContactWindow) -> u32, &str); 2] = [
        (
            "station_exclusion",
            scenario.config.station_exclusion,
            |c| c.station_id,
            "a station serves one satellite at a time",
        ),
        (
            "satellite_exclusion",
            scenario.config.satellite_exclusion,
            |c| c.satellite_id,
            "a satellite talks to one station at a time",
        ),
    ];
    for (family, enabled, key, text) in families {
        if !enabled {
            continue;
        }
        let mut groups: BTreeMap<u32, Vec<&ContactWindow>> = BTreeMap::new();
        for c in &elig {
            groups.entry(key(c)).or_default().push(c);
        }
        for list in groups.values_mut() {
            list.sort_by(|a, b| (a.start, a.id).cmp(&(b.start, b.id)));
            for i in 0..list.len() {
                for j in i + 1..list.len() {
                    if list[j].start > list[i].end {
                        break;
                    }
                    let (a, b) = (list[i].id.min(list[j].id), list[i].id.max(list[j].id));
                    model.add_constraint(
                        family,
                        format!("{family}_{a}_{b}"),
                        vec![(idx.contact[&a], 1.0), (idx.contact[&b], 1.0)],
                        Sense::Le,
                        1.0,
                    );
                }
            }
        }
        describe(model, family, text);
    }
}

fn satellite_downlink(model: &mut IpModel, scenario: &Scenario, contacts: &[ContactWindow], d_s_min: f64) {
    let idx = VarIndex::of(model);
    let elig = eligible_contacts(scenario, contacts);
    let cfg = &scenario.config;
    let starts = window_starts(scenario.t_sim_start, scenario.t_sim_end, cfg.t_period, cfg.t_step);
    for sat in &scenario.satellites {
        let mine: Vec<&&ContactWindow> = elig.iter().filter(|c| c.satellite_id == sat.id).collect();
        for (w, ws) in starts.iter().enumerate() {
            let we = *ws + cfg.t_period;
            let terms = mine
                .iter()
                .filter(|c| intersects(c, *ws, we))
                .map(|c| (idx.contact[&c.id], c.data_volume()))
                .collect();
            model.add_constraint(
                "satellite_downlink",
                format!("satellite_downlink_{}_{}", sat.id, w),
                terms,
                Sense::Ge,
                d_s_min,
            );
        }
    }
    describe(
        model,
        "satellite_downlink",
        "each satellite downlinks at least d_s_min bits in every sliding window",
    );
}

fn monthly_cost_cap(model: &mut IpModel, scenario: &Scenario, contacts: &[ContactWindow], e_max: f64) {
    let idx = VarIndex::of(model);
    let f = scale_factors(scenario.t_sim(), scenario.t_opt());
    let stations: HashMap<u32, &StationLocation> = scenario.stations.iter().map(|s| (s.id, s)).collect();
    let mut terms: Vec<(usize, f64)> = eligible_contacts(scenario, contacts)
        .iter()
        .map(|c| {
            let cost = stations[&c.station_id].contact_cost(c.duration);
            (idx.contact[&c.id], f.per_month_from_sim * cost)
        })
        .collect();
    for s in &scenario.stations {
        terms.push((idx.location[&s.id], s.monthly_cost));
    }
    model.add_constraint("monthly_cost_cap", "monthly_cost_cap".into(), terms, Sense::Le, e_max);
    describe(
        model,
        "monthly_cost_cap",
        "monthly contact charges plus monthly station fees stay within e_max",
    );
}

enum GapMode {
    Objective(usize),
    Limit(f64),
}

/// Successor variables and rows bounding every gap between consecutive
/// selected contacts of each satellite.
fn gap_machinery(model: &mut IpModel, scenario: &Scenario, contacts: &[ContactWindow], with_objective: bool, limit: f64) {
    let idx = VarIndex::of(model);
    let cfg = &scenario.config;
    let horizon = cfg.gap_successor_horizon;
    let elig = eligible_contacts(scenario, contacts);
    let mut tags = Tags::of(model);

    struct Pair {
        sat: u32,
        from: GapEvent,
        to: GapEvent,
        gap: f64,
        var: usize,
    }
    let mut pairs: Vec<Pair> = Vec::new();
    let mut truncated: BTreeSet<u32> = BTreeSet::new();
    let mut finals: Vec<(u32, u32)> = Vec::new();
    let event_tag = |e: GapEvent| match e {
        GapEvent::SimStart => "start".to_string(),
        GapEvent::SimEnd => "end".to_string(),
        GapEvent::Contact(id) => id.to_string(),
    };

    for sat in &scenario.satellites {
        let mut mine: Vec<&ContactWindow> = elig.iter().copied().filter(|c| c.satellite_id == sat.id).collect();
        mine.sort_by(|a, b| (a.start, a.id).cmp(&(b.start, b.id)));
        let mut add = |from: GapEvent, to: GapEvent, gap: f64, model: &mut IpModel| {
            let tag = tags.unique(format!("y_{}_{}_{}", sat.id, event_tag(from), event_tag(to)));
            let var = model.add_var(
                VarKind::GapSuccessor {
                    satellite_id: sat.id,
                    from,
                    to,
                },
                Integrality::Binary,
                0.0,
                1.0,
                tag,
            );
            pairs.push(Pair {
                sat: sat.id,
                from,
                to,
                gap,
                var,
            });
        };
        for (i, ci) in mine.iter().enumerate() {
            let later = &mine[i + 1..];
            if later.len() > horizon {
                truncated.insert(sat.id);
            }
            for cj in later.iter().take(horizon) {
                add(GapEvent::Contact(ci.id), GapEvent::Contact(cj.id), cj.start - ci.end, model);
            }
            if !cfg.count_boundary_gaps && !later.is_empty() {
                // Zero-gap exit for the last selected contact.
                add(GapEvent::Contact(ci.id), GapEvent::SimEnd, 0.0, model);
            }
        }
        if let (false, Some(last)) = (cfg.count_boundary_gaps, mine.last()) {
            finals.push((sat.id, last.id));
        }
        if cfg.count_boundary_gaps {
            for cj in &mine {
                add(GapEvent::SimStart, GapEvent::Contact(cj.id), cj.start - scenario.t_sim_start, model);
            }
            for ci in &mine {
                add(GapEvent::Contact(ci.id), GapEvent::SimEnd, scenario.t_sim_end - ci.end, model);
            }
            add(GapEvent::SimStart, GapEvent::SimEnd, scenario.t_sim(), model);
        }
    }

    let mode = if with_objective {
        let g = model.add_var(VarKind::GapMax, Integrality::Continuous, 0.0, scenario.t_sim(), "Gmax".into());
        model.objective.terms = vec![(g, 1.0)];
        GapMode::Objective(g)
    } else {
        GapMode::Limit(limit)
    };

    // Successor rows, grouped by origin event in creation order.
    let mut origin: BTreeMap<(u32, GapEvent), Vec<usize>> = BTreeMap::new();
    for p in &pairs {
        origin.entry((p.sat, p.from)).or_default().push(p.var);
    }
    let family_prefix = if with_objective { "gap" } else { "gap_limit" };
    let successor = format!("{family_prefix}_successor");
    for ((sat, from), vars) in &origin {
        let mut terms: Vec<(usize, f64)> = vars.iter().map(|v| (*v, 1.0)).collect();
        let rhs = match from {
            GapEvent::Contact(id) => {
                terms.push((idx.contact[id], -1.0));
                0.0
            }
            _ => 1.0,
        };
        model.add_constraint(
            &successor,
            format!("{successor}_{sat}_{}", event_tag(*from)),
            terms,
            Sense::Eq,
            rhs,
        );
    }
    // One chain end per satellite; the final contact ends it by being selected.
    let last = format!("{family_prefix}_last");
    for &(sat, final_id) in &finals {
        let mut terms: Vec<(usize, f64)> = pairs
            .iter()
            .filter(|p| p.sat == sat && p.to == GapEvent::SimEnd)
            .map(|p| (p.var, 1.0))
            .collect();
        if terms.is_empty() {
            continue;
        }
        terms.push((idx.contact[&final_id], 1.0));
        model.add_constraint(&last, format!("{last}_{sat}"), terms, Sense::Le, 1.0);
    }
    let bound = format!("{family_prefix}_bound");
    let link = format!("{family_prefix}_link");
    for p in &pairs {
        if p.to == GapEvent::SimEnd && !cfg.count_boundary_gaps {
            continue;
        }
        let suffix = format!("{}_{}_{}", p.sat, event_tag(p.from), event_tag(p.to));
        match mode {
            GapMode::Objective(g) => model.add_constraint(
                &bound,
                format!("{bound}_{suffix}"),
                vec![(p.var, p.gap), (g, -1.0)],
                Sense::Le,
                0.0,
            ),
            GapMode::Limit(limit) => model.add_constraint(
                &bound,
                format!("{bound}_{suffix}"),
                vec![(p.var, p.gap)],
                Sense::Le,
                limit,
            ),
        }
        for (end, ev) in [("from", p.from), ("to", p.to)] {
            if let GapEvent::Contact(id) = ev {
                model.add_constraint(
                    &link,
                    format!("{link}_{end}_{suffix}"),
                    vec![(p.var, 1.0), (idx.contact[&id], -1.0)],
                    Sense::Le,
                    0.0,
                );
            }
        }
    }
    describe(model, &successor, "every selected contact that has later contacts picks one successor or ends the chain");
    describe(
        model,
        &bound,
        if with_objective {
            "the chosen successor gap is at most Gmax"
        } else {
            "the chosen successor gap is at most g_max_limit"
        },
    );
    describe(model, &link, "a successor pair is only chosen between selected contacts");
    if !cfg.count_boundary_gaps {
        describe(model, &last, "only the latest selected contact of a satellite ends its chain");
    }
    if !truncated.is_empty() {
        model.simplifications.push(format!(
            "gap successors limited to the next {horizon} contacts for satellites {:?}",
            truncated
        ));
    }
}

fn mission_cost_objective(model: &mut IpModel, scenario: &Scenario, contacts: &[ContactWindow]) {
    let idx = VarIndex::of(model);
    let f = scale_factors(scenario.t_sim(), scenario.t_opt());
    let mut terms = Vec::new();
    for p in &scenario.providers {
        if let Some(&j) = idx.provider.get(&p.id) {
            terms.push((j, p.integration_cost));
        }
    }
    for s in &scenario.stations {
        terms.push((idx.location[&s.id], s.setup_cost + f.months_in_mission * s.monthly_cost));
    }
    let stations: HashMap<u32, &StationLocation> = scenario.stations.iter().map(|s| (s.id, s)).collect();
    for c in relevant(scenario, contacts) {
        let cost = stations[&c.station_id].contact_cost(c.duration);
        terms.push((idx.contact[&c.id], f.mission_over_sim * cost));
    }
    for (&(_, st), &j) in &idx.license {
        terms.push((j, stations[&st].license_cost));
    }
    terms.sort_by_key(|t| t.0);
    model.objective.terms = terms;
}

fn common_rows(model: &mut IpModel, scenario: &Scenario, contacts: &[ContactWindow]) {
    linking_constraints(model, scenario, contacts);
    exclusion_constraints(model, scenario, contacts);
}

/// Minimum total mission cost subject to the per-satellite downlink floor.
pub fn build_min_cost(scenario: &Scenario, contacts: &[ContactWindow]) -> Result<IpModel, FormulationError> {
    let mut model = base_model(scenario, contacts, ObjectiveSense::Minimize);
    mission_cost_objective(&mut model, scenario, contacts);
    common_rows(&mut model, scenario, contacts);
    if let Some(d) = scenario.config.d_s_min {
        satellite_downlink(&mut model, scenario, contacts, d);
    }
    Ok(model)
}

/// Maximum mission data volume subject to the monthly operational cost cap.
pub fn build_max_data(scenario: &Scenario, contacts: &[ContactWindow]) -> Result<IpModel, FormulationError> {
    let e_max = scenario.config.e_max.ok_or_else(|| {
        FormulationError::Config(
            "max_data needs the maximum monthly operational cost constraint (e_max)".into(),
        )
    })?;
    let mut model = base_model(scenario, contacts, ObjectiveSense::Maximize);
    let f = scale_factors(scenario.t_sim(), scenario.t_opt());
    let idx = VarIndex::of(&model);
    model.objective.terms = relevant(scenario, contacts)
        .iter()
        .map(|c| (idx.contact[&c.id], f.mission_over_sim * c.data_volume()))
        .collect();
    common_rows(&mut model, scenario, contacts);
    monthly_cost_cap(&mut model, scenario, contacts, e_max);
    Ok(model)
}

/// Minimum over selections of the largest gap between consecutive contacts.
pub fn build_min_max_gap(scenario: &Scenario, contacts: &[ContactWindow]) -> Result<IpModel, FormulationError> {
    let cfg = &scenario.config;
    let (Some(d_s_min), Some(e_max)) = (cfg.d_s_min, cfg.e_max) else {
        return Err(FormulationError::Config(
            "min_max_gap needs both d_s_min and e_max to rule out empty and all-contact selections".into(),
        ));
    };
    let mut model = base_model(scenario, contacts, ObjectiveSense::Minimize);
    common_rows(&mut model, scenario, contacts);
    satellite_downlink(&mut model, scenario, contacts, d_s_min);
    monthly_cost_cap(&mut model, scenario, contacts, e_max);
    gap_machinery(&mut model, scenario, contacts, true, 0.0);
    Ok(model)
}

/// Appends every optional family enabled in the configuration.
pub fn add_optional_constraints(
    model: &mut IpModel,
    scenario: &Scenario,
    contacts: &[ContactWindow],
) -> Result<(), FormulationError> {
    let cfg = &scenario.config;
    let idx = VarIndex::of(model);
    let elig = eligible_contacts(scenario, contacts);
    let starts = window_starts(scenario.t_sim_start, scenario.t_sim_end, cfg.t_period, cfg.t_step);

    if let Some(d_min) = cfg.d_min {
        for (w, ws) in starts.iter().enumerate() {
            let we = *ws + cfg.t_period;
            let terms = elig
                .iter()
                .filter(|c| intersects(c, *ws, we))
                .map(|c| (idx.contact[&c.id], c.data_volume()))
                .collect();
            model.add_constraint("constellation_downlink", format!("constellation_downlink_{w}"), terms, Sense::Ge, d_min);
        }
        describe(model, "constellation_downlink", "the constellation downlinks at least d_min bits in every sliding window");
    }
    if let Some(limit) = cfg.g_max_limit {
        if cfg.objective == Objective::MinMaxGap {
            return Err(FormulationError::Config(
                "g_max_limit cannot be combined with the min_max_gap objective".into(),
            ));
        }
        gap_machinery(model, scenario, contacts, false, limit);
    }
    if let Some(p_max) = cfg.p_max {
        let terms = idx.provider.values().map(|j| (*j, 1.0)).collect();
        model.add_constraint("provider_count", "provider_count_max".into(), terms, Sense::Le, p_max as f64);
        describe(model, "provider_count", "at most p_max providers are selected");
    }
    if let Some(n_min) = cfg.n_min {
        for sat in &scenario.satellites {
            for (w, ws) in starts.iter().enumerate() {
                let we = *ws + cfg.t_period;
                let terms = elig
                    .iter()
                    .filter(|c| c.satellite_id == sat.id && intersects(c, *ws, we))
                    .map(|c| (idx.contact[&c.id], 1.0))
                    .collect();
                model.add_constraint(
                    "contacts_per_period",
                    format!("contacts_per_period_{}_{}", sat.id, w),
                    terms,
                    Sense::Ge,
                    n_min as f64,
                );
            }
        }
        describe(model, "contacts_per_period", "each satellite takes at least n_min contacts in every sliding window");
    }
    for name in &cfg.required_providers {
        let var = scenario
            .providers
            .iter()
            .find(|p| &p.name == name)
            .and_then(|p| idx.provider.get(&p.id));
        let tag = format!("required_provider_{}", sanitize_tag(name));
        match var {
            Some(&j) => model.add_constraint("required_provider", tag, vec![(j, 1.0)], Sense::Eq, 1.0),
            // Not available in this (possibly restricted) scenario: unsatisfiable.
            None => model.add_constraint("required_provider", tag, Vec::new(), Sense::Eq, 1.0),
        }
        describe(model, "required_provider", "a named provider is selected");
    }
    for key in &cfg.required_locations {
        let var = scenario
            .stations
            .iter()
            .find(|s| &scenario.station_key(s) == key)
            .map(|s| idx.location[&s.id]);
        let tag = format!("required_location_{}", sanitize_tag(key));
        match var {
            Some(j) => model.add_constraint("required_location", tag, vec![(j, 1.0)], Sense::Eq, 1.0),
            None => model.add_constraint("required_location", tag, Vec::new(), Sense::Eq, 1.0),
        }
        describe(model, "required_location", "a named station is selected");
    }
    let all_l: Vec<(usize, f64)> = idx.location.values().map(|j| (*j, 1.0)).collect();
    if let Some(m_min) = cfg.m_min {
        model.add_constraint("station_count", "station_count_min".into(), all_l.clone(), Sense::Ge, m_min as f64);
    }
    if let Some(m_max) = cfg.m_max {
        model.add_constraint("station_count", "station_count_max".into(), all_l, Sense::Le, m_max as f64);
    }
    if cfg.m_min.is_some() || cfg.m_max.is_some() {
        describe(model, "station_count", "the number of selected stations lies in [m_min, m_max]");
    }
    Ok(())
}

/// Builds the composed problem for the configured objective plus all enabled
/// optional families.
pub fn build_model(scenario: &Scenario, contacts: &[ContactWindow]) -> Result<IpModel, FormulationError> {
    scenario
        .config
        .validate(scenario.t_sim())
        .map_err(|e| FormulationError::Config(e.to_string()))?;
    let mut model = match scenario.config.objective {
        Objective::MinCost => build_min_cost(scenario, contacts)?,
        Objective::MaxData => build_max_data(scenario, contacts)?,
        Objective::MinMaxGap => build_min_max_gap(scenario, contacts)?,
    };
    add_optional_constraints(&mut model, scenario, contacts)?;
    debug_assert!(model.check().is_ok(), "{:?}", model.check());
    Ok(model)
}
