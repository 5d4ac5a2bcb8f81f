use std::collections::BTreeMap;
use std::fs::File;
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::geojson::stations_geojson;
use super::{CliError, RunConfig};
use crate::analysis::{
    run_baselines, run_trials, solve_scenario, window_stability_study, write_baseline_csv, write_trials_csv,
    write_window_csv, Solved,
};
use crate::contacts::{find_contacts_for_scenario, write_contacts_csv, ContactWindow};
use crate::exec::Execution;
use crate::formulation::{build_model, IpModel};
use crate::model::{Objective, Scenario};
use crate::solver::{export_lp, MissionMetrics, SolveStatus, Solution};

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    std::fs::write(path, text)?;
    Ok(())
}

fn create(path: &Path) -> Result<BufWriter<File>, CliError> {
    Ok(BufWriter::new(File::create(path)?))
}

fn contacts_for(scenario: &Scenario) -> Vec<ContactWindow> {
    let report = find_contacts_for_scenario(scenario, Execution::default());
    for (id, why) in &report.excluded {
        log::warn!("satellite {id} has no contacts: {why}");
    }
    log::info!("{} contacts", report.contacts.len());
    report.contacts
}

#[derive(Serialize)]
struct ContactsSummary<'a> {
    satellites: Vec<SatelliteSummary>,
    stations: usize,
    contacts: usize,
    contacts_per_satellite: BTreeMap<u32, usize>,
    excluded: &'a [(u32, String)],
    config: &'a RunConfig,
}

#[derive(Serialize)]
struct SatelliteSummary {
    id: u32,
    name: String,
    norad_id: u32,
}

/// Contact windows as CSV plus a JSON summary.
pub fn cmd_contacts(cfg: &RunConfig, out: &Path) -> Result<Vec<PathBuf>, CliError> {
    let s = cfg.scenario()?;
    let report = find_contacts_for_scenario(&s, Execution::default());
    let csv_path = out.join("contacts.csv");
    write_contacts_csv(create(&csv_path)?, &report.contacts, &s)?;
    let mut per_sat: BTreeMap<u32, usize> = s.satellites.iter().map(|x| (x.id, 0)).collect();
    for c in &report.contacts {
        *per_sat.entry(c.satellite_id).or_default() += 1;
    }
    let summary = ContactsSummary {
        satellites: s
            .satellites
            .iter()
            .map(|x| SatelliteSummary {
                id: x.id,
                name: x.name.clone(),
                norad_id: x.tle.norad_id,
            })
            .collect(),
        stations: s.stations.len(),
        contacts: report.contacts.len(),
        contacts_per_satellite: per_sat,
        excluded: &report.excluded,
        config: cfg,
    };
    let json_path = out.join("contacts_summary.json");
    write_json(&json_path, &summary)?;
    Ok(vec![csv_path, json_path])
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NamedId {
    pub id: u32,
    pub name: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelSummary {
    pub variables: usize,
    pub binaries: usize,
    pub constraints: usize,
    pub families: BTreeMap<String, usize>,
}

/// Solution file contents; deliberately free of timings so identical runs
/// produce identical bytes.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolutionDocument {
    pub seed: u64,
    pub objective: Objective,
    pub status: SolveStatus,
    pub objective_value: Option<f64>,
    /// Absent when no finite bound exists.
    pub best_bound: Option<f64>,
    pub relative_gap: Option<f64>,
    pub nodes_explored: u64,
    pub simplifications: Vec<String>,
    pub selected_providers: Vec<NamedId>,
    /// Names are `provider/location`.
    pub selected_locations: Vec<NamedId>,
    pub selected_contacts: Vec<u32>,
    pub metrics: Option<MissionMetrics>,
    pub model: ModelSummary,
    pub config: RunConfig,
}

impl SolutionDocument {
    fn new(cfg: &RunConfig, s: &Scenario, model: &IpModel, sol: &Solution) -> Self {
        let c = &sol.certificate;
        let finite = |v: f64| v.is_finite().then_some(v);
        SolutionDocument {
            seed: cfg.seed,
            objective: s.config.objective,
            status: c.status,
            objective_value: c.best_objective,
            best_bound: finite(c.best_bound),
            relative_gap: finite(c.relative_gap),
            nodes_explored: c.nodes_explored,
            simplifications: c.simplifications.clone(),
            selected_providers: sol
                .selected_providers
                .iter()
                .map(|id| NamedId {
                    id: *id,
                    name: s.provider_name(*id).to_string(),
                })
                .collect(),
            selected_locations: sol
                .selected_locations
                .iter()
                .map(|id| NamedId {
                    id: *id,
                    name: s.station(*id).map_or_else(|| id.to_string(), |st| s.station_key(st)),
                })
                .collect(),
            selected_contacts: sol.selected_contacts.iter().copied().collect(),
            metrics: sol.metrics.clone(),
            model: ModelSummary {
                variables: model.num_vars(),
                binaries: model.binary_count(),
                constraints: model.constraints.len(),
                families: model.family_counts(),
            },
            config: cfg.clone(),
        }
    }
}

/// Everything `cmd_optimize` produced, for in-process callers.
#[derive(Clone, Debug)]
pub struct OptimizeOutput {
    pub scenario: Scenario,
    pub contacts: Vec<ContactWindow>,
    pub model: IpModel,
    pub solution: Solution,
    pub document: SolutionDocument,
    pub files: Vec<PathBuf>,
}

const METRICS_CSV_HEADER: [&str; 13] = [
    "seed",
    "objective",
    "status",
    "objective_value",
    "total_mission_cost",
    "total_data_downlink_bits",
    "max_gap_s",
    "mean_gap_s",
    "monthly_operational_cost",
    "contacts_per_day",
    "selected_contacts",
    "selected_stations",
    "selected_providers",
];

/// Solves the configured scenario and writes `solution.json`,
/// `solution.geojson` and `metrics.csv`. An infeasible model is a result,
/// not an error.
pub fn cmd_optimize(cfg: &RunConfig, out: &Path) -> Result<OptimizeOutput, CliError> {
    let scenario = cfg.scenario()?;
    let contacts = contacts_for(&scenario);
    let Solved { model, solution } = solve_scenario(&scenario, &contacts, &cfg.solver_options())?;
    log::info!(
        "{} after {} nodes in {:.2} s",
        solution.certificate.status,
        solution.certificate.nodes_explored,
        solution.certificate.wall_time
    );
    let document = SolutionDocument::new(cfg, &scenario, &model, &solution);

    let json_path = out.join("solution.json");
    write_json(&json_path, &document)?;
    let geo_path = out.join("solution.geojson");
    write_json(
        &geo_path,
        &stations_geojson(&scenario, solution.selected_locations.iter().copied(), cfg.cone_altitude_km),
    )?;
    let csv_path = out.join("metrics.csv");
    let mut w = csv::Writer::from_writer(create(&csv_path)?);
    w.write_record(METRICS_CSV_HEADER)?;
    let opt = |v: Option<f64>| v.map_or(String::new(), |v| v.to_string());
    let m = solution.metrics.as_ref();
    w.write_record([
        cfg.seed.to_string(),
        scenario.config.objective.to_string(),
        solution.certificate.status.to_string(),
        opt(solution.objective()),
        opt(m.map(|m| m.total_mission_cost)),
        opt(m.map(|m| m.total_data_downlink)),
        opt(m.map(|m| m.max_gap)),
        opt(m.map(|m| m.mean_gap)),
        opt(m.map(|m| m.monthly_operational_cost)),
        opt(m.map(|m| m.contacts_per_day)),
        m.map_or(0, |m| m.selected_contacts).to_string(),
        m.map_or(0, |m| m.selected_stations).to_string(),
        m.map_or(0, |m| m.selected_providers).to_string(),
    ])?;
    w.flush()?;

    Ok(OptimizeOutput {
        scenario,
        contacts,
        model,
        solution,
        document,
        files: vec![json_path, geo_path, csv_path],
    })
}

#[derive(Serialize)]
struct BaselineRow<'a> {
    providers: &'a [String],
    status: SolveStatus,
    objective: Option<f64>,
    normalized: Option<f64>,
    locations: Vec<u32>,
}

#[derive(Serialize)]
struct BaselineDocument<'a> {
    k: usize,
    objective: Objective,
    full_status: SolveStatus,
    full_objective: Option<f64>,
    best: Option<&'a [String]>,
    best_objective: Option<f64>,
    subsets: Vec<BaselineRow<'a>>,
    config: &'a RunConfig,
}

/// Full network plus every provider subset of size `cfg.providers`.
pub fn cmd_baseline(cfg: &RunConfig, out: &Path) -> Result<Vec<PathBuf>, CliError> {
    let scenario = cfg.scenario()?;
    let contacts = contacts_for(&scenario);
    let opts = cfg.solver_options();
    let full = solve_scenario(&scenario, &contacts, &opts)?.solution;
    let summary = run_baselines(&scenario, &contacts, cfg.providers, full.objective(), &opts, Execution::default())?;
    let k = cfg.providers;
    let csv_path = out.join(format!("baseline_k{k}.csv"));
    write_baseline_csv(create(&csv_path)?, &summary)?;
    let doc = BaselineDocument {
        k,
        objective: scenario.config.objective,
        full_status: full.certificate.status,
        full_objective: full.objective(),
        best: summary.best_result().map(|r| r.provider_names.as_slice()),
        best_objective: summary.best_objective(),
        subsets: summary
            .results
            .iter()
            .map(|r| BaselineRow {
                providers: &r.provider_names,
                status: r.status,
                objective: r.objective,
                normalized: r.normalized_objective,
                locations: r.solution.selected_locations.iter().copied().collect(),
            })
            .collect(),
        config: cfg,
    };
    let json_path = out.join(format!("baseline_k{k}.json"));
    write_json(&json_path, &doc)?;
    Ok(vec![csv_path, json_path])
}

/// Randomized trials over the configured constellation sizes.
pub fn cmd_trials(cfg: &RunConfig, out: &Path) -> Result<Vec<PathBuf>, CliError> {
    let base = cfg.base_scenario()?;
    let records = run_trials(&base, &cfg.catalog()?, &cfg.trials, cfg.seed, &cfg.solver_options(), Execution::default())?;
    let path = out.join("trials.csv");
    write_trials_csv(create(&path)?, &records)?;
    Ok(vec![path])
}

/// Contact statistics per simulation window length.
pub fn cmd_window_study(cfg: &RunConfig, out: &Path) -> Result<Vec<PathBuf>, CliError> {
    let base = cfg.base_scenario()?.prefiltered();
    let stats = window_stability_study(
        &cfg.catalog()?,
        &base.stations,
        &cfg.window_days,
        cfg.window_sample,
        cfg.seed,
        base.t_sim_start,
        &cfg.contact,
        Execution::default(),
    )?;
    let csv_path = out.join("window_study.csv");
    write_window_csv(create(&csv_path)?, &stats)?;
    let json_path = out.join("window_study.json");
    write_json(&json_path, &serde_json::json!({"windows": stats, "config": cfg}))?;
    Ok(vec![csv_path, json_path])
}

/// The configured model in CPLEX LP format.
pub fn cmd_export_lp(cfg: &RunConfig, out: &Path) -> Result<Vec<PathBuf>, CliError> {
    let scenario = cfg.scenario()?;
    let contacts = contacts_for(&scenario);
    let model = build_model(&scenario, &contacts)?;
    let path = out.join("model.lp");
    export_lp(&model, &path)?;
    Ok(vec![path])
}

/// Saves the sampled, cost-randomized scenario; pointing `scenario` in a
/// configuration at the file reproduces it exactly.
pub fn cmd_scenario_gen(cfg: &RunConfig, out: &Path) -> Result<Vec<PathBuf>, CliError> {
    let scenario = cfg.scenario()?;
    let path = out.join("scenario.json");
    scenario.save(&path)?;
    Ok(vec![path])
}
