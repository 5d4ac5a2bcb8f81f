//! The `gsopt` command line: argument parsing, run configuration and the
//! subcommands.

mod commands;
mod geojson;

pub use commands::{
    cmd_baseline, cmd_contacts, cmd_export_lp, cmd_optimize, cmd_scenario_gen, cmd_trials, cmd_window_study,
    OptimizeOutput, SolutionDocument,
};
pub use geojson::{coverage_polygon, stations_geojson};

use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::analysis::{AnalysisError, TrialConfig, DEFAULT_WINDOW_DAYS};
use crate::astro::{parse_tle_catalog, EpochUtc, TleRecord, SECONDS_PER_DAY};
use crate::formulation::FormulationError;
use crate::model::{
    bundled_station_dataset, load_station_dataset, randomize_scenario, sample_satellites, ConstraintConfig,
    ContactSettings, ModelError, Objective, Scenario, StationDataset, BUNDLED_SAMPLE_TLES,
};
use crate::solver::{Limits, SolverError, SolverOptions};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("compute error: {0}")]
    Compute(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Compute(_) => 3,
        }
    }
}

impl From<ModelError> for CliError {
    fn from(e: ModelError) -> Self {
        match e {
            ModelError::Io(e) => CliError::Compute(e.to_string()),
            other => CliError::Config(other.to_string()),
        }
    }
}

impl From<FormulationError> for CliError {
    fn from(e: FormulationError) -> Self {
        CliError::Config(e.to_string())
    }
}

impl From<SolverError> for CliError {
    fn from(e: SolverError) -> Self {
        CliError::Compute(e.to_string())
    }
}

impl From<AnalysisError> for CliError {
    fn from(e: AnalysisError) -> Self {
        match e {
            AnalysisError::Model(e) => e.into(),
            AnalysisError::Formulation(e) => e.into(),
            AnalysisError::Input(m) => CliError::Config(m),
            other => CliError::Compute(other.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Compute(e.to_string())
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Compute(e.to_string())
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Compute(e.to_string())
    }
}

/// Everything a run depends on. Loaded from `--config`, then overridden by
/// flags; echoed into every output document.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub seed: u64,
    /// Satellites drawn from the catalog.
    pub satellites: usize,
    /// Station CSV; the bundled table when absent.
    pub stations: Option<PathBuf>,
    /// TLE catalog; the bundled synthetic catalog when absent.
    pub tles: Option<PathBuf>,
    /// Saved scenario to use instead of sampling one.
    pub scenario: Option<PathBuf>,
    pub sim_start: String,
    pub sim_days: f64,
    pub mission_days: f64,
    pub randomize_costs: bool,
    pub constraints: ConstraintConfig,
    pub contact: ContactSettings,
    pub time_limit: Option<f64>,
    pub node_limit: Option<u64>,
    /// Provider subset size for baselines.
    pub providers: usize,
    pub trials: TrialConfig,
    pub window_days: Vec<u32>,
    pub window_sample: usize,
    /// Satellite altitude assumed for map coverage cones, km.
    pub cone_altitude_km: f64,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            seed: 0,
            satellites: 2,
            stations: None,
            tles: None,
            scenario: None,
            sim_start: "2024-09-11T00:00:00Z".into(),
            sim_days: 7.0,
            mission_days: 365.0,
            randomize_costs: true,
            constraints: ConstraintConfig::default(),
            contact: ContactSettings::default(),
            time_limit: None,
            node_limit: None,
            providers: 1,
            trials: TrialConfig::default(),
            window_days: DEFAULT_WINDOW_DAYS.to_vec(),
            window_sample: 20,
            cone_altitude_km: 525.0,
        }
    }
}

impl RunConfig {
    pub fn load(path: impl AsRef<Path>) -> Result<Self, CliError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
    }

    pub fn solver_options(&self) -> SolverOptions {
        SolverOptions {
            limits: Limits {
                time: self.time_limit,
                nodes: self.node_limit,
                ..Limits::default()
            },
            ..SolverOptions::default()
        }
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let bad = |m: String| Err(CliError::Config(m));
        if !(self.sim_days.is_finite() && self.sim_days > 0.0) {
            return bad(format!("sim_days must be positive, got {}", self.sim_days));
        }
        if !(self.mission_days.is_finite() && self.mission_days > 0.0) {
            return bad(format!("mission_days must be positive, got {}", self.mission_days));
        }
        if self.time_limit.is_some_and(|t| !(t.is_finite() && t > 0.0)) {
            return bad("time_limit must be positive".into());
        }
        if !(0.0..90.0).contains(&self.contact.min_elevation_deg) {
            return bad(format!("min elevation must lie in [0, 90), got {}", self.contact.min_elevation_deg));
        }
        if self.scenario.is_none() && self.satellites == 0 {
            return bad("at least one satellite is needed".into());
        }
        self.start()?;
        self.constraints.validate(self.sim_days * SECONDS_PER_DAY)?;
        Ok(())
    }

    fn start(&self) -> Result<EpochUtc, CliError> {
        EpochUtc::parse_iso(&self.sim_start).map_err(|e| CliError::Config(format!("sim_start: {e}")))
    }

    pub fn station_dataset(&self) -> Result<StationDataset, CliError> {
        let ds = match &self.stations {
            Some(p) => load_station_dataset(p)
                .map_err(|e| CliError::Config(format!("station table {}: {e}", p.display())))?,
            None => bundled_station_dataset(),
        };
        for d in &ds.diagnostics {
            log::warn!("station table: {d}");
        }
        Ok(ds)
    }

    pub fn catalog(&self) -> Result<Vec<TleRecord>, CliError> {
        let text = match &self.tles {
            Some(p) => std::fs::read_to_string(p)
                .map_err(|e| CliError::Config(format!("cannot read {}: {e}", p.display())))?,
            None => BUNDLED_SAMPLE_TLES.to_string(),
        };
        let cat = parse_tle_catalog(&text);
        for d in &cat.diagnostics {
            log::warn!("TLE catalog: {d:?}");
        }
        if cat.records.is_empty() {
            return Err(CliError::Config("the TLE catalog holds no valid records".into()));
        }
        Ok(cat.records)
    }

    /// Stations, spans and constraints of this configuration, with no
    /// satellites and the dataset's own costs.
    pub fn base_scenario(&self) -> Result<Scenario, CliError> {
        self.validate()?;
        let ds = self.station_dataset()?;
        let mut s = Scenario::new(ds.providers, ds.stations, Vec::new());
        let start = self.start()?;
        s.t_sim_start = start;
        s.t_sim_end = start + self.sim_days * SECONDS_PER_DAY;
        s.t_opt_start = start;
        s.t_opt_end = start + self.mission_days * SECONDS_PER_DAY;
        s.config = self.constraints.clone();
        s.contact = self.contact.clone();
        s.seed = self.seed;
        Ok(s)
    }

    /// The scenario this configuration describes, pre-filtered by band and
    /// status. A saved scenario keeps its own data and takes this
    /// configuration's constraints and contact settings.
    pub fn scenario(&self) -> Result<Scenario, CliError> {
        self.validate()?;
        let mut s = match &self.scenario {
            Some(p) => {
                let mut s = Scenario::load(p).map_err(|e| CliError::Config(format!("{}: {e}", p.display())))?;
                s.config = self.constraints.clone();
                s.contact = self.contact.clone();
                s
            }
            None => {
                let mut s = self.base_scenario()?;
                s.satellites = sample_satellites(&self.catalog()?, self.satellites, self.seed)?;
                if self.randomize_costs {
                    s = randomize_scenario(&s, self.seed);
                }
                s
            }
        };
        s.validate()?;
        s = s.prefiltered();
        if s.stations.is_empty() {
            log::warn!("no station passes the band and status filter");
        }
        Ok(s)
    }
}

#[derive(Debug, Parser)]
#[command(name = "gsopt", version, about = "Ground-station provider and location selection for LEO missions")]
pub struct Cli {
    /// JSON run configuration; flags override its fields.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Output directory.
    #[arg(long, global = true, default_value = "out")]
    pub out: PathBuf,
    /// min_cost, max_data or min_max_gap.
    #[arg(long, global = true)]
    pub objective: Option<Objective>,
    /// Provider subset size for baselines.
    #[arg(long, global = true)]
    pub providers: Option<usize>,
    /// Solver wall-clock limit, seconds.
    #[arg(long, global = true)]
    pub time_limit: Option<f64>,
    /// Station CSV replacing the bundled table.
    #[arg(long, global = true)]
    pub stations: Option<PathBuf>,
    /// TLE file replacing the bundled catalog.
    #[arg(long, global = true)]
    pub tles: Option<PathBuf>,
    /// Elevation mask, degrees.
    #[arg(long, global = true)]
    pub min_elevation: Option<f64>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Compute contact windows.
    Contacts,
    /// Select providers, stations and contacts.
    Optimize,
    /// Solve every provider subset of the configured size.
    Baseline,
    /// Randomized trials comparing the full network with one- and two-provider baselines.
    Trials,
    /// Contact statistics against simulation window length.
    WindowStudy,
    /// Write the model in CPLEX LP format.
    ExportLp,
    /// Write a reproducible scenario file.
    ScenarioGen,
}

impl Cli {
    pub fn run_config(&self) -> Result<RunConfig, CliError> {
        let mut cfg = match &self.config {
            Some(p) => RunConfig::load(p)?,
            None => RunConfig::default(),
        };
        if let Some(v) = self.seed {
            cfg.seed = v;
        }
        if let Some(v) = self.objective {
            cfg.constraints.objective = v;
        }
        if let Some(v) = self.providers {
            cfg.providers = v;
        }
        if let Some(v) = self.time_limit {
            cfg.time_limit = Some(v);
        }
        if let Some(v) = &self.stations {
            cfg.stations = Some(v.clone());
        }
        if let Some(v) = &self.tles {
            cfg.tles = Some(v.clone());
        }
        if let Some(v) = self.min_elevation {
            cfg.contact.min_elevation_deg = v;
        }
        Ok(cfg)
    }
}

/// Runs the parsed command line and returns the process exit code.
pub fn run(cli: &Cli) -> i32 {
    let result = cli.run_config().and_then(|cfg| {
        std::fs::create_dir_all(&cli.out)
            .map_err(|e| CliError::Compute(format!("cannot create {}: {e}", cli.out.display())))?;
        let out = cli.out.as_path();
        let written = match cli.command {
            Command::Contacts => cmd_contacts(&cfg, out)?,
            Command::Optimize => cmd_optimize(&cfg, out)?.files,
            Command::Baseline => cmd_baseline(&cfg, out)?,
            Command::Trials => cmd_trials(&cfg, out)?,
            Command::WindowStudy => cmd_window_study(&cfg, out)?,
            Command::ExportLp => cmd_export_lp(&cfg, out)?,
            Command::ScenarioGen => cmd_scenario_gen(&cfg, out)?,
        };
        for f in written {
            println!("wrote {}", f.display());
        }
        Ok(())
    });
    match result {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("gsopt: {e}");
            e.exit_code()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_match_the_design_table() {
        let c = RunConfig::default();
        assert_eq!(c.sim_days, 7.0);
        assert_eq!(c.mission_days, 365.0);
        assert_eq!(c.contact.min_elevation_deg, 10.0);
        assert_eq!(c.constraints, ConstraintConfig::default());
        assert_eq!(c.window_days.len(), 13);
    }

    #[test]
    fn flags_override_the_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.json");
        std::fs::write(&path, r#"{"seed": 5, "constraints": {"objective": "max_data"}, "providers": 2}"#).unwrap();
        let cli = Cli::parse_from(["gsopt", "optimize", "--config", path.to_str().unwrap(), "--seed", "9", "--min-elevation", "5"]);
        let cfg = cli.run_config().unwrap();
        assert_eq!(cfg.seed, 9);
        assert_eq!(cfg.providers, 2);
        assert_eq!(cfg.constraints.objective, Objective::MaxData);
        assert_eq!(cfg.contact.min_elevation_deg, 5.0);
        assert_eq!(cfg.constraints.e_max, Some(1e6));
    }

    #[test]
    fn unknown_keys_are_config_errors() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.json");
        std::fs::write(&path, r#"{"seed": 5, "sateliltes": 3}"#).unwrap();
        let e = RunConfig::load(&path).unwrap_err();
        assert_eq!(e.exit_code(), 2);
        assert!(e.to_string().contains("sateliltes"));
    }

    #[test]
    fn max_data_without_cap_is_rejected_before_compute() {
        let mut c = RunConfig::default();
        c.constraints.objective = Objective::MaxData;
        c.constraints.e_max = None;
        let e = c.validate().unwrap_err();
        assert_eq!(e.exit_code(), 2);
        assert!(e.to_string().contains("e_max"));
    }

    #[test]
    fn scenario_follows_the_configuration() {
        let c = RunConfig {
            seed: 3,
            sim_days: 2.0,
            ..RunConfig::default()
        };
        let s = c.scenario().unwrap();
        assert_eq!(s.satellites.len(), 2);
        assert_eq!(s.t_sim(), 2.0 * SECONDS_PER_DAY);
        assert_eq!(s.t_opt(), 365.0 * SECONDS_PER_DAY);
        assert!(s.stations.iter().all(|st| st.status == crate::model::StationStatus::Operational));
        assert_eq!(s, c.scenario().unwrap());
    }
}
