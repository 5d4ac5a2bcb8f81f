use std::collections::BTreeSet;
use std::io::Write;

use serde::{Deserialize, Serialize};

use super::AnalysisError;
use crate::astro::TleRecord;
use crate::contacts::{find_contacts_for_scenario, ContactWindow};
use crate::exec::Execution;
use crate::formulation::{build_model, IpModel, ObjectiveSense};
use crate::model::{randomize_scenario, sample_satellites, Objective, Scenario};
use crate::solver::{solve_with, SolveStatus, Solution, SolverOptions};

pub const BASELINE_CSV_HEADER: [&str; 5] = ["subset", "status", "objective", "normalized", "stations"];

/// A built and solved scenario, metrics attached.
#[derive(Clone, Debug)]
pub struct Solved {
    pub model: IpModel,
    pub solution: Solution,
}

pub fn solve_scenario(
    scenario: &Scenario,
    contacts: &[ContactWindow],
    opts: &SolverOptions,
) -> Result<Solved, AnalysisError> {
    let model = build_model(scenario, contacts)?;
    let mut solution = solve_with(&model, opts)?;
    solution.attach_metrics(&model, scenario, contacts);
    Ok(Solved { model, solution })
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BaselineResult {
    pub provider_subset: BTreeSet<u32>,
    pub provider_names: Vec<String>,
    pub status: SolveStatus,
    pub objective: Option<f64>,
    /// Subset objective over the full-network objective.
    pub normalized_objective: Option<f64>,
    pub solution: Solution,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BaselineSummary {
    pub k: usize,
    pub objective: Objective,
    pub results: Vec<BaselineResult>,
    /// Index into `results` of the best subset with a solution.
    pub best: Option<usize>,
}

impl BaselineSummary {
    pub fn best_result(&self) -> Option<&BaselineResult> {
        self.best.map(|i| &self.results[i])
    }

    pub fn best_objective(&self) -> Option<f64> {
        self.best_result().and_then(|r| r.objective)
    }

    /// No subset produced a solution.
    pub fn infeasible(&self) -> bool {
        self.best.is_none()
    }
}

/// All `k`-element subsets of the scenario's provider ids, lexicographic.
pub fn provider_subsets(scenario: &Scenario, k: usize) -> Vec<BTreeSet<u32>> {
    let ids: Vec<u32> = scenario.providers.iter().map(|p| p.id).collect::<BTreeSet<_>>().into_iter().collect();
    let mut out = Vec::new();
    let mut pick = Vec::with_capacity(k);
    fn rec(ids: &[u32], k: usize, from: usize, pick: &mut Vec<u32>, out: &mut Vec<BTreeSet<u32>>) {
        if pick.len() == k {
            out.push(pick.iter().copied().collect());
            return;
        }
        for i in from..ids.len() {
            pick.push(ids[i]);
            rec(ids, k, i + 1, pick, out);
            pick.pop();
        }
    }
    if k > 0 {
        rec(&ids, k, 0, &mut pick, &mut out);
    }
    out
}

fn normalize(sub: Option<f64>, full: Option<f64>) -> Option<f64> {
    match (sub, full) {
        (Some(a), Some(b)) if b != 0.0 => Some(a / b),
        (Some(a), Some(_)) if a == 0.0 => Some(1.0),
        _ => None,
    }
}

fn better(sense: ObjectiveSense, a: f64, b: f64) -> bool {
    match sense {
        ObjectiveSense::Minimize => a < b,
        ObjectiveSense::Maximize => a > b,
    }
}

/// Solves the scenario restricted to every `k`-provider subset.
///
/// Stations and contacts outside the subset are dropped before the model is
/// built. `full_objective` is the unrestricted optimum used for normalization.
pub fn run_baselines(
    scenario: &Scenario,
    contacts: &[ContactWindow],
    k: usize,
    full_objective: Option<f64>,
    opts: &SolverOptions,
    execution: Execution,
) -> Result<BaselineSummary, AnalysisError> {
    if k == 0 || k > scenario.providers.len() {
        return Err(AnalysisError::Input(format!(
            "subset size {k} outside 1..={}",
            scenario.providers.len()
        )));
    }
    let subsets = provider_subsets(scenario, k);
    let solved = execution.map(&subsets, |subset| -> Result<BaselineResult, AnalysisError> {
        let sub = scenario.restricted_to_providers(subset);
        let cs: Vec<ContactWindow> = contacts.iter().filter(|c| subset.contains(&c.provider_id)).cloned().collect();
        let Solved { solution, .. } = solve_scenario(&sub, &cs, opts)?;
        let objective = solution.objective();
        Ok(BaselineResult {
            provider_subset: subset.clone(),
            provider_names: subset.iter().map(|id| scenario.provider_name(*id).to_string()).collect(),
            status: solution.certificate.status,
            objective,
            normalized_objective: normalize(objective, full_objective),
            solution,
        })
    });
    let results = solved.into_iter().collect::<Result<Vec<_>, _>>()?;
    let sense = match scenario.config.objective {
        Objective::MaxData => ObjectiveSense::Maximize,
        _ => ObjectiveSense::Minimize,
    };
    let mut best: Option<usize> = None;
    for (i, r) in results.iter().enumerate() {
        if let Some(v) = r.objective {
            if best.and_then(|b| results[b].objective).is_none_or(|b| better(sense, v, b)) {
                best = Some(i);
            }
        }
    }
    Ok(BaselineSummary {
        k,
        objective: scenario.config.objective,
        results,
        best,
    })
}

pub fn write_baseline_csv<W: Write>(out: W, summary: &BaselineSummary) -> Result<(), AnalysisError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(BASELINE_CSV_HEADER)?;
    for r in &summary.results {
        w.write_record([
            r.provider_names.join("+"),
            r.status.to_string(),
            r.objective.map_or(String::new(), |v| v.to_string()),
            r.normalized_objective.map_or(String::new(), |v| v.to_string()),
            r.solution.selected_locations.len().to_string(),
        ])?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

/// Randomized trial grid: `trials` scenarios per constellation size.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrialConfig {
    pub trials: usize,
    pub constellation_sizes: Vec<usize>,
    pub objectives: Vec<Objective>,
}

impl Default for TrialConfig {
    fn default() -> Self {
        TrialConfig {
            trials: 10,
            constellation_sizes: vec![1, 2],
            objectives: vec![Objective::MinCost, Objective::MaxData],
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TrialRecord {
    pub satellites: usize,
    pub trial: usize,
    pub seed: u64,
    pub objective: Objective,
    pub contacts: usize,
    pub full_status: SolveStatus,
    pub full_objective: Option<f64>,
    pub best_one_provider: Option<f64>,
    pub best_two_provider: Option<f64>,
    pub normalized_one: Option<f64>,
    pub normalized_two: Option<f64>,
}

/// Seed of trial `trial` at constellation size `size`.
fn trial_seed(base: u64, size: usize, trial: usize) -> u64 {
    base.wrapping_mul(1_000_003).wrapping_add((size as u64) << 32).wrapping_add(trial as u64)
}

/// Runs the full network and the best one- and two-provider baselines on
/// freshly sampled and cost-randomized scenarios built on `base`.
///
/// `base` supplies providers, stations, spans and the constraint
/// configuration; its satellites are replaced by catalog draws.
pub fn run_trials(
    base: &Scenario,
    catalog: &[TleRecord],
    cfg: &TrialConfig,
    seed: u64,
    opts: &SolverOptions,
    execution: Execution,
) -> Result<Vec<TrialRecord>, AnalysisError> {
    let mut records = Vec::new();
    for &size in &cfg.constellation_sizes {
        for trial in 0..cfg.trials {
            let seed = trial_seed(seed, size, trial);
            let mut s = base.clone();
            s.satellites = sample_satellites(catalog, size, seed)?;
            let s = randomize_scenario(&s.prefiltered(), seed);
            let contacts = find_contacts_for_scenario(&s, execution).contacts;
            for &objective in &cfg.objectives {
                let mut so = s.clone();
                so.config.objective = objective;
                let full = solve_scenario(&so, &contacts, opts)?.solution;
                let fo = full.objective();
                let one = run_baselines(&so, &contacts, 1, fo, opts, execution)?;
                let two = if so.providers.len() >= 2 {
                    Some(run_baselines(&so, &contacts, 2, fo, opts, execution)?)
                } else {
                    None
                };
                let best_two = two.as_ref().and_then(|t| t.best_objective());
                records.push(TrialRecord {
                    satellites: size,
                    trial,
                    seed,
                    objective,
                    contacts: contacts.len(),
                    full_status: full.certificate.status,
                    full_objective: fo,
                    best_one_provider: one.best_objective(),
                    best_two_provider: best_two,
                    normalized_one: normalize(one.best_objective(), fo),
                    normalized_two: normalize(best_two, fo),
                });
            }
        }
    }
    Ok(records)
}

pub fn write_trials_csv<W: Write>(out: W, records: &[TrialRecord]) -> Result<(), AnalysisError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "satellites",
        "trial",
        "seed",
        "objective",
        "contacts",
        "full_status",
        "full_objective",
        "best_one_provider",
        "best_two_provider",
        "normalized_one",
        "normalized_two",
    ])?;
    let opt = |v: Option<f64>| v.map_or(String::new(), |v| v.to_string());
    for r in records {
        w.write_record([
            r.satellites.to_string(),
            r.trial.to_string(),
            r.seed.to_string(),
            r.objective.to_string(),
            r.contacts.to_string(),
            r.full_status.to_string(),
            opt(r.full_objective),
            opt(r.best_one_provider),
            opt(r.best_two_provider),
            opt(r.normalized_one),
            opt(r.normalized_two),
        ])?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}
