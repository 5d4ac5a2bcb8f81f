//! Exact branch-and-bound over LP relaxations, independent audit, and LP-file export.

mod audit;
mod bnb;
mod heuristic;
pub mod lp;
mod lpfile;
pub(crate) mod metrics;
mod presolve;

pub use audit::{audit, Violation, ViolationKind, AUDIT_TOL};
pub use bnb::{solve, solve_lp_relaxation, solve_with};
pub use lpfile::{export_lp, write_lp};
pub use metrics::{compute_metrics, MissionMetrics};

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::contacts::ContactWindow;
use crate::formulation::{IpModel, VarKind};
use crate::model::Scenario;

pub const INTEGRALITY_TOL: f64 = 1e-6;
pub const OPTIMALITY_GAP: f64 = 1e-6;

#[derive(Debug, Error)]
pub enum SolverError {
    #[error("malformed model: {0}")]
    Model(String),
    #[error("numerical breakdown: {0}")]
    Numerical(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Limits {
    /// Wall-clock budget in seconds.
    pub time: Option<f64>,
    pub nodes: Option<u64>,
    pub rel_gap: f64,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            time: None,
            nodes: None,
            rel_gap: OPTIMALITY_GAP,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LpEngineKind {
    /// Dense simplex for small relaxations, sparse otherwise.
    #[default]
    Auto,
    Dense,
    Sparse,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolverOptions {
    pub limits: Limits,
    pub engine: LpEngineKind,
    /// Integer-equivalent tightening of the relaxation before branching.
    pub strengthen: bool,
    pub heuristic: bool,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            limits: Limits::default(),
            engine: LpEngineKind::Auto,
            strengthen: true,
            heuristic: true,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolveStatus {
    Optimal,
    FeasibleWithGap,
    Infeasible,
    Unbounded,
    LimitReached,
}

impl std::fmt::Display for SolveStatus {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            SolveStatus::Optimal => "optimal",
            SolveStatus::FeasibleWithGap => "feasible_with_gap",
            SolveStatus::Infeasible => "infeasible",
            SolveStatus::Unbounded => "unbounded",
            SolveStatus::LimitReached => "limit_reached",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub status: SolveStatus,
    pub best_objective: Option<f64>,
    pub best_bound: f64,
    pub relative_gap: f64,
    pub nodes_explored: u64,
    pub wall_time: f64,
    /// Departures from the full formulation carried over from the model.
    pub simplifications: Vec<String>,
}

impl Certificate {
    pub fn has_solution(&self) -> bool {
        self.best_objective.is_some()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Solution {
    /// Value per model variable; empty when no assignment was found.
    pub assignment: Vec<f64>,
    pub certificate: Certificate,
    pub selected_contacts: BTreeSet<u32>,
    pub selected_locations: BTreeSet<u32>,
    pub selected_providers: BTreeSet<u32>,
    pub metrics: Option<MissionMetrics>,
}

impl Solution {
    pub(crate) fn new(model: &IpModel, assignment: Vec<f64>, certificate: Certificate) -> Self {
        let mut sol = Solution {
            assignment,
            certificate,
            selected_contacts: BTreeSet::new(),
            selected_locations: BTreeSet::new(),
            selected_providers: BTreeSet::new(),
            metrics: None,
        };
        for v in &model.variables {
            if sol.assignment.get(v.index).is_some_and(|x| *x > 0.5) {
                match v.kind {
                    VarKind::Contact { contact_id } => {
                        sol.selected_contacts.insert(contact_id);
                    }
                    VarKind::Location { station_id } => {
                        sol.selected_locations.insert(station_id);
                    }
                    VarKind::Provider { provider_id } => {
                        sol.selected_providers.insert(provider_id);
                    }
                    _ => {}
                }
            }
        }
        sol
    }

    /// Fills `metrics` from the assignment.
    pub fn attach_metrics(&mut self, model: &IpModel, scenario: &Scenario, contacts: &[ContactWindow]) {
        if !self.assignment.is_empty() {
            self.metrics = Some(compute_metrics(model, &self.assignment, scenario, contacts));
        }
    }

    pub fn objective(&self) -> Option<f64> {
        self.certificate.best_objective
    }
}
