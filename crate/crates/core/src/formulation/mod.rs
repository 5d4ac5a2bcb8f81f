//! Solver-independent integer programs for station and provider selection.

mod build;

pub use build::{
    add_optional_constraints, build_max_data, build_min_cost, build_min_max_gap, build_model,
    exclusion_constraints, linking_constraints, window_starts, VarIndex,
};

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Seconds in one average Gregorian month.
pub const SECONDS_PER_MONTH: f64 = 365.25 * 86_400.0 / 12.0;

#[derive(Debug, Error, PartialEq)]
pub enum FormulationError {
    #[error("configuration: {0}")]
    Config(String),
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ScaleFactors {
    pub mission_over_sim: f64,
    pub months_in_mission: f64,
    pub per_month_from_sim: f64,
}

/// Weights that turn simulation-window sums into mission totals and monthly rates.
pub fn scale_factors(t_sim: f64, t_opt: f64) -> ScaleFactors {
    ScaleFactors {
        mission_over_sim: t_opt / t_sim,
        months_in_mission: t_opt / SECONDS_PER_MONTH,
        per_month_from_sim: SECONDS_PER_MONTH / t_sim,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum GapEvent {
    SimStart,
    Contact(u32),
    SimEnd,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum VarKind {
    Provider { provider_id: u32 },
    Location { station_id: u32 },
    Contact { contact_id: u32 },
    VehicleLicense { satellite_id: u32, station_id: u32 },
    GapSuccessor { satellite_id: u32, from: GapEvent, to: GapEvent },
    GapMax,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Integrality {
    Binary,
    Continuous,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecisionVar {
    pub index: usize,
    pub kind: VarKind,
    pub integrality: Integrality,
    pub lo: f64,
    pub hi: f64,
    pub tag: String,
}

impl DecisionVar {
    pub fn is_binary(&self) -> bool {
        self.integrality == Integrality::Binary
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Sense {
    Le,
    Eq,
    Ge,
}

impl fmt::Display for Sense {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sense::Le => "<=",
            Sense::Eq => "=",
            Sense::Ge => ">=",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LinearConstraint {
    pub terms: Vec<(usize, f64)>,
    pub sense: Sense,
    pub rhs: f64,
    /// Unique row name: the family label followed by indices.
    pub tag: String,
    pub family: String,
}

impl LinearConstraint {
    pub fn activity(&self, x: &[f64]) -> f64 {
        self.terms.iter().map(|(j, a)| a * x[*j]).sum()
    }

    /// Amount by which `x` violates the row (0 when satisfied).
    pub fn violation(&self, x: &[f64]) -> f64 {
        let lhs = self.activity(x);
        match self.sense {
            Sense::Le => (lhs - self.rhs).max(0.0),
            Sense::Ge => (self.rhs - lhs).max(0.0),
            Sense::Eq => (lhs - self.rhs).abs(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ObjectiveSense {
    Minimize,
    Maximize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LinearObjective {
    pub sense: ObjectiveSense,
    pub terms: Vec<(usize, f64)>,
    pub constant: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IpModel {
    pub variables: Vec<DecisionVar>,
    pub constraints: Vec<LinearConstraint>,
    pub objective: LinearObjective,
    /// Constraint family label to a description of what it enforces.
    pub provenance: BTreeMap<String, String>,
    /// Deliberate departures from the full formulation, e.g. successor horizons.
    pub simplifications: Vec<String>,
}

impl IpModel {
    pub fn new(sense: ObjectiveSense) -> Self {
        IpModel {
            variables: Vec::new(),
            constraints: Vec::new(),
            objective: LinearObjective {
                sense,
                terms: Vec::new(),
                constant: 0.0,
            },
            provenance: BTreeMap::new(),
            simplifications: Vec::new(),
        }
    }

    pub fn add_var(&mut self, kind: VarKind, integrality: Integrality, lo: f64, hi: f64, tag: String) -> usize {
        let index = self.variables.len();
        self.variables.push(DecisionVar {
            index,
            kind,
            integrality,
            lo,
            hi,
            tag,
        });
        index
    }

    pub fn add_constraint(&mut self, family: &str, tag: String, terms: Vec<(usize, f64)>, sense: Sense, rhs: f64) {
        self.constraints.push(LinearConstraint {
            terms,
            sense,
            rhs,
            tag,
            family: family.to_string(),
        });
    }

    pub fn num_vars(&self) -> usize {
        self.variables.len()
    }

    pub fn binary_count(&self) -> usize {
        self.variables.iter().filter(|v| v.is_binary()).count()
    }

    pub fn objective_value(&self, x: &[f64]) -> f64 {
        self.objective.constant + self.objective.terms.iter().map(|(j, c)| c * x[*j]).sum::<f64>()
    }

    pub fn family_counts(&self) -> BTreeMap<String, usize> {
        let mut out = BTreeMap::new();
        for c in &self.constraints {
            *out.entry(c.family.clone()).or_insert(0) += 1;
        }
        out
    }

    pub fn constraints_in<'a>(&'a self, family: &'a str) -> impl Iterator<Item = &'a LinearConstraint> + 'a {
        self.constraints.iter().filter(move |c| c.family == family)
    }

    pub fn var_by_tag(&self, tag: &str) -> Option<&DecisionVar> {
        self.variables.iter().find(|v| v.tag == tag)
    }

    /// Structural invariants: indices in range, no duplicate terms, finite data,
    /// binary bounds within [0, 1], unique tags.
    pub fn check(&self) -> Result<(), String> {
        let n = self.variables.len();
        let mut tags = BTreeSet::new();
        for (k, v) in self.variables.iter().enumerate() {
            if v.index != k {
                return Err(format!("variable {} has index {}", k, v.index));
            }
            if !tags.insert(v.tag.as_str()) {
                return Err(format!("duplicate variable tag {}", v.tag));
            }
            if !(v.lo.is_finite() && v.hi.is_finite() && v.lo <= v.hi) {
                return Err(format!("variable {} has bad bounds [{}, {}]", v.tag, v.lo, v.hi));
            }
            if v.is_binary() && (v.lo < 0.0 || v.hi > 1.0) {
                return Err(format!("binary {} has bounds outside [0, 1]", v.tag));
            }
        }
        let mut rows = BTreeSet::new();
        for c in &self.constraints {
            if !rows.insert(c.tag.as_str()) {
                return Err(format!("duplicate constraint tag {}", c.tag));
            }
            let mut seen = BTreeSet::new();
            for (j, a) in &c.terms {
                if *j >= n || !a.is_finite() || !seen.insert(*j) {
                    return Err(format!("row {} has a bad term ({j}, {a})", c.tag));
                }
            }
            if !c.rhs.is_finite() {
                return Err(format!("row {} has a non-finite rhs", c.tag));
            }
        }
        for (j, a) in &self.objective.terms {
            if *j >= n || !a.is_finite() {
                return Err(format!("objective has a bad term ({j}, {a})"));
            }
        }
        Ok(())
    }
}
