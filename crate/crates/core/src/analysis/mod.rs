//! Study harness: provider-subset baselines, randomized trials and the
//! simulation-window stability study.

mod baseline;
mod window;

pub use baseline::{
    provider_subsets, run_baselines, run_trials, solve_scenario, write_baseline_csv, write_trials_csv, BaselineResult,
    BaselineSummary, Solved, TrialConfig, TrialRecord, BASELINE_CSV_HEADER,
};
pub use window::{
    window_stability_study, window_stats, write_window_csv, WindowStats, DEFAULT_WINDOW_DAYS, WINDOW_CSV_HEADER,
};

use thiserror::Error;

use crate::formulation::FormulationError;
use crate::model::ModelError;
use crate::solver::SolverError;

#[derive(Debug, Error)]
pub enum AnalysisError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Formulation(#[from] FormulationError),
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error("invalid study input: {0}")]
    Input(String),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}
