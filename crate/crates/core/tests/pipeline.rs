mod common;

use std::path::Path;
use std::process::Command;

use common::{lp_mismatches, read_lp};
use gsopt::cli::{cmd_baseline, cmd_contacts, cmd_export_lp, cmd_optimize, cmd_scenario_gen, cmd_window_study, RunConfig};
use gsopt::formulation::build_model;
use gsopt::solver::{audit, SolveStatus};

fn small(seed: u64) -> RunConfig {
    RunConfig {
        seed,
        satellites: 1,
        sim_days: 1.0,
        ..RunConfig::default()
    }
}

fn gsopt(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_gsopt")).args(args).env("RUST_LOG", "error").output().unwrap()
}

fn lines(path: &Path) -> Vec<String> {
    std::fs::read_to_string(path).unwrap().lines().map(str::to_string).collect()
}

#[test]
fn contacts_csv_header() {
    let dir = tempfile::tempdir().unwrap();
    cmd_contacts(&small(2), dir.path()).unwrap();
    let l = lines(&dir.path().join("contacts.csv"));
    assert_eq!(l[0], "id,satellite,provider,station,start_iso,end_iso,duration_s,data_rate_bps,max_elevation_deg");
    assert!(l.len() > 10);
    let summary: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("contacts_summary.json")).unwrap()).unwrap();
    assert_eq!(summary["contacts"].as_u64().unwrap() as usize, l.len() - 1);
    assert_eq!(summary["config"]["seed"], 2);
}

#[test]
fn optimize_output_is_audited_and_consistent() {
    let dir = tempfile::tempdir().unwrap();
    let o = cmd_optimize(&small(8), dir.path()).unwrap();
    assert_eq!(o.solution.certificate.status, SolveStatus::Optimal);
    assert!(audit(&o.model, &o.solution.assignment).is_empty());
    let m = o.solution.metrics.as_ref().unwrap();
    let v = o.document.objective_value.unwrap();
    assert!((m.total_mission_cost - v).abs() <= 1e-6 * v.abs());
    let geo: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("solution.geojson")).unwrap()).unwrap();
    assert_eq!(geo["type"], "FeatureCollection");
    assert_eq!(geo["features"].as_array().unwrap().len(), 2 * o.document.selected_locations.len());
}

#[test]
fn one_provider_baseline_has_six_rows() {
    let dir = tempfile::tempdir().unwrap();
    let files = cmd_baseline(&small(3), dir.path()).unwrap();
    let l = lines(&files[0]);
    assert_eq!(l[0], "subset,status,objective,normalized,stations");
    assert_eq!(l.len(), 7);
}

#[test]
fn window_study_has_a_row_per_default_duration() {
    let dir = tempfile::tempdir().unwrap();
    let stations = dir.path().join("stations.csv");
    std::fs::write(
        &stations,
        "provider,location,country,longitude_deg,latitude_deg,bands,status\n\
         KSAT,Svalbard,Norway,15.41,78.23,S;X,Operational\n\
         KSAT,Troll,Antarctica,2.53,-72.01,S;X,Operational\n",
    )
    .unwrap();
    let cfg = RunConfig {
        stations: Some(stations),
        window_sample: 1,
        ..small(1)
    };
    cmd_window_study(&cfg, dir.path()).unwrap();
    let l = lines(&dir.path().join("window_study.csv"));
    assert_eq!(l[0], "window_days,mean_gap_s,mean_contact_s,contacts_per_day");
    let days: Vec<&str> = l[1..].iter().map(|r| r.split(',').next().unwrap()).collect();
    assert_eq!(days, ["1", "2", "3", "5", "7", "10", "20", "30", "50", "60", "90", "100", "180"]);
}

#[test]
fn scenario_gen_is_reproducible() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let cfg = RunConfig {
        seed: 42,
        ..RunConfig::default()
    };
    let fa = cmd_scenario_gen(&cfg, a.path()).unwrap();
    let fb = cmd_scenario_gen(&cfg, b.path()).unwrap();
    assert_eq!(std::fs::read(&fa[0]).unwrap(), std::fs::read(&fb[0]).unwrap());
}

#[test]
fn exported_model_reads_back_exactly() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small(5);
    let files = cmd_export_lp(&cfg, dir.path()).unwrap();
    let s = cfg.scenario().unwrap();
    let cs = gsopt::contacts::find_contacts_for_scenario(&s, gsopt::exec::Execution::Sequential).contacts;
    let m = build_model(&s, &cs).unwrap();
    let lp = read_lp(&std::fs::read_to_string(&files[0]).unwrap());
    assert_eq!(lp_mismatches(&m, &lp), Vec::<String>::new());
}

#[test]
fn binary_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let cfg = dir.path().join("run.json");
    std::fs::write(&cfg, r#"{"constraints": {"objective": "max_data", "e_max": null}}"#).unwrap();
    let r = gsopt(&["optimize", "--config", cfg.to_str().unwrap(), "--out", out]);
    assert_eq!(r.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&r.stderr).contains("e_max"));

    let r = gsopt(&["contacts", "--tles", "/nonexistent/catalog.tle", "--out", out]);
    assert_eq!(r.status.code(), Some(2));

    let r = gsopt(&["optimize", "--objective", "fastest", "--out", out]);
    assert_eq!(r.status.code(), Some(2));

    let r = gsopt(&["scenario-gen", "--seed", "42", "--out", out]);
    assert_eq!(r.status.code(), Some(0), "{}", String::from_utf8_lossy(&r.stderr));
    assert!(dir.path().join("scenario.json").exists());
}
