//! Acceptance run: one PASS/FAIL line per criterion.
//!
//! Exits nonzero when a criterion fails that is not listed in
//! `EXPECTED_FAILURES`.

mod common;

use std::collections::BTreeSet;
use std::time::Instant;

use common::{dense_windows, exhaustive_optimum, rel_close};
use gsopt::analysis::{run_baselines, solve_scenario, window_stability_study, BaselineSummary};
use gsopt::astro::{parse_tle_catalog, EpochUtc, PropagatorKind};
use gsopt::cli::{cmd_optimize, RunConfig};
use gsopt::contacts::{find_contacts, find_contacts_for_scenario, ContactSearch, ContactWindow};
use gsopt::exec::Execution;
use gsopt::formulation::{build_model, scale_factors, IpModel};
use gsopt::model::{
    bundled_station_dataset, sample_satellites, ConstraintConfig, Objective, Scenario, StationStatus,
    BUNDLED_SAMPLE_TLES,
};
use gsopt::solver::{audit, solve, Limits, SolveStatus, Solution, SolverOptions};
use gsopt::toy;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// The bundled station table holds the published station list, 86 of them operational;
/// "over 91" is a survey total quoted without a list.
const EXPECTED_FAILURES: &[u32] = &[8];

const DAY: f64 = 86_400.0;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

/// Re-checks every solved model handed to it.
#[derive(Default)]
struct Audits {
    checked: usize,
    failures: Vec<String>,
}

impl Audits {
    fn check(&mut self, label: &str, model: &IpModel, sol: &Solution) {
        if !matches!(sol.certificate.status, SolveStatus::Optimal | SolveStatus::FeasibleWithGap) {
            return;
        }
        self.checked += 1;
        let v = audit(model, &sol.assignment);
        if !v.is_empty() {
            self.failures.push(format!("{label}: {} violations, first {:?}", v.len(), v[0]));
        }
    }
}

fn solver_exactness(audits: &mut Audits) -> Outcome {
    let t0 = Instant::now();
    let (mut compared, mut mismatches, mut seed) = (0, Vec::new(), 0u64);
    while compared < 60 {
        let (s, cs) = toy::random_instance(seed, 18);
        seed += 1;
        let m = build_model(&s, &cs).expect("random instance builds");
        if m.binary_count() > 18 {
            continue;
        }
        let sol = solve(&m, &Limits::default()).expect("solver runs");
        audits.check(&format!("random instance {}", seed - 1), &m, &sol);
        let agree = match (exhaustive_optimum(&m), sol.objective()) {
            (None, None) => sol.certificate.status == SolveStatus::Infeasible,
            (Some(a), Some(b)) => sol.certificate.status == SolveStatus::Optimal && rel_close(a, b, 1e-6),
            _ => false,
        };
        if !agree {
            mismatches.push(seed - 1);
        }
        compared += 1;
    }
    let secs = t0.elapsed().as_secs_f64();
    outcome(
        mismatches.is_empty() && secs < 60.0,
        format!("{compared} models <= 18 binaries, {} mismatches {mismatches:?}, {secs:.1} s", mismatches.len()),
    )
}

/// Rebuilds each subset model so baseline solutions are audited too.
fn audit_baselines(audits: &mut Audits, label: &str, s: &Scenario, contacts: &[ContactWindow], b: &BaselineSummary) {
    for r in &b.results {
        let sub = s.restricted_to_providers(&r.provider_subset);
        let cs: Vec<ContactWindow> =
            contacts.iter().filter(|c| r.provider_subset.contains(&c.provider_id)).cloned().collect();
        let m = build_model(&sub, &cs).expect("subset model builds");
        audits.check(&format!("{label} subset {:?}", r.provider_names), &m, &r.solution);
    }
}

fn no_worse(sense_min: bool, a: f64, b: Option<f64>) -> bool {
    // An infeasible subset imposes nothing.
    b.is_none_or(|b| {
        let slack = 1e-6 * a.abs().max(b.abs()).max(1.0);
        if sense_min { a <= b + slack } else { a >= b - slack }
    })
}

fn superset_dominance(audits: &mut Audits) -> Outcome {
    let t0 = Instant::now();
    let opts = SolverOptions::default();
    let mut violations = Vec::new();
    let (mut cost_one, mut cost_two, mut data_one, mut data_two) = (Vec::new(), Vec::new(), Vec::new(), Vec::new());
    for seed in 0..10u64 {
        let cfg = RunConfig {
            seed,
            satellites: 2,
            sim_days: 2.0,
            ..RunConfig::default()
        };
        let base = cfg.scenario().expect("scenario");
        let contacts = find_contacts_for_scenario(&base, Execution::default()).contacts;
        for objective in [Objective::MinCost, Objective::MaxData] {
            let mut s = base.clone();
            s.config.objective = objective;
            let full = solve_scenario(&s, &contacts, &opts).expect("full solve");
            let label = format!("seed {seed} {objective:?}");
            audits.check(&format!("{label} full"), &full.model, &full.solution);
            let Some(f) = full.solution.objective().filter(|_| full.solution.certificate.status == SolveStatus::Optimal)
            else {
                violations.push(format!("{label}: full status {}", full.solution.certificate.status));
                continue;
            };
            let one = run_baselines(&s, &contacts, 1, Some(f), &opts, Execution::default()).expect("k=1");
            let two = run_baselines(&s, &contacts, 2, Some(f), &opts, Execution::default()).expect("k=2");
            audit_baselines(audits, &label, &s, &contacts, &one);
            audit_baselines(audits, &label, &s, &contacts, &two);
            let (b1, b2) = (one.best_objective(), two.best_objective());
            let min = objective == Objective::MinCost;
            let chain = no_worse(min, f, b2) && match b2 {
                Some(v2) => no_worse(min, v2, b1),
                None => b1.is_none(),
            };
            if !chain {
                violations.push(format!("{label}: full {f} two {b2:?} one {b1:?}"));
            }
            match objective {
                Objective::MinCost => {
                    cost_one.extend(b1.map(|b| b / f));
                    cost_two.extend(b2.map(|b| b / f));
                }
                _ => {
                    data_one.extend(b1.filter(|b| *b > 0.0).map(|b| f / b));
                    data_two.extend(b2.filter(|b| *b > 0.0).map(|b| f / b));
                }
            }
        }
    }
    let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len().max(1) as f64;
    let secs = t0.elapsed().as_secs_f64();
    outcome(
        violations.is_empty(),
        format!(
            "10 seeds x 2 objectives, violations {violations:?}; min-cost best-one/full {:.3}, best-two/full {:.3}; \
             max-data full/best-one {:.3} (+{:.0}% data), full/best-two {:.3} (+{:.0}% data); \
             published result: over 300% more data than one provider and over 200% more than two, for a one-satellite mission; {secs:.1} s",
            mean(&cost_one),
            mean(&cost_two),
            mean(&data_one),
            100.0 * (mean(&data_one) - 1.0),
            mean(&data_two),
            100.0 * (mean(&data_two) - 1.0),
        ),
    )
}

fn contact_oracle() -> Outcome {
    let t0 = Instant::now();
    let cat = parse_tle_catalog(BUNDLED_SAMPLE_TLES);
    let sats = sample_satellites(&cat.records, 5, 404).expect("sample");
    let ds = bundled_station_dataset();
    let operational: Vec<_> = ds.stations.iter().filter(|s| s.status == StationStatus::Operational).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(404);
    let start = EpochUtc::parse_iso("2024-09-11T00:00:00Z").expect("epoch");
    let end = start + DAY;
    let (mut windows, mut worst, mut problems) = (0, 0.0f64, Vec::new());
    for sat in &sats {
        let st = operational[rng.random_range(0..operational.len())];
        let search = ContactSearch {
            start,
            end,
            min_elevation_deg: 10.0,
            coarse_step_s: 30.0,
            propagator: PropagatorKind::Sgp4,
            execution: Execution::Sequential,
        };
        let found = find_contacts(std::slice::from_ref(sat), std::slice::from_ref(st), &search).contacts;
        for (a, b) in dense_windows(sat, st, start, end, 10.0) {
            if b - a <= 10.0 {
                continue;
            }
            windows += 1;
            match found.iter().find(|c| c.start <= b && a <= c.end) {
                None => problems.push(format!("{} / {}: missed {}", sat.name, st.name, a.to_iso())),
                Some(c) => {
                    let err = (c.start - a).abs().max((c.end - b).abs());
                    worst = worst.max(err);
                    if err > 1.0 {
                        problems.push(format!("{} / {}: off by {err:.2} s", sat.name, st.name));
                    }
                }
            }
        }
    }
    let secs = t0.elapsed().as_secs_f64();
    outcome(
        problems.is_empty() && windows > 0 && secs < 30.0,
        format!("5 pairs, {windows} windows, worst boundary error {worst:.3} s, problems {problems:?}, {secs:.1} s"),
    )
}

fn scaling_factors() -> Outcome {
    let f = scale_factors(7.0 * DAY, 365.0 * DAY);
    let over = 365.0 / 7.0;
    let months = 365.0 / (365.25 / 12.0);
    let pass = rel_close(f.mission_over_sim, over, 1e-12)
        && rel_close(f.months_in_mission, months, 1e-12)
        && (f.mission_over_sim - 52.142857).abs() < 1e-6
        && (f.months_in_mission - 11.99178).abs() < 1e-5;
    outcome(
        pass,
        format!("mission_over_sim {:.7}, months_in_mission {:.6}", f.mission_over_sim, f.months_in_mission),
    )
}

/// Smallest largest gap over contact subsets meeting the downlink floor;
/// boundary gaps are not counted.
fn enumerate_gap(contacts: &[ContactWindow], floor: f64) -> Option<f64> {
    let mut best: Option<f64> = None;
    for mask in 1u32..(1 << contacts.len()) {
        let chosen: Vec<&ContactWindow> =
            contacts.iter().enumerate().filter(|(i, _)| mask & (1 << i) != 0).map(|(_, c)| c).collect();
        if chosen.iter().map(|c| c.data_volume()).sum::<f64>() < floor {
            continue;
        }
        let gap = chosen.windows(2).map(|w| w[1].start - w[0].end).fold(0.0, f64::max);
        best = Some(best.map_or(gap, |b: f64| b.min(gap)));
    }
    best
}

fn min_max_gap_toy(audits: &mut Audits) -> Outcome {
    let mut lines = Vec::new();
    let mut pass = true;
    for floor in [1e11, 2e11, 3e11] {
        let mut s = toy::single_station();
        s.config = ConstraintConfig {
            objective: Objective::MinMaxGap,
            t_period: s.t_sim(),
            t_min: 0.0,
            e_max: Some(1e9),
            d_s_min: Some(floor),
            ..ConstraintConfig::default()
        };
        let cs = vec![
            toy::contact(&s, 0, 0, 0, 0.0, 100.0),
            toy::contact(&s, 1, 0, 0, 200.0, 300.0),
            toy::contact(&s, 2, 0, 0, 500.0, 600.0),
        ];
        let solved = solve_scenario(&s, &cs, &SolverOptions::default()).expect("toy solves");
        audits.check(&format!("gap toy floor {floor:e}"), &solved.model, &solved.solution);
        let got = solved.solution.objective();
        let want = enumerate_gap(&cs, floor);
        let ok = matches!((got, want), (Some(a), Some(b)) if rel_close(a, b, 1e-6));
        pass &= ok;
        lines.push(format!("floor {floor:e}: solver {got:?} oracle {want:?}"));
        if floor == 3e11 {
            pass &= got.is_some_and(|g| (g - 200.0).abs() < 1e-6);
        }
    }
    outcome(pass, lines.join("; "))
}

fn window_plateau() -> Outcome {
    let t0 = Instant::now();
    let cat = parse_tle_catalog(BUNDLED_SAMPLE_TLES);
    let ds = bundled_station_dataset();
    let stations: Vec<_> = ds.stations.into_iter().filter(|s| s.status == StationStatus::Operational).collect();
    let start = EpochUtc::parse_iso("2024-09-11T00:00:00Z").expect("epoch");
    let stats = window_stability_study(
        &cat.records,
        &stations,
        &[7, 20, 180],
        20,
        0,
        start,
        &Default::default(),
        Execution::default(),
    )
    .expect("window study");
    let gap = |d: u32| stats.iter().find(|w| w.window_days == d).map(|w| w.mean_gap).expect("duration present");
    let (g7, g20, g180) = (gap(7), gap(20), gap(180));
    let rel = (g20 - g180).abs() / g180;
    let secs = t0.elapsed().as_secs_f64();
    outcome(
        rel < 0.25,
        format!(
            "20 satellites, {} stations: mean gap 7 d {g7:.1} s, 20 d {g20:.1} s, 180 d {g180:.1} s, relative {rel:.4}; {secs:.1} s",
            stations.len()
        ),
    )
}

fn dataset_fidelity() -> Outcome {
    let ds = bundled_station_dataset();
    let operational = ds.count_with_status(StationStatus::Operational);
    let svalbard = ds.stations.iter().find(|s| s.name == "Svalbard" && ds.provider(s.provider_id).is_some_and(|p| p.name == "KSAT"));
    let coords_ok = svalbard.is_some_and(|s| s.geodetic.longitude == 15.41 && s.geodetic.latitude == 78.23);
    outcome(
        ds.providers.len() == 6 && operational >= 91 && coords_ok,
        format!(
            "{} providers, {} rows, {operational} operational (the published station list has 86 operational rows; \
             91 is a survey total quoted without a list), Svalbard/KSAT coordinates match: {coords_ok}",
            ds.providers.len(),
            ds.stations.len()
        ),
    )
}

fn determinism(audits: &mut Audits) -> Outcome {
    let cfg = RunConfig {
        seed: 7,
        ..RunConfig::default()
    };
    let (a, b) = (tempfile::tempdir().expect("tempdir"), tempfile::tempdir().expect("tempdir"));
    let oa = cmd_optimize(&cfg, a.path()).expect("first run");
    let ob = cmd_optimize(&cfg, b.path()).expect("second run");
    audits.check("determinism run 1", &oa.model, &oa.solution);
    audits.check("determinism run 2", &ob.model, &ob.solution);
    let ja = std::fs::read(a.path().join("solution.json")).expect("solution.json");
    let jb = std::fs::read(b.path().join("solution.json")).expect("solution.json");
    outcome(
        ja == jb,
        format!("seed 7, 2 satellites, 7 days: {} bytes, identical: {}, status {}", ja.len(), ja == jb, oa.solution.certificate.status),
    )
}

fn degenerate_guards(audits: &mut Audits) -> Outcome {
    let mut cfg = RunConfig {
        seed: 3,
        sim_days: 1.0,
        ..RunConfig::default()
    };
    cfg.constraints.d_s_min = Some(0.0);
    let s = cfg.scenario().expect("scenario");
    let contacts = find_contacts_for_scenario(&s, Execution::default()).contacts;
    let solved = solve_scenario(&s, &contacts, &SolverOptions::default()).expect("solve");
    audits.check("zero downlink floor", &solved.model, &solved.solution);
    let zero = solved.solution.certificate.status == SolveStatus::Optimal && solved.solution.objective() == Some(0.0);

    let mut bad = RunConfig::default();
    bad.constraints.objective = Objective::MaxData;
    bad.constraints.e_max = None;
    let config_rejects = bad.validate().is_err() && bad.constraints.validate(7.0 * DAY).is_err();
    let mut s2 = s.clone();
    s2.config = bad.constraints.clone();
    let builder_rejects = build_model(&s2, &contacts).is_err();
    outcome(
        zero && config_rejects && builder_rejects,
        format!(
            "min-cost with zero floor: {} {:?} over {} contacts; max-data without e_max rejected by config: {config_rejects}, by builder: {builder_rejects}",
            solved.solution.certificate.status,
            solved.solution.objective(),
            contacts.len()
        ),
    )
}

fn main() {
    let mut audits = Audits::default();
    let mut results: Vec<(u32, &str, Outcome)> = vec![
        (1, "solver exactness", solver_exactness(&mut audits)),
        (3, "superset dominance", superset_dominance(&mut audits)),
        (4, "contact-finder oracle", contact_oracle()),
        (5, "scaling factors", scaling_factors()),
        (6, "min-max-gap toy", min_max_gap_toy(&mut audits)),
        (7, "window-stability plateau", window_plateau()),
        (8, "dataset fidelity", dataset_fidelity()),
        (9, "determinism", determinism(&mut audits)),
        (10, "degenerate-solution guards", degenerate_guards(&mut audits)),
    ];
    let audit_outcome = outcome(
        audits.failures.is_empty() && audits.checked > 0,
        format!("{} solutions re-checked, failures {:?}", audits.checked, audits.failures),
    );
    results.insert(1, (2, "audit cleanliness", audit_outcome));

    let mut unexpected = BTreeSet::new();
    for (n, name, o) in &results {
        let tag = if o.pass { "PASS" } else { "FAIL" };
        let note = if !o.pass && EXPECTED_FAILURES.contains(n) { " (expected)" } else { "" };
        println!("{tag} criterion {n}: {name}{note}: {}", o.detail);
        if !o.pass && !EXPECTED_FAILURES.contains(n) {
            unexpected.insert(*n);
        }
    }
    if !unexpected.is_empty() {
        println!("unexpected failures: {unexpected:?}");
        std::process::exit(1);
    }
}
