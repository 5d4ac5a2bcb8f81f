//! Independent oracles shared by the integration tests and the acceptance
//! run.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use gsopt::astro::{EpochUtc, PropagatorKind, SatellitePropagator};
use gsopt::contacts::elevation;
use gsopt::formulation::{IpModel, ObjectiveSense, Sense};
use gsopt::model::{Satellite, StationLocation};

/// Best objective over all 2^n binary patterns. The model may hold at most one
/// continuous variable, which is set to its cheapest value for the pattern.
pub fn exhaustive_optimum(m: &IpModel) -> Option<f64> {
    let bins: Vec<usize> = (0..m.variables.len()).filter(|j| m.variables[*j].is_binary()).collect();
    let conts: Vec<usize> = (0..m.variables.len()).filter(|j| !m.variables[*j].is_binary()).collect();
    assert!(bins.len() <= 22, "{} binaries is too many to enumerate", bins.len());
    assert!(conts.len() <= 1, "oracle handles one continuous variable");
    let minimize = m.objective.sense == ObjectiveSense::Minimize;
    let mut x = vec![0.0; m.variables.len()];
    let mut best: Option<f64> = None;
    for pattern in 0u64..(1u64 << bins.len()) {
        let mut in_bounds = true;
        for (bit, &j) in bins.iter().enumerate() {
            x[j] = if pattern & (1 << bit) != 0 { 1.0 } else { 0.0 };
            in_bounds &= x[j] >= m.variables[j].lo && x[j] <= m.variables[j].hi;
        }
        if !in_bounds {
            continue;
        }
        if let Some(&g) = conts.first() {
            let mut lo = m.variables[g].lo;
            let mut hi = m.variables[g].hi;
            for row in &m.constraints {
                let mut coef = 0.0;
                let mut rest = 0.0;
                for &(j, a) in &row.terms {
                    if j == g {
                        coef += a;
                    } else {
                        rest += a * x[j];
                    }
                }
                if coef == 0.0 {
                    continue;
                }
                let limit = (row.rhs - rest) / coef;
                let caps_above = match row.sense {
                    Sense::Le => coef > 0.0,
                    Sense::Ge => coef < 0.0,
                    Sense::Eq => {
                        lo = lo.max(limit);
                        hi = hi.min(limit);
                        continue;
                    }
                };
                if caps_above {
                    hi = hi.min(limit);
                } else {
                    lo = lo.max(limit);
                }
            }
            if lo > hi + 1e-9 * hi.abs().max(1.0) {
                continue;
            }
            let c: f64 = m.objective.terms.iter().filter(|(j, _)| *j == g).map(|(_, c)| *c).sum();
            x[g] = if (c >= 0.0) == minimize { lo } else { hi };
        }
        let feasible = m.constraints.iter().all(|row| {
            let lhs: f64 = row.terms.iter().map(|&(j, a)| a * x[j]).sum();
            let slack = 1e-9 * row.rhs.abs().max(1.0);
            match row.sense {
                Sense::Le => lhs <= row.rhs + slack,
                Sense::Ge => lhs >= row.rhs - slack,
                Sense::Eq => (lhs - row.rhs).abs() <= slack,
            }
        });
        if !feasible {
            continue;
        }
        let value = m.objective.constant + m.objective.terms.iter().map(|&(j, c)| c * x[j]).sum::<f64>();
        let improves = match best {
            None => true,
            Some(b) if minimize => value < b,
            Some(b) => value > b,
        };
        if improves {
            best = Some(value);
        }
    }
    best
}

pub fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(1.0)
}

/// A CPLEX LP file read back into named pieces.
#[derive(Debug, Default)]
pub struct LpFile {
    pub maximize: bool,
    pub constant: f64,
    pub objective: BTreeMap<String, f64>,
    pub rows: BTreeMap<String, (BTreeMap<String, f64>, String, f64)>,
    pub bounds: BTreeMap<String, (f64, f64)>,
    pub binaries: BTreeSet<String>,
}

fn parse_terms(tokens: &[&str]) -> BTreeMap<String, f64> {
    let mut out = BTreeMap::new();
    let mut sign = 1.0;
    let mut coef = 1.0;
    for t in tokens {
        match *t {
            "+" => sign = 1.0,
            "-" => sign = -1.0,
            _ => {
                if let Ok(v) = t.parse::<f64>() {
                    coef = v;
                } else {
                    if sign * coef != 0.0 {
                        *out.entry(t.to_string()).or_insert(0.0) += sign * coef;
                    }
                    sign = 1.0;
                    coef = 1.0;
                }
            }
        }
    }
    out
}

/// Reads the subset of LP syntax the exporter writes.
pub fn read_lp(text: &str) -> LpFile {
    let mut lp = LpFile::default();
    let mut section = "";
    let mut statements: Vec<(String, String)> = Vec::new();
    for line in text.lines() {
        if let Some(c) = line.strip_prefix("\\ Objective constant:") {
            lp.constant = c.trim().parse().expect("constant");
            continue;
        }
        if line.starts_with('\\') || line.trim().is_empty() {
            continue;
        }
        match line.trim() {
            "Minimize" | "Maximize" | "Subject To" | "Bounds" | "Binary" | "General" | "End" => {
                section = match line.trim() {
                    "Minimize" => "obj",
                    "Maximize" => {
                        lp.maximize = true;
                        "obj"
                    }
                    "Subject To" => "rows",
                    "Bounds" => "bounds",
                    "Binary" => "binary",
                    "General" => "general",
                    _ => "end",
                };
                continue;
            }
            _ => {}
        }
        if line.starts_with("   ") && !statements.is_empty() {
            let last = statements.len() - 1;
            statements[last].1.push(' ');
            statements[last].1.push_str(line.trim());
        } else {
            statements.push((section.to_string(), line.trim().to_string()));
        }
    }
    for (section, st) in statements {
        match section.as_str() {
            "obj" => {
                let (_, body) = st.split_once(':').expect("objective label");
                let tokens: Vec<&str> = body.split_whitespace().collect();
                lp.objective = parse_terms(&tokens);
            }
            "rows" => {
                let (name, body) = st.split_once(':').expect("row label");
                let tokens: Vec<&str> = body.split_whitespace().collect();
                let k = tokens.iter().position(|t| matches!(*t, "<=" | ">=" | "=")).expect("row sense");
                let rhs: f64 = tokens[k + 1].parse().expect("rhs");
                lp.rows.insert(name.trim().to_string(), (parse_terms(&tokens[..k]), tokens[k].to_string(), rhs));
            }
            "bounds" => {
                let t: Vec<&str> = st.split_whitespace().collect();
                match t.as_slice() {
                    [lo, "<=", name, "<=", hi] => {
                        lp.bounds.insert(name.to_string(), (lo.parse().unwrap(), hi.parse().unwrap()));
                    }
                    [name, "=", v] => {
                        let v: f64 = v.parse().unwrap();
                        lp.bounds.insert(name.to_string(), (v, v));
                    }
                    other => panic!("unexpected bound line {other:?}"),
                }
            }
            "binary" => lp.binaries.extend(st.split_whitespace().map(str::to_string)),
            _ => {}
        }
    }
    lp
}

/// Differences between a model and its re-read LP text; empty when the file
/// reproduces every coefficient exactly.
pub fn lp_mismatches(model: &IpModel, lp: &LpFile) -> Vec<String> {
    let mut out = Vec::new();
    let tag = |j: usize| model.variables[j].tag.clone();
    let dense = |terms: &[(usize, f64)]| -> BTreeMap<String, f64> {
        terms.iter().filter(|(_, a)| *a != 0.0).map(|(j, a)| (tag(*j), *a)).collect()
    };
    if lp.maximize != (model.objective.sense == ObjectiveSense::Maximize) {
        out.push("objective sense".into());
    }
    if lp.constant != model.objective.constant {
        out.push(format!("constant {} vs {}", lp.constant, model.objective.constant));
    }
    if lp.objective != dense(&model.objective.terms) {
        out.push("objective terms".into());
    }
    if lp.rows.len() != model.constraints.len() {
        out.push(format!("{} rows vs {}", lp.rows.len(), model.constraints.len()));
    }
    for c in &model.constraints {
        let sense = match c.sense {
            Sense::Le => "<=",
            Sense::Ge => ">=",
            Sense::Eq => "=",
        };
        match lp.rows.get(&c.tag) {
            Some((terms, s, rhs)) if *terms == dense(&c.terms) && s == sense && *rhs == c.rhs => {}
            _ => out.push(format!("row {}", c.tag)),
        }
    }
    for v in &model.variables {
        if lp.bounds.get(&v.tag) != Some(&(v.lo, v.hi)) {
            out.push(format!("bounds of {}", v.tag));
        }
        if lp.binaries.contains(&v.tag) != v.is_binary() {
            out.push(format!("integrality of {}", v.tag));
        }
    }
    out
}

/// Visibility runs found by sampling elevation every second; each window is
/// the first and last visible sample.
pub fn dense_windows(
    sat: &Satellite,
    station: &StationLocation,
    start: EpochUtc,
    end: EpochUtc,
    mask_deg: f64,
) -> Vec<(EpochUtc, EpochUtc)> {
    let prop = SatellitePropagator::new(&sat.tle, PropagatorKind::Sgp4).expect("propagator");
    let n = (end - start).floor() as i64;
    let mut out = Vec::new();
    let mut open: Option<EpochUtc> = None;
    let mut last = start;
    for k in 0..=n {
        let t = start + k as f64;
        let el = elevation(prop.position(t).expect("position"), &station.geodetic).expect("elevation");
        match (el >= mask_deg, open) {
            (true, None) => open = Some(t),
            (false, Some(s)) => {
                out.push((s, last));
                open = None;
            }
            _ => {}
        }
        last = t;
    }
    if let Some(s) = open {
        out.push((s, last));
    }
    out
}
