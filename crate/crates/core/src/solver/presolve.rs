use std::collections::{BTreeMap, BTreeSet, HashSet};

use super::lp::{LpProblem, LpRow};
use crate::formulation::{IpModel, ObjectiveSense, Sense};

const TOL: f64 = 1e-9;

/// A minimisation problem over the unfixed variables of a model.
#[derive(Clone, Debug)]
pub(crate) struct Prepared {
    pub lp: LpProblem,
    pub binary: Vec<bool>,
    pub orig_of: Vec<usize>,
    pub n_orig: usize,
    /// Values of variables removed by fixing, by original index.
    pub fixed: BTreeMap<usize, f64>,
    /// Added to the reduced objective to give the signed original objective.
    pub constant: f64,
    /// Original objective = sign × (reduced objective + constant).
    pub sign: f64,
    pub infeasible: bool,
}

impl Prepared {
    pub fn expand(&self, xr: &[f64]) -> Vec<f64> {
        let mut x = vec![0.0; self.n_orig];
        for (j, v) in &self.fixed {
            x[*j] = *v;
        }
        for (k, j) in self.orig_of.iter().enumerate() {
            x[*j] = xr[k];
        }
        x
    }
}

#[derive(Clone, Debug)]
struct Row {
    terms: Vec<(usize, f64)>,
    sense: Sense,
    rhs: f64,
}

fn all_binary_positive(r: &Row, binary: &[bool]) -> bool {
    r.terms.iter().all(|(j, a)| binary[*j] && *a > 0.0)
}

/// Removes fixed variables and empty rows; with `strengthen`, also turns
/// singleton rows into bounds, clamps knapsack coefficients, disaggregates
/// big-M links and merges pairwise conflicts into cliques. Every step keeps
/// the set of integer-feasible points unchanged.
pub(crate) fn prepare(model: &IpModel, strengthen: bool) -> Prepared {
    let n = model.variables.len();
    let sign = match model.objective.sense {
        ObjectiveSense::Minimize => 1.0,
        ObjectiveSense::Maximize => -1.0,
    };
    let binary: Vec<bool> = model.variables.iter().map(|v| v.is_binary()).collect();
    let mut lo: Vec<f64> = model.variables.iter().map(|v| v.lo).collect();
    let mut hi: Vec<f64> = model.variables.iter().map(|v| v.hi).collect();
    let mut cost = vec![0.0; n];
    for (j, c) in &model.objective.terms {
        cost[*j] += sign * c;
    }
    let mut constant = sign * model.objective.constant;
    let mut rows: Vec<Row> = model
        .constraints
        .iter()
        .map(|c| Row {
            terms: c.terms.iter().filter(|(_, a)| *a != 0.0).copied().collect(),
            sense: c.sense,
            rhs: c.rhs,
        })
        .collect();
    let mut infeasible = false;
    let mut substituted = vec![false; n];

    for _round in 0..50 {
        let mut changed = false;
        for j in 0..n {
            if !substituted[j] && lo[j] == hi[j] {
                substituted[j] = true;
                changed = true;
            }
        }
        let mut kept = Vec::with_capacity(rows.len());
        for mut r in rows.drain(..) {
            let before = r.terms.len();
            let mut shift = 0.0;
            r.terms.retain(|(j, a)| {
                if substituted[*j] {
                    shift += a * lo[*j];
                    false
                } else {
                    true
                }
            });
            r.rhs -= shift;
            if r.terms.len() != before {
                changed = true;
            }
            if r.terms.is_empty() {
                let slack = TOL * r.rhs.abs().max(1.0);
                let ok = match r.sense {
                    Sense::Le => 0.0 <= r.rhs + slack,
                    Sense::Ge => 0.0 >= r.rhs - slack,
                    Sense::Eq => r.rhs.abs() <= slack,
                };
                infeasible |= !ok;
                changed = true;
                continue;
            }
            if strengthen {
                if r.terms.len() == 1 {
                    let (j, a) = r.terms[0];
                    let v = r.rhs / a;
                    let (mut l, mut h) = (lo[j], hi[j]);
                    let upper = matches!((r.sense, a > 0.0), (Sense::Le, true) | (Sense::Ge, false)) || r.sense == Sense::Eq;
                    let lower = matches!((r.sense, a > 0.0), (Sense::Ge, true) | (Sense::Le, false)) || r.sense == Sense::Eq;
                    if upper {
                        h = h.min(if binary[j] { (v + TOL).floor() } else { v });
                    }
                    if lower {
                        l = l.max(if binary[j] { (v - TOL).ceil() } else { v });
                    }
                    if l > h + TOL {
                        infeasible = true;
                    } else {
                        lo[j] = l.min(h);
                        hi[j] = h;
                    }
                    changed = true;
                    continue;
                }
                if all_binary_positive(&r, &binary) {
                    match r.sense {
                        Sense::Le => {
                            let total: f64 = r.terms.iter().map(|t| t.1).sum();
                            if total <= r.rhs + TOL * r.rhs.abs().max(1.0) {
                                changed = true;
                                continue;
                            }
                            for (j, a) in &r.terms {
                                if *a > r.rhs + TOL * r.rhs.abs().max(1.0) && hi[*j] > 0.0 {
                                    hi[*j] = 0.0;
                                    changed = true;
                                }
                            }
                        }
                        Sense::Ge => {
                            if r.rhs <= 0.0 {
                                changed = true;
                                continue;
                            }
                            for t in r.terms.iter_mut() {
                                if t.1 > r.rhs {
                                    t.1 = r.rhs;
                                    changed = true;
                                }
                            }
                        }
                        Sense::Eq => {}
                    }
                }
            }
            kept.push(r);
        }
        rows = kept;
        if infeasible || !changed {
            break;
        }
    }

    if strengthen && !infeasible {
        rows = disaggregate(rows, &binary);
        rows = merge_cliques(rows, &binary);
    }

    let mut fixed = BTreeMap::new();
    let mut orig_of = Vec::new();
    let mut new_index = vec![usize::MAX; n];
    for j in 0..n {
        if lo[j] == hi[j] {
            fixed.insert(j, lo[j]);
            constant += cost[j] * lo[j];
        } else {
            new_index[j] = orig_of.len();
            orig_of.push(j);
        }
    }
    let lp = LpProblem {
        cost: orig_of.iter().map(|j| cost[*j]).collect(),
        lo: orig_of.iter().map(|j| lo[*j]).collect(),
        hi: orig_of.iter().map(|j| hi[*j]).collect(),
        rows: rows
            .into_iter()
            .map(|r| LpRow {
                terms: r.terms.iter().map(|(j, a)| (new_index[*j], *a)).collect(),
                sense: r.sense,
                rhs: r.rhs,
            })
            .collect(),
    };
    Prepared {
        binary: orig_of.iter().map(|j| binary[*j]).collect(),
        lp,
        orig_of,
        n_orig: n,
        fixed,
        constant,
        sign,
        infeasible,
    }
}

/// `Σ a_k x_k − M z ≤ 0` with `Σ a_k ≤ M` over binaries becomes `x_k ≤ z`.
fn disaggregate(rows: Vec<Row>, binary: &[bool]) -> Vec<Row> {
    let mut out = Vec::with_capacity(rows.len());
    for r in rows {
        let negatives: Vec<&(usize, f64)> = r.terms.iter().filter(|t| t.1 < 0.0).collect();
        let eligible = r.sense == Sense::Le
            && r.rhs.abs() < TOL
            && negatives.len() == 1
            && r.terms.len() > 2
            && r.terms.iter().all(|(j, _)| binary[*j]);
        if eligible {
            let (z, m) = *negatives[0];
            let total: f64 = r.terms.iter().filter(|t| t.1 > 0.0).map(|t| t.1).sum();
            if total <= -m * (1.0 + 1e-12) {
                for (j, a) in &r.terms {
                    if *a > 0.0 {
                        out.push(Row {
                            terms: vec![(*j, 1.0), (z, -1.0)],
                            sense: Sense::Le,
                            rhs: 0.0,
                        });
                    }
                }
                continue;
            }
        }
        out.push(r);
    }
    out
}

/// Replaces pairwise `x_i + x_j ≤ 1` rows by greedily grown clique rows.
fn merge_cliques(rows: Vec<Row>, binary: &[bool]) -> Vec<Row> {
    let is_pair = |r: &Row| {
        r.sense == Sense::Le
            && r.terms.len() == 2
            && (r.rhs - 1.0).abs() < TOL
            && r.terms.iter().all(|(j, a)| binary[*j] && (*a - 1.0).abs() < TOL)
    };
    let mut adj: BTreeMap<usize, BTreeSet<usize>> = BTreeMap::new();
    let mut edges = Vec::new();
    let mut out = Vec::with_capacity(rows.len());
    for r in rows {
        if is_pair(&r) {
            let (i, j) = (r.terms[0].0.min(r.terms[1].0), r.terms[0].0.max(r.terms[1].0));
            adj.entry(i).or_default().insert(j);
            adj.entry(j).or_default().insert(i);
            edges.push((i, j));
        } else {
            out.push(r);
        }
    }
    let mut covered: HashSet<(usize, usize)> = HashSet::new();
    for (i, j) in edges {
        if covered.contains(&(i, j)) {
            continue;
        }
        let mut clique = vec![i, j];
        for c in adj[&i].intersection(&adj[&j]) {
            if clique.iter().all(|k| adj[c].contains(k)) {
                clique.push(*c);
            }
        }
        clique.sort_unstable();
        for a in 0..clique.len() {
            for b in a + 1..clique.len() {
                covered.insert((clique[a], clique[b]));
            }
        }
        out.push(Row {
            terms: clique.iter().map(|k| (*k, 1.0)).collect(),
            sense: Sense::Le,
            rhs: 1.0,
        });
    }
    out
}
