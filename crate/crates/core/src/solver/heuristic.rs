use super::lp::{DenseSimplex, LpProblem, LpRow, LpStatus, FEAS_TOL};
use super::presolve::Prepared;
use crate::formulation::Sense;

/// Column view of the reduced rows with per-row scale.
pub(crate) struct Columns {
    cols: Vec<Vec<(usize, f64)>>,
    scale: Vec<f64>,
}

impl Columns {
    pub fn new(lp: &LpProblem) -> Self {
        let mut cols = vec![Vec::new(); lp.num_vars()];
        let mut scale = Vec::with_capacity(lp.rows.len());
        for (i, r) in lp.rows.iter().enumerate() {
            scale.push(r.terms.iter().fold(1.0f64, |m, (_, a)| m.max(a.abs())));
            for (j, a) in &r.terms {
                cols[*j].push((i, *a));
            }
        }
        Columns { cols, scale }
    }
}

fn violation(row: &LpRow, act: f64, scale: f64) -> f64 {
    let v = match row.sense {
        Sense::Le => act - row.rhs,
        Sense::Ge => row.rhs - act,
        Sense::Eq => (act - row.rhs).abs(),
    };
    (v / scale).max(0.0)
}

/// Rounds the binaries of an LP point, then flips binaries greedily until
/// every row holds, then applies improving single flips. Continuous
/// variables are re-optimised for the final binary pattern.
pub(crate) fn round_and_repair(p: &Prepared, cols: &Columns, x_lp: &[f64]) -> Option<Vec<f64>> {
    let lp = &p.lp;
    let n = lp.num_vars();
    let mut x: Vec<f64> = (0..n)
        .map(|j| {
            if p.binary[j] {
                if x_lp[j] >= 0.5 { lp.hi[j] } else { lp.lo[j] }
            } else {
                x_lp[j]
            }
        })
        .collect();
    let mut act: Vec<f64> = lp
        .rows
        .iter()
        .map(|r| r.terms.iter().map(|(j, a)| a * x[*j]).sum())
        .collect();

    // Continuous variables start at whichever of their LP value and bounds
    // leaves the least violation.
    for j in (0..n).filter(|j| !p.binary[*j]) {
        let mut best = (f64::INFINITY, x[j]);
        for cand in [x[j], lp.lo[j], lp.hi[j]] {
            let total: f64 = cols.cols[j]
                .iter()
                .map(|(i, a)| violation(&lp.rows[*i], act[*i] + a * (cand - x[j]), cols.scale[*i]))
                .sum();
            if total < best.0 {
                best = (total, cand);
            }
        }
        for (i, a) in &cols.cols[j] {
            act[*i] += a * (best.1 - x[j]);
        }
        x[j] = best.1;
    }

    let viol = |i: usize, act: &[f64]| violation(&lp.rows[i], act[i], cols.scale[i]);
    let cost_scale = lp.cost.iter().fold(1e-300f64, |m, c| m.max(c.abs()));
    let mut tabu = vec![0usize; n];
    let max_flips = 4 * n + 100;
    for step in 1..=max_flips {
        let Some(r) = (0..lp.rows.len()).find(|i| viol(*i, &act) > FEAS_TOL) else {
            break;
        };
        let current = viol(r, &act);
        let mut best: Option<(f64, usize)> = None;
        for (j, a) in &lp.rows[r].terms {
            let j = *j;
            if !p.binary[j] || lp.lo[j] == lp.hi[j] || tabu[j] > step {
                continue;
            }
            let delta = if x[j] > 0.5 { -1.0 } else { 1.0 };
            if violation(&lp.rows[r], act[r] + a * delta, cols.scale[r]) >= current {
                continue;
            }
            let mut score = 1e-3 * lp.cost[j] * delta / cost_scale;
            for (i, b) in &cols.cols[j] {
                score += violation(&lp.rows[*i], act[*i] + b * delta, cols.scale[*i]) - viol(*i, &act);
            }
            if best.is_none_or(|(s, _)| score < s) {
                best = Some((score, j));
            }
        }
        let (_, j) = best?;
        let delta = if x[j] > 0.5 { -1.0 } else { 1.0 };
        x[j] += delta;
        for (i, a) in &cols.cols[j] {
            act[*i] += a * delta;
        }
        tabu[j] = step + 8;
    }
    if (0..lp.rows.len()).any(|i| viol(i, &act) > FEAS_TOL) {
        return None;
    }

    let continuous_in_objective = (0..n).any(|j| !p.binary[j] && lp.cost[j] != 0.0);
    if !continuous_in_objective {
        for _pass in 0..4 {
            let mut order: Vec<(f64, usize)> = (0..n)
                .filter(|j| p.binary[*j] && lp.lo[*j] != lp.hi[*j])
                .map(|j| (lp.cost[j] * if x[j] > 0.5 { -1.0 } else { 1.0 }, j))
                .filter(|(d, _)| *d < 0.0)
                .collect();
            order.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
            let mut improved = false;
            for (_, j) in order {
                let delta = if x[j] > 0.5 { -1.0 } else { 1.0 };
                let ok = cols.cols[j]
                    .iter()
                    .all(|(i, a)| violation(&lp.rows[*i], act[*i] + a * delta, cols.scale[*i]) <= FEAS_TOL);
                if ok {
                    x[j] += delta;
                    for (i, a) in &cols.cols[j] {
                        act[*i] += a * delta;
                    }
                    improved = true;
                }
            }
            if !improved {
                break;
            }
        }
    }
    complete(p, cols, &x)
}

/// Re-optimises the continuous variables with every binary held at its value
/// in `x`, then snaps each continuous variable into the interval its rows
/// allow so tiny LP residuals disappear.
pub(crate) fn complete(p: &Prepared, cols: &Columns, x: &[f64]) -> Option<Vec<f64>> {
    let lp = &p.lp;
    let n = lp.num_vars();
    let mut x: Vec<f64> = (0..n)
        .map(|j| if p.binary[j] { x[j].round().clamp(lp.lo[j], lp.hi[j]) } else { x[j] })
        .collect();
    let cont: Vec<usize> = (0..n).filter(|j| !p.binary[*j]).collect();
    if !cont.is_empty() {
        let mut local = vec![usize::MAX; n];
        for (k, j) in cont.iter().enumerate() {
            local[*j] = k;
        }
        let mut rows = Vec::new();
        for r in &lp.rows {
            let mut rest = 0.0;
            let mut terms = Vec::new();
            for (j, a) in &r.terms {
                if p.binary[*j] {
                    rest += a * x[*j];
                } else {
                    terms.push((local[*j], *a));
                }
            }
            if !terms.is_empty() {
                rows.push(LpRow {
                    terms,
                    sense: r.sense,
                    rhs: r.rhs - rest,
                });
            }
        }
        let sub = LpProblem {
            cost: cont.iter().map(|j| lp.cost[*j]).collect(),
            lo: cont.iter().map(|j| lp.lo[*j]).collect(),
            hi: cont.iter().map(|j| lp.hi[*j]).collect(),
            rows,
        };
        let res = DenseSimplex::new(&sub).solve().ok()?;
        if res.status != LpStatus::Optimal {
            return None;
        }
        for (k, j) in cont.iter().enumerate() {
            x[*j] = res.x[k];
        }
        for &j in &cont {
            let (mut need_lo, mut need_hi) = (lp.lo[j], lp.hi[j]);
            for (i, a) in &cols.cols[j] {
                let r = &lp.rows[*i];
                if r.terms.iter().any(|(k, _)| *k != j && !p.binary[*k]) {
                    continue;
                }
                let rest: f64 = r.terms.iter().filter(|(k, _)| *k != j).map(|(k, b)| b * x[*k]).sum();
                let bound = (r.rhs - rest) / a;
                let upper = (r.sense == Sense::Le) == (*a > 0.0) || r.sense == Sense::Eq;
                let lower = (r.sense == Sense::Ge) == (*a > 0.0) || r.sense == Sense::Eq;
                if upper {
                    need_hi = need_hi.min(bound);
                }
                if lower {
                    need_lo = need_lo.max(bound);
                }
            }
            if need_lo <= need_hi {
                x[j] = x[j].clamp(need_lo, need_hi);
            }
        }
    }
    if lp.max_violation(&x) > FEAS_TOL {
        return None;
    }
    Some(x)
}
