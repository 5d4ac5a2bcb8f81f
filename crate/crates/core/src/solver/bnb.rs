use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::time::Instant;

use super::audit::audit;
use super::heuristic::{complete, round_and_repair, Columns};
use super::lp::{DenseSimplex, LpProblem, LpResult, LpStatus, SparseLp};
use super::presolve::{prepare, Prepared};
use super::{
    Certificate, Limits, LpEngineKind, SolveStatus, Solution, SolverError, SolverOptions, INTEGRALITY_TOL, OPTIMALITY_GAP,
};
use crate::formulation::{IpModel, VarKind};

/// Dense engine up to this many entries in `[A | I]`.
const DENSE_LIMIT: usize = 250_000;
/// Open nodes beyond this count keep only their fixings, not an LP state.
const WARM_NODES: usize = 48;
const HEURISTIC_EVERY: u64 = 25;
/// Bound slack, relative to the largest objective coefficient, treated as round-off.
const OBJECTIVE_NOISE: f64 = 1e-12;

#[derive(Clone)]
enum Engine {
    Dense(Box<DenseSimplex>),
    Sparse(Box<SparseLp>),
}

impl Engine {
    fn root(lp: &LpProblem, kind: LpEngineKind) -> Result<(Engine, LpResult), SolverError> {
        let dense = match kind {
            LpEngineKind::Dense => true,
            LpEngineKind::Sparse => false,
            LpEngineKind::Auto => lp.rows.len() * (lp.num_vars() + lp.rows.len()) <= DENSE_LIMIT,
        };
        if dense {
            let mut s = DenseSimplex::new(lp);
            let r = s.solve()?;
            Ok((Engine::Dense(Box::new(s)), r))
        } else {
            let (s, r) = SparseLp::new(lp)?;
            Ok((Engine::Sparse(Box::new(s)), r))
        }
    }

    fn fix(&mut self, j: usize, value: f64) -> Result<LpResult, SolverError> {
        match self {
            Engine::Dense(s) => {
                s.set_bounds(j, value, value);
                s.solve()
            }
            Engine::Sparse(s) => s.fix(j, value),
        }
    }
}

struct Node {
    bound: f64,
    depth: u32,
    seq: u64,
    fixings: Vec<(usize, f64)>,
    x: Vec<f64>,
    engine: Option<Engine>,
}

impl PartialEq for Node {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Node {}
impl PartialOrd for Node {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Node {
    /// Max-heap order: lowest bound first, then deepest, then oldest.
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .bound
            .total_cmp(&self.bound)
            .then(self.depth.cmp(&other.depth))
            .then(other.seq.cmp(&self.seq))
    }
}

/// Branching class of each reduced variable: providers, then locations,
/// then licences, then everything else.
fn priorities(model: &IpModel, p: &Prepared) -> Vec<u8> {
    p.orig_of
        .iter()
        .map(|j| match model.variables[*j].kind {
            VarKind::Provider { .. } => 0,
            VarKind::Location { .. } => 1,
            VarKind::VehicleLicense { .. } => 2,
            _ => 3,
        })
        .collect()
}

/// Most fractional binary within the highest-priority class that has one.
fn most_fractional(p: &Prepared, prio: &[u8], x: &[f64]) -> Option<usize> {
    let mut best: Option<(u8, f64, usize)> = None;
    for (j, v) in x.iter().enumerate() {
        if !p.binary[j] {
            continue;
        }
        let frac = (v - v.floor()).min(v.ceil() - v);
        if frac > INTEGRALITY_TOL && best.is_none_or(|(c, f, _)| prio[j] < c || (prio[j] == c && frac > f)) {
            best = Some((prio[j], frac, j));
        }
    }
    best.map(|(_, _, j)| j)
}

fn gap(incumbent: f64, bound: f64) -> f64 {
    ((incumbent - bound) / incumbent.abs().max(bound.abs()).max(1.0)).max(0.0)
}

struct Search<'a> {
    model: &'a IpModel,
    prep: Prepared,
    prio: Vec<u8>,
    cols: Columns,
    incumbent: Option<(f64, Vec<f64>)>,
    /// Bound differences below this are LP round-off.
    noise: f64,
}

impl Search<'_> {
    /// Accepts `xr` as incumbent if it survives completion, audit on the
    /// original model, and improves the objective.
    fn offer(&mut self, xr: &[f64]) -> bool {
        let Some(xr) = complete(&self.prep, &self.cols, xr) else {
            return false;
        };
        let x = self.prep.expand(&xr);
        if !audit(self.model, &x).is_empty() {
            log::debug!("candidate rejected by audit");
            return false;
        }
        let obj = self.prep.sign * self.model.objective_value(&x);
        if self.incumbent.as_ref().is_none_or(|(best, _)| obj < *best) {
            log::debug!("incumbent {obj}");
            self.incumbent = Some((obj, x));
            true
        } else {
            false
        }
    }

    fn cutoff(&self, rel_gap: f64) -> f64 {
        match &self.incumbent {
            Some((v, _)) => v - (rel_gap * v.abs().max(1.0)).max(self.noise),
            None => f64::INFINITY,
        }
    }
}

pub fn solve(model: &IpModel, limits: &Limits) -> Result<Solution, SolverError> {
    solve_with(
        model,
        &SolverOptions {
            limits: *limits,
            ..SolverOptions::default()
        },
    )
}

pub fn solve_with(model: &IpModel, opts: &SolverOptions) -> Result<Solution, SolverError> {
    model.check().map_err(SolverError::Model)?;
    let start = Instant::now();
    let limits = opts.limits;
    let rel_gap = limits.rel_gap.max(0.0);
    let prep = prepare(model, opts.strengthen);
    let sign = prep.sign;
    // `bound` is in the internal minimisation sense and never above the incumbent.
    let finish = |status: SolveStatus, inc: Option<(f64, Vec<f64>)>, bound: f64, nodes: u64| {
        let bound = inc.as_ref().map_or(bound, |(v, _)| bound.min(*v));
        let cert = Certificate {
            status,
            best_objective: inc.as_ref().map(|(v, _)| sign * v),
            best_bound: sign * bound,
            relative_gap: inc.as_ref().map_or(f64::INFINITY, |(v, _)| gap(*v, bound)),
            nodes_explored: nodes,
            wall_time: start.elapsed().as_secs_f64(),
            simplifications: model.simplifications.clone(),
        };
        Solution::new(model, inc.map(|(_, x)| x).unwrap_or_default(), cert)
    };
    if prep.infeasible {
        return Ok(finish(SolveStatus::Infeasible, None, f64::INFINITY, 0));
    }

    let cols = Columns::new(&prep.lp);
    let prio = priorities(model, &prep);
    let mut search = Search {
        model,
        prep,
        prio,
        cols,
        incumbent: None,
        noise: OBJECTIVE_NOISE * model.objective.terms.iter().map(|(_, c)| c.abs()).fold(0.0, f64::max),
    };
    if search.prep.lp.num_vars() == 0 {
        search.offer(&[]);
        let inc = search.incumbent.take();
        let status = if inc.is_some() { SolveStatus::Optimal } else { SolveStatus::Infeasible };
        let bound = inc.as_ref().map_or(f64::INFINITY, |(v, _)| *v);
        return Ok(finish(status, inc, bound, 1));
    }

    let (root_engine, root) = Engine::root(&search.prep.lp, opts.engine)?;
    match root.status {
        LpStatus::Infeasible => return Ok(finish(SolveStatus::Infeasible, None, f64::INFINITY, 1)),
        LpStatus::Unbounded => return Ok(finish(SolveStatus::Unbounded, None, f64::NEG_INFINITY, 1)),
        LpStatus::Optimal => {}
    }
    let root_bound = root.objective + search.prep.constant;
    if most_fractional(&search.prep, &search.prio, &root.x).is_none() {
        search.offer(&root.x);
    }
    if opts.heuristic {
        if let Some(xr) = round_and_repair(&search.prep, &search.cols, &root.x) {
            search.offer(&xr);
        }
    }

    let mut heap = BinaryHeap::new();
    let mut seq = 0u64;
    heap.push(Node {
        bound: root_bound,
        depth: 0,
        seq,
        fixings: Vec::new(),
        x: root.x,
        engine: Some(root_engine.clone()),
    });
    let mut nodes = 0u64;
    let mut limited = false;
    // Smallest bound among nodes discarded against the incumbent.
    let mut pruned = f64::INFINITY;

    while let Some(mut node) = heap.pop() {
        if node.bound >= search.cutoff(rel_gap) {
            pruned = pruned.min(node.bound);
            heap.clear();
            break;
        }
        let over_time = limits.time.is_some_and(|t| start.elapsed().as_secs_f64() >= t);
        let over_nodes = limits.nodes.is_some_and(|n| nodes >= n);
        if over_time || over_nodes {
            heap.push(node);
            limited = true;
            break;
        }
        nodes += 1;
        let Some(j) = most_fractional(&search.prep, &search.prio, &node.x) else {
            search.offer(&node.x);
            continue;
        };
        let mut engine = match node.engine.take() {
            Some(e) => Some(e),
            None => {
                let mut e = root_engine.clone();
                for (k, v) in &node.fixings {
                    e.fix(*k, *v)?;
                }
                Some(e)
            }
        };
        let values = [search.prep.lp.lo[j], search.prep.lp.hi[j]];
        for (child, value) in values.into_iter().enumerate() {
            let mut e = if child == 0 {
                engine.clone().expect("engine present")
            } else {
                engine.take().expect("engine present")
            };
            let res = e.fix(j, value)?;
            if res.status != LpStatus::Optimal {
                continue;
            }
            let bound = (res.objective + search.prep.constant).max(node.bound);
            if bound >= search.cutoff(rel_gap) {
                pruned = pruned.min(bound);
                continue;
            }
            if most_fractional(&search.prep, &search.prio, &res.x).is_none() {
                search.offer(&res.x);
                pruned = pruned.min(bound);
                continue;
            }
            if opts.heuristic && (nodes % HEURISTIC_EVERY == 0 || node.depth < 2) {
                if let Some(xr) = round_and_repair(&search.prep, &search.cols, &res.x) {
                    search.offer(&xr);
                }
            }
            seq += 1;
            let mut fixings = node.fixings.clone();
            fixings.push((j, value));
            heap.push(Node {
                bound,
                depth: node.depth + 1,
                seq,
                fixings,
                x: res.x,
                engine: if heap.len() < WARM_NODES { Some(e) } else { None },
            });
        }
    }

    let inc = search.incumbent.take();
    let open = heap.peek().map_or(f64::INFINITY, |n| n.bound);
    let mut bound = open.min(pruned);
    if let Some((v, _)) = &inc {
        if !limited && *v - bound <= search.noise {
            bound = *v;
        }
    }
    let status = match &inc {
        _ if limited => SolveStatus::LimitReached,
        None => SolveStatus::Infeasible,
        Some((v, _)) if gap(*v, bound.min(*v)) <= OPTIMALITY_GAP => SolveStatus::Optimal,
        Some(_) => SolveStatus::FeasibleWithGap,
    };
    let bound = if status == SolveStatus::Infeasible { f64::INFINITY } else { bound.max(root_bound) };
    Ok(finish(status, inc, bound, nodes))
}

/// Optimum of the continuous relaxation (binaries in [0, 1]) without any
/// strengthening.
pub fn solve_lp_relaxation(model: &IpModel) -> Result<LpResult, SolverError> {
    model.check().map_err(SolverError::Model)?;
    let prep = prepare(model, false);
    if prep.infeasible {
        return Ok(LpResult {
            status: LpStatus::Infeasible,
            objective: f64::INFINITY,
            x: Vec::new(),
        });
    }
    let r = if prep.lp.num_vars() == 0 {
        LpResult {
            status: LpStatus::Optimal,
            objective: 0.0,
            x: Vec::new(),
        }
    } else {
        Engine::root(&prep.lp, LpEngineKind::Auto)?.1
    };
    if r.status != LpStatus::Optimal {
        return Ok(r);
    }
    Ok(LpResult {
        status: r.status,
        objective: prep.sign * (r.objective + prep.constant),
        x: prep.expand(&r.x),
    })
}
