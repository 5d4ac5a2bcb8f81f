use serde::{Deserialize, Serialize};

use super::INTEGRALITY_TOL;
use crate::formulation::{IpModel, Sense};

/// Feasibility tolerance, applied to each row after dividing by its largest
/// coefficient magnitude (or 1, whichever is larger).
pub const AUDIT_TOL: f64 = 1e-6;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ViolationKind {
    Constraint { tag: String, family: String },
    Integrality { tag: String },
    Bound { tag: String },
    Length { expected: usize, found: usize },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub kind: ViolationKind,
    pub amount: f64,
}

/// Re-evaluates every row, bound and integrality condition of `model` at
/// `assignment`.
pub fn audit(model: &IpModel, assignment: &[f64]) -> Vec<Violation> {
    let mut out = Vec::new();
    if assignment.len() != model.variables.len() {
        out.push(Violation {
            kind: ViolationKind::Length {
                expected: model.variables.len(),
                found: assignment.len(),
            },
            amount: f64::INFINITY,
        });
        return out;
    }
    for v in &model.variables {
        let x = assignment[v.index];
        let over = (v.lo - x).max(x - v.hi);
        if !x.is_finite() || over > AUDIT_TOL {
            out.push(Violation {
                kind: ViolationKind::Bound { tag: v.tag.clone() },
                amount: if x.is_finite() { over } else { f64::INFINITY },
            });
        }
        if v.is_binary() {
            let frac = (x - x.round()).abs();
            if frac > INTEGRALITY_TOL {
                out.push(Violation {
                    kind: ViolationKind::Integrality { tag: v.tag.clone() },
                    amount: frac,
                });
            }
        }
    }
    for row in &model.constraints {
        let mut lhs = 0.0;
        let mut scale = 1.0f64;
        for (j, a) in &row.terms {
            lhs += a * assignment[*j];
            scale = scale.max(a.abs());
        }
        let raw = match row.sense {
            Sense::Le => lhs - row.rhs,
            Sense::Ge => row.rhs - lhs,
            Sense::Eq => (lhs - row.rhs).abs(),
        };
        let amount = raw / scale;
        if !(amount <= AUDIT_TOL) {
            out.push(Violation {
                kind: ViolationKind::Constraint {
                    tag: row.tag.clone(),
                    family: row.family.clone(),
                },
                amount,
            });
        }
    }
    out
}
