use std::fmt::Write as _;
use std::io::Write;
use std::path::Path;

use super::SolverError;
use crate::formulation::{IpModel, ObjectiveSense, Sense};

const LINE_WIDTH: usize = 200;

fn push_terms(out: &mut String, model: &IpModel, terms: &[(usize, f64)]) {
    let mut line_len = 0;
    for (k, (j, a)) in terms.iter().enumerate() {
        let name = &model.variables[*j].tag;
        let piece = if k == 0 {
            if *a < 0.0 { format!("- {} {name}", -a) } else { format!("{a} {name}") }
        } else if *a < 0.0 {
            format!(" - {} {name}", -a)
        } else {
            format!(" + {a} {name}")
        };
        if line_len + piece.len() > LINE_WIDTH {
            out.push_str("\n   ");
            line_len = 0;
        }
        line_len += piece.len();
        out.push_str(&piece);
    }
}

/// CPLEX LP text for `model`; row names are constraint tags.
pub fn write_lp(model: &IpModel) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "\\ {} variables, {} constraints", model.variables.len(), model.constraints.len());
    let _ = writeln!(out, "\\ Objective constant: {}", model.objective.constant);
    out.push_str(match model.objective.sense {
        ObjectiveSense::Minimize => "Minimize\n",
        ObjectiveSense::Maximize => "Maximize\n",
    });
    out.push_str(" obj: ");
    if model.objective.terms.is_empty() {
        if let Some(v) = model.variables.first() {
            let _ = write!(out, "0 {}", v.tag);
        }
    } else {
        push_terms(&mut out, model, &model.objective.terms);
    }
    out.push_str("\nSubject To\n");
    for row in &model.constraints {
        let _ = write!(out, " {}: ", row.tag);
        if row.terms.is_empty() {
            if let Some(v) = model.variables.first() {
                let _ = write!(out, "0 {}", v.tag);
            }
        } else {
            push_terms(&mut out, model, &row.terms);
        }
        let op = match row.sense {
            Sense::Le => "<=",
            Sense::Ge => ">=",
            Sense::Eq => "=",
        };
        let _ = writeln!(out, " {op} {}", row.rhs);
    }
    out.push_str("Bounds\n");
    for v in &model.variables {
        if v.lo == v.hi {
            let _ = writeln!(out, " {} = {}", v.tag, v.lo);
        } else {
            let _ = writeln!(out, " {} <= {} <= {}", v.lo, v.tag, v.hi);
        }
    }
    let binaries: Vec<&str> = model.variables.iter().filter(|v| v.is_binary()).map(|v| v.tag.as_str()).collect();
    if !binaries.is_empty() {
        out.push_str("Binary\n");
        for chunk in binaries.chunks(8) {
            let _ = writeln!(out, " {}", chunk.join(" "));
        }
    }
    out.push_str("End\n");
    out
}

pub fn export_lp(model: &IpModel, path: impl AsRef<Path>) -> Result<(), SolverError> {
    let mut f = std::fs::File::create(path)?;
    f.write_all(write_lp(model).as_bytes())?;
    Ok(())
}
