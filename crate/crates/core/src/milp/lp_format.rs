//! CPLEX-LP text export and the file contract for external backends.
//!
//! An external solver command writes a plain solution file: the first
//! non-empty line is the status (`optimal`, `feasible`, `infeasible`,
//! `time_limit`), followed by `name value` lines. Variables that are not
//! listed are read as zero.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::process::Command;
use std::time::{Duration, Instant};

use crate::error::{Error, Result};

use super::model::{LinearModel, SolveResult, SolveStatus, VarKind};

const TERMS_PER_LINE: usize = 8;

fn write_terms<I: IntoIterator<Item = (String, String)>>(out: &mut String, terms: I) {
    for (i, (coef, name)) in terms.into_iter().enumerate() {
        if i > 0 && i % TERMS_PER_LINE == 0 {
            out.push_str("\n   ");
        }
        let _ = write!(out, " {coef} {name}");
    }
}

fn signed(c: String) -> String {
    if c.starts_with('-') {
        format!("- {}", &c[1..])
    } else {
        format!("+ {c}")
    }
}

pub fn write_lp(model: &LinearModel) -> String {
    let name = |v: usize| model.variables[v].name.clone();
    let mut out = String::from("\\ flow decomposition model\nMinimize\n obj:");
    if model.objective.is_empty() {
        if !model.variables.is_empty() {
            let _ = write!(out, " 0 {}", name(0));
        }
    } else {
        write_terms(&mut out, model.objective.iter().map(|&(v, c)| (signed(format!("{c}")), name(v))));
    }
    out.push_str("\nSubject To\n");
    for c in &model.constraints {
        let _ = write!(out, " {}:", c.name);
        write_terms(&mut out, c.terms.iter().map(|&(v, a)| (signed(a.to_string()), name(v))));
        let _ = writeln!(out, " {} {}", c.sense, c.rhs);
    }
    out.push_str("Bounds\n");
    for v in model.variables.iter().filter(|v| v.kind == VarKind::Integer) {
        let _ = writeln!(out, " {} <= {} <= {}", v.lower, v.name, v.upper);
    }
    let generals: Vec<&str> =
        model.variables.iter().filter(|v| v.kind == VarKind::Integer).map(|v| v.name.as_str()).collect();
    if !generals.is_empty() {
        out.push_str("Generals\n");
        for chunk in generals.chunks(TERMS_PER_LINE) {
            let _ = writeln!(out, " {}", chunk.join(" "));
        }
    }
    let binaries: Vec<&str> =
        model.variables.iter().filter(|v| v.kind == VarKind::Binary).map(|v| v.name.as_str()).collect();
    if !binaries.is_empty() {
        out.push_str("Binaries\n");
        for chunk in binaries.chunks(TERMS_PER_LINE) {
            let _ = writeln!(out, " {}", chunk.join(" "));
        }
    }
    out.push_str("End\n");
    out
}

pub fn parse_solution(model: &LinearModel, text: &str, runtime: Duration) -> Result<SolveResult> {
    let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty());
    let status = match lines.next() {
        Some("optimal") => SolveStatus::Optimal,
        Some("feasible") => SolveStatus::Feasible,
        Some("infeasible") => SolveStatus::Infeasible,
        Some("time_limit") => SolveStatus::TimeLimit,
        other => return Err(Error::Backend(format!("unknown solution status {other:?}"))),
    };
    let index: HashMap<&str, usize> = model.variables.iter().enumerate().map(|(i, v)| (v.name.as_str(), i)).collect();
    let mut values = vec![0i64; model.var_count()];
    for line in lines {
        let mut parts = line.split_whitespace();
        let (Some(name), Some(value), None) = (parts.next(), parts.next(), parts.next()) else {
            return Err(Error::Backend(format!("malformed solution line `{line}`")));
        };
        let Some(&v) = index.get(name) else {
            if name == "objective" {
                continue;
            }
            return Err(Error::Backend(format!("unknown variable `{name}`")));
        };
        let x: f64 = value.parse().map_err(|_| Error::Backend(format!("bad value `{value}`")))?;
        values[v] = x.round() as i64;
    }
    if !status.has_solution() {
        return Ok(SolveResult {
            status,
            objective: f64::INFINITY,
            values: Vec::new(),
            best_bound: f64::INFINITY,
            nodes: 0,
            runtime,
        });
    }
    model.check(&values).map_err(|e| Error::Backend(format!("external solution rejected: {e}")))?;
    let objective = model.objective_value(&values);
    let best_bound = if status == SolveStatus::Optimal { objective } else { f64::NEG_INFINITY };
    Ok(SolveResult { status, objective, values, best_bound, nodes: 0, runtime })
}

pub fn solve_external(model: &LinearModel, command: &str) -> Result<SolveResult> {
    let dir = std::env::temp_dir().join(format!("flowdec-{}-{}", std::process::id(), unique_suffix()));
    std::fs::create_dir_all(&dir)?;
    let lp = dir.join("model.lp");
    let sol = dir.join("model.sol");
    std::fs::write(&lp, write_lp(model))?;
    let cmd = command.replace("{lp}", &lp.to_string_lossy()).replace("{sol}", &sol.to_string_lossy());
    let start = Instant::now();
    let status = Command::new("sh").arg("-c").arg(&cmd).status()?;
    let runtime = start.elapsed();
    if !status.success() {
        let _ = std::fs::remove_dir_all(&dir);
        return Err(Error::Backend(format!("`{cmd}` exited with {status}")));
    }
    let text = std::fs::read_to_string(&sol);
    let _ = std::fs::remove_dir_all(&dir);
    parse_solution(model, &text?, runtime)
}

fn unique_suffix() -> u64 {
    use std::sync::atomic::{AtomicU64, Ordering};
    static COUNTER: AtomicU64 = AtomicU64::new(0);
    COUNTER.fetch_add(1, Ordering::Relaxed)
}
