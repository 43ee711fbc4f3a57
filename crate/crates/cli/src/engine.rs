//! Grid evaluation on a worker pool, with deterministic ordering of rows.

use std::cmp::Ordering;

use lmgfs_core::fidelity::DRIFT_WARNING;
use lmgfs_core::{sweep_point, AnalyticPoint, Bipartition, Error, ModelParams, SweepPoint};
use rayon::prelude::*;
use serde::Serialize;

use crate::args::{MethodSel, Settings, Split};
use crate::error::{CliError, CliResult};

/// What one grid point produced.
#[derive(Debug, Clone, Serialize)]
#[serde(tag = "status", rename_all = "lowercase")]
pub enum Outcome {
    Ok { point: SweepPoint },
    Analytic { point: AnalyticPoint },
    /// Closed form requested inside the critical window around h = 1.
    Singular,
    Failed { error: String },
}

#[derive(Debug, Clone, Serialize)]
pub struct Row {
    pub h: f64,
    pub n: usize,
    pub m_sub: usize,
    /// Realized M/N.
    pub tau: f64,
    /// The fraction asked for, when M came from rounding τN.
    pub tau_requested: Option<f64>,
    pub method: MethodSel,
    #[serde(flatten)]
    pub outcome: Outcome,
}

/// Flat numeric view of a row, shared by every output format.
pub struct Values {
    pub chi_g: Option<f64>,
    pub chi_r: Option<f64>,
    pub eta: Option<f64>,
    pub entropy: Option<f64>,
    pub delta: Option<f64>,
}

impl Row {
    pub fn status(&self) -> &'static str {
        match self.outcome {
            Outcome::Ok { .. } | Outcome::Analytic { .. } => "ok",
            Outcome::Singular => "singular",
            Outcome::Failed { .. } => "failed",
        }
    }

    pub fn values(&self) -> Values {
        match &self.outcome {
            Outcome::Ok { point } => Values {
                chi_g: Some(point.chi_g),
                chi_r: Some(point.chi_r),
                eta: point.eta,
                entropy: Some(point.entropy),
                delta: Some(point.delta),
            },
            Outcome::Analytic { point } => Values {
                chi_g: Some(point.chi_g),
                chi_r: Some(point.chi_r),
                eta: Some(point.eta),
                entropy: Some(point.entropy),
                delta: None,
            },
            Outcome::Singular | Outcome::Failed { .. } => Values {
                chi_g: None,
                chi_r: None,
                eta: None,
                entropy: None,
                delta: None,
            },
        }
    }

    pub fn is_failed(&self) -> bool {
        matches!(self.outcome, Outcome::Failed { .. })
    }

    fn order(&self, other: &Self) -> Ordering {
        self.n
            .cmp(&other.n)
            .then(self.h.total_cmp(&other.h))
            .then(self.tau.total_cmp(&other.tau))
            .then(self.method.cmp(&other.method))
    }
}

/// One unit of work.
#[derive(Debug, Clone, Copy)]
pub struct Task {
    pub h: f64,
    pub part: Bipartition,
    pub tau_requested: Option<f64>,
    pub method: MethodSel,
}

/// Bipartition for `n` under the configured split, plus a note if τN had
/// to be rounded.
pub fn split_for(n: usize, split: Split) -> CliResult<(Bipartition, Option<String>)> {
    match split {
        Split::M(m) => Ok((Bipartition::new(n, m).map_err(|e| CliError::Usage(e.to_string()))?, None)),
        Split::Tau(tau) => partition_for_tau(n, tau),
    }
}

pub fn partition_for_tau(n: usize, tau: f64) -> CliResult<(Bipartition, Option<String>)> {
    let (part, rounded) = Bipartition::from_tau(n, tau).map_err(|e| CliError::Usage(e.to_string()))?;
    let note = rounded.then(|| {
        format!(
            "N={n}: tau={tau} rounded to M={} (tau={})",
            part.m_sub(),
            part.tau()
        )
    });
    Ok((part, note))
}

fn root(error: &Error) -> &Error {
    match error {
        Error::AtPoint { source, .. } => root(source),
        other => other,
    }
}

fn evaluate(gamma: f64, delta: lmgfs_core::Delta, task: &Task) -> Row {
    let outcome = match task.method.numeric() {
        Some(method) => ModelParams::new(task.part.n(), gamma, task.h)
            .and_then(|base| sweep_point(&base, &task.part, task.h, delta, method))
            .map(|point| Outcome::Ok { point })
            .unwrap_or_else(|e| Outcome::Failed { error: e.to_string() }),
        None => match AnalyticPoint::evaluate(task.h, gamma, task.part.tau(), task.part.n()) {
            Ok(point) => Outcome::Analytic { point },
            Err(e) if matches!(root(&e), Error::CriticalPoint { .. }) => Outcome::Singular,
            Err(e) => Outcome::Failed { error: e.to_string() },
        },
    };
    Row {
        h: task.h,
        n: task.part.n(),
        m_sub: task.part.m_sub(),
        tau: task.part.tau(),
        tau_requested: task.tau_requested,
        method: task.method,
        outcome,
    }
}

/// Evaluate every task on a pool of `settings.jobs` threads and return the
/// rows sorted by (N, h, τ, method).
pub fn run_tasks(settings: &Settings, tasks: &[Task]) -> CliResult<Vec<Row>> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(settings.jobs)
        .build()
        .map_err(|e| CliError::Usage(format!("cannot start {} worker threads: {e}", settings.jobs)))?;
    let mut rows: Vec<Row> = pool.install(|| {
        tasks
            .par_iter()
            .map(|task| evaluate(settings.gamma, settings.delta, task))
            .collect()
    });
    rows.sort_by(Row::order);
    Ok(rows)
}

/// Tasks for an h sweep: every (N, h, method).
pub fn h_sweep_tasks(settings: &Settings) -> CliResult<(Vec<Task>, Vec<String>)> {
    let mut tasks = Vec::new();
    let mut notes = Vec::new();
    for &n in &settings.n_list {
        let (part, note) = split_for(n, settings.split)?;
        notes.extend(note);
        let tau_requested = match settings.split {
            Split::Tau(t) => Some(t),
            Split::M(_) => None,
        };
        for &h in &settings.h_grid {
            for &method in &settings.methods {
                tasks.push(Task {
                    h,
                    part,
                    tau_requested,
                    method,
                });
            }
        }
    }
    Ok((tasks, notes))
}

/// Tasks for a τ sweep: every (N, h, τ, method).
pub fn tau_sweep_tasks(settings: &Settings) -> CliResult<(Vec<Task>, Vec<String>)> {
    let mut tasks = Vec::new();
    let mut notes = Vec::new();
    for &n in &settings.n_list {
        for &tau in &settings.tau_grid {
            let (part, note) = partition_for_tau(n, tau)?;
            notes.extend(note);
            for &h in &settings.h_grid {
                for &method in &settings.methods {
                    tasks.push(Task {
                        h,
                        part,
                        tau_requested: Some(tau),
                        method,
                    });
                }
            }
        }
    }
    Ok((tasks, notes))
}

/// Messages for points whose susceptibility moved by more than the drift
/// threshold when δ was halved.
pub fn drift_warnings(rows: &[Row]) -> Vec<String> {
    rows.iter()
        .filter_map(|row| match &row.outcome {
            Outcome::Ok { point } => point.delta_drift.filter(|d| *d > DRIFT_WARNING).map(|d| {
                format!(
                    "N={} M={} h={} ({}): susceptibility changes by {:.3}% when delta is halved",
                    row.n,
                    row.m_sub,
                    row.h,
                    row.method,
                    100.0 * d
                )
            }),
            _ => None,
        })
        .collect()
}

/// Failure summary, or `None` when every row succeeded.
pub fn failures(rows: &[Row]) -> Option<String> {
    let failed: Vec<&Row> = rows.iter().filter(|r| r.is_failed()).collect();
    let first = failed.first()?;
    let Outcome::Failed { error } = &first.outcome else {
        unreachable!()
    };
    Some(format!(
        "{} of {} points failed; first: N={} h={} ({}): {error}",
        failed.len(),
        rows.len(),
        first.n,
        first.h,
        first.method
    ))
}
