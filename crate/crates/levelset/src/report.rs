//! Run reports: configuration echo, per-run results, verdicts and timings.
//! Verdicts depend only on the other recorded data, so a report can be
//! re-checked with [`validate_report`].

use levelset_core::analysis::{
    nonsingular_aggregate, ExperimentSpec, LevelOutcome, NonsingularSweep, Regime, SweepResult,
};
use serde::{Deserialize, Serialize};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RunConfig {
    Experiment(ExperimentSpec),
    Nonsingular(NonsingularSweep),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    Fail,
    /// Nothing to check, e.g. no seeds or no qualifying runs.
    Untested,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub property: String,
    pub status: Status,
    pub detail: String,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Timings {
    pub total_seconds: f64,
    pub per_run_seconds: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub schema_version: u32,
    pub tool: String,
    pub version: String,
    pub command: String,
    pub config: RunConfig,
    pub seeds: Vec<u64>,
    pub result: SweepResult,
    pub verdicts: Vec<Verdict>,
    pub timings: Timings,
    /// Seconds since the epoch; zero for deterministic runs.
    pub created_unix: u64,
}

impl RunReport {
    pub fn new(command: String, config: RunConfig, result: SweepResult) -> Self {
        let verdicts = verdicts(&config, &result);
        RunReport {
            schema_version: SCHEMA_VERSION,
            tool: env!("CARGO_PKG_NAME").into(),
            version: env!("CARGO_PKG_VERSION").into(),
            command,
            seeds: result.runs.iter().map(|r| r.seed).collect(),
            config,
            result,
            verdicts,
            timings: Timings::default(),
            created_unix: 0,
        }
    }

    pub fn passed(&self) -> bool {
        self.verdicts.iter().all(|v| v.status != Status::Fail)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }
}

fn verdict(property: &str, status: Status, detail: String) -> Verdict {
    Verdict {
        property: property.into(),
        status,
        detail,
    }
}

fn at_least(have: usize, need: usize, total: usize) -> Status {
    if total == 0 {
        Status::Untested
    } else if have >= need {
        Status::Pass
    } else {
        Status::Fail
    }
}

/// Verdicts for the recorded result.
///
/// Skinny runs: at least half the seeds converge, and converged seeds show no
/// bounded level component. Wide runs: at least 90% of seeds are accurate,
/// and at least 90% of those show a bounded component around the origin.
/// Non-singular sweeps: no bounded component at all.
pub fn verdicts(config: &RunConfig, result: &SweepResult) -> Vec<Verdict> {
    let runs = &result.runs;
    let n = runs.len();
    match config {
        RunConfig::Experiment(spec) if spec.regime == Regime::Skinny => {
            let converged: Vec<_> = runs.iter().filter(|r| r.converged).collect();
            let need = n.div_ceil(2);
            let bounded: usize = converged.iter().map(|r| r.bounded()).sum();
            vec![
                verdict(
                    "converged_seeds",
                    at_least(converged.len(), need, n),
                    format!("{} of {n} seeds converged, need {need}", converged.len()),
                ),
                verdict(
                    "no_bounded_components",
                    match (converged.len(), bounded) {
                        (0, _) => Status::Untested,
                        (_, 0) => Status::Pass,
                        _ => Status::Fail,
                    },
                    format!(
                        "{bounded} bounded components over {} converged seeds",
                        converged.len()
                    ),
                ),
            ]
        }
        RunConfig::Experiment(_) => {
            let accurate: Vec<_> = runs.iter().filter(|r| r.accurate).collect();
            let need = (9 * n).div_ceil(10);
            let enclosing = accurate.iter().filter(|r| r.has_enclosing_loop()).count();
            let need_loops = (9 * accurate.len()).div_ceil(10);
            vec![
                verdict(
                    "accurate_seeds",
                    at_least(accurate.len(), need, n),
                    format!("{} of {n} seeds accurate, need {need}", accurate.len()),
                ),
                verdict(
                    "bounded_loop_around_origin",
                    at_least(enclosing, need_loops, accurate.len()),
                    format!(
                        "{enclosing} of {} accurate seeds have one, need {need_loops}",
                        accurate.len()
                    ),
                ),
            ]
        }
        RunConfig::Nonsingular(_) => {
            let bounded = result.aggregate.bounded;
            vec![verdict(
                "no_bounded_components",
                match (n, bounded) {
                    (0, _) => Status::Untested,
                    (_, 0) => Status::Pass,
                    _ => Status::Fail,
                },
                format!("{bounded} bounded components over {n} networks"),
            )]
        }
    }
}

/// Recomputes everything derived in `report` and lists the disagreements.
pub fn validate_report(report: &RunReport) -> Vec<String> {
    let mut problems = Vec::new();
    if report.schema_version != SCHEMA_VERSION {
        problems.push(format!("unknown schema_version {}", report.schema_version));
        return problems;
    }
    let seeds: Vec<u64> = report.result.runs.iter().map(|r| r.seed).collect();
    if seeds != report.seeds {
        problems.push("seed list does not match the runs".into());
    }
    for run in &report.result.runs {
        for l in &run.levels {
            let again = LevelOutcome::from_escalation(l.level, l.escalation.clone());
            if &again != l {
                problems.push(format!("run {} level {}: counts do not match components", run.seed, l.level));
            }
            for (k, scale) in l.escalation.scales.iter().enumerate() {
                if scale.recount() != (scale.bounded, scale.boundary_touching) {
                    problems.push(format!("run {} level {} scale {k}: classification counts", run.seed, l.level));
                }
            }
        }
        if let RunConfig::Experiment(spec) = &report.config {
            if let (Some(loss), Some(acc)) = (run.final_loss, run.accuracy) {
                if run.converged != (loss <= spec.converged_loss) || run.accurate != (acc >= spec.accuracy_target) {
                    problems.push(format!("run {}: convergence flags", run.seed));
                }
            }
        }
    }
    let aggregate = match &report.config {
        RunConfig::Experiment(_) => {
            SweepResult::aggregate(String::new(), report.result.regime, report.result.runs.clone()).aggregate
        }
        RunConfig::Nonsingular(_) => nonsingular_aggregate(&report.result.runs),
    };
    if aggregate != report.result.aggregate {
        problems.push("aggregate does not match the runs".into());
    }
    let again = verdicts(&report.config, &report.result);
    if again != report.verdicts {
        problems.push("verdicts do not match the recorded data".into());
    }
    problems
}
