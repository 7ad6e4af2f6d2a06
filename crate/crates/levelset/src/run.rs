//! Parallel experiment and sweep runs producing [`RunReport`]s.

use std::time::{Instant, SystemTime, UNIX_EPOCH};

use levelset_core::analysis::{
    analyze_nonsingular, nonsingular_result, run_seed, ExperimentSpec, NonsingularSweep, RunOutcome,
    SweepResult,
};
use levelset_core::levelsets::{sample_grid, ScalarField};
use levelset_core::nn::{Network, Window};
use levelset_core::training::gen_ring_dataset;
use rayon::prelude::*;

use crate::report::{RunConfig, RunReport, Timings};
use crate::svg::Plot;
use crate::Result;

pub const THREADS_ENV: &str = "LEVELSET_PROBE_THREADS";

/// Worker count: `LEVELSET_PROBE_THREADS` when set to a positive integer,
/// otherwise the machine's parallelism.
pub fn probe_threads() -> usize {
    std::env::var(THREADS_ENV)
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|&n| n > 0)
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
}

/// Maps `f` over `items` on up to `threads` workers, returning results in
/// input order.
pub fn par_map<T: Sync, R: Send>(items: &[T], threads: usize, f: impl Fn(&T) -> R + Sync) -> Vec<R> {
    match rayon::ThreadPoolBuilder::new().num_threads(threads).build() {
        Ok(pool) => pool.install(|| items.par_iter().map(&f).collect()),
        Err(_) => items.iter().map(f).collect(),
    }
}

fn timed<R>(f: impl FnOnce() -> R) -> (R, f64) {
    let t = Instant::now();
    let r = f();
    (r, t.elapsed().as_secs_f64())
}

fn finish(mut report: RunReport, timings: Timings, deterministic: bool) -> RunReport {
    if !deterministic {
        report.timings = timings;
        report.created_unix = SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map_or(0, |d| d.as_secs());
    }
    report
}

/// Runs every seed of `spec` and reduces in seed order.
pub fn run_experiment_report(
    spec: &ExperimentSpec,
    command: &str,
    threads: usize,
    deterministic: bool,
) -> Result<RunReport> {
    spec.validate()?;
    let start = Instant::now();
    let outcomes: Vec<(RunOutcome, f64)> = par_map(&spec.seeds, threads, |&s| timed(|| run_seed(spec, s)));
    let (runs, per_run_seconds): (Vec<_>, Vec<_>) = outcomes.into_iter().unzip();
    let result = SweepResult::aggregate(spec.name.clone(), spec.regime, runs);
    let report = RunReport::new(command.into(), RunConfig::Experiment(spec.clone()), result);
    let timings = Timings {
        total_seconds: start.elapsed().as_secs_f64(),
        per_run_seconds,
    };
    Ok(finish(report, timings, deterministic))
}

/// Builds, certifies and analyzes the sweep's networks. `inject` may replace
/// a constructed network before certification.
pub fn run_sweep_report(
    params: &NonsingularSweep,
    command: &str,
    threads: usize,
    deterministic: bool,
    inject: Option<&(dyn Fn(usize, Network) -> Network + Sync)>,
) -> Result<RunReport> {
    params.validate()?;
    let start = Instant::now();
    let indices: Vec<usize> = (0..params.count).collect();
    let outcomes = par_map(&indices, threads, |&i| {
        timed(|| -> Result<RunOutcome> {
            let mut net = params.build(i)?;
            if let Some(f) = inject {
                net = f(i, net);
            }
            Ok(analyze_nonsingular(params, i, net)?)
        })
    });
    let mut runs = Vec::with_capacity(outcomes.len());
    let mut per_run_seconds = Vec::with_capacity(outcomes.len());
    for (r, t) in outcomes {
        runs.push(r?);
        per_run_seconds.push(t);
    }
    let report = RunReport::new(
        command.into(),
        RunConfig::Nonsingular(params.clone()),
        nonsingular_result(runs),
    );
    let timings = Timings {
        total_seconds: start.elapsed().as_secs_f64(),
        per_run_seconds,
    };
    Ok(finish(report, timings, deterministic))
}

/// Samples a network's scalar output on `window`.
pub fn sample_network(net: &Network, window: &Window, resolution: usize) -> Result<ScalarField> {
    let mut eval = net.evaluator();
    Ok(sample_grid(
        |x| eval.eval_scalar(x).unwrap_or(f64::NAN),
        window,
        (resolution, resolution),
    )?)
}

/// One SVG per run and probed level: `(file stem, contents)`.
pub fn run_plots(report: &RunReport, timestamp: u64) -> Result<Vec<(String, String)>> {
    let mut out = Vec::new();
    for run in &report.result.runs {
        let (Some(net), Some(window)) = (&run.network, &run.window) else {
            continue;
        };
        let data = match &report.config {
            RunConfig::Experiment(spec) => Some(gen_ring_dataset(run.seed, &spec.dataset)?),
            RunConfig::Nonsingular(_) => None,
        };
        for (k, level) in run.levels.iter().enumerate() {
            let base = level.escalation.base();
            let field = sample_network(net, window, base.resolution.0)?;
            let svg = Plot {
                field: &field,
                level: level.level,
                components: &base.components,
                points: data.as_ref().map(|d| (d.points(), d.labels())),
                timestamp,
            }
            .render();
            out.push((format!("{}-seed{}-level{k}", report.result.name, run.seed), svg));
        }
    }
    Ok(out)
}
