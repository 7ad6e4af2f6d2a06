use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use super::escalation::{network_escalation, EscalationReport, FinalClass};
use crate::nn::{Activation, Network, Window};
use crate::training::{
    accuracy, gen_ring_dataset, init_weights, mean_loss, train, Dataset, RingParams, TrainConfig,
};
use crate::{Error, Result};

/// XORed into the run seed to seed weight initialization, so that data and
/// weights do not share a random stream.
pub const INIT_SEED_SALT: u64 = 0x5eed;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Regime {
    /// Every hidden width is at most the input dimension.
    Skinny,
    /// Some hidden width exceeds the input dimension.
    Wide,
}

impl Regime {
    pub fn of(arch: &[usize]) -> Option<Regime> {
        let (n, hidden) = match arch {
            [n, hidden @ .., _] => (*n, hidden),
            _ => return None,
        };
        Some(if hidden.iter().all(|&w| w <= n) {
            Regime::Skinny
        } else {
            Regime::Wide
        })
    }
}

/// Levels at which to cut the trained function.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(try_from = "LevelsRepr", into = "LevelsRepr"))]
pub enum ProbeLevels {
    /// The decision boundary of the classifier at this threshold, written
    /// `decision:0.5`.
    Decision(f64),
    Values(Vec<f64>),
}

impl ProbeLevels {
    pub fn levels(&self) -> Vec<f64> {
        match self {
            ProbeLevels::Decision(t) => alloc::vec![*t],
            ProbeLevels::Values(v) => v.clone(),
        }
    }
}

impl fmt::Display for ProbeLevels {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ProbeLevels::Decision(t) => write!(f, "decision:{t}"),
            ProbeLevels::Values(v) => {
                for (i, x) in v.iter().enumerate() {
                    if i > 0 {
                        f.write_str(",")?;
                    }
                    write!(f, "{x}")?;
                }
                Ok(())
            }
        }
    }
}

impl FromStr for ProbeLevels {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidArgument(alloc::format!("cannot parse levels {s:?}"));
        let s = s.trim();
        if let Some(t) = s.strip_prefix("decision:") {
            let t: f64 = t.trim().parse().map_err(|_| bad())?;
            return if t.is_finite() { Ok(ProbeLevels::Decision(t)) } else { Err(bad()) };
        }
        let v = s
            .split(',')
            .map(|x| x.trim().parse::<f64>().ok().filter(|x| x.is_finite()))
            .collect::<Option<Vec<_>>>()
            .ok_or_else(bad)?;
        Ok(ProbeLevels::Values(v))
    }
}

#[cfg(feature = "serde")]
#[derive(serde::Serialize, serde::Deserialize)]
#[serde(untagged)]
enum LevelsRepr {
    Text(String),
    List(Vec<f64>),
}

#[cfg(feature = "serde")]
impl TryFrom<LevelsRepr> for ProbeLevels {
    type Error = Error;

    fn try_from(r: LevelsRepr) -> Result<Self> {
        match r {
            LevelsRepr::Text(s) => s.parse(),
            LevelsRepr::List(v) => Ok(ProbeLevels::Values(v)),
        }
    }
}

#[cfg(feature = "serde")]
impl From<ProbeLevels> for LevelsRepr {
    fn from(p: ProbeLevels) -> Self {
        match p {
            ProbeLevels::Decision(_) => LevelsRepr::Text(p.to_string()),
            ProbeLevels::Values(v) => LevelsRepr::List(v),
        }
    }
}

/// A train-then-analyze experiment on the ring dataset, repeated per seed.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ExperimentSpec {
    pub name: String,
    pub dataset: RingParams,
    pub arch: Vec<usize>,
    pub activation: Activation,
    pub regime: Regime,
    /// `seed` is replaced by the run seed.
    pub train: TrainConfig,
    /// `None` means the data bounding box scaled by 2 about its center.
    pub window: Option<Window>,
    pub resolution: usize,
    pub levels: ProbeLevels,
    pub seeds: Vec<u64>,
    pub max_doublings: usize,
    /// Full-data loss at or below which a run counts as converged.
    pub converged_loss: f64,
    /// Accuracy at or above which a run counts as accurate.
    pub accuracy_target: f64,
}

impl ExperimentSpec {
    /// Six hidden layers of width two.
    pub fn skinny() -> Self {
        ExperimentSpec {
            name: "skinny".into(),
            dataset: RingParams::default(),
            arch: alloc::vec![2, 2, 2, 2, 2, 2, 2, 1],
            activation: Activation::Sigmoid,
            regime: Regime::Skinny,
            train: TrainConfig {
                steps: 20_000,
                ..TrainConfig::default()
            },
            window: None,
            resolution: 201,
            levels: ProbeLevels::Decision(0.5),
            seeds: (0..20).collect(),
            max_doublings: 2,
            converged_loss: 0.35,
            accuracy_target: 0.95,
        }
    }

    /// One hidden layer of width three.
    pub fn wide() -> Self {
        ExperimentSpec {
            name: "wide".into(),
            arch: alloc::vec![2, 3, 1],
            regime: Regime::Wide,
            train: TrainConfig::default(),
            ..Self::skinny()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidArgument(m));
        if self.arch.len() < 2 || self.arch.contains(&0) {
            return bad(alloc::format!("bad architecture {:?}", self.arch));
        }
        if self.arch[0] != 2 || *self.arch.last().unwrap() != 1 {
            return bad("level-set analysis needs widths starting at 2 and ending at 1".into());
        }
        if Regime::of(&self.arch) != Some(self.regime) {
            return bad(alloc::format!(
                "architecture {:?} is not {:?}",
                self.arch,
                self.regime
            ));
        }
        if self.resolution < 2 {
            return bad("resolution must be at least 2".into());
        }
        if let Some(w) = &self.window {
            if w.dim() != 2 {
                return bad("window must be two-dimensional".into());
            }
        }
        if self.levels.levels().is_empty() {
            return bad("no probe levels".into());
        }
        if !(self.converged_loss.is_finite() && self.accuracy_target.is_finite()) {
            return bad("thresholds must be finite".into());
        }
        Ok(())
    }
}

/// Classification counts of one probed level.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct LevelOutcome {
    pub level: f64,
    pub bounded: usize,
    pub unbounded_evidence: usize,
    pub inconclusive: usize,
    /// Bounded components whose chain winds around the origin.
    pub bounded_enclosing_origin: usize,
    pub escalation: EscalationReport,
}

impl LevelOutcome {
    pub fn from_escalation(level: f64, escalation: EscalationReport) -> Self {
        let bounded_enclosing_origin = escalation
            .bounded()
            .filter(|c| c.encloses([0.0, 0.0]))
            .count();
        LevelOutcome {
            level,
            bounded: escalation.count(FinalClass::Bounded),
            unbounded_evidence: escalation.count(FinalClass::UnboundedEvidence),
            inconclusive: escalation.count(FinalClass::Inconclusive),
            bounded_enclosing_origin,
            escalation,
        }
    }
}

/// One seed of an experiment, or one network of a sweep.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct RunOutcome {
    pub seed: u64,
    pub network: Option<Network>,
    pub steps_run: Option<usize>,
    pub final_loss: Option<f64>,
    pub accuracy: Option<f64>,
    pub converged: bool,
    pub accurate: bool,
    pub window: Option<Window>,
    pub levels: Vec<LevelOutcome>,
    /// Set when the run failed; the other fields are then mostly empty.
    pub error: Option<String>,
}

impl RunOutcome {
    fn failed(seed: u64, e: Error) -> Self {
        RunOutcome {
            seed,
            network: None,
            steps_run: None,
            final_loss: None,
            accuracy: None,
            converged: false,
            accurate: false,
            window: None,
            levels: Vec::new(),
            error: Some(e.to_string()),
        }
    }

    pub fn bounded(&self) -> usize {
        self.levels.iter().map(|l| l.bounded).sum()
    }

    pub fn has_enclosing_loop(&self) -> bool {
        self.levels.iter().any(|l| l.bounded_enclosing_origin > 0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum ViolationKind {
    /// A level component of a skinny or non-singular network stayed bounded.
    BoundedComponent,
    /// An accurate wide network has no bounded level component around the
    /// origin.
    NoEnclosingLoop,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Violation {
    pub seed: u64,
    pub level: Option<f64>,
    pub kind: ViolationKind,
}

#[derive(Debug, Clone, Default, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Aggregate {
    pub runs: usize,
    pub failed: usize,
    pub converged: usize,
    pub accurate: usize,
    pub bounded: usize,
    pub unbounded_evidence: usize,
    pub inconclusive: usize,
    pub violations: Vec<Violation>,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SweepResult {
    pub name: String,
    pub regime: Regime,
    pub runs: Vec<RunOutcome>,
    pub aggregate: Aggregate,
}

impl SweepResult {
    /// Folds `runs` in order. Skinny runs are held to "no bounded component"
    /// only when converged; wide runs to "a loop around the origin" only when
    /// accurate.
    pub fn aggregate(name: String, regime: Regime, runs: Vec<RunOutcome>) -> Self {
        let mut agg = Aggregate {
            runs: runs.len(),
            ..Aggregate::default()
        };
        for run in &runs {
            agg.failed += run.error.is_some() as usize;
            agg.converged += run.converged as usize;
            agg.accurate += run.accurate as usize;
            for l in &run.levels {
                agg.bounded += l.bounded;
                agg.unbounded_evidence += l.unbounded_evidence;
                agg.inconclusive += l.inconclusive;
            }
            match regime {
                Regime::Skinny if run.converged => {
                    for l in run.levels.iter().filter(|l| l.bounded > 0) {
                        agg.violations.push(Violation {
                            seed: run.seed,
                            level: Some(l.level),
                            kind: ViolationKind::BoundedComponent,
                        });
                    }
                }
                Regime::Wide if run.accurate && !run.has_enclosing_loop() => {
                    agg.violations.push(Violation {
                        seed: run.seed,
                        level: None,
                        kind: ViolationKind::NoEnclosingLoop,
                    });
                }
                _ => {}
            }
        }
        SweepResult {
            name,
            regime,
            runs,
            aggregate: agg,
        }
    }
}

/// Analysis window of a run: the configured one or the data bounding box
/// scaled by 2.
pub fn default_window(data: &Dataset) -> Result<Window> {
    Window::bounding(data.points())?.scaled(2.0)
}

/// The trained network and its data for one seed.
pub fn train_seed(spec: &ExperimentSpec, seed: u64) -> Result<(Dataset, Network, usize)> {
    let data = gen_ring_dataset(seed, &spec.dataset)?;
    let net = init_weights(&spec.arch, spec.activation, seed ^ INIT_SEED_SALT)?;
    let cfg = TrainConfig {
        seed,
        ..spec.train.clone()
    };
    let out = train(&net, &data, &cfg)?;
    Ok((data, out.network, out.history.len()))
}

/// Generates data, trains and analyzes one seed. Failures are recorded in
/// the outcome rather than returned.
pub fn run_seed(spec: &ExperimentSpec, seed: u64) -> RunOutcome {
    let attempt = || -> Result<RunOutcome> {
        let (data, net, steps) = train_seed(spec, seed)?;
        let loss = mean_loss(&net, data.points(), data.labels(), spec.train.loss)?;
        let acc = accuracy(&net, &data, 0.5)?;
        let window = match &spec.window {
            Some(w) => w.clone(),
            None => default_window(&data)?,
        };
        let levels = spec.levels.levels();
        let reports = network_escalation(&net, &levels, &window, spec.resolution, spec.max_doublings, None)?;
        Ok(RunOutcome {
            seed,
            steps_run: Some(steps),
            final_loss: Some(loss),
            accuracy: Some(acc),
            converged: loss <= spec.converged_loss,
            accurate: acc >= spec.accuracy_target,
            window: Some(window),
            levels: levels
                .into_iter()
                .zip(reports)
                .map(|(l, r)| LevelOutcome::from_escalation(l, r))
                .collect(),
            network: Some(net),
            error: None,
        })
    };
    attempt().unwrap_or_else(|e| RunOutcome::failed(seed, e))
}

/// Runs every seed in order and aggregates.
pub fn run_experiment(spec: &ExperimentSpec) -> Result<SweepResult> {
    spec.validate()?;
    let runs = spec.seeds.iter().map(|&s| run_seed(spec, s)).collect();
    Ok(SweepResult::aggregate(spec.name.clone(), spec.regime, runs))
}
