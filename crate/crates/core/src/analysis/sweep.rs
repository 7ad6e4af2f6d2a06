use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::escalation::network_escalation;
use super::experiment::{Aggregate, LevelOutcome, Regime, RunOutcome, SweepResult, Violation, ViolationKind};
use crate::levelsets::sample_grid;
use crate::nn::{Activation, Network, Window};
use crate::nonsingular::{is_nonsingular, make_nonsingular, pad_to_width, random_network, TOL_DET};
use crate::{Error, Result};

/// Parameters of a sweep over random non-singular networks.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct NonsingularSweep {
    pub n: usize,
    /// Hidden-layer counts, cycled through in order.
    pub depths: Vec<usize>,
    pub activation: Activation,
    pub count: usize,
    pub levels_per_net: usize,
    pub window: Window,
    pub resolution: usize,
    pub max_doublings: usize,
    /// Weights are drawn uniformly from `[-weight_scale, weight_scale]`.
    pub weight_scale: f64,
    /// Perturbation size handed to [`make_nonsingular`].
    pub delta: f64,
    pub seed: u64,
}

impl Default for NonsingularSweep {
    fn default() -> Self {
        NonsingularSweep {
            n: 2,
            depths: (1..=6).collect(),
            activation: Activation::Sigmoid,
            count: 100,
            levels_per_net: 5,
            window: Window::cube(2, -4.0, 4.0).expect("valid window"),
            resolution: 201,
            max_doublings: 1,
            weight_scale: 2.0,
            delta: 1e-3,
            seed: 0,
        }
    }
}

impl NonsingularSweep {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidArgument(m.into()));
        if self.n != 2 {
            return bad("only n = 2 is supported");
        }
        if self.window.dim() != self.n {
            return bad("window dimension must equal n");
        }
        if !self.activation.is_one_to_one() {
            return bad("activation must be one-to-one");
        }
        if self.count > 0 && (self.depths.is_empty() || self.depths.contains(&0)) {
            return bad("depths must be positive");
        }
        if self.resolution < 2 {
            return bad("resolution must be at least 2");
        }
        if !(self.weight_scale > 0.0 && self.weight_scale.is_finite()) {
            return bad("weight scale must be positive");
        }
        Ok(())
    }

    /// The network for sweep index `index`: random widths in `1..=n`, padded
    /// to `n`, then perturbed to non-singularity.
    pub fn build(&self, index: usize) -> Result<Network> {
        let mut rng = self.rng(index);
        let depth = self.depths[index % self.depths.len()];
        let hidden: Vec<usize> = (0..depth).map(|_| rng.random_range(1..=self.n)).collect();
        let raw = random_network(self.n, &hidden, self.activation, true, self.weight_scale, &mut rng)?;
        let padded = pad_to_width(&raw, self.n)?;
        make_nonsingular(&padded, self.delta, rng.random())
    }

    fn rng(&self, index: usize) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(index as u64);
        rng
    }
}

/// Builds, certifies and analyzes `count` random non-singular networks.
pub fn random_nonsingular_sweep(params: &NonsingularSweep) -> Result<SweepResult> {
    random_nonsingular_sweep_with(params, |_, net| net)
}

/// [`random_nonsingular_sweep`] with `inspect` applied to each constructed
/// network before certification; tests use it to inject networks.
pub fn random_nonsingular_sweep_with(
    params: &NonsingularSweep,
    mut inspect: impl FnMut(usize, Network) -> Network,
) -> Result<SweepResult> {
    params.validate()?;
    let runs = (0..params.count)
        .map(|i| {
            let net = inspect(i, params.build(i)?);
            analyze_nonsingular(params, i, net)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(nonsingular_result(runs))
}

pub fn nonsingular_result(runs: Vec<RunOutcome>) -> SweepResult {
    SweepResult {
        name: "nonsingular".into(),
        regime: Regime::Skinny,
        aggregate: nonsingular_aggregate(&runs),
        runs,
    }
}

/// Certifies `net` and probes it at `levels_per_net` levels drawn uniformly
/// between the 5th and 95th percentile of its values on the window.
pub fn analyze_nonsingular(params: &NonsingularSweep, index: usize, net: Network) -> Result<RunOutcome> {
    let report = is_nonsingular(&net, TOL_DET);
    if !report.verdict {
        return Err(Error::ConstructionBug(alloc::format!(
            "network {index}: {report:?}"
        )));
    }
    let mut eval = net.evaluator();
    let field = sample_grid(
        |x| eval.eval_scalar(x).unwrap_or(f64::NAN),
        &params.window,
        (params.resolution, params.resolution),
    )?;
    let (lo, hi) = (field.percentile(5.0), field.percentile(95.0));
    // a separate stream from the one that built the network
    let mut rng = params.rng(index);
    rng.set_word_pos(1 << 32);
    let levels: Vec<f64> = (0..params.levels_per_net)
        .map(|_| if lo < hi { rng.random_range(lo..hi) } else { lo })
        .collect();
    let reports = network_escalation(
        &net,
        &levels,
        &params.window,
        params.resolution,
        params.max_doublings,
        None,
    )?;
    Ok(RunOutcome {
        seed: index as u64,
        network: Some(net),
        steps_run: None,
        final_loss: None,
        accuracy: None,
        converged: true,
        accurate: false,
        window: Some(params.window.clone()),
        levels: levels
            .into_iter()
            .zip(reports)
            .map(|(l, r)| LevelOutcome::from_escalation(l, r))
            .collect(),
        error: None,
    })
}

/// Aggregate of a non-singular sweep: every bounded component is a
/// violation.
pub fn nonsingular_aggregate(runs: &[RunOutcome]) -> Aggregate {
    let mut agg = SweepResult::aggregate("".into(), Regime::Skinny, runs.to_vec()).aggregate;
    agg.violations = runs
        .iter()
        .flat_map(|r| {
            r.levels.iter().filter(|l| l.bounded > 0).map(|l| Violation {
                seed: r.seed,
                level: Some(l.level),
                kind: ViolationKind::BoundedComponent,
            })
        })
        .collect();
    agg
}
