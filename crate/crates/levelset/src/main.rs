use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand};
use levelset::config::{load_experiment, load_sweep, preset};
use levelset::core::analysis::{network_escalation, LevelOutcome, NonsingularSweep, ProbeLevels, INIT_SEED_SALT};
use levelset::core::nn::{Activation, Layer, Matrix, Network, Window};
use levelset::core::training::{
    accuracy, gen_ring_dataset, init_weights, mean_loss, train, Dataset, Loss, Optimizer, RingParams,
    TrainConfig,
};
use levelset::data::{read_dataset, sidecar_path, write_dataset};
use levelset::model::{read_model, write_model};
use levelset::report::{validate_report, RunReport, Status, SCHEMA_VERSION};
use levelset::run::{probe_threads, run_experiment_report, run_plots, run_sweep_report, sample_network};
use levelset::svg::Plot;
use levelset::{Error, Result};
use serde::Serialize;

#[derive(Parser)]
#[command(name = "levelset", version, about = "Level-set topology of small neural networks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate the two-class ring dataset
    GenData(GenData),
    /// Train a network on a dataset
    Train(TrainArgs),
    /// Extract and classify level components of a trained network
    Analyze(Analyze),
    /// Run the skinny (3a) or wide (3b) ring experiment
    Reproduce(Reproduce),
    /// Probe random non-singular networks for bounded level components
    SweepNonsingular(Sweep),
    /// Recompute the verdicts of a report and compare
    ValidateReport(Validate),
}

#[derive(Args)]
struct RingArgs {
    #[arg(long, default_value_t = 500)]
    inner: usize,
    #[arg(long, default_value_t = 1000)]
    ring: usize,
    #[arg(long, default_value_t = 0.5)]
    inner_sigma: f64,
    #[arg(long, default_value_t = 3.0)]
    ring_radius: f64,
    #[arg(long, default_value_t = 0.3)]
    ring_sigma: f64,
}

impl RingArgs {
    fn params(&self) -> RingParams {
        RingParams {
            n_inner: self.inner,
            n_ring: self.ring,
            inner_sigma: self.inner_sigma,
            ring_radius: self.ring_radius,
            ring_sigma: self.ring_sigma,
        }
    }
}

#[derive(Args)]
struct GenData {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    ring: RingArgs,
    /// CSV output; metadata goes next to it as `<stem>.meta.json`
    #[arg(long, default_value = "data.csv")]
    out: PathBuf,
}

#[derive(Args)]
struct TrainArgs {
    /// CSV dataset; without it a ring dataset is generated from --data-seed
    #[arg(long)]
    data: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    data_seed: u64,
    /// Layer widths, input first
    #[arg(long, value_delimiter = ',', default_value = "2,3,1")]
    arch: Vec<usize>,
    #[arg(long, default_value = "sigmoid", value_parser = parse_activation)]
    activation: Activation,
    #[arg(long, default_value = "adam", value_parser = ["adam", "sgd"])]
    optimizer: String,
    #[arg(long, default_value_t = 0.05)]
    lr: f64,
    #[arg(long, default_value_t = 5000, value_parser = clap::value_parser!(u64).range(1..))]
    steps: u64,
    #[arg(long)]
    batch_size: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 0.05)]
    target_loss: f64,
    #[arg(long, default_value = "bce", value_parser = ["bce", "mse"])]
    loss: String,
    #[arg(long, default_value = "model.json")]
    out: PathBuf,
    /// CSV of `step,loss`
    #[arg(long)]
    history: Option<PathBuf>,
}

#[derive(Args)]
struct Analyze {
    #[arg(long)]
    model: PathBuf,
    /// Dataset to overlay; also sets the default window
    #[arg(long)]
    data: Option<PathBuf>,
    /// `x0,x1,y0,y1`; defaults to the data bounding box scaled by 2, or
    /// [-4, 4]^2 without data
    #[arg(long, value_delimiter = ',', num_args = 4)]
    window: Option<Vec<f64>>,
    #[arg(long, default_value_t = 201, value_parser = clap::value_parser!(u64).range(2..))]
    resolution: u64,
    /// `decision:T` or a comma-separated list of levels
    #[arg(long, default_value = "decision:0.5", value_parser = parse_levels)]
    levels: ProbeLevels,
    /// Window doublings for the boundedness check
    #[arg(long, default_value_t = 0)]
    escalate: usize,
    #[arg(long, default_value = "analysis.json")]
    out: PathBuf,
    #[arg(long)]
    svg: Option<PathBuf>,
    /// Zero the timestamps in written files
    #[arg(long)]
    deterministic: bool,
}

#[derive(Args)]
struct RunOutput {
    #[arg(long)]
    out: Option<PathBuf>,
    /// Directory for one SVG per run and level
    #[arg(long)]
    svg_dir: Option<PathBuf>,
    #[arg(long)]
    deterministic: bool,
}

#[derive(Args)]
struct Reproduce {
    #[arg(long, value_parser = ["3a", "3b"])]
    paper_fig: Option<String>,
    /// TOML config; keys mirror the experiment fields, `preset` picks the base
    #[arg(long)]
    config: Option<PathBuf>,
    /// Runs seeds 0..k
    #[arg(long)]
    seeds: Option<u64>,
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    steps: Option<u64>,
    #[arg(long)]
    resolution: Option<usize>,
    #[arg(long)]
    max_doublings: Option<usize>,
    #[command(flatten)]
    output: RunOutput,
}

#[derive(Args)]
struct Sweep {
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    count: Option<usize>,
    #[arg(long)]
    levels_per_net: Option<usize>,
    #[arg(long)]
    resolution: Option<usize>,
    #[arg(long)]
    max_doublings: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Replace network INDEX by a singular one before certification
    #[arg(long, value_name = "INDEX")]
    inject_singular: Option<usize>,
    #[command(flatten)]
    output: RunOutput,
}

#[derive(Args)]
struct Validate {
    report: PathBuf,
}

fn parse_activation(s: &str) -> std::result::Result<Activation, String> {
    s.parse().map_err(|e: levelset::core::Error| e.to_string())
}

fn parse_levels(s: &str) -> std::result::Result<ProbeLevels, String> {
    s.parse().map_err(|e: levelset::core::Error| e.to_string())
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    std::fs::write(path, contents).map_err(|source| Error::Io {
        path: path.into(),
        source,
    })
}

fn now(deterministic: bool) -> u64 {
    if deterministic {
        return 0;
    }
    SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs())
}

fn gen_data(a: GenData) -> Result<ExitCode> {
    let data = gen_ring_dataset(a.seed, &a.ring.params())?;
    write_dataset(&a.out, &data)?;
    println!(
        "wrote {} points to {} and {}",
        data.len(),
        a.out.display(),
        sidecar_path(&a.out).display()
    );
    Ok(ExitCode::SUCCESS)
}

fn load_data(path: Option<&Path>, seed: u64) -> Result<Dataset> {
    match path {
        Some(p) => read_dataset(p),
        None => Ok(gen_ring_dataset(seed, &RingParams::default())?),
    }
}

fn train_cmd(a: TrainArgs) -> Result<ExitCode> {
    let data = load_data(a.data.as_deref(), a.data_seed)?;
    let net = init_weights(&a.arch, a.activation, a.seed ^ INIT_SEED_SALT)?;
    let cfg = TrainConfig {
        optimizer: if a.optimizer == "sgd" { Optimizer::Sgd } else { Optimizer::adam() },
        learning_rate: a.lr,
        steps: a.steps as usize,
        batch_size: a.batch_size,
        seed: a.seed,
        loss: if a.loss == "mse" { Loss::Mse } else { Loss::Bce },
        target_loss: a.target_loss,
        ..TrainConfig::default()
    };
    let out = train(&net, &data, &cfg)?;
    write_model(&a.out, &out.network)?;
    if let Some(h) = &a.history {
        let mut s = String::from("step,loss\n");
        for (step, loss) in &out.history {
            s.push_str(&format!("{step},{loss}\n"));
        }
        write_file(h, &s)?;
    }
    let loss = mean_loss(&out.network, data.points(), data.labels(), cfg.loss)?;
    let acc = accuracy(&out.network, &data, 0.5)?;
    println!(
        "steps {} loss {loss:.6} accuracy {acc:.4}{}",
        out.history.len(),
        if out.stopped_early { " (reached target loss)" } else { "" }
    );
    Ok(ExitCode::SUCCESS)
}

#[derive(Serialize)]
struct AnalysisReport {
    schema_version: u32,
    kind: &'static str,
    tool: &'static str,
    version: &'static str,
    model: String,
    value_range: (f64, f64),
    levels: Vec<LevelOutcome>,
    created_unix: u64,
}

fn analyze(a: Analyze) -> Result<ExitCode> {
    let net = read_model(&a.model)?;
    if net.input_dim() != 2 || net.output_dim() != 1 {
        return Err(Error::Config(format!(
            "{}: analysis needs a network from the plane to the line, got {} -> {}",
            a.model.display(),
            net.input_dim(),
            net.output_dim()
        )));
    }
    let data = a.data.as_deref().map(read_dataset).transpose()?;
    if let Some(d) = &data {
        if d.dim() != net.input_dim() {
            return Err(levelset::core::Error::DimensionMismatch {
                expected: net.input_dim(),
                got: d.dim(),
            }
            .into());
        }
    }
    let window = match (&a.window, &data) {
        (Some(w), _) => Window::rect(w[0], w[1], w[2], w[3])?,
        (None, Some(d)) => levelset::core::analysis::default_window(d)?,
        (None, None) => Window::cube(2, -4.0, 4.0)?,
    };
    let res = a.resolution as usize;
    let field = sample_network(&net, &window, res)?;
    let levels = a.levels.levels();
    for &l in &levels {
        if l < field.min() || l > field.max() {
            eprintln!(
                "warning: level {l} lies outside the sampled range [{}, {}]",
                field.min(),
                field.max()
            );
        }
    }
    let reports = network_escalation(&net, &levels, &window, res, a.escalate, None)?;
    let outcomes: Vec<LevelOutcome> = levels
        .iter()
        .zip(reports)
        .map(|(&l, r)| LevelOutcome::from_escalation(l, r))
        .collect();
    for o in &outcomes {
        println!(
            "level {}: {} bounded, {} unbounded evidence, {} inconclusive",
            o.level, o.bounded, o.unbounded_evidence, o.inconclusive
        );
    }
    if let Some(svg) = &a.svg {
        let first = &outcomes[0];
        let plot = Plot {
            field: &field,
            level: first.level,
            components: &first.escalation.base().components,
            points: data.as_ref().map(|d| (d.points(), d.labels())),
            timestamp: now(a.deterministic),
        };
        write_file(svg, &plot.render())?;
    }
    let report = AnalysisReport {
        schema_version: SCHEMA_VERSION,
        kind: "analysis",
        tool: env!("CARGO_PKG_NAME"),
        version: env!("CARGO_PKG_VERSION"),
        model: a.model.display().to_string(),
        value_range: (field.min(), field.max()),
        levels: outcomes,
        created_unix: now(a.deterministic),
    };
    let mut text = serde_json::to_string_pretty(&report).expect("report serializes");
    text.push('\n');
    write_file(&a.out, &text)?;
    Ok(ExitCode::SUCCESS)
}

/// Prints verdicts, writes outputs and maps the outcome to an exit code.
fn emit(report: &RunReport, out: &RunOutput) -> Result<ExitCode> {
    for v in &report.verdicts {
        let tag = match v.status {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::Untested => "UNTESTED",
        };
        println!("{tag} {}: {}", v.property, v.detail);
    }
    if let Some(p) = &out.out {
        write_file(p, &report.to_json())?;
    }
    if let Some(dir) = &out.svg_dir {
        std::fs::create_dir_all(dir).map_err(|source| Error::Io {
            path: dir.clone(),
            source,
        })?;
        for (stem, svg) in run_plots(report, now(out.deterministic))? {
            write_file(&dir.join(format!("{stem}.svg")), &svg)?;
        }
    }
    Ok(if report.passed() { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

/// The invocation without the program path, which varies between installs.
fn command_line() -> String {
    std::iter::once("levelset".to_string())
        .chain(std::env::args().skip(1))
        .collect::<Vec<_>>()
        .join(" ")
}

fn reproduce(a: Reproduce) -> Result<ExitCode> {
    let fig = a.paper_fig.as_deref().unwrap_or("3b");
    let mut spec = match &a.config {
        Some(p) => load_experiment(p, fig)?,
        None => preset(fig)?,
    };
    if let Some(k) = a.seeds {
        spec.seeds = (0..k).collect();
    }
    if let Some(s) = a.steps {
        spec.train.steps = s as usize;
    }
    if let Some(r) = a.resolution {
        spec.resolution = r;
    }
    if let Some(d) = a.max_doublings {
        spec.max_doublings = d;
    }
    let report = run_experiment_report(&spec, &command_line(), probe_threads(), a.output.deterministic)?;
    emit(&report, &a.output)
}

fn sweep(a: Sweep) -> Result<ExitCode> {
    let mut params = match &a.config {
        Some(p) => load_sweep(p)?,
        None => NonsingularSweep::default(),
    };
    macro_rules! set {
        ($($field:ident),*) => {$(if let Some(v) = a.$field { params.$field = v; })*};
    }
    set!(count, levels_per_net, resolution, max_doublings, seed);
    let singular = |i: usize, net: Network| {
        if Some(i) != a.inject_singular {
            return net;
        }
        let mut layers = net.layers().to_vec();
        let n = layers[0].output_dim();
        let cols = layers[0].input_dim();
        layers[0] = Layer::new(Matrix::zeros(n, cols), vec![0.0; n]).expect("matching shapes");
        Network::new(net.input_dim(), layers, net.activation(), net.final_activation()).expect("same chain")
    };
    let report = run_sweep_report(
        &params,
        &command_line(),
        probe_threads(),
        a.output.deterministic,
        Some(&singular),
    )?;
    emit(&report, &a.output)
}

fn validate(a: Validate) -> Result<ExitCode> {
    let text = std::fs::read_to_string(&a.report).map_err(|source| Error::Io {
        path: a.report.clone(),
        source,
    })?;
    let report: RunReport = serde_json::from_str(&text).map_err(|e| Error::Format {
        path: a.report.clone(),
        msg: e.to_string(),
    })?;
    let problems = validate_report(&report);
    if problems.is_empty() {
        println!("report is consistent; {} verdicts recomputed", report.verdicts.len());
        Ok(ExitCode::SUCCESS)
    } else {
        for p in &problems {
            println!("mismatch: {p}");
        }
        Ok(ExitCode::from(1))
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::GenData(a) => gen_data(a),
        Command::Train(a) => train_cmd(a),
        Command::Analyze(a) => analyze(a),
        Command::Reproduce(a) => reproduce(a),
        Command::SweepNonsingular(a) => sweep(a),
        Command::ValidateReport(a) => validate(a),
    };
    result.unwrap_or_else(|e| {
        eprintln!("error: {e}");
        ExitCode::from(e.exit_code())
    })
}
