use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use qrecon::config::{parse_usize_list, ConfigFile, FromValue};
use qrecon::dataset_io::{self, DataFile};
use qrecon::metrics_io;
use qrecon::model_io::{self, ModelFile, ModelMeta};
use qrecon::sweep::parallel_sweep;
use qrecon::Error;
use qrecon_core::experiments::{
    self, infidelity_for, purpose, ClassificationProblem, MetricsLog, ReconstructionProblem, Task, TrainConfig,
    DEFAULT_TEST_SIZE,
};
use qrecon_core::nn::{LossKind, MlpModel, NormMode};
use qrecon_core::sampling::{
    build_classification_dataset, build_reconstruction_dataset, derive_seed, substream, ClassDataset, Dataset,
    Domain, InputMode, StateKind,
};

const AFTER_HELP: &str = "\
Replicating the reported experiments:

  Single-qubit reconstruction (phase flip, 30 pure training states):
    qrecon train --channel 'Z(0.2)' --qubits 1 --samples 30 --loss mse --seed 1

  Two- and three-qubit reconstruction:
    qrecon train --channel 'CAD(0.1,0.2)' --qubits 2 --samples 300 --loss infidelity --seed 1
    qrecon train --channel 'X(0.2)*Z(0.2)*Y(0.2)' --qubits 3 --samples 900 --loss mse --seed 1

  Channel classification (noisy + ideal inputs, 300 training states):
    qrecon train --task classify --channels 'Z(0.2);GAD(0.5,0.3)' --mode IN --samples 300 --seed 1

  Dataset-size sweep and deformed Bloch sphere:
    qrecon sweep --channel 'Z(0.2)' --qubits 1 --sizes 5,10,30,100,300 --repeats 5 --seed 1 --out sweep.csv
    qrecon bloch-cloud --channel 'Z(0.2)' --samples 10000 --seed 1 --out cloud.csv";

/// Reconstruct noiseless qubit states from noisy ones, or tell noise channels apart.
#[derive(Parser, Debug)]
#[command(name = "qrecon", version, after_help = AFTER_HELP)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Sample states, push them through a channel and write a dataset file.
    GenData(GenDataArgs),
    /// Train a network and report its test metric.
    Train(TrainArgs),
    /// Evaluate a saved model on a dataset file.
    Eval(EvalArgs),
    /// Average test fidelity against training-set size.
    Sweep(SweepArgs),
    /// Export pure states and their images under a single-qubit channel.
    BlochCloud(CloudArgs),
}

#[derive(Args, Debug, Default)]
struct Shared {
    /// RNG seed; drawn from system entropy and printed when omitted.
    #[arg(long)]
    seed: Option<u64>,
    /// Output file.
    #[arg(long)]
    out: Option<PathBuf>,
    /// TOML or JSON file whose keys mirror the flags; flags win.
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Args, Debug, Default)]
struct DataArgs {
    /// Channel spec, e.g. `Z(0.2)` or `Z(0.2)*X(0.2)`.
    #[arg(long)]
    channel: Option<String>,
    /// `;`-separated channel specs, one per class.
    #[arg(long)]
    channels: Option<String>,
    #[arg(long)]
    qubits: Option<usize>,
    /// Number of training states.
    #[arg(long)]
    samples: Option<usize>,
    /// `pure` or `mixed` input states (reconstruction).
    #[arg(long)]
    kind: Option<String>,
    /// `IN` (noisy and ideal vectors) or `N` (noisy only) for classification.
    #[arg(long)]
    mode: Option<String>,
}

#[derive(Args, Debug, Default)]
struct HyperArgs {
    /// `mse`, `infidelity` or `cce`.
    #[arg(long)]
    loss: Option<String>,
    /// Hidden layer widths, e.g. `128,128`.
    #[arg(long)]
    hidden: Option<String>,
    #[arg(long)]
    epochs: Option<usize>,
    #[arg(long)]
    batch: Option<usize>,
    #[arg(long)]
    lr: Option<f64>,
    /// Output norm rule for mixed states: `exact_norm` or `paper_literal`.
    #[arg(long)]
    norm_mode: Option<String>,
}

#[derive(Args, Debug)]
struct GenDataArgs {
    #[command(flatten)]
    shared: Shared,
    #[command(flatten)]
    data: DataArgs,
    /// Write a classification dataset.
    #[arg(long)]
    classify: bool,
}

#[derive(Args, Debug)]
struct TrainArgs {
    #[command(flatten)]
    shared: Shared,
    #[command(flatten)]
    data: DataArgs,
    #[command(flatten)]
    hyper: HyperArgs,
    /// `reconstruct` or `classify`.
    #[arg(long)]
    task: Option<String>,
    /// Training dataset file (otherwise generated from --channel/--channels).
    #[arg(long = "data")]
    data_path: Option<PathBuf>,
    /// Test dataset file (otherwise generated from an independent seed).
    #[arg(long)]
    test_data: Option<PathBuf>,
    /// Size of a generated test set.
    #[arg(long)]
    test_samples: Option<usize>,
    /// Per-epoch metrics CSV (default: `<out>.metrics.csv`).
    #[arg(long)]
    metrics: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct EvalArgs {
    #[command(flatten)]
    shared: Shared,
    /// Model file written by `train`.
    #[arg(long)]
    model: Option<PathBuf>,
    /// Dataset file to evaluate on.
    #[arg(long)]
    data: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct SweepArgs {
    #[command(flatten)]
    shared: Shared,
    #[command(flatten)]
    data: DataArgs,
    #[command(flatten)]
    hyper: HyperArgs,
    /// Training-set sizes, e.g. `10,30,100,300`.
    #[arg(long)]
    sizes: Option<String>,
    #[arg(long)]
    repeats: Option<usize>,
    #[arg(long)]
    test_samples: Option<usize>,
    /// Worker threads.
    #[arg(long)]
    jobs: Option<usize>,
}

#[derive(Args, Debug)]
struct CloudArgs {
    #[command(flatten)]
    shared: Shared,
    #[arg(long)]
    channel: Option<String>,
    #[arg(long)]
    samples: Option<usize>,
}

/// Failures split by exit code.
enum Failure {
    /// Bad flags, unreadable or malformed inputs: exit 2.
    Usage(String),
    /// Anything that goes wrong once inputs are accepted: exit 1.
    Runtime(String),
}

type Outcome<T> = Result<T, Failure>;

fn usage(msg: impl Into<String>) -> Failure {
    Failure::Usage(msg.into())
}

fn runtime(e: impl std::fmt::Display) -> Failure {
    Failure::Runtime(e.to_string())
}

/// Errors in reading user-supplied inputs count as usage errors.
fn input_error(e: Error) -> Failure {
    match e {
        Error::Io { .. } | Error::Parse { .. } | Error::Config(_) => Failure::Usage(e.to_string()),
        Error::Core(core) => core_input_error(core),
    }
}

fn core_input_error(e: qrecon_core::Error) -> Failure {
    use qrecon_core::Error as E;
    match e {
        E::Syntax { .. }
        | E::UnknownChannel { .. }
        | E::Arity { .. }
        | E::ParameterOutOfRange { .. }
        | E::ProbabilitySum(_)
        | E::QubitMismatch { .. }
        | E::UnsupportedQubitCount(_)
        | E::InvalidConfig(_)
        | E::LossHeadMismatch { .. }
        | E::TrainTestOverlap(_) => Failure::Usage(e.to_string()),
        other => Failure::Runtime(other.to_string()),
    }
}

fn output_error(e: Error) -> Failure {
    runtime(e)
}

/// Merges flags over config-file values.
struct Resolver {
    config: Option<ConfigFile>,
}

impl Resolver {
    fn new(path: Option<&Path>, allowed: &[&str]) -> Outcome<Self> {
        let config = match path {
            Some(p) => {
                let c = ConfigFile::load(p).map_err(input_error)?;
                c.check_keys(allowed).map_err(input_error)?;
                Some(c)
            }
            None => None,
        };
        Ok(Self { config })
    }

    fn pick<T: FromValue>(&self, flag: Option<T>, key: &str) -> Outcome<Option<T>> {
        if flag.is_some() {
            return Ok(flag);
        }
        match &self.config {
            Some(c) => c.get(key).map_err(input_error),
            None => Ok(None),
        }
    }

    fn pick_path(&self, flag: Option<PathBuf>, key: &str) -> Outcome<Option<PathBuf>> {
        Ok(self.pick(flag.map(|p| p.to_string_lossy().into_owned()), key)?.map(PathBuf::from))
    }

    fn require<T: FromValue>(&self, flag: Option<T>, key: &str) -> Outcome<T> {
        self.pick(flag, key)?.ok_or_else(|| usage(format!("--{key} is required")))
    }

    /// Resolved seed, drawn from entropy if absent, and echoed on stdout.
    fn seed(&self, flag: Option<u64>) -> Outcome<u64> {
        let seed = match self.pick(flag, "seed")? {
            Some(s) => s,
            None => rand::random(),
        };
        println!("seed={seed}");
        Ok(seed)
    }
}

const SHARED_KEYS: &[&str] = &["seed", "out", "config"];
const DATA_KEYS: &[&str] = &["channel", "channels", "qubits", "samples", "kind", "mode"];
const HYPER_KEYS: &[&str] = &["loss", "hidden", "epochs", "batch", "lr", "norm-mode"];

fn keys(groups: &[&[&'static str]], extra: &[&'static str]) -> Vec<&'static str> {
    groups.iter().flat_map(|g| g.iter().copied()).chain(extra.iter().copied()).collect()
}

fn parse_kind(text: &str) -> Outcome<StateKind> {
    StateKind::parse(text).ok_or_else(|| usage(format!("unknown state kind {text:?} (pure|mixed)")))
}

fn parse_mode(text: &str) -> Outcome<InputMode> {
    InputMode::parse(text).ok_or_else(|| usage(format!("unknown input mode {text:?} (IN|N)")))
}

fn split_channels(text: &str) -> Vec<String> {
    text.split(';').map(|s| s.trim().to_string()).filter(|s| !s.is_empty()).collect()
}

/// Fully resolved data options.
struct DataOpts {
    channel: Option<String>,
    channels: Option<Vec<String>>,
    qubits: usize,
    samples: Option<usize>,
    kind: StateKind,
    mode: InputMode,
}

fn resolve_data(r: &Resolver, d: DataArgs) -> Outcome<DataOpts> {
    Ok(DataOpts {
        channel: r.pick(d.channel, "channel")?,
        channels: r.pick(d.channels, "channels")?.map(|s| split_channels(&s)),
        qubits: r.pick(d.qubits, "qubits")?.unwrap_or(1),
        samples: r.pick(d.samples, "samples")?,
        kind: parse_kind(&r.pick(d.kind, "kind")?.unwrap_or_else(|| "pure".into()))?,
        mode: parse_mode(&r.pick(d.mode, "mode")?.unwrap_or_else(|| "IN".into()))?,
    })
}

fn list_flag(text: Option<String>, name: &str) -> Outcome<Option<Vec<usize>>> {
    text.map(|t| parse_usize_list(&t).map_err(|e| usage(format!("--{name}: {e}"))))
        .transpose()
}

fn parse_loss(text: &str, kind: StateKind) -> Outcome<LossKind> {
    match text {
        "mse" => Ok(LossKind::Mse),
        "infidelity" | "inf" => Ok(infidelity_for(kind)),
        "infidelity-pure" => Ok(LossKind::InfidelityPure),
        "infidelity-mixed" => Ok(LossKind::InfidelityMixed),
        "cce" => Ok(LossKind::Cce),
        other => Err(usage(format!("unknown loss {other:?} (mse|infidelity|cce)"))),
    }
}

fn train_config(r: &Resolver, h: HyperArgs, task: Task, n: usize, kind: StateKind, seed: u64) -> Outcome<TrainConfig> {
    let mut cfg = TrainConfig::defaults(task, n, seed);
    if let Some(loss) = r.pick(h.loss, "loss")? {
        cfg.loss = parse_loss(&loss, kind)?;
    }
    if let Some(hidden) = r.pick(list_flag(h.hidden, "hidden")?, "hidden")? {
        cfg.hidden = hidden;
    }
    if let Some(e) = r.pick(h.epochs, "epochs")? {
        cfg.epochs = e;
    }
    cfg.batch_size = r.pick(h.batch, "batch")?;
    if let Some(lr) = r.pick(h.lr, "lr")? {
        cfg.lr = lr;
    }
    if let Some(mode) = r.pick(h.norm_mode, "norm-mode")? {
        cfg.norm_mode =
            NormMode::parse(&mode).ok_or_else(|| usage(format!("unknown norm mode {mode:?}")))?;
    }
    Ok(cfg)
}

fn gen_data(a: GenDataArgs) -> Outcome<()> {
    let r = Resolver::new(a.shared.config.as_deref(), &keys(&[SHARED_KEYS, DATA_KEYS], &["classify"]))?;
    let classify = a.classify || r.pick(None::<bool>, "classify")?.unwrap_or(false);
    let d = resolve_data(&r, a.data)?;
    let out = r.pick_path(a.shared.out, "out")?.ok_or_else(|| usage("--out is required"))?;
    let samples = d.samples.ok_or_else(|| usage("--samples is required"))?;
    let seed = r.seed(a.shared.seed)?;
    if classify {
        let specs = d.channels.ok_or_else(|| usage("--channels is required with --classify"))?;
        let refs: Vec<&str> = specs.iter().map(String::as_str).collect();
        let ds = build_classification_dataset(&refs, d.qubits, samples, d.mode, seed).map_err(core_input_error)?;
        dataset_io::save_class_dataset(&out, &ds).map_err(output_error)?;
        println!("wrote {} records ({} classes) to {}", ds.len(), ds.classes(), out.display());
    } else {
        let spec = d.channel.ok_or_else(|| usage("--channel is required"))?;
        let ds = build_reconstruction_dataset(&spec, d.qubits, samples, d.kind, seed).map_err(core_input_error)?;
        dataset_io::save_dataset(&out, &ds).map_err(output_error)?;
        println!("wrote {} records to {}", ds.len(), out.display());
    }
    Ok(())
}

fn load_input(path: &Path) -> Outcome<DataFile> {
    dataset_io::load_data_file(path).map_err(input_error)
}

enum TrainData {
    Reconstruction(Dataset, Dataset),
    Classification(ClassDataset, ClassDataset),
}

fn train(a: TrainArgs) -> Outcome<()> {
    let extra = ["task", "data", "test-data", "test-samples", "metrics"];
    let r = Resolver::new(a.shared.config.as_deref(), &keys(&[SHARED_KEYS, DATA_KEYS, HYPER_KEYS], &extra))?;
    let task_text = r.pick(a.task, "task")?;
    let data_path = r.pick_path(a.data_path, "data")?;
    let test_path = r.pick_path(a.test_data, "test-data")?;
    let test_samples = r.pick(a.test_samples, "test-samples")?;
    let out = r.pick_path(a.shared.out, "out")?;
    let metrics_path = r.pick_path(a.metrics, "metrics")?;
    let d = resolve_data(&r, a.data)?;
    let seed = r.seed(a.shared.seed)?;

    let train_file = data_path.as_deref().map(load_input).transpose()?;
    let task = match (task_text.as_deref(), &train_file) {
        (Some(t), _) => Task::parse(t).ok_or_else(|| usage(format!("unknown task {t:?}")))?,
        (None, Some(DataFile::Classification(_))) => Task::Classify,
        (None, Some(DataFile::Reconstruction(_))) => Task::Reconstruct,
        (None, None) if d.channels.is_some() && d.channel.is_none() => Task::Classify,
        (None, None) => Task::Reconstruct,
    };

    let data = match (task, train_file) {
        (Task::Reconstruct, Some(DataFile::Reconstruction(train))) => {
            let test = match &test_path {
                Some(p) => expect_recon(load_input(p)?)?,
                None => build_reconstruction_dataset(
                    &train.channel_spec,
                    train.n,
                    test_samples.unwrap_or(DEFAULT_TEST_SIZE),
                    train.kind,
                    derive_seed(seed, purpose::TEST_DATA, 0),
                )
                .map_err(core_input_error)?,
            };
            TrainData::Reconstruction(train, test)
        }
        (Task::Classify, Some(DataFile::Classification(train))) => {
            let test = match &test_path {
                Some(p) => expect_class(load_input(p)?)?,
                None => {
                    let specs: Vec<&str> = train.channel_specs.iter().map(String::as_str).collect();
                    build_classification_dataset(
                        &specs,
                        train.n,
                        test_samples.unwrap_or(100),
                        train.mode,
                        derive_seed(seed, purpose::TEST_DATA, 0),
                    )
                    .map_err(core_input_error)?
                }
            };
            TrainData::Classification(train, test)
        }
        (_, Some(_)) => return Err(usage("dataset type does not match --task")),
        (Task::Reconstruct, None) => {
            let problem = ReconstructionProblem {
                channel_spec: d.channel.clone().ok_or_else(|| usage("--channel or --data is required"))?,
                n: d.qubits,
                kind: d.kind,
                train_size: d.samples.ok_or_else(|| usage("--samples is required"))?,
                test_size: test_samples.unwrap_or(DEFAULT_TEST_SIZE),
            };
            let (train, test) = experiments::reconstruction_data(&problem, seed).map_err(core_input_error)?;
            let test = match &test_path {
                Some(p) => expect_recon(load_input(p)?)?,
                None => test,
            };
            TrainData::Reconstruction(train, test)
        }
        (Task::Classify, None) => {
            let problem = ClassificationProblem {
                channel_specs: d.channels.clone().ok_or_else(|| usage("--channels or --data is required"))?,
                n: d.qubits,
                mode: d.mode,
                train_size: d.samples.ok_or_else(|| usage("--samples is required"))?,
                test_size: test_samples.unwrap_or(100),
            };
            let (train, test) = experiments::classification_data(&problem, seed).map_err(core_input_error)?;
            let test = match &test_path {
                Some(p) => expect_class(load_input(p)?)?,
                None => test,
            };
            TrainData::Classification(train, test)
        }
    };

    let started = Instant::now();
    let (model, mut log, meta) = match &data {
        TrainData::Reconstruction(train, test) => {
            let cfg = train_config(&r, a.hyper, task, train.n, train.kind, seed)?;
            let (model, log) = experiments::train_reconstruction(&cfg, train, test).map_err(core_input_error)?;
            let meta = ModelMeta {
                task: Some(task.as_str().into()),
                loss: Some(cfg.loss.name().into()),
                qubits: Some(train.n),
                data_kind: Some(train.kind.as_str().into()),
                channels: vec![train.channel_spec.clone()],
                seed: Some(seed),
                train_data_seed: Some(train.seed),
            };
            (model, log, meta)
        }
        TrainData::Classification(train, test) => {
            let cfg = train_config(&r, a.hyper, task, train.n, StateKind::Pure, seed)?;
            let (model, log) = experiments::train_classification(&cfg, train, test).map_err(core_input_error)?;
            let meta = ModelMeta {
                task: Some(task.as_str().into()),
                loss: Some(cfg.loss.name().into()),
                qubits: Some(train.n),
                data_kind: Some(train.mode.as_str().into()),
                channels: train.channel_specs.clone(),
                seed: Some(seed),
                train_data_seed: Some(train.seed),
            };
            (model, log, meta)
        }
    };
    log.duration_secs = Some(started.elapsed().as_secs_f64());
    eprintln!("trained in {:.2}s", log.duration_secs.unwrap());

    let metrics_path = metrics_path.or_else(|| out.as_ref().map(|o| with_suffix(o, ".metrics.csv")));
    if let Some(path) = &out {
        model_io::save_model(path, &ModelFile { model, meta }).map_err(output_error)?;
        println!("model written to {}", path.display());
    }
    if let Some(path) = &metrics_path {
        metrics_io::write_text(path, &metrics_io::metrics_csv(&log)).map_err(output_error)?;
        println!("metrics written to {}", path.display());
    }
    print_summary(&log);
    Ok(())
}

fn with_suffix(path: &Path, suffix: &str) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(suffix);
    PathBuf::from(s)
}

fn print_summary(log: &MetricsLog) {
    if let Some(last) = log.epochs.last() {
        println!("epochs={} final_loss={:e} test_size={}", last.epoch, last.loss, log.test_size);
    }
    println!("{}={}", log.final_metric.name(), log.final_metric.value());
}

fn expect_recon(file: DataFile) -> Outcome<Dataset> {
    match file {
        DataFile::Reconstruction(d) => Ok(d),
        DataFile::Classification(_) => Err(usage("expected a reconstruction dataset")),
    }
}

fn expect_class(file: DataFile) -> Outcome<ClassDataset> {
    match file {
        DataFile::Classification(d) => Ok(d),
        DataFile::Reconstruction(_) => Err(usage("expected a classification dataset")),
    }
}

fn eval(a: EvalArgs) -> Outcome<()> {
    let r = Resolver::new(a.shared.config.as_deref(), &keys(&[SHARED_KEYS], &["model", "data"]))?;
    let model_path = r.pick_path(a.model, "model")?.ok_or_else(|| usage("--model is required"))?;
    let data_path = r.pick_path(a.data, "data")?.ok_or_else(|| usage("--data is required"))?;
    let out = r.pick_path(a.shared.out, "out")?;
    r.seed(a.shared.seed)?;
    let file = model_io::load_model(&model_path).map_err(input_error)?;
    let data = load_input(&data_path)?;
    if file.meta.train_data_seed == Some(data.seed()) {
        eprintln!("warning: train/test overlap (dataset seed {} was used for training)", data.seed());
    }
    let (name, value) = evaluate(&file.model, &data)?;
    if let Some(path) = out {
        metrics_io::write_text(&path, &format!("metric,value,test_size\n{name},{value:.16e},{}\n", data.len()))
            .map_err(output_error)?;
    }
    println!("{name}={value}");
    Ok(())
}

fn evaluate(model: &MlpModel, data: &DataFile) -> Outcome<(&'static str, f64)> {
    match data {
        DataFile::Reconstruction(d) => experiments::evaluate_atf(model, d)
            .map(|v| ("ATF", v))
            .map_err(core_input_error),
        DataFile::Classification(d) => experiments::evaluate_accuracy(model, d)
            .map(|v| ("ACC", v))
            .map_err(core_input_error),
    }
}

fn sweep(a: SweepArgs) -> Outcome<()> {
    let extra = ["sizes", "repeats", "test-samples", "jobs"];
    let r = Resolver::new(a.shared.config.as_deref(), &keys(&[SHARED_KEYS, DATA_KEYS, HYPER_KEYS], &extra))?;
    let sizes = r.require(list_flag(a.sizes, "sizes")?, "sizes")?;
    if sizes.is_empty() || sizes.contains(&0) {
        return Err(usage("--sizes must list positive sizes"));
    }
    let repeats = r.pick(a.repeats, "repeats")?.unwrap_or(experiments::DEFAULT_REPEATS);
    let test_size = r.pick(a.test_samples, "test-samples")?.unwrap_or(DEFAULT_TEST_SIZE);
    let jobs = r.pick(a.jobs, "jobs")?.unwrap_or(1);
    let out = r.pick_path(a.shared.out, "out")?;
    let d = resolve_data(&r, a.data)?;
    let seed = r.seed(a.shared.seed)?;
    let problem = ReconstructionProblem {
        channel_spec: d.channel.ok_or_else(|| usage("--channel is required"))?,
        n: d.qubits,
        kind: d.kind,
        train_size: 0,
        test_size,
    };
    // fail fast on a bad channel before spending time on training
    build_reconstruction_dataset(&problem.channel_spec, problem.n, 1, problem.kind, seed).map_err(core_input_error)?;
    let mut cfg = train_config(&r, a.hyper, Task::Reconstruct, d.qubits, d.kind, seed)?;
    cfg.repeats = repeats;
    for &s in &sizes {
        cfg.validate(s).map_err(core_input_error)?;
    }
    let started = Instant::now();
    let rows = parallel_sweep(&problem, &cfg, &sizes, jobs).map_err(|e| match e {
        Error::Core(c) => core_input_error(c),
        other => runtime(other),
    })?;
    eprintln!("sweep finished in {:.2}s", started.elapsed().as_secs_f64());
    let csv = metrics_io::sweep_csv(&rows);
    match out {
        Some(path) => {
            metrics_io::write_text(&path, &csv).map_err(output_error)?;
            println!("wrote {} rows to {}", rows.len(), path.display());
        }
        None => print!("{csv}"),
    }
    Ok(())
}

fn bloch_cloud(a: CloudArgs) -> Outcome<()> {
    let r = Resolver::new(a.shared.config.as_deref(), &keys(&[SHARED_KEYS], &["channel", "samples"]))?;
    let spec = r.require(a.channel, "channel")?;
    let samples = r.pick(a.samples, "samples")?.unwrap_or(10_000);
    let out = r.pick_path(a.shared.out, "out")?;
    let seed = r.seed(a.shared.seed)?;
    let points = experiments::bloch_cloud(&spec, samples, &mut substream(seed, Domain::Cloud, 0))
        .map_err(core_input_error)?;
    let csv = metrics_io::cloud_csv(&points);
    match out {
        Some(path) => {
            metrics_io::write_text(&path, &csv).map_err(output_error)?;
            println!("wrote {} points to {}", points.len(), path.display());
        }
        None => print!("{csv}"),
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code();
            let _ = e.print();
            return ExitCode::from(code as u8);
        }
    };
    let result = match cli.command {
        Command::GenData(a) => gen_data(a),
        Command::Train(a) => train(a),
        Command::Eval(a) => eval(a),
        Command::Sweep(a) => sweep(a),
        Command::BlochCloud(a) => bloch_cloud(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Runtime(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}
