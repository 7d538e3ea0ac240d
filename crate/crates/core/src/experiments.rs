//! Training and evaluation pipelines: reconstruction, channel classification,
//! dataset-size sweeps and Bloch-sphere point clouds.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)] // inherent under std
use num_traits::Float;
use rand::seq::SliceRandom;
use rand::Rng;

use crate::channels::{apply, parse_channel_spec};
use crate::error::{Error, Result};
use crate::nn::{init_model, loss, Batch, HeadSpec, LossKind, MlpModel, NormMode, Targets};
use crate::qstate::{
    bloch_from_density, bloch_len, density_from_bloch_with, fidelity_general, hilbert_dim, pauli_basis,
    BlochVector,
};
use crate::sampling::{
    build_classification_dataset, build_reconstruction_dataset, derive_seed, haar_pure, substream,
    ClassDataset, Dataset, Domain, InputMode, StateKind,
};

/// Reconstruction test-set size when none is given.
pub const DEFAULT_TEST_SIZE: usize = 500;
/// Largest dataset trained in one full batch by default.
pub const FULL_BATCH_LIMIT: usize = 64;
pub const DEFAULT_BATCH: usize = 32;
pub const DEFAULT_LR: f64 = 1e-3;
pub const DEFAULT_REPEATS: usize = 5;

/// `purpose` tags for [`derive_seed`].
pub mod purpose {
    pub const TRAIN_DATA: u32 = 1;
    pub const TEST_DATA: u32 = 2;
    pub const REPEAT: u32 = 3;
    /// Sweep cells use `SWEEP + size index`.
    pub const SWEEP: u32 = 1 << 16;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Task {
    Reconstruct,
    Classify,
}

impl Task {
    pub fn as_str(self) -> &'static str {
        match self {
            Task::Reconstruct => "reconstruct",
            Task::Classify => "classify",
        }
    }

    pub fn parse(text: &str) -> Option<Self> {
        match text {
            "reconstruct" | "reconstruction" => Some(Task::Reconstruct),
            "classify" | "classification" => Some(Task::Classify),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainConfig {
    pub task: Task,
    pub loss: LossKind,
    /// Hidden layer widths; input and output widths follow from the data.
    pub hidden: Vec<usize>,
    pub epochs: usize,
    /// `None` trains full-batch up to [`FULL_BATCH_LIMIT`] records, else [`DEFAULT_BATCH`].
    pub batch_size: Option<usize>,
    pub lr: f64,
    /// Seeds initialisation and shuffling.
    pub seed: u64,
    pub repeats: usize,
    /// Output norm rule for mixed-state reconstruction.
    pub norm_mode: NormMode,
}

impl TrainConfig {
    /// Default hyperparameters for `n`-qubit problems.
    pub fn defaults(task: Task, n: usize, seed: u64) -> Self {
        let (epochs, hidden) = match n {
            1 => (500, vec![128, 128]),
            2 => (1000, vec![128, 128]),
            _ => (1000, vec![128, 128, 128]),
        };
        let loss = match task {
            Task::Reconstruct => LossKind::Mse,
            Task::Classify => LossKind::Cce,
        };
        Self {
            task,
            loss,
            hidden,
            epochs,
            batch_size: None,
            lr: DEFAULT_LR,
            seed,
            repeats: DEFAULT_REPEATS,
            norm_mode: NormMode::ExactNorm,
        }
    }

    /// Effective batch size for a training set of `m` records.
    pub fn batch_for(&self, m: usize) -> usize {
        match self.batch_size {
            Some(b) => b,
            None if m <= FULL_BATCH_LIMIT => m,
            None => DEFAULT_BATCH,
        }
    }

    pub fn validate(&self, m: usize) -> Result<()> {
        if self.epochs == 0 {
            return Err(Error::InvalidConfig("epochs must be at least 1".into()));
        }
        let b = self.batch_for(m);
        if b == 0 || b > m {
            return Err(Error::InvalidConfig(format!("batch size {b} outside 1..={m}")));
        }
        if !(self.lr > 0.0 && self.lr.is_finite()) {
            return Err(Error::InvalidConfig(format!("learning rate {} must be positive", self.lr)));
        }
        if self.hidden.contains(&0) {
            return Err(Error::InvalidConfig("hidden widths must be positive".into()));
        }
        let loss_ok = match self.task {
            Task::Reconstruct => self.loss != LossKind::Cce,
            Task::Classify => self.loss == LossKind::Cce,
        };
        if !loss_ok {
            return Err(Error::InvalidConfig(format!(
                "loss {} does not fit task {}",
                self.loss.name(),
                self.task.as_str()
            )));
        }
        Ok(())
    }
}

/// Reconstruction loss matching the state kind (`InfidelityPure` for pure data).
pub fn infidelity_for(kind: StateKind) -> LossKind {
    match kind {
        StateKind::Pure => LossKind::InfidelityPure,
        StateKind::Mixed => LossKind::InfidelityMixed,
    }
}

/// Training losses averaged over one epoch.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EpochMetrics {
    pub epoch: usize,
    /// The loss that drove training (cross-entropy per sample for classification).
    pub loss: f64,
    /// Reconstruction only; `NaN` for classification.
    pub mse: f64,
    /// Reconstruction only; `NaN` for classification.
    pub infidelity: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FinalMetric {
    Atf(f64),
    Accuracy(f64),
}

impl FinalMetric {
    pub fn value(self) -> f64 {
        match self {
            FinalMetric::Atf(v) | FinalMetric::Accuracy(v) => v,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            FinalMetric::Atf(_) => "ATF",
            FinalMetric::Accuracy(_) => "ACC",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MetricsLog {
    pub task: Task,
    pub loss: LossKind,
    pub seed: u64,
    pub epochs: Vec<EpochMetrics>,
    pub final_metric: FinalMetric,
    pub test_size: usize,
    /// Wall-clock seconds; filled in by callers that have a clock.
    pub duration_secs: Option<f64>,
}

fn reconstruction_head(ds: &Dataset, mode: NormMode) -> HeadSpec {
    match ds.kind {
        StateKind::Pure => HeadSpec::pure_state(ds.n),
        StateKind::Mixed => HeadSpec::PurityRescale {
            target_purity: 1.0,
            mode,
        },
    }
}

/// Per-record purity of the ideal states, `(1 + ‖r‖²) / 2^n`.
pub fn clean_purities(ds: &Dataset) -> Vec<f64> {
    let d = hilbert_dim(ds.n) as f64;
    ds.records.iter().map(|r| (1.0 + r.clean.norm_sq()) / d).collect()
}

fn check_shape(model: &MlpModel, input: usize, output: usize) -> Result<()> {
    if model.input_dim() != input || model.output_dim() != output {
        return Err(Error::InvalidModel(format!(
            "model maps {} -> {}, data needs {} -> {}",
            model.input_dim(),
            model.output_dim(),
            input,
            output
        )));
    }
    Ok(())
}

/// Reconstructions of every noisy vector in `ds`, flat `N x (4^n - 1)`.
pub fn reconstruct_all(model: &MlpModel, ds: &Dataset) -> Result<Vec<f64>> {
    let p = bloch_len(ds.n);
    check_shape(model, p, p)?;
    let inputs: Vec<f64> = ds.records.iter().flat_map(|r| r.noisy.components().iter().copied()).collect();
    let purities = match model.head() {
        HeadSpec::PurityRescale { .. } => Some(clean_purities(ds)),
        HeadSpec::Softmax => {
            return Err(Error::LossHeadMismatch {
                loss: "atf",
                head: "softmax",
            })
        }
        _ => None,
    };
    if inputs.is_empty() {
        return Ok(Vec::new());
    }
    model.forward_batch(&inputs, purities.as_deref())
}

/// Average test fidelity under the general (Uhlmann) fidelity.
pub fn evaluate_atf(model: &MlpModel, test: &Dataset) -> Result<f64> {
    if test.is_empty() {
        return Err(Error::InvalidConfig("empty test set".into()));
    }
    let p = bloch_len(test.n);
    let outputs = reconstruct_all(model, test)?;
    let basis = pauli_basis(test.n)?;
    let mut total = 0.0;
    for (rec, out) in test.records.iter().zip(outputs.chunks_exact(p)) {
        let sigma = density_from_bloch_with(&BlochVector::new(test.n, out.to_vec())?, &basis)?;
        let rho = density_from_bloch_with(&rec.clean, &basis)?;
        total += fidelity_general(&rho, &sigma)?;
    }
    Ok(total / test.len() as f64)
}

/// Fraction of records whose predicted class matches the label.
pub fn evaluate_accuracy(model: &MlpModel, test: &ClassDataset) -> Result<f64> {
    if test.is_empty() {
        return Err(Error::InvalidConfig("empty test set".into()));
    }
    check_shape(model, test.mode.input_len(test.n), test.classes())?;
    let mut hits = 0usize;
    for rec in &test.records {
        if model.predict_class(&rec.input)? == rec.label {
            hits += 1;
        }
    }
    Ok(hits as f64 / test.len() as f64)
}

/// Flat training arrays plus the shuffled mini-batch loop shared by both tasks.
struct Trainer<'a> {
    cfg: &'a TrainConfig,
    inputs: Vec<f64>,
    d: usize,
    p: usize,
    m: usize,
    vectors: Vec<f64>,
    labels: Vec<usize>,
    purities: Option<Vec<f64>>,
    /// Infidelity form recorded alongside MSE (reconstruction only).
    infidelity: Option<LossKind>,
}

impl Trainer<'_> {
    fn run(&self, model: &mut MlpModel) -> Result<Vec<EpochMetrics>> {
        let batch = self.cfg.batch_for(self.m);
        let mut adam = crate::nn::AdamState::new(model.params().len(), self.cfg.lr)?;
        let mut order: Vec<usize> = (0..self.m).collect();
        let mut shuffle = substream(self.cfg.seed, Domain::Shuffle, 0);
        let (d, p) = (self.d, self.p);

        let mut xb = Vec::with_capacity(batch * d);
        let mut tb = Vec::with_capacity(batch * p);
        let mut lb = Vec::with_capacity(batch);
        let mut pb = Vec::with_capacity(batch);
        let mut log = Vec::with_capacity(self.cfg.epochs);
        for epoch in 1..=self.cfg.epochs {
            order.shuffle(&mut shuffle);
            let (mut loss_sum, mut mse_sum, mut inf_sum) = (0.0, 0.0, 0.0);
            for chunk in order.chunks(batch) {
                xb.clear();
                tb.clear();
                lb.clear();
                pb.clear();
                for &i in chunk {
                    xb.extend_from_slice(&self.inputs[i * d..(i + 1) * d]);
                    if self.labels.is_empty() {
                        tb.extend_from_slice(&self.vectors[i * p..(i + 1) * p]);
                    } else {
                        lb.push(self.labels[i]);
                    }
                    if let Some(ps) = &self.purities {
                        pb.push(ps[i]);
                    }
                }
                let targets = if self.labels.is_empty() {
                    Targets::Vectors(&tb)
                } else {
                    Targets::Labels(&lb)
                };
                let step = Batch {
                    inputs: &xb,
                    targets,
                    purities: self.purities.as_ref().map(|_| pb.as_slice()),
                };
                let (value, grad, out) = model.backward_with_outputs(&step, self.cfg.loss)?;
                let rows = chunk.len() as f64;
                loss_sum += match self.cfg.loss {
                    LossKind::Cce => value,
                    _ => value * rows,
                };
                if let Some(kind) = self.infidelity {
                    mse_sum += loss::loss_mse(&out, &tb, p) * rows;
                    inf_sum += loss::loss_infidelity(&out, &tb, p, kind) * rows;
                }
                adam.step(model.params_mut(), &grad)?;
            }
            let m = self.m as f64;
            let (mse, infidelity) = if self.infidelity.is_some() {
                (mse_sum / m, inf_sum / m)
            } else {
                (f64::NAN, f64::NAN)
            };
            log.push(EpochMetrics {
                epoch,
                loss: loss_sum / m,
                mse,
                infidelity,
            });
        }
        Ok(log)
    }
}

fn layer_dims(input: usize, hidden: &[usize], output: usize) -> Vec<usize> {
    let mut dims = Vec::with_capacity(hidden.len() + 2);
    dims.push(input);
    dims.extend_from_slice(hidden);
    dims.push(output);
    dims
}

/// Trains a reconstruction network on `train` and reports its ATF on `test`.
pub fn train_reconstruction(cfg: &TrainConfig, train: &Dataset, test: &Dataset) -> Result<(MlpModel, MetricsLog)> {
    if cfg.task != Task::Reconstruct {
        return Err(Error::InvalidConfig("expected a reconstruction config".into()));
    }
    if train.is_empty() {
        return Err(Error::InvalidConfig("empty training set".into()));
    }
    cfg.validate(train.len())?;
    if train.seed == test.seed {
        return Err(Error::TrainTestOverlap(train.seed));
    }
    if train.n != test.n || train.kind != test.kind {
        return Err(Error::InvalidConfig("train and test sets describe different problems".into()));
    }
    let p = bloch_len(train.n);
    let head = reconstruction_head(train, cfg.norm_mode);
    head.check_loss(cfg.loss)?;
    let mut model = init_model(&layer_dims(p, &cfg.hidden, p), head, &mut substream(cfg.seed, Domain::Init, 0))?;

    let trainer = Trainer {
        cfg,
        inputs: train.records.iter().flat_map(|r| r.noisy.components().iter().copied()).collect(),
        d: p,
        p,
        m: train.len(),
        vectors: train.records.iter().flat_map(|r| r.clean.components().iter().copied()).collect(),
        labels: Vec::new(),
        purities: matches!(head, HeadSpec::PurityRescale { .. }).then(|| clean_purities(train)),
        infidelity: Some(infidelity_for(train.kind)),
    };
    let epochs = trainer.run(&mut model)?;
    let atf = evaluate_atf(&model, test)?;
    Ok((
        model,
        MetricsLog {
            task: Task::Reconstruct,
            loss: cfg.loss,
            seed: cfg.seed,
            epochs,
            final_metric: FinalMetric::Atf(atf),
            test_size: test.len(),
            duration_secs: None,
        },
    ))
}

/// Trains a channel classifier on `train` and reports accuracy on `test`.
pub fn train_classification(
    cfg: &TrainConfig,
    train: &ClassDataset,
    test: &ClassDataset,
) -> Result<(MlpModel, MetricsLog)> {
    if cfg.task != Task::Classify {
        return Err(Error::InvalidConfig("expected a classification config".into()));
    }
    if train.is_empty() {
        return Err(Error::InvalidConfig("empty training set".into()));
    }
    cfg.validate(train.len())?;
    if train.seed == test.seed {
        return Err(Error::TrainTestOverlap(train.seed));
    }
    if train.n != test.n || train.mode != test.mode || train.channel_specs != test.channel_specs {
        return Err(Error::InvalidConfig("train and test sets describe different problems".into()));
    }
    let d = train.mode.input_len(train.n);
    let c = train.classes();
    let mut model = init_model(
        &layer_dims(d, &cfg.hidden, c),
        HeadSpec::Softmax,
        &mut substream(cfg.seed, Domain::Init, 0),
    )?;
    let trainer = Trainer {
        cfg,
        inputs: train.records.iter().flat_map(|r| r.input.iter().copied()).collect(),
        d,
        p: c,
        m: train.len(),
        vectors: Vec::new(),
        labels: train.records.iter().map(|r| r.label).collect(),
        purities: None,
        infidelity: None,
    };
    let epochs = trainer.run(&mut model)?;
    let acc = evaluate_accuracy(&model, test)?;
    Ok((
        model,
        MetricsLog {
            task: Task::Classify,
            loss: cfg.loss,
            seed: cfg.seed,
            epochs,
            final_metric: FinalMetric::Accuracy(acc),
            test_size: test.len(),
            duration_secs: None,
        },
    ))
}

/// A reconstruction problem: which channel, how many qubits and states.
#[derive(Debug, Clone, PartialEq)]
pub struct ReconstructionProblem {
    pub channel_spec: String,
    pub n: usize,
    pub kind: StateKind,
    pub train_size: usize,
    pub test_size: usize,
}

/// Builds fresh train and test sets from `seed` and trains on them.
pub fn run_reconstruction(
    problem: &ReconstructionProblem,
    cfg: &TrainConfig,
) -> Result<(MlpModel, MetricsLog)> {
    let (train, test) = reconstruction_data(problem, cfg.seed)?;
    train_reconstruction(cfg, &train, &test)
}

/// Train and test sets for `problem`, drawn from disjoint seed streams.
pub fn reconstruction_data(problem: &ReconstructionProblem, seed: u64) -> Result<(Dataset, Dataset)> {
    let p = problem;
    let train = build_reconstruction_dataset(
        &p.channel_spec,
        p.n,
        p.train_size,
        p.kind,
        derive_seed(seed, purpose::TRAIN_DATA, 0),
    )?;
    let test = build_reconstruction_dataset(
        &p.channel_spec,
        p.n,
        p.test_size,
        p.kind,
        derive_seed(seed, purpose::TEST_DATA, 0),
    )?;
    Ok((train, test))
}

/// A classification problem: candidate channels and input mode.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassificationProblem {
    pub channel_specs: Vec<String>,
    pub n: usize,
    pub mode: InputMode,
    pub train_size: usize,
    pub test_size: usize,
}

pub fn classification_data(problem: &ClassificationProblem, seed: u64) -> Result<(ClassDataset, ClassDataset)> {
    let specs: Vec<&str> = problem.channel_specs.iter().map(String::as_str).collect();
    let train = build_classification_dataset(
        &specs,
        problem.n,
        problem.train_size,
        problem.mode,
        derive_seed(seed, purpose::TRAIN_DATA, 0),
    )?;
    let test = build_classification_dataset(
        &specs,
        problem.n,
        problem.test_size,
        problem.mode,
        derive_seed(seed, purpose::TEST_DATA, 0),
    )?;
    Ok((train, test))
}

pub fn run_classification(
    problem: &ClassificationProblem,
    cfg: &TrainConfig,
) -> Result<(MlpModel, MetricsLog)> {
    let (train, test) = classification_data(problem, cfg.seed)?;
    train_classification(cfg, &train, &test)
}

/// Seed of repeat `k` for a run seeded with `seed`.
pub fn repeat_seed(seed: u64, k: usize) -> u64 {
    derive_seed(seed, purpose::REPEAT, k as u32)
}

/// Seed of repeat `k` at the `size_index`-th size of a sweep.
pub fn sweep_seed(seed: u64, size_index: usize, k: usize) -> u64 {
    derive_seed(seed, purpose::SWEEP + size_index as u32, k as u32)
}

/// One row of a dataset-size sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub size: usize,
    pub mean: f64,
    /// Sample standard deviation (`n - 1` denominator; 0 for a single repeat).
    pub std: f64,
    pub best: f64,
    pub seeds: Vec<u64>,
    pub atfs: Vec<f64>,
}

impl SweepRow {
    pub fn from_runs(size: usize, seeds: Vec<u64>, atfs: Vec<f64>) -> Self {
        let k = atfs.len() as f64;
        let mean = atfs.iter().sum::<f64>() / k;
        let std = if atfs.len() > 1 {
            (atfs.iter().map(|a| (a - mean) * (a - mean)).sum::<f64>() / (k - 1.0)).sqrt()
        } else {
            0.0
        };
        let best = atfs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        Self {
            size,
            mean,
            std,
            best,
            seeds,
            atfs,
        }
    }
}

/// One sweep cell: fresh data and a fresh initialisation from `seed`.
pub fn sweep_cell(problem: &ReconstructionProblem, cfg: &TrainConfig, size: usize, seed: u64) -> Result<f64> {
    let problem = ReconstructionProblem {
        train_size: size,
        ..problem.clone()
    };
    let cfg = TrainConfig { seed, ..cfg.clone() };
    Ok(run_reconstruction(&problem, &cfg)?.1.final_metric.value())
}

/// Mean, spread and best ATF over `cfg.repeats` runs per training-set size.
pub fn sweep_dataset_size(
    problem: &ReconstructionProblem,
    cfg: &TrainConfig,
    sizes: &[usize],
) -> Result<Vec<SweepRow>> {
    if cfg.repeats == 0 {
        return Err(Error::InvalidConfig("repeats must be at least 1".into()));
    }
    sizes
        .iter()
        .enumerate()
        .map(|(j, &size)| {
            let seeds: Vec<u64> = (0..cfg.repeats).map(|k| sweep_seed(cfg.seed, j, k)).collect();
            let atfs = seeds
                .iter()
                .map(|&s| sweep_cell(problem, cfg, size, s))
                .collect::<Result<Vec<_>>>()?;
            Ok(SweepRow::from_runs(size, seeds, atfs))
        })
        .collect()
}

/// Haar-random pure states and their images under a single-qubit channel.
pub fn bloch_cloud<R: Rng + ?Sized>(
    channel_spec: &str,
    samples: usize,
    rng: &mut R,
) -> Result<Vec<([f64; 3], [f64; 3])>> {
    let channel = parse_channel_spec(channel_spec)?;
    if channel.qubits() != 1 {
        return Err(Error::QubitMismatch {
            channel: channel.qubits(),
            requested: 1,
        });
    }
    let vec3 = |b: BlochVector| -> [f64; 3] {
        let c = b.components();
        [c[0], c[1], c[2]]
    };
    (0..samples)
        .map(|_| {
            let rho = haar_pure(1, rng)?;
            let noisy = apply(&channel, &rho)?;
            Ok((vec3(bloch_from_density(&rho)), vec3(bloch_from_density(&noisy))))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_cfg(task: Task, seed: u64) -> TrainConfig {
        TrainConfig {
            hidden: vec![16],
            epochs: 5,
            ..TrainConfig::defaults(task, 1, seed)
        }
    }

    #[test]
    fn defaults_follow_qubit_count() {
        let c1 = TrainConfig::defaults(Task::Reconstruct, 1, 0);
        assert_eq!((c1.epochs, c1.hidden.len()), (500, 2));
        let c3 = TrainConfig::defaults(Task::Reconstruct, 3, 0);
        assert_eq!((c3.epochs, c3.hidden.as_slice()), (1000, &[128, 128, 128][..]));
        assert_eq!(c1.batch_for(30), 30);
        assert_eq!(c1.batch_for(300), 32);
        assert_eq!(c1.lr, 1e-3);
    }

    #[test]
    fn config_validation() {
        let mut cfg = small_cfg(Task::Reconstruct, 1);
        assert!(cfg.validate(10).is_ok());
        cfg.batch_size = Some(11);
        assert!(cfg.validate(10).is_err());
        cfg.batch_size = None;
        cfg.loss = LossKind::Cce;
        assert!(cfg.validate(10).is_err());
        cfg.loss = LossKind::Mse;
        cfg.epochs = 0;
        assert!(cfg.validate(10).is_err());
    }

    #[test]
    fn overlapping_seeds_are_rejected() {
        let train = build_reconstruction_dataset("Z(0.2)", 1, 10, StateKind::Pure, 3).unwrap();
        let cfg = small_cfg(Task::Reconstruct, 1);
        assert!(matches!(
            train_reconstruction(&cfg, &train, &train),
            Err(Error::TrainTestOverlap(3))
        ));
    }

    #[test]
    fn zero_output_scores_one_half() {
        // a linear model with all-zero parameters outputs the maximally mixed state
        let test = build_reconstruction_dataset("Z(0.2)", 1, 50, StateKind::Pure, 9).unwrap();
        let model = MlpModel::from_parts(vec![3, 3], HeadSpec::Linear, vec![0.0; 12]).unwrap();
        let a = evaluate_atf(&model, &test).unwrap(); assert!((a - 0.5).abs() < 1e-12, "{a}");
    }

    #[test]
    fn training_logs_every_epoch_and_is_deterministic() {
        let problem = ReconstructionProblem {
            channel_spec: "Z(0.2)".into(),
            n: 1,
            kind: StateKind::Pure,
            train_size: 12,
            test_size: 20,
        };
        let cfg = small_cfg(Task::Reconstruct, 5);
        let (m1, log1) = run_reconstruction(&problem, &cfg).unwrap();
        let (m2, log2) = run_reconstruction(&problem, &cfg).unwrap();
        assert_eq!(log1.epochs.len(), 5);
        assert_eq!(log1, log2);
        assert_eq!(m1, m2);
        let atf = log1.final_metric.value();
        assert!((0.0..=1.0).contains(&atf));
        for e in &log1.epochs {
            // MSE = 4·infidelity for pure single-qubit outputs on the unit sphere
            assert!((e.mse - 4.0 * e.infidelity).abs() < 1e-12);
            assert_eq!(e.loss, e.mse);
        }
    }

    #[test]
    fn classification_runs() {
        let problem = ClassificationProblem {
            channel_specs: vec!["Z(0.2)".into(), "GAD(0.5,0.3)".into()],
            n: 1,
            mode: InputMode::NoisyAndIdeal,
            train_size: 20,
            test_size: 10,
        };
        let (_, log) = run_classification(&problem, &small_cfg(Task::Classify, 2)).unwrap();
        assert_eq!(log.test_size, 10);
        assert!(log.epochs.iter().all(|e| e.mse.is_nan() && e.loss > 0.0));
        assert!(matches!(log.final_metric, FinalMetric::Accuracy(_)));
    }

    #[test]
    fn sweep_records_distinct_seeds() {
        let problem = ReconstructionProblem {
            channel_spec: "Z(0.2)".into(),
            n: 1,
            kind: StateKind::Pure,
            train_size: 0,
            test_size: 10,
        };
        let cfg = TrainConfig {
            epochs: 2,
            ..small_cfg(Task::Reconstruct, 8)
        };
        let rows = sweep_dataset_size(&problem, &cfg, &[6]).unwrap();
        assert_eq!(rows.len(), 1);
        let mut seeds = rows[0].seeds.clone();
        seeds.sort_unstable();
        seeds.dedup();
        assert_eq!(seeds.len(), 5);
        assert!(rows[0].best >= rows[0].mean);
    }

    #[test]
    fn sweep_row_statistics() {
        let row = SweepRow::from_runs(10, vec![1, 2, 3], vec![0.9, 1.0, 0.95]);
        assert!((row.mean - 0.95).abs() < 1e-15);
        assert!((row.std - 0.05).abs() < 1e-12);
        assert_eq!(row.best, 1.0);
    }

    #[test]
    fn identity_cloud_is_fixed() {
        let mut rng = substream(1, Domain::Cloud, 0);
        for (clean, noisy) in bloch_cloud("I", 100, &mut rng).unwrap() {
            for k in 0..3 {
                assert!((clean[k] - noisy[k]).abs() < 1e-12);
            }
        }
        assert!(bloch_cloud("Z(0.2)*Z(0.2)", 1, &mut rng).is_err());
    }
}
