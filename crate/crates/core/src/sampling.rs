//! Random states and the datasets built from them.
//!
//! All randomness comes from ChaCha20 substreams keyed by `(seed, domain)`
//! with the record index as stream id, so record `i` of a dataset does not
//! depend on how many records precede it or on generation order.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

#[allow(unused_imports)] // inherent under std
use num_traits::Float;
use num_complex::Complex64;
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::StandardNormal;

use crate::channels::{apply, parse_channel_spec, KrausChannel};
use crate::error::{Error, Result};
use crate::linalg::ComplexMatrix;
use crate::qstate::{
    bloch_from_density_with, bloch_len, check_qubits, density_from_bloch_with, hilbert_dim,
    pauli_basis, pure_norm_sq, BlochVector, DensityMatrix,
};

/// Name of the generator recorded in dataset metadata.
pub const GENERATOR: &str = "chacha20-substream-v1";

/// Tolerance for the noisy = N(clean) consistency check.
pub const CONSISTENCY_TOL: f64 = 1e-10;

/// Independent random streams used by the library.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u64)]
pub enum Domain {
    Reconstruction = 1,
    Classification = 2,
    Init = 3,
    Shuffle = 4,
    Cloud = 5,
    Derive = 6,
}

/// ChaCha20 keyed by `(seed, domain)`, positioned on stream `index`.
pub fn substream(seed: u64, domain: Domain, index: u64) -> ChaCha20Rng {
    let mut key = [0u8; 32];
    key[..8].copy_from_slice(&seed.to_le_bytes());
    key[8..16].copy_from_slice(&(domain as u64).to_le_bytes());
    let mut rng = ChaCha20Rng::from_seed(key);
    rng.set_stream(index);
    rng
}

/// Child seed for a named purpose (e.g. test data, a sweep repeat).
pub fn derive_seed(seed: u64, purpose: u32, index: u32) -> u64 {
    substream(seed, Domain::Derive, ((purpose as u64) << 32) | index as u64).next_u64()
}

fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im)
}

/// Haar-random state vector: i.i.d. complex Gaussians, normalised.
pub fn haar_vector<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<Vec<Complex64>> {
    check_qubits(n)?;
    let mut v: Vec<Complex64> = (0..hilbert_dim(n)).map(|_| complex_gaussian(rng)).collect();
    let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    for z in &mut v {
        *z /= norm;
    }
    Ok(v)
}

/// `|ψ><ψ|` for a Haar-random `|ψ>`.
pub fn haar_pure<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<DensityMatrix> {
    DensityMatrix::pure(&haar_vector(n, rng)?)
}

/// Hilbert-Schmidt random mixed state `GG† / Tr[GG†]` with square Ginibre `G`.
pub fn ginibre_mixed<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<DensityMatrix> {
    check_qubits(n)?;
    let d = hilbert_dim(n);
    let g = ComplexMatrix::new(d, d, (0..d * d).map(|_| complex_gaussian(rng)).collect())?;
    let mut w = g.matmul(&g.adjoint());
    w.symmetrize();
    let tr = w.trace().re;
    DensityMatrix::from_matrix_unchecked(n, w.scale_real(1.0 / tr))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StateKind {
    Pure,
    Mixed,
}

impl StateKind {
    pub fn as_str(self) -> &'static str {
        match self {
            StateKind::Pure => "pure",
            StateKind::Mixed => "mixed",
        }
    }

    pub fn parse(text: &str) -> Option<Self> {
        match text {
            "pure" => Some(StateKind::Pure),
            "mixed" => Some(StateKind::Mixed),
            _ => None,
        }
    }

    pub fn sample<R: Rng + ?Sized>(self, n: usize, rng: &mut R) -> Result<DensityMatrix> {
        match self {
            StateKind::Pure => haar_pure(n, rng),
            StateKind::Mixed => ginibre_mixed(n, rng),
        }
    }
}

/// One (noisy, clean) pair.
#[derive(Debug, Clone, PartialEq)]
pub struct Record {
    pub noisy: BlochVector,
    pub clean: BlochVector,
}

/// Pairs of noisy and noiseless Bloch vectors for one channel.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub n: usize,
    pub kind: StateKind,
    pub channel_spec: String,
    pub seed: u64,
    pub records: Vec<Record>,
}

impl Dataset {
    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    /// Re-applies the channel to every clean vector and checks the stored
    /// noisy vector, plus the pure-norm constraint for pure datasets.
    pub fn verify(&self) -> Result<()> {
        let channel = channel_for(&self.channel_spec, self.n)?;
        let basis = pauli_basis(self.n)?;
        for (index, rec) in self.records.iter().enumerate() {
            let fail = |message: String| Error::DatasetInvariant { index, message };
            if rec.clean.qubits() != self.n || rec.noisy.qubits() != self.n {
                return Err(fail("qubit count differs from header".into()));
            }
            if self.kind == StateKind::Pure
                && (rec.clean.norm_sq() - pure_norm_sq(self.n)).abs() > 1e-8
            {
                return Err(fail(format!("clean vector not pure (|r|² = {})", rec.clean.norm_sq())));
            }
            let rho = density_from_bloch_with(&rec.clean, &basis)?;
            let expect = bloch_from_density_with(&apply(&channel, &rho)?, &basis);
            let dev = max_abs_dev(expect.components(), rec.noisy.components());
            if dev > CONSISTENCY_TOL {
                return Err(fail(format!("noisy vector deviates from channel image by {dev:e}")));
            }
        }
        Ok(())
    }
}

fn max_abs_dev(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

fn channel_for(spec: &str, n: usize) -> Result<KrausChannel> {
    check_qubits(n)?;
    let channel = parse_channel_spec(spec)?;
    if channel.qubits() != n {
        return Err(Error::QubitMismatch {
            channel: channel.qubits(),
            requested: n,
        });
    }
    Ok(channel)
}

/// `m` i.i.d. states of `kind`, each passed through `channel_spec`.
pub fn build_reconstruction_dataset(
    channel_spec: &str,
    n: usize,
    m: usize,
    kind: StateKind,
    seed: u64,
) -> Result<Dataset> {
    if m == 0 {
        return Err(Error::InvalidConfig("dataset size must be at least 1".into()));
    }
    let channel = channel_for(channel_spec, n)?;
    let basis = pauli_basis(n)?;
    let records = (0..m)
        .map(|i| {
            let mut rng = substream(seed, Domain::Reconstruction, i as u64);
            let rho = kind.sample(n, &mut rng)?;
            let noisy = bloch_from_density_with(&apply(&channel, &rho)?, &basis);
            let clean = bloch_from_density_with(&rho, &basis);
            Ok(Record { noisy, clean })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Dataset {
        n,
        kind,
        channel_spec: channel.label().into(),
        seed,
        records,
    })
}

/// Which Bloch vectors a classifier sees.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InputMode {
    /// `[noisy ‖ clean]`
    NoisyAndIdeal,
    /// noisy only
    NoisyOnly,
}

impl InputMode {
    pub fn as_str(self) -> &'static str {
        match self {
            InputMode::NoisyAndIdeal => "IN",
            InputMode::NoisyOnly => "N",
        }
    }

    pub fn parse(text: &str) -> Option<Self> {
        match text {
            "IN" => Some(InputMode::NoisyAndIdeal),
            "N" => Some(InputMode::NoisyOnly),
            _ => None,
        }
    }

    pub fn input_len(self, n: usize) -> usize {
        match self {
            InputMode::NoisyAndIdeal => 2 * bloch_len(n),
            InputMode::NoisyOnly => bloch_len(n),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClassRecord {
    pub input: Vec<f64>,
    pub label: usize,
}

/// Labelled inputs for channel classification.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassDataset {
    pub n: usize,
    pub mode: InputMode,
    pub channel_specs: Vec<String>,
    pub seed: u64,
    pub records: Vec<ClassRecord>,
}

impl ClassDataset {
    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn classes(&self) -> usize {
        self.channel_specs.len()
    }

    pub fn class_counts(&self) -> Vec<usize> {
        let mut counts = alloc::vec![0; self.classes()];
        for r in &self.records {
            if let Some(c) = counts.get_mut(r.label) {
                *c += 1;
            }
        }
        counts
    }

    /// Checks input lengths, label range and balance; in `IN` mode also
    /// re-applies each record's channel to its clean half.
    pub fn verify(&self) -> Result<()> {
        let channels = self
            .channel_specs
            .iter()
            .map(|s| channel_for(s, self.n))
            .collect::<Result<Vec<_>>>()?;
        let basis = pauli_basis(self.n)?;
        let len = self.mode.input_len(self.n);
        let b = bloch_len(self.n);
        for (index, rec) in self.records.iter().enumerate() {
            let fail = |message: String| Error::DatasetInvariant { index, message };
            if rec.input.len() != len {
                return Err(fail(format!("input length {} != {len}", rec.input.len())));
            }
            if rec.label >= channels.len() {
                return Err(fail(format!("label {} out of range", rec.label)));
            }
            if self.mode == InputMode::NoisyAndIdeal {
                let clean = BlochVector::new(self.n, rec.input[b..].to_vec())?;
                let rho = density_from_bloch_with(&clean, &basis)?;
                let expect = bloch_from_density_with(&apply(&channels[rec.label], &rho)?, &basis);
                let dev = max_abs_dev(expect.components(), &rec.input[..b]);
                if dev > CONSISTENCY_TOL {
                    return Err(fail(format!("noisy half deviates from channel image by {dev:e}")));
                }
            }
        }
        let counts = self.class_counts();
        let (lo, hi) = (
            counts.iter().min().copied().unwrap_or(0),
            counts.iter().max().copied().unwrap_or(0),
        );
        if hi - lo > 1 {
            return Err(Error::DatasetInvariant {
                index: self.records.len(),
                message: format!("unbalanced classes {counts:?}"),
            });
        }
        Ok(())
    }
}

/// Record `i` gets label `i mod C` and a fresh Haar state pushed through
/// channel `C[label]`.
pub fn build_classification_dataset(
    channel_specs: &[&str],
    n: usize,
    m: usize,
    mode: InputMode,
    seed: u64,
) -> Result<ClassDataset> {
    if channel_specs.len() < 2 {
        return Err(Error::InvalidConfig("classification needs at least two channels".into()));
    }
    if m == 0 {
        return Err(Error::InvalidConfig("dataset size must be at least 1".into()));
    }
    let channels = channel_specs
        .iter()
        .map(|s| channel_for(s, n))
        .collect::<Result<Vec<_>>>()?;
    let basis = pauli_basis(n)?;
    let records = (0..m)
        .map(|i| {
            let label = i % channels.len();
            let mut rng = substream(seed, Domain::Classification, i as u64);
            let rho = haar_pure(n, &mut rng)?;
            let noisy = bloch_from_density_with(&apply(&channels[label], &rho)?, &basis);
            let mut input = noisy.into_components();
            if mode == InputMode::NoisyAndIdeal {
                input.extend_from_slice(bloch_from_density_with(&rho, &basis).components());
            }
            Ok(ClassRecord { input, label })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ClassDataset {
        n,
        mode,
        channel_specs: channels.iter().map(|c| c.label().into()).collect(),
        seed,
        records,
    })
}
