//! Dense ReLU network with a configurable output head.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)] // inherent under std
use num_traits::Float;
use rand::Rng;

use super::loss::{self, LossKind};
use crate::error::{Error, Result};
use crate::qstate::{hilbert_dim, qubits_for_bloch_len};

/// Pre-head norm below which normalising heads refuse to divide.
pub const DEGENERATE_NORM: f64 = 1e-12;

/// How a state's purity sets the output norm of a [`HeadSpec::PurityRescale`] head.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NormMode {
    /// `‖r̂‖ = √(2^n Tr[ρ²] - 1)`, the Bloch norm of a state with that purity.
    ExactNorm,
    /// `‖r̂‖ = √Tr[ρ²]`.
    PaperLiteral,
}

impl NormMode {
    pub fn as_str(self) -> &'static str {
        match self {
            NormMode::ExactNorm => "exact_norm",
            NormMode::PaperLiteral => "paper_literal",
        }
    }

    pub fn parse(text: &str) -> Option<Self> {
        match text {
            "exact_norm" | "exact" => Some(NormMode::ExactNorm),
            "paper_literal" | "paper" => Some(NormMode::PaperLiteral),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum HeadSpec {
    Linear,
    /// Rescales the output to a fixed Euclidean norm.
    UnitNorm { target_norm: f64 },
    /// Rescales the output to the norm implied by a purity. `target_purity`
    /// is the default; training and evaluation pass the per-state value.
    PurityRescale { target_purity: f64, mode: NormMode },
    Softmax,
}

impl HeadSpec {
    pub fn name(&self) -> &'static str {
        match self {
            HeadSpec::Linear => "linear",
            HeadSpec::UnitNorm { .. } => "unit_norm",
            HeadSpec::PurityRescale { .. } => "purity_rescale",
            HeadSpec::Softmax => "softmax",
        }
    }

    /// Norm-constrained head for pure states on `n` qubits (`√(2^n - 1)`).
    pub fn pure_state(n: usize) -> Self {
        HeadSpec::UnitNorm {
            target_norm: ((hilbert_dim(n) - 1) as f64).sqrt(),
        }
    }

    fn validate(&self, out_dim: usize) -> Result<()> {
        match *self {
            HeadSpec::Linear => Ok(()),
            HeadSpec::UnitNorm { target_norm } => {
                if target_norm > 0.0 && target_norm.is_finite() {
                    Ok(())
                } else {
                    Err(Error::InvalidModel(format!("target norm {target_norm} must be positive")))
                }
            }
            HeadSpec::PurityRescale { target_purity, .. } => {
                let n = qubits_for_bloch_len(out_dim).ok_or_else(|| {
                    Error::InvalidModel(format!("purity head needs a Bloch-sized output, got {out_dim}"))
                })?;
                let floor = 1.0 / hilbert_dim(n) as f64;
                if target_purity > floor && target_purity <= 1.0 + 1e-12 {
                    Ok(())
                } else {
                    Err(Error::InvalidModel(format!(
                        "target purity {target_purity} outside ({floor}, 1]"
                    )))
                }
            }
            HeadSpec::Softmax => {
                if out_dim >= 2 {
                    Ok(())
                } else {
                    Err(Error::InvalidModel("softmax head needs at least two classes".into()))
                }
            }
        }
    }

    /// Whether `loss` may drive a model with this head.
    pub fn check_loss(&self, loss: LossKind) -> Result<()> {
        let ok = match loss {
            LossKind::Mse => !matches!(self, HeadSpec::Softmax),
            LossKind::InfidelityPure | LossKind::InfidelityMixed => {
                matches!(self, HeadSpec::UnitNorm { .. } | HeadSpec::PurityRescale { .. })
            }
            LossKind::Cce => matches!(self, HeadSpec::Softmax),
        };
        if ok {
            Ok(())
        } else {
            Err(Error::LossHeadMismatch {
                loss: loss.name(),
                head: self.name(),
            })
        }
    }
}

/// Output norm for a purity-rescaled head.
pub fn purity_norm(purity: f64, n: usize, mode: NormMode) -> f64 {
    match mode {
        NormMode::ExactNorm => (hilbert_dim(n) as f64 * purity - 1.0).max(0.0).sqrt(),
        NormMode::PaperLiteral => purity.max(0.0).sqrt(),
    }
}

/// A fully connected network `d -> h1 -> ... -> p` with ReLU between layers.
///
/// All parameters live in one flat vector. Layer `k` stores its weights
/// input-major (`W[i][o]` at `i * fan_out + o`) followed by its biases.
#[derive(Debug, Clone, PartialEq)]
pub struct MlpModel {
    dims: Vec<usize>,
    head: HeadSpec,
    theta: Vec<f64>,
    offsets: Vec<usize>,
}

fn layer_offsets(dims: &[usize]) -> Vec<usize> {
    let mut offsets = Vec::with_capacity(dims.len());
    let mut acc = 0;
    for w in dims.windows(2) {
        offsets.push(acc);
        acc += w[0] * w[1] + w[1];
    }
    offsets.push(acc);
    offsets
}

/// Number of trainable parameters for the given layer widths.
pub fn parameter_count(dims: &[usize]) -> usize {
    dims.windows(2).map(|w| w[0] * w[1] + w[1]).sum()
}

fn check_dims(dims: &[usize]) -> Result<()> {
    if dims.len() < 2 {
        return Err(Error::InvalidModel("need at least input and output widths".into()));
    }
    if let Some(pos) = dims.iter().position(|&d| d == 0) {
        return Err(Error::InvalidModel(format!("layer {pos} has zero width")));
    }
    Ok(())
}

/// Glorot-uniform weights, zero biases.
pub fn init_model<R: Rng + ?Sized>(dims: &[usize], head: HeadSpec, rng: &mut R) -> Result<MlpModel> {
    check_dims(dims)?;
    head.validate(*dims.last().unwrap())?;
    let offsets = layer_offsets(dims);
    let mut theta = vec![0.0; *offsets.last().unwrap()];
    for (k, w) in dims.windows(2).enumerate() {
        let (fan_in, fan_out) = (w[0], w[1]);
        let limit = (6.0 / (fan_in + fan_out) as f64).sqrt();
        let start = offsets[k];
        for x in &mut theta[start..start + fan_in * fan_out] {
            *x = (2.0 * rng.random::<f64>() - 1.0) * limit;
        }
    }
    Ok(MlpModel {
        dims: dims.to_vec(),
        head,
        theta,
        offsets,
    })
}

/// Per-sample inputs for one gradient evaluation.
#[derive(Debug, Clone, Copy)]
pub struct Batch<'a> {
    /// Flat `B x d` inputs.
    pub inputs: &'a [f64],
    pub targets: Targets<'a>,
    /// Per-sample purities for [`HeadSpec::PurityRescale`].
    pub purities: Option<&'a [f64]>,
}

#[derive(Debug, Clone, Copy)]
pub enum Targets<'a> {
    /// Flat `B x p` regression targets.
    Vectors(&'a [f64]),
    Labels(&'a [usize]),
}

/// Activations kept for the backward pass.
struct Trace {
    /// `acts[k]` is the input of layer `k` (`acts[0]` the batch input).
    acts: Vec<Vec<f64>>,
    /// Last affine output, before the head.
    logits: Vec<f64>,
    /// Head output.
    out: Vec<f64>,
    /// Per-sample pre-head norms (normalising heads only).
    norms: Vec<f64>,
    /// Per-sample head scale factors (normalising heads only).
    scales: Vec<f64>,
}

impl MlpModel {
    /// Rebuilds a model from stored parameters.
    pub fn from_parts(dims: Vec<usize>, head: HeadSpec, theta: Vec<f64>) -> Result<Self> {
        check_dims(&dims)?;
        head.validate(*dims.last().unwrap())?;
        let offsets = layer_offsets(&dims);
        if theta.len() != *offsets.last().unwrap() {
            return Err(Error::DimensionMismatch {
                expected: *offsets.last().unwrap(),
                found: theta.len(),
            });
        }
        Ok(Self {
            dims,
            head,
            theta,
            offsets,
        })
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn head(&self) -> &HeadSpec {
        &self.head
    }

    pub fn input_dim(&self) -> usize {
        self.dims[0]
    }

    pub fn output_dim(&self) -> usize {
        *self.dims.last().unwrap()
    }

    pub fn layers(&self) -> usize {
        self.dims.len() - 1
    }

    pub fn params(&self) -> &[f64] {
        &self.theta
    }

    pub fn params_mut(&mut self) -> &mut [f64] {
        &mut self.theta
    }

    /// Weights of layer `k`, input-major `fan_in x fan_out`.
    pub fn weights(&self, k: usize) -> &[f64] {
        let start = self.offsets[k];
        &self.theta[start..start + self.dims[k] * self.dims[k + 1]]
    }

    pub fn biases(&self, k: usize) -> &[f64] {
        let start = self.offsets[k] + self.dims[k] * self.dims[k + 1];
        &self.theta[start..start + self.dims[k + 1]]
    }

    pub fn biases_mut(&mut self, k: usize) -> &mut [f64] {
        let start = self.offsets[k] + self.dims[k] * self.dims[k + 1];
        let len = self.dims[k + 1];
        &mut self.theta[start..start + len]
    }

    pub fn weights_mut(&mut self, k: usize) -> &mut [f64] {
        let start = self.offsets[k];
        let len = self.dims[k] * self.dims[k + 1];
        &mut self.theta[start..start + len]
    }

    /// Runs one input through the network using the head's default target.
    pub fn forward(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.forward_batch(x, None)
    }

    /// Runs one input with an explicit purity for a purity-rescaled head.
    pub fn forward_with_purity(&self, x: &[f64], purity: f64) -> Result<Vec<f64>> {
        self.forward_batch(x, Some(&[purity]))
    }

    /// Flat `B x d` inputs to flat `B x p` outputs.
    pub fn forward_batch(&self, inputs: &[f64], purities: Option<&[f64]>) -> Result<Vec<f64>> {
        Ok(self.trace(inputs, purities)?.out)
    }

    fn batch_rows(&self, inputs: &[f64]) -> Result<usize> {
        let d = self.input_dim();
        if inputs.is_empty() || !inputs.len().is_multiple_of(d) {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: inputs.len(),
            });
        }
        Ok(inputs.len() / d)
    }

    fn trace(&self, inputs: &[f64], purities: Option<&[f64]>) -> Result<Trace> {
        let b = self.batch_rows(inputs)?;
        let mut acts: Vec<Vec<f64>> = Vec::with_capacity(self.layers());
        acts.push(inputs.to_vec());
        let last = self.layers() - 1;
        let mut logits = Vec::new();
        for k in 0..self.layers() {
            let (fan_in, fan_out) = (self.dims[k], self.dims[k + 1]);
            let w = self.weights(k);
            let bias = self.biases(k);
            let input = &acts[k];
            let mut z = vec![0.0; b * fan_out];
            for (row, zr) in input.chunks_exact(fan_in).zip(z.chunks_exact_mut(fan_out)) {
                zr.copy_from_slice(bias);
                for (i, &xi) in row.iter().enumerate() {
                    if xi == 0.0 {
                        continue;
                    }
                    axpy(xi, &w[i * fan_out..(i + 1) * fan_out], zr);
                }
            }
            if k == last {
                logits = z;
            } else {
                for v in &mut z {
                    if *v < 0.0 {
                        *v = 0.0;
                    }
                }
                acts.push(z);
            }
        }
        let (out, norms, scales) = self.apply_head(&logits, b, purities)?;
        Ok(Trace {
            acts,
            logits,
            out,
            norms,
            scales,
        })
    }

    fn head_scales(&self, b: usize, purities: Option<&[f64]>) -> Result<Vec<f64>> {
        match self.head {
            HeadSpec::UnitNorm { target_norm } => Ok(vec![target_norm; b]),
            HeadSpec::PurityRescale { target_purity, mode } => {
                let n = qubits_for_bloch_len(self.output_dim()).expect("validated at construction");
                match purities {
                    Some(ps) if ps.len() != b => Err(Error::DimensionMismatch {
                        expected: b,
                        found: ps.len(),
                    }),
                    Some(ps) => Ok(ps.iter().map(|&p| purity_norm(p, n, mode)).collect()),
                    None => Ok(vec![purity_norm(target_purity, n, mode); b]),
                }
            }
            _ => Ok(Vec::new()),
        }
    }

    fn apply_head(
        &self,
        logits: &[f64],
        b: usize,
        purities: Option<&[f64]>,
    ) -> Result<(Vec<f64>, Vec<f64>, Vec<f64>)> {
        let p = self.output_dim();
        match self.head {
            HeadSpec::Linear => Ok((logits.to_vec(), Vec::new(), Vec::new())),
            HeadSpec::Softmax => {
                let mut out = logits.to_vec();
                for row in out.chunks_exact_mut(p) {
                    let max = row.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                    let mut sum = 0.0;
                    for v in row.iter_mut() {
                        *v = (*v - max).exp();
                        sum += *v;
                    }
                    for v in row.iter_mut() {
                        *v /= sum;
                    }
                }
                Ok((out, Vec::new(), Vec::new()))
            }
            HeadSpec::UnitNorm { .. } | HeadSpec::PurityRescale { .. } => {
                let scales = self.head_scales(b, purities)?;
                let mut out = logits.to_vec();
                let mut norms = Vec::with_capacity(b);
                for (row, &c) in out.chunks_exact_mut(p).zip(&scales) {
                    let norm = row.iter().map(|v| v * v).sum::<f64>().sqrt();
                    if norm < DEGENERATE_NORM {
                        return Err(Error::DegenerateOutput(norm));
                    }
                    for v in row.iter_mut() {
                        *v *= c / norm;
                    }
                    norms.push(norm);
                }
                Ok((out, norms, scales))
            }
        }
    }

    /// Loss value and exact gradient over `theta` for one batch.
    ///
    /// MSE and infidelities are batch means; for cross-entropy the returned
    /// value is the batch sum and the gradient is that of the batch mean.
    pub fn backward(&self, batch: &Batch<'_>, loss: LossKind) -> Result<(f64, Vec<f64>)> {
        let (value, grad, _) = self.backward_with_outputs(batch, loss)?;
        Ok((value, grad))
    }

    /// [`Self::backward`] that also hands back the flat head outputs.
    pub fn backward_with_outputs(&self, batch: &Batch<'_>, loss: LossKind) -> Result<(f64, Vec<f64>, Vec<f64>)> {
        self.head.check_loss(loss)?;
        let trace = self.trace(batch.inputs, batch.purities)?;
        let b = trace.acts[0].len() / self.input_dim();
        let p = self.output_dim();

        let mut g_out = vec![0.0; b * p];
        let value = match (loss, batch.targets) {
            (LossKind::Mse, Targets::Vectors(t)) => {
                check_len(t.len(), b * p)?;
                loss::grad_mse(&trace.out, t, p, &mut g_out);
                loss::loss_mse(&trace.out, t, p)
            }
            (LossKind::InfidelityPure | LossKind::InfidelityMixed, Targets::Vectors(t)) => {
                check_len(t.len(), b * p)?;
                loss::grad_infidelity(&trace.out, t, p, loss, &mut g_out);
                loss::loss_infidelity(&trace.out, t, p, loss)
            }
            (LossKind::Cce, Targets::Labels(labels)) => {
                check_len(labels.len(), b)?;
                if let Some(&bad) = labels.iter().find(|&&y| y >= p) {
                    return Err(Error::InvalidConfig(format!("label {bad} out of range for {p} classes")));
                }
                loss::grad_cce(&trace.out, labels, p, &mut g_out);
                loss::loss_cce(&trace.out, labels, p)
            }
            _ => {
                return Err(Error::InvalidConfig(format!(
                    "targets do not match loss {}",
                    loss.name()
                )))
            }
        };

        let mut delta = self.head_vjp(&trace, &g_out, p);
        let mut grad = vec![0.0; self.theta.len()];
        for k in (0..self.layers()).rev() {
            let (fan_in, fan_out) = (self.dims[k], self.dims[k + 1]);
            let start = self.offsets[k];
            let (gw, gb) = grad[start..start + fan_in * fan_out + fan_out].split_at_mut(fan_in * fan_out);
            let input = &trace.acts[k];
            for (row, dz) in input.chunks_exact(fan_in).zip(delta.chunks_exact(fan_out)) {
                for (gbo, d) in gb.iter_mut().zip(dz) {
                    *gbo += d;
                }
                for (i, &a) in row.iter().enumerate() {
                    if a == 0.0 {
                        continue;
                    }
                    axpy(a, dz, &mut gw[i * fan_out..(i + 1) * fan_out]);
                }
            }
            if k == 0 {
                break;
            }
            // propagate through W and the ReLU that produced `input`
            let w = self.weights(k);
            let mut prev = vec![0.0; b * fan_in];
            for ((row, dz), dp) in input
                .chunks_exact(fan_in)
                .zip(delta.chunks_exact(fan_out))
                .zip(prev.chunks_exact_mut(fan_in))
            {
                for (i, &a) in row.iter().enumerate() {
                    if a > 0.0 {
                        dp[i] = dot4(&w[i * fan_out..(i + 1) * fan_out], dz);
                    }
                }
            }
            delta = prev;
        }
        Ok((value, grad, trace.out))
    }

    fn head_vjp(&self, trace: &Trace, g_out: &[f64], p: usize) -> Vec<f64> {
        match self.head {
            HeadSpec::Linear => g_out.to_vec(),
            HeadSpec::Softmax => {
                let mut g = vec![0.0; g_out.len()];
                for ((o, go), gi) in trace
                    .out
                    .chunks_exact(p)
                    .zip(g_out.chunks_exact(p))
                    .zip(g.chunks_exact_mut(p))
                {
                    let og: f64 = o.iter().zip(go).map(|(a, b)| a * b).sum();
                    for ((x, &oj), &gj) in gi.iter_mut().zip(o).zip(go) {
                        *x = oj * (gj - og);
                    }
                }
                g
            }
            HeadSpec::UnitNorm { .. } | HeadSpec::PurityRescale { .. } => {
                // d/dy of c y/‖y‖ is c (I/‖y‖ - y yᵀ/‖y‖³)
                let mut g = vec![0.0; g_out.len()];
                for (((y, go), gi), (&norm, &c)) in trace
                    .logits
                    .chunks_exact(p)
                    .zip(g_out.chunks_exact(p))
                    .zip(g.chunks_exact_mut(p))
                    .zip(trace.norms.iter().zip(&trace.scales))
                {
                    let yg: f64 = y.iter().zip(go).map(|(a, b)| a * b).sum();
                    let n3 = norm * norm * norm;
                    for ((x, &yj), &gj) in gi.iter_mut().zip(y).zip(go) {
                        *x = c * (gj / norm - yj * yg / n3);
                    }
                }
                g
            }
        }
    }

    /// Index of the most probable class; ties go to the lowest index.
    pub fn predict_class(&self, x: &[f64]) -> Result<usize> {
        if !matches!(self.head, HeadSpec::Softmax) {
            return Err(Error::LossHeadMismatch {
                loss: "argmax",
                head: self.head.name(),
            });
        }
        Ok(argmax(&self.forward(x)?))
    }
}

fn check_len(found: usize, expected: usize) -> Result<()> {
    if found == expected {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, found })
    }
}

/// First index of the maximum.
pub fn argmax(v: &[f64]) -> usize {
    let mut best = 0;
    for (i, &x) in v.iter().enumerate().skip(1) {
        if x > v[best] {
            best = i;
        }
    }
    best
}

#[inline]
fn axpy(a: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += a * xi;
    }
}

/// Dot product with four independent accumulators (vectorises without
/// reassociation).
#[inline]
fn dot4(a: &[f64], b: &[f64]) -> f64 {
    let mut acc = [0.0; 4];
    let ca = a.chunks_exact(4);
    let cb = b.chunks_exact(4);
    let tail: f64 = ca.remainder().iter().zip(cb.remainder()).map(|(x, y)| x * y).sum();
    for (x, y) in ca.zip(cb) {
        acc[0] += x[0] * y[0];
        acc[1] += x[1] * y[1];
        acc[2] += x[2] * y[2];
        acc[3] += x[3] * y[3];
    }
    (acc[0] + acc[1]) + (acc[2] + acc[3]) + tail
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling::{substream, Domain};

    fn rng() -> rand_chacha::ChaCha20Rng {
        substream(42, Domain::Init, 0)
    }

    #[test]
    fn parameter_count_matches_layout() {
        // 3·64+64 + 64·64+64 + 64·3+3
        assert_eq!(parameter_count(&[3, 64, 64, 3]), 256 + 4160 + 195);
        assert_eq!(parameter_count(&[3, 64, 64, 3]), 4611);
        let m = init_model(&[3, 64, 64, 3], HeadSpec::Linear, &mut rng()).unwrap();
        assert_eq!(m.params().len(), 4611);
    }

    #[test]
    fn init_is_deterministic_with_zero_biases() {
        let a = init_model(&[3, 8, 8, 3], HeadSpec::pure_state(1), &mut rng()).unwrap();
        let b = init_model(&[3, 8, 8, 3], HeadSpec::pure_state(1), &mut rng()).unwrap();
        assert_eq!(a, b);
        for k in 0..a.layers() {
            assert!(a.biases(k).iter().all(|&x| x == 0.0));
            let limit = (6.0 / (a.dims()[k] + a.dims()[k + 1]) as f64).sqrt();
            assert!(a.weights(k).iter().all(|w| w.abs() <= limit));
        }
    }

    #[test]
    fn init_rejects_bad_dims() {
        assert!(init_model(&[3, 0, 3], HeadSpec::Linear, &mut rng()).is_err());
        assert!(init_model(&[3], HeadSpec::Linear, &mut rng()).is_err());
        assert!(init_model(&[3, 4, 1], HeadSpec::Softmax, &mut rng()).is_err());
    }

    #[test]
    fn bias_only_network_with_unit_head() {
        let mut m = init_model(&[3, 4, 3], HeadSpec::UnitNorm { target_norm: 1.0 }, &mut rng()).unwrap();
        m.params_mut().iter_mut().for_each(|x| *x = 0.0);
        assert!(matches!(m.forward(&[0.1, 0.2, 0.3]), Err(Error::DegenerateOutput(_))));
        m.biases_mut(1).copy_from_slice(&[0.0, 0.0, 1.0]);
        assert_eq!(m.forward(&[0.1, 0.2, 0.3]).unwrap(), vec![0.0, 0.0, 1.0]);
    }

    #[test]
    fn norm_head_hits_target() {
        let m = init_model(&[15, 16, 15], HeadSpec::pure_state(2), &mut rng()).unwrap();
        let mut r = rng();
        for _ in 0..50 {
            let x: Vec<f64> = (0..15).map(|_| r.random::<f64>() - 0.5).collect();
            let y = m.forward(&x).unwrap();
            let norm = y.iter().map(|v| v * v).sum::<f64>().sqrt();
            assert!((norm - 3f64.sqrt()).abs() < 1e-12);
        }
    }

    #[test]
    fn softmax_is_a_distribution() {
        let m = init_model(&[6, 8, 3], HeadSpec::Softmax, &mut rng()).unwrap();
        let y = m.forward(&[1.0, -2.0, 3.0, 0.5, 0.0, 9.0]).unwrap();
        assert!((y.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        assert!(y.iter().all(|&v| v >= 0.0));
    }

    #[test]
    fn purity_head_norms() {
        let head = HeadSpec::PurityRescale {
            target_purity: 0.68,
            mode: NormMode::ExactNorm,
        };
        let m = init_model(&[3, 8, 3], head, &mut rng()).unwrap();
        let y = m.forward(&[0.3, 0.1, -0.2]).unwrap();
        let norm = y.iter().map(|v| v * v).sum::<f64>().sqrt();
        assert!((norm - 0.6).abs() < 1e-12);
        let y = m.forward_with_purity(&[0.3, 0.1, -0.2], 1.0).unwrap();
        let norm = y.iter().map(|v| v * v).sum::<f64>().sqrt();
        assert!((norm - 1.0).abs() < 1e-12);
        assert!((purity_norm(0.68, 1, NormMode::PaperLiteral) - 0.68f64.sqrt()).abs() < 1e-15);
        let bad = HeadSpec::PurityRescale {
            target_purity: 0.5,
            mode: NormMode::ExactNorm,
        };
        assert!(init_model(&[3, 8, 3], bad, &mut rng()).is_err());
    }

    #[test]
    fn argmax_breaks_ties_low() {
        assert_eq!(argmax(&[0.1, 0.9]), 1);
        assert_eq!(argmax(&[0.5, 0.5]), 0);
        assert_eq!(argmax(&[0.0, 0.0, 1.0]), 2);
    }

    #[test]
    fn loss_head_compatibility() {
        assert!(HeadSpec::Softmax.check_loss(LossKind::Mse).is_err());
        assert!(HeadSpec::Linear.check_loss(LossKind::InfidelityPure).is_err());
        assert!(HeadSpec::pure_state(1).check_loss(LossKind::Cce).is_err());
        assert!(HeadSpec::Softmax.check_loss(LossKind::Cce).is_ok());
    }

    #[test]
    fn zero_gradient_at_exact_fit() {
        let mut m = init_model(&[3, 4, 3], HeadSpec::Linear, &mut rng()).unwrap();
        m.params_mut().iter_mut().for_each(|x| *x = 0.0);
        m.biases_mut(1).copy_from_slice(&[0.1, 0.2, 0.3]);
        let batch = Batch {
            inputs: &[1.0, 2.0, 3.0, -1.0, 0.0, 1.0],
            targets: Targets::Vectors(&[0.1, 0.2, 0.3, 0.1, 0.2, 0.3]),
            purities: None,
        };
        let (value, grad) = m.backward(&batch, LossKind::Mse).unwrap();
        assert_eq!(value, 0.0);
        assert!(grad.iter().all(|&g| g == 0.0));
    }

    #[test]
    fn dot4_matches_naive() {
        let a: Vec<f64> = (0..11).map(|i| i as f64 * 0.5).collect();
        let b: Vec<f64> = (0..11).map(|i| 1.0 - i as f64).collect();
        let naive: f64 = a.iter().zip(&b).map(|(x, y)| x * y).sum();
        assert!((dot4(&a, &b) - naive).abs() < 1e-12);
    }
}
