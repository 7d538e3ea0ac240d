//! Batch losses and their gradients with respect to the network outputs.
//!
//! Predictions and targets are flat row-major `B x p` slices.

#[allow(unused_imports)] // inherent under std
use num_traits::Float;

use crate::qstate::qubits_for_bloch_len;

/// Probability floor used inside the cross-entropy logarithm.
pub const CCE_CLIP: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LossKind {
    /// `(1/B) Σ ‖r - r̂‖²`
    Mse,
    /// `(1/B) Σ 1 - (1 + r·r̂) / 2^n`
    InfidelityPure,
    /// `(1/B) Σ 1 - |1 + r·r̂| / √((1 + ‖r‖²)(1 + ‖r̂‖²))`
    InfidelityMixed,
    /// `-Σ_i Σ_j y_ij ln p_ij`
    Cce,
}

impl LossKind {
    pub fn name(self) -> &'static str {
        match self {
            LossKind::Mse => "mse",
            LossKind::InfidelityPure => "infidelity-pure",
            LossKind::InfidelityMixed => "infidelity-mixed",
            LossKind::Cce => "cce",
        }
    }

    pub fn is_infidelity(self) -> bool {
        matches!(self, LossKind::InfidelityPure | LossKind::InfidelityMixed)
    }
}

fn rows(len: usize, p: usize) -> usize {
    assert!(p > 0 && len.is_multiple_of(p), "flat batch length {len} not a multiple of {p}");
    len / p
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn hilbert_dim_for(p: usize) -> f64 {
    let n = qubits_for_bloch_len(p).expect("infidelity needs a Bloch-vector sized output");
    (1usize << n) as f64
}

/// Mean squared Euclidean distance per row.
pub fn loss_mse(pred: &[f64], target: &[f64], p: usize) -> f64 {
    assert_eq!(pred.len(), target.len());
    let b = rows(pred.len(), p);
    let total: f64 = pred.iter().zip(target).map(|(x, y)| (x - y) * (x - y)).sum();
    total / b as f64
}

/// Gradient of [`loss_mse`] with respect to `pred`.
pub fn grad_mse(pred: &[f64], target: &[f64], p: usize, out: &mut [f64]) {
    let b = rows(pred.len(), p) as f64;
    for ((g, x), y) in out.iter_mut().zip(pred).zip(target) {
        *g = 2.0 * (x - y) / b;
    }
}

fn mixed_fidelity(r: &[f64], s: &[f64]) -> f64 {
    let rr = 1.0 + dot(r, r);
    let ss = 1.0 + dot(s, s);
    (1.0 + dot(r, s)).abs() / (rr * ss).sqrt()
}

/// Mean infidelity in Bloch form; `target` holds the ideal vectors `r`,
/// `pred` the reconstructions `r̂`.
pub fn loss_infidelity(pred: &[f64], target: &[f64], p: usize, kind: LossKind) -> f64 {
    assert_eq!(pred.len(), target.len());
    let b = rows(pred.len(), p);
    let total: f64 = match kind {
        LossKind::InfidelityPure => {
            let d = hilbert_dim_for(p);
            pred.chunks_exact(p)
                .zip(target.chunks_exact(p))
                .map(|(s, r)| 1.0 - (1.0 + dot(r, s)) / d)
                .sum()
        }
        LossKind::InfidelityMixed => pred
            .chunks_exact(p)
            .zip(target.chunks_exact(p))
            .map(|(s, r)| 1.0 - mixed_fidelity(r, s))
            .sum(),
        other => panic!("{} is not an infidelity loss", other.name()),
    };
    total / b as f64
}

/// Gradient of [`loss_infidelity`] with respect to `pred`.
pub fn grad_infidelity(pred: &[f64], target: &[f64], p: usize, kind: LossKind, out: &mut [f64]) {
    let b = rows(pred.len(), p) as f64;
    let rows_iter = pred
        .chunks_exact(p)
        .zip(target.chunks_exact(p))
        .zip(out.chunks_exact_mut(p));
    match kind {
        LossKind::InfidelityPure => {
            let d = hilbert_dim_for(p);
            for ((_, r), g) in rows_iter {
                for (gi, ri) in g.iter_mut().zip(r) {
                    *gi = -ri / (d * b);
                }
            }
        }
        LossKind::InfidelityMixed => {
            for ((s, r), g) in rows_iter {
                // F = |u| / √(A S), u = 1 + r·s, A = 1 + ‖r‖², S = 1 + ‖s‖²
                let u = 1.0 + dot(r, s);
                let a = 1.0 + dot(r, r);
                let ss = 1.0 + dot(s, s);
                let root = (a * ss).sqrt();
                let sign = if u >= 0.0 { 1.0 } else { -1.0 };
                let f = u.abs() / root;
                for ((gi, ri), si) in g.iter_mut().zip(r).zip(s) {
                    let df = sign * ri / root - f * si / ss;
                    *gi = -df / b;
                }
            }
        }
        other => panic!("{} is not an infidelity loss", other.name()),
    }
}

/// Categorical cross-entropy summed over the batch.
pub fn loss_cce(probs: &[f64], labels: &[usize], classes: usize) -> f64 {
    assert_eq!(rows(probs.len(), classes), labels.len());
    probs
        .chunks_exact(classes)
        .zip(labels)
        .map(|(row, &y)| -row[y].clamp(CCE_CLIP, 1.0).ln())
        .sum()
}

/// Gradient of `loss_cce / B` (the batch mean) with respect to `probs`.
pub fn grad_cce(probs: &[f64], labels: &[usize], classes: usize, out: &mut [f64]) {
    let b = labels.len() as f64;
    out.iter_mut().for_each(|g| *g = 0.0);
    for ((row, g), &y) in probs.chunks_exact(classes).zip(out.chunks_exact_mut(classes)).zip(labels) {
        let py = row[y];
        if py > CCE_CLIP {
            g[y] = -1.0 / (py * b);
        }
    }
}
