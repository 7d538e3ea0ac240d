//! Deterministic property checks. Each returns the worst error it saw, so
//! callers can compare against their own tolerance and report it.

#![allow(dead_code)]

use num_complex::Complex64;
use qrecon_core::channels::{
    apply, bit_flip, bit_phase_flip, correlated_ad, depolarizing, generalized_amplitude_damping,
    parse_channel_spec, pauli_channel, phase_flip, tensor, validate_cptp, KrausChannel,
};
use qrecon_core::experiments::bloch_cloud;
use qrecon_core::linalg::ComplexMatrix;
use qrecon_core::nn::{init_model, Batch, HeadSpec, LossKind, NormMode, Targets};
use qrecon_core::qstate::{
    bloch_from_density, density_from_bloch, fidelity_bloch_1q, fidelity_general, hermitian_sqrt, purity,
    BlochVector, DensityMatrix,
};
use qrecon_core::sampling::{ginibre_mixed, haar_pure, substream, Domain};
use rand::Rng;
use rand_chacha::ChaCha20Rng;

pub fn rng(tag: u64) -> ChaCha20Rng {
    substream(0x5eed_0000 + tag, Domain::Derive, 0)
}

pub fn catalog() -> Vec<KrausChannel> {
    vec![
        KrausChannel::identity(),
        bit_flip(0.2).unwrap(),
        phase_flip(0.2).unwrap(),
        bit_phase_flip(0.2).unwrap(),
        pauli_channel(0.7, 0.1, 0.1, 0.1).unwrap(),
        depolarizing(0.3).unwrap(),
        generalized_amplitude_damping(0.5, 0.3).unwrap(),
        generalized_amplitude_damping(0.1, 0.9).unwrap(),
        correlated_ad(0.1, 0.2).unwrap(),
        bit_flip(0.0).unwrap(),
        depolarizing(1.0).unwrap(),
    ]
}

/// Largest completeness residual over the catalog, every pairwise tensor
/// product of its single-qubit members, and a few three-qubit products.
pub fn cptp_residual() -> f64 {
    let cat = catalog();
    let singles: Vec<&KrausChannel> = cat.iter().filter(|c| c.qubits() == 1).collect();
    let mut worst = cat.iter().map(|c| validate_cptp(c).residual).fold(0.0, f64::max);
    for a in &singles {
        for b in &singles {
            worst = worst.max(validate_cptp(&tensor(a, b)).residual);
        }
    }
    for spec in ["X(0.2)*Z(0.2)*Y(0.2)", "CAD(0.1,0.2)*DEP(0.3)", "GAD(0.5,0.3)*CAD(0.3,0.7)"] {
        worst = worst.max(validate_cptp(&parse_channel_spec(spec).unwrap()).residual);
    }
    worst
}

/// Bloch -> density -> Bloch and density -> Bloch -> density, `samples`
/// states per qubit count, pure and mixed.
pub fn bloch_roundtrip(samples: usize) -> f64 {
    let mut r = rng(1);
    let mut worst = 0.0f64;
    for n in 1..=3 {
        for i in 0..samples {
            let rho = if i % 2 == 0 {
                haar_pure(n, &mut r).unwrap()
            } else {
                ginibre_mixed(n, &mut r).unwrap()
            };
            let b = bloch_from_density(&rho);
            let back = density_from_bloch(&b).unwrap();
            worst = worst.max(back.matrix().max_abs_diff(rho.matrix()));
            let again = bloch_from_density(&back);
            let d = b
                .components()
                .iter()
                .zip(again.components())
                .map(|(x, y)| (x - y).abs())
                .fold(0.0, f64::max);
            worst = worst.max(d);
        }
    }
    worst
}

/// Closed-form single-qubit fidelity against the matrix-square-root form.
pub fn bloch_fidelity_vs_general(pairs: usize) -> f64 {
    let mut r = rng(2);
    (0..pairs)
        .map(|i| {
            let a = ginibre_mixed(1, &mut r).unwrap();
            let b = if i % 5 == 0 { haar_pure(1, &mut r).unwrap() } else { ginibre_mixed(1, &mut r).unwrap() };
            let fb = fidelity_bloch_1q(&bloch_from_density(&a), &bloch_from_density(&b)).unwrap();
            (fb - fidelity_general(&a, &b).unwrap()).abs()
        })
        .fold(0.0, f64::max)
}

/// `‖s - r‖² = 4 (1 - F)` for single-qubit pure states.
pub fn mse_infidelity_identity(pairs: usize) -> f64 {
    let mut r = rng(3);
    (0..pairs)
        .map(|_| {
            let a = haar_pure(1, &mut r).unwrap();
            let b = haar_pure(1, &mut r).unwrap();
            let (ra, rb) = (bloch_from_density(&a), bloch_from_density(&b));
            let dist: f64 = ra.components().iter().zip(rb.components()).map(|(x, y)| (x - y) * (x - y)).sum();
            (dist - 4.0 * (1.0 - fidelity_general(&a, &b).unwrap())).abs()
        })
        .fold(0.0, f64::max)
}

fn gaussian_2x2(r: &mut impl Rng) -> ComplexMatrix {
    let mut z = || {
        let u: f64 = r.random::<f64>().max(1e-300);
        let v: f64 = r.random();
        let rad = (-2.0 * u.ln()).sqrt();
        Complex64::new(rad * (std::f64::consts::TAU * v).cos(), rad * (std::f64::consts::TAU * v).sin())
    };
    ComplexMatrix::from_2x2(z(), z(), z(), z())
}

/// `(Tr √M)² = Tr M + 2 √det M` for 2x2 positive semidefinite `M`.
pub fn trace_sqrt_identity(samples: usize) -> f64 {
    let mut r = rng(4);
    (0..samples)
        .map(|i| {
            let g = gaussian_2x2(&mut r);
            let mut m = g.matmul(&g.adjoint());
            // rank one: the determinant is exactly zero, and ad - bc would only
            // contribute the square root of its rounding error
            let rank_one = i % 10 == 0;
            if rank_one {
                let v = [m[(0, 0)], m[(1, 0)]];
                m = ComplexMatrix::outer(&v, &v);
            }
            let tr_sqrt = hermitian_sqrt(&m).unwrap().trace().re;
            let det = if rank_one { 0.0 } else { (m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(1, 0)]).re.max(0.0) };
            let rhs = m.trace().re + 2.0 * det.sqrt();
            (tr_sqrt * tr_sqrt - rhs).abs() / rhs.max(1.0)
        })
        .fold(0.0, f64::max)
}

fn axis_state(axis: usize, sign: f64) -> DensityMatrix {
    let mut r = vec![0.0; 3];
    r[axis] = sign;
    density_from_bloch(&BlochVector::new(1, r).unwrap()).unwrap()
}

/// Analytic affine maps `r ↦ A r + c` (diagonal `A`) of the single-qubit
/// catalog, compared with the action on the six axis states and on random
/// states.
pub fn affine_action() -> f64 {
    let s = (0.7f64).sqrt();
    let cases: Vec<(KrausChannel, [f64; 3], [f64; 3])> = vec![
        (bit_flip(0.2).unwrap(), [1.0, 0.6, 0.6], [0.0; 3]),
        (phase_flip(0.2).unwrap(), [0.6, 0.6, 1.0], [0.0; 3]),
        (bit_phase_flip(0.2).unwrap(), [0.6, 1.0, 0.6], [0.0; 3]),
        (pauli_channel(0.7, 0.1, 0.1, 0.1).unwrap(), [0.6, 0.6, 0.6], [0.0; 3]),
        (pauli_channel(0.4, 0.3, 0.2, 0.1).unwrap(), [0.4, 0.2, 0.0], [0.0; 3]),
        (depolarizing(0.3).unwrap(), [0.7, 0.7, 0.7], [0.0; 3]),
        (generalized_amplitude_damping(0.5, 0.3).unwrap(), [s, s, 0.7], [0.0; 3]),
        (generalized_amplitude_damping(0.8, 0.3).unwrap(), [s, s, 0.7], [0.0, 0.0, 0.3 * 0.6]),
        (generalized_amplitude_damping(1.0, 1.0).unwrap(), [0.0, 0.0, 0.0], [0.0, 0.0, 1.0]),
    ];
    let mut r = rng(5);
    let mut worst = 0.0f64;
    for (ch, a, c) in &cases {
        for axis in 0..3 {
            let plus = bloch_from_density(&apply(ch, &axis_state(axis, 1.0)).unwrap());
            let minus = bloch_from_density(&apply(ch, &axis_state(axis, -1.0)).unwrap());
            for k in 0..3 {
                let offset = 0.5 * (plus.components()[k] + minus.components()[k]);
                let column = 0.5 * (plus.components()[k] - minus.components()[k]);
                let expect = if k == axis { a[k] } else { 0.0 };
                worst = worst.max((offset - c[k]).abs()).max((column - expect).abs());
            }
        }
        for _ in 0..50 {
            let rho = ginibre_mixed(1, &mut r).unwrap();
            let b = bloch_from_density(&rho);
            let out = bloch_from_density(&apply(ch, &rho).unwrap());
            for k in 0..3 {
                let expect = a[k] * b.components()[k] + c[k];
                worst = worst.max((out.components()[k] - expect).abs());
            }
        }
    }
    worst
}

/// `diag(p, 1 - p)` is a fixed point of GAD(p, γ).
pub fn gad_stationary() -> f64 {
    let mut worst = 0.0f64;
    for &p in &[0.0, 0.1, 0.5, 0.73, 1.0] {
        for &gamma in &[0.0, 0.3, 0.9, 1.0] {
            let fixed = DensityMatrix::new(1, ComplexMatrix::from_real_diag(&[p, 1.0 - p])).unwrap();
            let out = apply(&generalized_amplitude_damping(p, gamma).unwrap(), &fixed).unwrap();
            worst = worst.max(out.matrix().max_abs_diff(fixed.matrix()));
        }
    }
    worst
}

/// Z(0.2) maps the Bloch sphere onto `(x/0.6)² + (y/0.6)² + z² = 1`.
pub fn phase_flip_ellipsoid(points: usize) -> f64 {
    let cloud = bloch_cloud("Z(0.2)", points, &mut rng(6)).unwrap();
    cloud
        .iter()
        .map(|(_, n)| ((n[0] / 0.6).powi(2) + (n[1] / 0.6).powi(2) + n[2] * n[2] - 1.0).abs())
        .fold(0.0, f64::max)
}

/// GAD(0.5, 0.3) sends `z` to `0.7 z` for every cloud point.
pub fn gad_cloud_z(points: usize) -> f64 {
    let cloud = bloch_cloud("GAD(0.5,0.3)", points, &mut rng(7)).unwrap();
    cloud.iter().map(|(c, n)| (n[2] - 0.7 * c[2]).abs()).fold(0.0, f64::max)
}

/// Trace and Hermiticity defects after applying catalog channels.
pub fn trace_hermiticity(states: usize) -> f64 {
    let cat = catalog();
    let mut r = rng(8);
    let mut worst = 0.0f64;
    for i in 0..states {
        let ch = &cat[i % cat.len()];
        let rho = ginibre_mixed(ch.qubits(), &mut r).unwrap();
        let out = apply(ch, &rho).unwrap();
        worst = worst
            .max((out.matrix().trace() - Complex64::new(1.0, 0.0)).norm())
            .max(out.matrix().hermiticity_defect());
    }
    worst
}

/// One loss/head pairing for the gradient check.
#[derive(Debug, Clone, Copy)]
pub struct GradCase {
    pub head: HeadSpec,
    pub loss: LossKind,
    pub mixed: bool,
}

pub fn grad_cases() -> Vec<GradCase> {
    let unit = HeadSpec::pure_state(1);
    let mut cases = vec![
        GradCase { head: HeadSpec::Linear, loss: LossKind::Mse, mixed: false },
        GradCase { head: HeadSpec::Linear, loss: LossKind::Mse, mixed: true },
        GradCase { head: unit, loss: LossKind::Mse, mixed: false },
        GradCase { head: unit, loss: LossKind::InfidelityPure, mixed: false },
        GradCase { head: unit, loss: LossKind::InfidelityMixed, mixed: false },
        GradCase { head: HeadSpec::Softmax, loss: LossKind::Cce, mixed: false },
    ];
    for mode in [NormMode::ExactNorm, NormMode::PaperLiteral] {
        let head = HeadSpec::PurityRescale { target_purity: 1.0, mode };
        for loss in [LossKind::Mse, LossKind::InfidelityPure, LossKind::InfidelityMixed] {
            cases.push(GradCase { head, loss, mixed: true });
        }
    }
    cases
}

/// Backpropagated gradient against central differences with step `h` on a
/// `[3, 8, 8, 3]` network. Returns `‖g - g_fd‖ / max(‖g‖, ‖g_fd‖)`.
pub fn gradient_error(case: GradCase, model_seed: u64, h: f64) -> f64 {
    const B: usize = 4;
    let mut r = rng(100 + model_seed);
    let mut model = init_model(&[3, 8, 8, 3], case.head, &mut substream(model_seed, Domain::Init, 0)).unwrap();
    // fresh models have zero biases, which can put a pre-activation exactly
    // on a ReLU kink; a generic network should not sit there
    for k in 0..model.layers() {
        for b in model.biases_mut(k) {
            *b = r.random_range(-0.1..0.1);
        }
    }
    let mut inputs = Vec::new();
    let mut targets = Vec::new();
    let mut purities = Vec::new();
    let mut labels = Vec::new();
    for i in 0..B {
        let rho = if case.mixed { ginibre_mixed(1, &mut r).unwrap() } else { haar_pure(1, &mut r).unwrap() };
        let clean = bloch_from_density(&rho);
        let noisy = bloch_from_density(&apply(&depolarizing(0.3).unwrap(), &rho).unwrap());
        inputs.extend_from_slice(noisy.components());
        targets.extend_from_slice(clean.components());
        purities.push(purity(&rho));
        labels.push(i % 3);
    }
    let batch = Batch {
        inputs: &inputs,
        targets: if case.loss == LossKind::Cce { Targets::Labels(&labels) } else { Targets::Vectors(&targets) },
        purities: matches!(case.head, HeadSpec::PurityRescale { .. }).then_some(&purities[..]),
    };
    // the reported CCE value is a batch sum; its gradient is of the mean
    let scale = if case.loss == LossKind::Cce { 1.0 / B as f64 } else { 1.0 };
    let (_, grad) = model.backward(&batch, case.loss).unwrap();
    let mut probe = model.clone();
    let mut fd = vec![0.0; grad.len()];
    for (i, g) in fd.iter_mut().enumerate() {
        let orig = probe.params()[i];
        probe.params_mut()[i] = orig + h;
        let up = probe.backward(&batch, case.loss).unwrap().0;
        probe.params_mut()[i] = orig - h;
        let down = probe.backward(&batch, case.loss).unwrap().0;
        probe.params_mut()[i] = orig;
        *g = scale * (up - down) / (2.0 * h);
    }
    let norm = |v: &[f64]| v.iter().map(|x| x * x).sum::<f64>().sqrt();
    let diff: Vec<f64> = grad.iter().zip(&fd).map(|(a, b)| a - b).collect();
    norm(&diff) / norm(&grad).max(norm(&fd)).max(1e-300)
}

/// Worst gradient error over every case and `models` random networks each.
pub fn worst_gradient_error(models: u64) -> (f64, String) {
    let mut worst = (0.0, String::new());
    for case in grad_cases() {
        for seed in 0..models {
            let e = gradient_error(case, seed, 1e-6);
            if e > worst.0 {
                worst = (e, format!("{} + {} (model {seed})", case.head.name(), case.loss.name()));
            }
        }
    }
    worst
}
