#[path = "common/props.rs"]
mod props;

use num_complex::Complex64;
use qrecon_core::experiments::evaluate_accuracy;
use qrecon_core::nn::{HeadSpec, MlpModel};
use qrecon_core::qstate::purity;
use qrecon_core::sampling::{build_classification_dataset, ginibre_mixed, haar_vector, InputMode};

/// Mean purity of the partial trace of a Haar state on C²⊗C², 10⁶ draws,
/// computed independently. The analytic value is 2d/(d²+1) = 0.8.
const GINIBRE_PURITY_REF: f64 = 0.7999316551398886;
const GINIBRE_PURITY_REF_SE: f64 = 1.309e-4;

fn mean_and_se(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

#[test]
fn haar_ground_population_averages_to_one_over_d() {
    let mut rng = props::rng(40);
    for n in 1..=3 {
        let xs: Vec<f64> = (0..100_000).map(|_| haar_vector(n, &mut rng).unwrap()[0].norm_sqr()).collect();
        let (mean, se) = mean_and_se(&xs);
        let expect = 1.0 / (1 << n) as f64;
        assert!((mean - expect).abs() < 3.0 * se, "n={n}: {mean} vs {expect} (se {se:e})");
    }
}

/// Asymptotic Kolmogorov tail probability with the usual small-sample
/// correction.
fn ks_p_value(d: f64, n: usize) -> f64 {
    let sn = (n as f64).sqrt();
    let lambda = (sn + 0.12 + 0.11 / sn) * d;
    let mut sum = 0.0;
    for k in 1..=100 {
        let term = (-2.0 * (k * k) as f64 * lambda * lambda).exp();
        sum += if k % 2 == 1 { term } else { -term };
        if term < 1e-16 {
            break;
        }
    }
    (2.0 * sum).clamp(0.0, 1.0)
}

#[test]
fn haar_overlap_with_any_fixed_state_is_uniform() {
    // for a qubit |<φ|ψ>|² is uniform on [0, 1] whatever φ is
    let mut rng = props::rng(41);
    let phi = [Complex64::new(0.6, 0.0), Complex64::new(0.0, 0.8)];
    let mut xs: Vec<f64> = (0..10_000)
        .map(|_| {
            let psi = haar_vector(1, &mut rng).unwrap();
            (phi[0].conj() * psi[0] + phi[1].conj() * psi[1]).norm_sqr()
        })
        .collect();
    xs.sort_by(f64::total_cmp);
    let n = xs.len() as f64;
    let d = xs
        .iter()
        .enumerate()
        .map(|(i, &x)| (x - i as f64 / n).abs().max(((i + 1) as f64 / n - x).abs()))
        .fold(0.0, f64::max);
    let p = ks_p_value(d, xs.len());
    assert!(p > 0.01, "KS D={d} p={p}");
}

#[test]
fn ginibre_mean_purity_matches_reference() {
    let mut rng = props::rng(42);
    let xs: Vec<f64> = (0..100_000).map(|_| purity(&ginibre_mixed(1, &mut rng).unwrap())).collect();
    let (mean, se) = mean_and_se(&xs);
    let tol = 3.0 * (se * se + GINIBRE_PURITY_REF_SE * GINIBRE_PURITY_REF_SE).sqrt();
    assert!((mean - GINIBRE_PURITY_REF).abs() < tol, "{mean} vs {GINIBRE_PURITY_REF} ± {tol:e}");
}

#[test]
fn constant_classifier_scores_one_half_on_two_classes() {
    let ds = build_classification_dataset(&["Z(0.2)", "GAD(0.5,0.3)"], 1, 1000, InputMode::NoisyOnly, 9).unwrap();
    // zero weights, bias favouring class 0
    let theta = [vec![0.0; 6], vec![1.0, 0.0]].concat();
    let model = MlpModel::from_parts(vec![3, 2], HeadSpec::Softmax, theta).unwrap();
    let acc = evaluate_accuracy(&model, &ds).unwrap();
    let sigma = (0.25 / ds.len() as f64).sqrt();
    assert!((acc - 0.5).abs() < 3.0 * sigma, "{acc}");
    assert_eq!(ds.class_counts(), vec![500, 500]);
}
