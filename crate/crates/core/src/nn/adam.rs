//! Adam optimiser with bias-corrected moment estimates.

use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)] // inherent under std
use num_traits::Float;

use crate::error::{Error, Result};

pub const BETA1: f64 = 0.9;
pub const BETA2: f64 = 0.999;
pub const EPSILON: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq)]
pub struct AdamState {
    m: Vec<f64>,
    v: Vec<f64>,
    t: u64,
    lr: f64,
    // β₁ᵗ and β₂ᵗ, kept as running products
    beta1_t: f64,
    beta2_t: f64,
}

impl AdamState {
    pub fn new(len: usize, lr: f64) -> Result<Self> {
        if !(lr > 0.0 && lr.is_finite()) {
            return Err(Error::ParameterOutOfRange { name: "lr", value: lr });
        }
        Ok(Self {
            m: vec![0.0; len],
            v: vec![0.0; len],
            t: 0,
            lr,
            beta1_t: 1.0,
            beta2_t: 1.0,
        })
    }

    pub fn steps(&self) -> u64 {
        self.t
    }

    pub fn lr(&self) -> f64 {
        self.lr
    }

    pub fn first_moment(&self) -> &[f64] {
        &self.m
    }

    pub fn second_moment(&self) -> &[f64] {
        &self.v
    }

    /// One update `θ ← θ - lr·m̂/(√v̂ + ε)`.
    pub fn step(&mut self, theta: &mut [f64], grad: &[f64]) -> Result<()> {
        if theta.len() != self.m.len() || grad.len() != self.m.len() {
            return Err(Error::DimensionMismatch {
                expected: self.m.len(),
                found: if theta.len() != self.m.len() { theta.len() } else { grad.len() },
            });
        }
        self.t += 1;
        self.beta1_t *= BETA1;
        self.beta2_t *= BETA2;
        let c1 = 1.0 - self.beta1_t;
        let c2 = 1.0 - self.beta2_t;
        for (((th, &g), m), v) in theta.iter_mut().zip(grad).zip(&mut self.m).zip(&mut self.v) {
            *m = BETA1 * *m + (1.0 - BETA1) * g;
            *v = BETA2 * *v + (1.0 - BETA2) * g * g;
            let m_hat = *m / c1;
            let v_hat = *v / c2;
            *th -= self.lr * m_hat / (v_hat.sqrt() + EPSILON);
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn first_step_is_signed_lr() {
        let lr = 1e-3;
        let grads = [0.5, -2.0, 1e-3, -7.5];
        let mut theta = [0.0; 4];
        let mut adam = AdamState::new(4, lr).unwrap();
        adam.step(&mut theta, &grads).unwrap();
        for (th, g) in theta.iter().zip(grads) {
            // m̂ = g and v̂ = g² after one step
            let exact = -lr * g / (g.abs() + EPSILON);
            assert!((th - exact).abs() < 1e-18);
            assert!((th + lr * g.signum()).abs() <= lr * 1e-5);
        }
    }

    #[test]
    fn zero_gradient_leaves_theta() {
        let mut theta = [0.3, -1.2, 4.0];
        let mut adam = AdamState::new(3, 1e-2).unwrap();
        for _ in 0..100 {
            adam.step(&mut theta, &[0.0; 3]).unwrap();
        }
        assert_eq!(theta, [0.3, -1.2, 4.0]);
        assert_eq!(adam.steps(), 100);
    }

    #[test]
    fn identical_runs_match_bitwise() {
        let run = || {
            let mut theta = [1.0, 2.0];
            let mut adam = AdamState::new(2, 0.05).unwrap();
            for k in 0..200 {
                let g = [2.0 * theta[0] + k as f64 * 1e-3, theta[1] - 1.0];
                adam.step(&mut theta, &g).unwrap();
            }
            theta
        };
        assert_eq!(run().map(f64::to_bits), run().map(f64::to_bits));
    }

    #[test]
    fn minimises_a_quadratic() {
        let mut theta = [3.0, -4.0];
        let mut adam = AdamState::new(2, 0.05).unwrap();
        for _ in 0..2000 {
            let g = [2.0 * (theta[0] - 1.0), 2.0 * (theta[1] + 0.5)];
            adam.step(&mut theta, &g).unwrap();
        }
        assert!((theta[0] - 1.0).abs() < 1e-3 && (theta[1] + 0.5).abs() < 1e-3);
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(AdamState::new(2, 0.0).is_err());
        let mut adam = AdamState::new(2, 0.1).unwrap();
        assert!(adam.step(&mut [0.0; 3], &[0.0; 3]).is_err());
    }
}
