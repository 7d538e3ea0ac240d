//! Qubit states as density matrices and generalised Bloch vectors.
//!
//! An n-qubit state is written `ρ = (I + Σ r_i P_i) / 2^n`, where the `P_i`
//! run over all non-identity Pauli strings in lexicographic order of the
//! symbol tuple with `I < X < Y < Z`.

use alloc::vec::Vec;

#[allow(unused_imports)] // inherent under std
use num_traits::Float;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{hermitian_eigen, ComplexMatrix, C0, C1, CI};

/// Structural tolerance for Hermiticity, trace and positivity checks.
pub const STRUCTURAL_TOL: f64 = 1e-10;
/// Slack allowed on the pure-state Bloch norm bound.
pub const NORM_BOUND_SLACK: f64 = 1e-8;
/// Purity deviation from 1 still treated as pure.
pub const PURE_TOL: f64 = 1e-6;

pub const MAX_QUBITS: usize = 3;

pub fn check_qubits(n: usize) -> Result<()> {
    if (1..=MAX_QUBITS).contains(&n) {
        Ok(())
    } else {
        Err(Error::UnsupportedQubitCount(n))
    }
}

/// Hilbert-space dimension 2^n.
pub fn hilbert_dim(n: usize) -> usize {
    1 << n
}

/// Bloch-vector length 4^n - 1.
pub fn bloch_len(n: usize) -> usize {
    (1 << (2 * n)) - 1
}

/// Inverse of [`bloch_len`]; `None` if `len` is not of the form 4^n - 1.
pub fn qubits_for_bloch_len(len: usize) -> Option<usize> {
    (1..=MAX_QUBITS).find(|&n| bloch_len(n) == len)
}

/// Squared norm of a pure-state Bloch vector, 2^n - 1.
pub fn pure_norm_sq(n: usize) -> f64 {
    (hilbert_dim(n) - 1) as f64
}

/// Single-qubit Pauli matrices.
pub fn pauli_i() -> ComplexMatrix {
    ComplexMatrix::identity(2)
}

pub fn pauli_x() -> ComplexMatrix {
    ComplexMatrix::from_2x2(C0, C1, C1, C0)
}

pub fn pauli_y() -> ComplexMatrix {
    ComplexMatrix::from_2x2(C0, -CI, CI, C0)
}

pub fn pauli_z() -> ComplexMatrix {
    ComplexMatrix::from_2x2(C1, C0, C0, -C1)
}

/// All `4^n - 1` non-identity Pauli strings for `n` qubits.
///
/// Element `k` corresponds to `k + 1` written in base 4 with `n` digits,
/// most significant digit on qubit 1, digits mapping `0,1,2,3 -> I,X,Y,Z`.
pub fn pauli_basis(n: usize) -> Result<Vec<ComplexMatrix>> {
    check_qubits(n)?;
    let singles = [pauli_i(), pauli_x(), pauli_y(), pauli_z()];
    let total = 1usize << (2 * n);
    let mut out = Vec::with_capacity(total - 1);
    for code in 1..total {
        let mut m = ComplexMatrix::identity(1);
        for q in (0..n).rev() {
            let digit = (code >> (2 * q)) & 3;
            m = m.kron(&singles[digit]);
        }
        out.push(m);
    }
    Ok(out)
}

/// Label of the `k`-th Pauli string in [`pauli_basis`] order, e.g. `"IX"`.
pub fn pauli_label(n: usize, k: usize) -> alloc::string::String {
    let code = k + 1;
    (0..n)
        .rev()
        .map(|q| ['I', 'X', 'Y', 'Z'][(code >> (2 * q)) & 3])
        .collect()
}

/// A generalised Bloch vector tagged with its qubit count.
#[derive(Debug, Clone, PartialEq)]
pub struct BlochVector {
    n: usize,
    r: Vec<f64>,
}

impl BlochVector {
    pub fn new(n: usize, r: Vec<f64>) -> Result<Self> {
        check_qubits(n)?;
        if r.len() != bloch_len(n) {
            return Err(Error::DimensionMismatch {
                expected: bloch_len(n),
                found: r.len(),
            });
        }
        Ok(Self { n, r })
    }

    /// Infers the qubit count from the length.
    pub fn from_components(r: Vec<f64>) -> Result<Self> {
        let n = qubits_for_bloch_len(r.len()).ok_or(Error::DimensionMismatch {
            expected: bloch_len(1),
            found: r.len(),
        })?;
        Ok(Self { n, r })
    }

    pub fn zero(n: usize) -> Result<Self> {
        check_qubits(n)?;
        Ok(Self {
            n,
            r: alloc::vec![0.0; bloch_len(n)],
        })
    }

    pub fn qubits(&self) -> usize {
        self.n
    }

    pub fn components(&self) -> &[f64] {
        &self.r
    }

    pub fn into_components(self) -> Vec<f64> {
        self.r
    }

    pub fn norm_sq(&self) -> f64 {
        self.r.iter().map(|x| x * x).sum()
    }

    pub fn dot(&self, other: &Self) -> f64 {
        dot(&self.r, &other.r)
    }

    /// True when the squared norm is within the pure-state bound.
    pub fn within_norm_bound(&self) -> bool {
        self.norm_sq() <= pure_norm_sq(self.n) + NORM_BOUND_SLACK
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// A density matrix on `n` qubits.
///
/// [`DensityMatrix::new`] checks every invariant. Values produced by
/// [`density_from_bloch`] only satisfy the Bloch norm bound; call
/// [`DensityMatrix::validate`] where full positivity matters.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    n: usize,
    mat: ComplexMatrix,
}

impl DensityMatrix {
    pub fn new(n: usize, mat: ComplexMatrix) -> Result<Self> {
        let rho = Self::from_matrix_unchecked(n, mat)?;
        rho.validate()?;
        Ok(rho)
    }

    /// Checks only the qubit count and shape.
    pub fn from_matrix_unchecked(n: usize, mat: ComplexMatrix) -> Result<Self> {
        check_qubits(n)?;
        let d = hilbert_dim(n);
        if mat.rows() != d || mat.cols() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: mat.rows(),
            });
        }
        Ok(Self { n, mat })
    }

    /// `|ψ><ψ|` for a state vector; the vector is normalised first.
    pub fn pure(psi: &[Complex64]) -> Result<Self> {
        let n = (1..=MAX_QUBITS)
            .find(|&n| hilbert_dim(n) == psi.len())
            .ok_or(Error::UnsupportedQubitCount(psi.len()))?;
        let norm = psi.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 {
            return Err(Error::InvalidState("zero state vector".into()));
        }
        let v: Vec<Complex64> = psi.iter().map(|z| z / norm).collect();
        Ok(Self {
            n,
            mat: ComplexMatrix::outer(&v, &v),
        })
    }

    /// `|i><i|` for computational basis index `i`.
    pub fn basis_state(n: usize, i: usize) -> Result<Self> {
        check_qubits(n)?;
        let mut mat = ComplexMatrix::zeros(hilbert_dim(n), hilbert_dim(n));
        mat[(i, i)] = C1;
        Ok(Self { n, mat })
    }

    pub fn maximally_mixed(n: usize) -> Result<Self> {
        check_qubits(n)?;
        let d = hilbert_dim(n);
        Ok(Self {
            n,
            mat: ComplexMatrix::identity(d).scale_real(1.0 / d as f64),
        })
    }

    pub fn qubits(&self) -> usize {
        self.n
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.mat
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.mat
    }

    /// Hermitian within 1e-10, unit trace within 1e-10, eigenvalues >= -1e-10.
    pub fn validate(&self) -> Result<()> {
        let defect = self.mat.hermiticity_defect();
        if defect > STRUCTURAL_TOL {
            return Err(Error::NotHermitian(defect));
        }
        let tr = self.mat.trace();
        if (tr - C1).norm() > STRUCTURAL_TOL {
            return Err(Error::InvalidState(alloc::format!("trace {tr} != 1")));
        }
        let min = self.min_eigenvalue()?;
        if min < -STRUCTURAL_TOL {
            return Err(Error::InvalidState(alloc::format!(
                "negative eigenvalue {min:e}"
            )));
        }
        Ok(())
    }

    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        Ok(hermitian_eigen(&self.mat, STRUCTURAL_TOL)?.values())
    }

    fn min_eigenvalue(&self) -> Result<f64> {
        Ok(self.eigenvalues()?.first().copied().unwrap_or(0.0))
    }
}

/// `r_i = Tr[ρ P_i]`, imaginary parts dropped.
pub fn bloch_from_density(rho: &DensityMatrix) -> BlochVector {
    let basis = pauli_basis(rho.n).expect("qubit count checked at construction");
    bloch_from_density_with(rho, &basis)
}

/// [`bloch_from_density`] with a precomputed basis.
pub fn bloch_from_density_with(rho: &DensityMatrix, basis: &[ComplexMatrix]) -> BlochVector {
    let r = basis.iter().map(|p| rho.mat.trace_product(p).re).collect();
    BlochVector { n: rho.n, r }
}

/// `ρ = (I + Σ r_i P_i) / 2^n`.
///
/// Only the norm bound `‖r‖² ≤ 2^n - 1` is enforced, not positivity.
pub fn density_from_bloch(r: &BlochVector) -> Result<DensityMatrix> {
    let basis = pauli_basis(r.n)?;
    density_from_bloch_with(r, &basis)
}

/// [`density_from_bloch`] with a precomputed basis.
pub fn density_from_bloch_with(r: &BlochVector, basis: &[ComplexMatrix]) -> Result<DensityMatrix> {
    let bound = pure_norm_sq(r.n);
    let norm_sq = r.norm_sq();
    if norm_sq > bound + NORM_BOUND_SLACK {
        return Err(Error::UnphysicalBloch { norm_sq, bound });
    }
    let d = hilbert_dim(r.n);
    let mut mat = ComplexMatrix::identity(d);
    for (p, &ri) in basis.iter().zip(&r.r) {
        if ri == 0.0 {
            continue;
        }
        mat = &mat + &p.scale_real(ri);
    }
    Ok(DensityMatrix {
        n: r.n,
        mat: mat.scale_real(1.0 / d as f64),
    })
}

/// Tr[ρ²] from the matrix.
pub fn purity(rho: &DensityMatrix) -> f64 {
    rho.mat.trace_product(&rho.mat).re
}

/// (1 + ‖r‖²) / 2^n.
pub fn purity_from_bloch(r: &BlochVector) -> f64 {
    (1.0 + r.norm_sq()) / hilbert_dim(r.n) as f64
}

/// Principal square root of a Hermitian positive semi-definite matrix.
///
/// Eigenvalues within rounding noise of zero (including negative ones) are
/// treated as exactly zero.
pub fn hermitian_sqrt(m: &ComplexMatrix) -> Result<ComplexMatrix> {
    let eig = hermitian_eigen(m, 1e-9)?;
    let floor = noise_floor(&eig.values());
    let mut s = eig.map_values(|l| if l > floor { l.sqrt() } else { 0.0 });
    s.symmetrize();
    Ok(s)
}

/// Magnitude below which a computed eigenvalue is indistinguishable from 0.
fn noise_floor(values: &[f64]) -> f64 {
    let scale = values.iter().fold(0.0f64, |a, l| a.max(l.abs()));
    32.0 * f64::EPSILON * scale
}

fn same_qubits(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<()> {
    if rho.n != sigma.n {
        return Err(Error::DimensionMismatch {
            expected: hilbert_dim(rho.n),
            found: hilbert_dim(sigma.n),
        });
    }
    Ok(())
}

/// Uhlmann fidelity `Tr[√(√ρ σ √ρ)]²`, clipped to [0, 1].
pub fn fidelity_general(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    same_qubits(rho, sigma)?;
    let sqrt_rho = hermitian_sqrt(&rho.mat)?;
    let mut inner = sqrt_rho.matmul(&sigma.mat).matmul(&sqrt_rho);
    inner.symmetrize();
    let eig = hermitian_eigen(&inner, 1e-9)?;
    let values = eig.values();
    let floor = noise_floor(&values);
    let tr: f64 = values.iter().filter(|&&l| l > floor).map(|l| l.sqrt()).sum();
    Ok((tr * tr).clamp(0.0, 1.0))
}

/// `Tr[ρσ]` for pure states.
pub fn fidelity_pure(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    same_qubits(rho, sigma)?;
    for s in [rho, sigma] {
        let p = purity(s);
        if (p - 1.0).abs() > PURE_TOL {
            return Err(Error::NotPure(p));
        }
    }
    Ok(rho.mat.trace_product(&sigma.mat).re)
}

/// Bloch form of [`fidelity_pure`]: `(1 + r·s) / 2^n`.
pub fn fidelity_pure_bloch(r: &BlochVector, s: &BlochVector) -> f64 {
    (1.0 + r.dot(s)) / hilbert_dim(r.n) as f64
}

/// Normalised overlap `|Tr[ρσ]| / √(Tr[ρ²] Tr[σ²])`.
pub fn fidelity_mixed_alt(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    same_qubits(rho, sigma)?;
    let overlap = rho.mat.trace_product(&sigma.mat).norm();
    let denom = (purity(rho) * purity(sigma)).sqrt();
    Ok((overlap / denom).min(1.0))
}

/// Bloch form of [`fidelity_mixed_alt`]:
/// `|1 + r·s| / √((1 + ‖r‖²)(1 + ‖s‖²))`.
pub fn fidelity_mixed_alt_bloch(r: &BlochVector, s: &BlochVector) -> f64 {
    let num = (1.0 + r.dot(s)).abs();
    (num / ((1.0 + r.norm_sq()) * (1.0 + s.norm_sq())).sqrt()).min(1.0)
}

/// Single-qubit fidelity in Bloch form,
/// `½(1 + r·s + √((1 - ‖r‖²)(1 - ‖s‖²)))`.
pub fn fidelity_bloch_1q(r: &BlochVector, s: &BlochVector) -> Result<f64> {
    for v in [r, s] {
        if v.n != 1 {
            return Err(Error::UnsupportedQubitCount(v.n));
        }
        if !v.within_norm_bound() {
            return Err(Error::UnphysicalBloch {
                norm_sq: v.norm_sq(),
                bound: 1.0,
            });
        }
    }
    let a = (1.0 - r.norm_sq()).max(0.0);
    let b = (1.0 - s.norm_sq()).max(0.0);
    let f = 0.5 * (1.0 + r.dot(s) + (a * b).sqrt());
    Ok(f.clamp(0.0, 1.0))
}
