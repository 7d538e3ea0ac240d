//! Noise channels in Kraus form.
//!
//! Every constructor returns a [`KrausChannel`] whose operators satisfy
//! `Σ E_i† E_i = I`. Channels on several qubits are built with [`tensor`];
//! the textual form accepted by [`parse_channel_spec`] is also what
//! [`KrausChannel::label`] prints, so labels round-trip.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)] // inherent under std
use num_traits::Float;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, C0};
use crate::qstate::{hilbert_dim, pauli_i, pauli_x, pauli_y, pauli_z, DensityMatrix};

/// Completeness residual below which a Kraus list counts as trace preserving.
pub const CPTP_TOL: f64 = 1e-10;

/// Tolerance on `p0 + p1 + p2 + p3 = 1` for the Pauli channel.
pub const PAULI_SUM_TOL: f64 = 1e-12;

/// A quantum channel `ρ ↦ Σ E_i ρ E_i†`.
#[derive(Debug, Clone, PartialEq)]
pub struct KrausChannel {
    n: usize,
    kraus: Vec<ComplexMatrix>,
    label: String,
    params: Vec<(&'static str, f64)>,
}

impl KrausChannel {
    /// Builds a channel from raw operators; checks shapes, not completeness.
    pub fn from_kraus(
        n: usize,
        kraus: Vec<ComplexMatrix>,
        label: impl Into<String>,
        params: Vec<(&'static str, f64)>,
    ) -> Result<Self> {
        let d = hilbert_dim(n);
        if kraus.is_empty() {
            return Err(Error::InvalidConfig("empty Kraus list".into()));
        }
        for k in &kraus {
            if k.rows() != d || k.cols() != d {
                return Err(Error::DimensionMismatch {
                    expected: d,
                    found: k.rows(),
                });
            }
        }
        Ok(Self {
            n,
            kraus,
            label: label.into(),
            params,
        })
    }

    /// Single-qubit identity channel.
    pub fn identity() -> Self {
        Self {
            n: 1,
            kraus: vec![pauli_i()],
            label: "I".into(),
            params: Vec::new(),
        }
    }

    pub fn qubits(&self) -> usize {
        self.n
    }

    pub fn kraus(&self) -> &[ComplexMatrix] {
        &self.kraus
    }

    /// Canonical channel-spec text, e.g. `Z(0.2)*X(0.2)`.
    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn params(&self) -> &[(&'static str, f64)] {
        &self.params
    }
}

fn check_unit(name: &'static str, value: f64) -> Result<()> {
    if (0.0..=1.0).contains(&value) {
        Ok(())
    } else {
        Err(Error::ParameterOutOfRange { name, value })
    }
}

fn real(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

fn one_flip(name: &str, p: f64, pauli: ComplexMatrix) -> Result<KrausChannel> {
    check_unit("p", p)?;
    Ok(KrausChannel {
        n: 1,
        kraus: vec![
            pauli_i().scale_real((1.0 - p).sqrt()),
            pauli.scale_real(p.sqrt()),
        ],
        label: format!("{name}({p})"),
        params: vec![("p", p)],
    })
}

/// Bit flip: `{√(1-p) I, √p X}`.
pub fn bit_flip(p: f64) -> Result<KrausChannel> {
    one_flip("X", p, pauli_x())
}

/// Phase flip: `{√(1-p) I, √p Z}`.
pub fn phase_flip(p: f64) -> Result<KrausChannel> {
    one_flip("Z", p, pauli_z())
}

/// Bit-phase flip: `{√(1-p) I, √p Y}`.
pub fn bit_phase_flip(p: f64) -> Result<KrausChannel> {
    one_flip("Y", p, pauli_y())
}

/// General Pauli channel `{√p0 I, √p1 X, √p2 Y, √p3 Z}`.
pub fn pauli_channel(p0: f64, p1: f64, p2: f64, p3: f64) -> Result<KrausChannel> {
    for (name, v) in [("p0", p0), ("p1", p1), ("p2", p2), ("p3", p3)] {
        check_unit(name, v)?;
    }
    let sum = p0 + p1 + p2 + p3;
    if (sum - 1.0).abs() > PAULI_SUM_TOL {
        return Err(Error::ProbabilitySum(sum));
    }
    Ok(KrausChannel {
        n: 1,
        kraus: vec![
            pauli_i().scale_real(p0.sqrt()),
            pauli_x().scale_real(p1.sqrt()),
            pauli_y().scale_real(p2.sqrt()),
            pauli_z().scale_real(p3.sqrt()),
        ],
        label: format!("PAULI({p0},{p1},{p2},{p3})"),
        params: vec![("p0", p0), ("p1", p1), ("p2", p2), ("p3", p3)],
    })
}

/// Single-qubit depolarizing channel,
/// `{√(1-3p/4) I, (√p/2) X, (√p/2) Y, (√p/2) Z}`.
pub fn depolarizing(p: f64) -> Result<KrausChannel> {
    check_unit("p", p)?;
    let side = p.sqrt() / 2.0;
    Ok(KrausChannel {
        n: 1,
        kraus: vec![
            pauli_i().scale_real((1.0 - 0.75 * p).sqrt()),
            pauli_x().scale_real(side),
            pauli_y().scale_real(side),
            pauli_z().scale_real(side),
        ],
        label: format!("DEP({p})"),
        params: vec![("p", p)],
    })
}

/// Depolarizing channel in its d-dimensional affine form,
/// `ρ ↦ (1 - p) ρ + p I/d`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DepolarizingMap {
    pub p: f64,
    pub n: usize,
}

pub fn depolarizing_d(p: f64, n: usize) -> Result<DepolarizingMap> {
    check_unit("p", p)?;
    crate::qstate::check_qubits(n)?;
    Ok(DepolarizingMap { p, n })
}

impl DepolarizingMap {
    pub fn apply(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        if rho.qubits() != self.n {
            return Err(Error::DimensionMismatch {
                expected: hilbert_dim(self.n),
                found: hilbert_dim(rho.qubits()),
            });
        }
        let d = hilbert_dim(self.n);
        let mixed = ComplexMatrix::identity(d).scale_real(self.p / d as f64);
        let out = &rho.matrix().scale_real(1.0 - self.p) + &mixed;
        DensityMatrix::from_matrix_unchecked(self.n, out)
    }
}

fn damping_pair(gamma: f64) -> (ComplexMatrix, ComplexMatrix) {
    let e0 = ComplexMatrix::from_2x2(real(1.0), C0, C0, real((1.0 - gamma).sqrt()));
    let e1 = ComplexMatrix::from_2x2(C0, real(gamma.sqrt()), C0, C0);
    (e0, e1)
}

/// Generalized amplitude damping with stationary population `p` and
/// damping `gamma`; the fixed point is `diag(p, 1 - p)`.
pub fn generalized_amplitude_damping(p: f64, gamma: f64) -> Result<KrausChannel> {
    check_unit("p", p)?;
    check_unit("gamma", gamma)?;
    let (e0, e1) = damping_pair(gamma);
    let e2 = ComplexMatrix::from_2x2(real((1.0 - gamma).sqrt()), C0, C0, real(1.0));
    let e3 = ComplexMatrix::from_2x2(C0, C0, real(gamma.sqrt()), C0);
    let a = p.sqrt();
    let b = (1.0 - p).sqrt();
    Ok(KrausChannel {
        n: 1,
        kraus: vec![
            e0.scale_real(a),
            e1.scale_real(a),
            e2.scale_real(b),
            e3.scale_real(b),
        ],
        label: format!("GAD({p},{gamma})"),
        params: vec![("p", p), ("gamma", gamma)],
    })
}

/// Two-qubit correlated amplitude damping,
/// `(1 - μ) N₀(ρ) + μ N₁(ρ)`, folded into one Kraus list.
///
/// `N₀` is independent amplitude damping with rate `eta` on each qubit;
/// `N₁` has `B₀ = diag(1, 1, 1, √eta)` and `B₁ = √(1-eta) |00><11|` in the
/// basis `|00>, |01>, |10>, |11>`.
pub fn correlated_ad(eta: f64, mu: f64) -> Result<KrausChannel> {
    check_unit("eta", eta)?;
    check_unit("mu", mu)?;
    let (e0, e1) = damping_pair(eta);
    let w0 = (1.0 - mu).sqrt();
    let w1 = mu.sqrt();
    let mut kraus: Vec<ComplexMatrix> = [(&e0, &e0), (&e0, &e1), (&e1, &e0), (&e1, &e1)]
        .iter()
        .map(|(a, b)| a.kron(b).scale_real(w0))
        .collect();
    let mut b0 = ComplexMatrix::identity(4);
    b0[(3, 3)] = real(eta.sqrt());
    let mut b1 = ComplexMatrix::zeros(4, 4);
    b1[(0, 3)] = real((1.0 - eta).sqrt());
    kraus.push(b0.scale_real(w1));
    kraus.push(b1.scale_real(w1));
    Ok(KrausChannel {
        n: 2,
        kraus,
        label: format!("CAD({eta},{mu})"),
        params: vec![("eta", eta), ("mu", mu)],
    })
}

/// Tensor product `a ⊗ b`: all pairwise Kraus products, `a` on the leading
/// qubits.
pub fn tensor(a: &KrausChannel, b: &KrausChannel) -> KrausChannel {
    let mut kraus = Vec::with_capacity(a.kraus.len() * b.kraus.len());
    for ea in &a.kraus {
        for eb in &b.kraus {
            kraus.push(ea.kron(eb));
        }
    }
    let mut params = a.params.clone();
    params.extend_from_slice(&b.params);
    KrausChannel {
        n: a.n + b.n,
        kraus,
        label: format!("{}*{}", a.label, b.label),
        params,
    }
}

/// `Σ E_i ρ E_i†`.
pub fn apply(ch: &KrausChannel, rho: &DensityMatrix) -> Result<DensityMatrix> {
    if ch.n != rho.qubits() {
        return Err(Error::DimensionMismatch {
            expected: hilbert_dim(ch.n),
            found: hilbert_dim(rho.qubits()),
        });
    }
    let d = hilbert_dim(ch.n);
    let mut out = ComplexMatrix::zeros(d, d);
    for e in &ch.kraus {
        out = &out + &e.matmul(rho.matrix()).matmul(&e.adjoint());
    }
    out.symmetrize();
    DensityMatrix::from_matrix_unchecked(ch.n, out)
}

/// Outcome of a completeness check.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CptpReport {
    /// Frobenius norm of `Σ E_i† E_i - I`.
    pub residual: f64,
    pub pass: bool,
}

pub fn validate_cptp(ch: &KrausChannel) -> CptpReport {
    let d = hilbert_dim(ch.n);
    let mut sum = ComplexMatrix::zeros(d, d);
    for e in &ch.kraus {
        sum = &sum + &e.adjoint().matmul(e);
    }
    let residual = (&sum - &ComplexMatrix::identity(d)).frobenius_norm();
    CptpReport {
        residual,
        pass: residual < CPTP_TOL,
    }
}

/// Parses a channel spec such as `Z(0.2)*X(0.2)` or `CAD(0.1,0.2)`.
///
/// ```text
/// spec := term ('*' term)*
/// term := NAME '(' num (',' num)* ')' | 'I'
/// NAME := X | Y | Z | PAULI | DEP | GAD | CAD
/// ```
///
/// Whitespace is ignored. Positions in errors are byte offsets.
pub fn parse_channel_spec(text: &str) -> Result<KrausChannel> {
    let mut parser = Parser { text, pos: 0 };
    let mut channel = parser.term()?;
    loop {
        parser.skip_ws();
        match parser.peek() {
            None => break,
            Some('*') => {
                parser.pos += 1;
                let next = parser.term()?;
                channel = tensor(&channel, &next);
            }
            Some(c) => return Err(parser.syntax(format!("expected `*` or end of input, found `{c}`"))),
        }
    }
    Ok(channel)
}

struct Parser<'a> {
    text: &'a str,
    pos: usize,
}

impl Parser<'_> {
    fn peek(&self) -> Option<char> {
        self.text[self.pos..].chars().next()
    }

    fn skip_ws(&mut self) {
        while let Some(c) = self.peek() {
            if c.is_whitespace() {
                self.pos += c.len_utf8();
            } else {
                break;
            }
        }
    }

    fn syntax(&self, message: String) -> Error {
        Error::Syntax {
            position: self.pos,
            message,
        }
    }

    fn expect(&mut self, want: char) -> Result<()> {
        self.skip_ws();
        match self.peek() {
            Some(c) if c == want => {
                self.pos += 1;
                Ok(())
            }
            Some(c) => Err(self.syntax(format!("expected `{want}`, found `{c}`"))),
            None => Err(self.syntax(format!("expected `{want}`, found end of input"))),
        }
    }

    fn name(&mut self) -> Result<(String, usize)> {
        self.skip_ws();
        let start = self.pos;
        while let Some(c) = self.peek() {
            if c.is_ascii_alphabetic() {
                self.pos += 1;
            } else {
                break;
            }
        }
        if self.pos == start {
            return Err(match self.peek() {
                Some(c) => self.syntax(format!("expected channel name, found `{c}`")),
                None => self.syntax("expected channel name, found end of input".into()),
            });
        }
        Ok((self.text[start..self.pos].to_string(), start))
    }

    fn number(&mut self) -> Result<f64> {
        self.skip_ws();
        let start = self.pos;
        while let Some(c) = self.peek() {
            if c.is_ascii_digit() || matches!(c, '.' | '-' | '+' | 'e' | 'E') {
                self.pos += 1;
            } else {
                break;
            }
        }
        let lit = &self.text[start..self.pos];
        lit.parse::<f64>().map_err(|_| Error::Syntax {
            position: start,
            message: if lit.is_empty() {
                "expected a number".into()
            } else {
                format!("invalid number `{lit}`")
            },
        })
    }

    fn term(&mut self) -> Result<KrausChannel> {
        let (name, start) = self.name()?;
        if name == "I" {
            return Ok(KrausChannel::identity());
        }
        let arity = match name.as_str() {
            "X" | "Y" | "Z" | "DEP" => 1,
            "GAD" | "CAD" => 2,
            "PAULI" => 4,
            _ => {
                return Err(Error::UnknownChannel {
                    name,
                    position: start,
                })
            }
        };
        self.expect('(')?;
        let mut args = vec![self.number()?];
        loop {
            self.skip_ws();
            match self.peek() {
                Some(',') => {
                    self.pos += 1;
                    args.push(self.number()?);
                }
                Some(')') => {
                    self.pos += 1;
                    break;
                }
                Some(c) => return Err(self.syntax(format!("expected `,` or `)`, found `{c}`"))),
                None => return Err(self.syntax("unclosed `(`".into())),
            }
        }
        if args.len() != arity {
            return Err(Error::Arity {
                name,
                expected: arity,
                found: args.len(),
            });
        }
        match name.as_str() {
            "X" => bit_flip(args[0]),
            "Y" => bit_phase_flip(args[0]),
            "Z" => phase_flip(args[0]),
            "DEP" => depolarizing(args[0]),
            "GAD" => generalized_amplitude_damping(args[0], args[1]),
            "CAD" => correlated_ad(args[0], args[1]),
            "PAULI" => pauli_channel(args[0], args[1], args[2], args[3]),
            _ => unreachable!("arity table covers every name"),
        }
    }
}
