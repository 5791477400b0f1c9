//! Truncated single-mode Fock space.
//!
//! Operators are dense `dim x dim` complex matrices in the number basis
//! `|0>, ..., |dim-1>` with hbar = 1. Truncation is the only approximation:
//! every state constructor records the analytic probability mass that the
//! cutoff discards, and refuses to build a state whose discarded mass is
//! above the requested tolerance.

use std::ops::Mul;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{self, c, CMatrix, CVector};

pub const DEFAULT_TAIL_TOLERANCE: f64 = 1e-12;

/// Guard on the squeezing parameter of [`single_mode_squeeze`].
pub const MAX_SQUEEZE: f64 = 5.0;

#[derive(Debug, Clone, PartialEq)]
pub struct FockOperator {
    matrix: CMatrix,
}

impl FockOperator {
    pub fn from_matrix(matrix: CMatrix) -> Result<Self> {
        if matrix.nrows() != matrix.ncols() {
            return Err(Error::DimensionMismatch {
                left: matrix.nrows(),
                right: matrix.ncols(),
            });
        }
        check_dim(matrix.nrows())?;
        Ok(Self { matrix })
    }

    pub fn identity(dim: usize) -> Result<Self> {
        check_dim(dim)?;
        Ok(Self {
            matrix: CMatrix::identity(dim, dim),
        })
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }

    pub fn adjoint(&self) -> Self {
        Self {
            matrix: self.matrix.adjoint(),
        }
    }

    pub fn scale(&self, factor: Complex64) -> Self {
        Self {
            matrix: &self.matrix * factor,
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        same_dim(self.dim(), other.dim())?;
        Ok(Self {
            matrix: &self.matrix + &other.matrix,
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        same_dim(self.dim(), other.dim())?;
        Ok(Self {
            matrix: &self.matrix - &other.matrix,
        })
    }

    pub fn compose(&self, other: &Self) -> Result<Self> {
        same_dim(self.dim(), other.dim())?;
        Ok(Self {
            matrix: &self.matrix * &other.matrix,
        })
    }

    pub fn pow(&self, n: u32) -> Self {
        let mut out = CMatrix::identity(self.dim(), self.dim());
        for _ in 0..n {
            out = &out * &self.matrix;
        }
        Self { matrix: out }
    }

    /// `exp(self)` by scaling and squaring.
    pub fn exp(&self) -> Self {
        Self {
            matrix: linalg::expm(&self.matrix),
        }
    }

    /// Applies the operator; the tail bookkeeping of the input is dropped
    /// because a general operator does not preserve it.
    pub fn apply(&self, psi: &FockState) -> Result<FockState> {
        same_dim(self.dim(), psi.dim())?;
        Ok(FockState {
            amplitudes: &self.matrix * &psi.amplitudes,
            tail_mass: 0.0,
        })
    }

    /// Max-abs deviation from `target` on the leading `keep x keep` block.
    pub fn block_deviation(&self, target: &CMatrix, keep: usize) -> f64 {
        linalg::leading_block_max_abs(&(&self.matrix - target), keep)
    }
}

impl Mul for &FockOperator {
    type Output = FockOperator;

    fn mul(self, rhs: Self) -> FockOperator {
        assert_eq!(self.dim(), rhs.dim(), "operator dimension mismatch");
        FockOperator {
            matrix: &self.matrix * &rhs.matrix,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FockState {
    amplitudes: CVector,
    tail_mass: f64,
}

impl FockState {
    pub fn basis(n: usize, dim: usize) -> Result<Self> {
        check_dim(dim)?;
        if n >= dim {
            return Err(Error::InvalidParameter(format!(
                "basis index {n} outside cutoff {dim}"
            )));
        }
        let mut amplitudes = CVector::zeros(dim);
        amplitudes[n] = c(1.0);
        Ok(Self {
            amplitudes,
            tail_mass: 0.0,
        })
    }

    pub fn from_amplitudes(amplitudes: Vec<Complex64>, tail_mass: f64) -> Result<Self> {
        check_dim(amplitudes.len())?;
        if !(tail_mass >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "tail mass must be non-negative, got {tail_mass}"
            )));
        }
        Ok(Self {
            amplitudes: CVector::from_vec(amplitudes),
            tail_mass,
        })
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &CVector {
        &self.amplitudes
    }

    pub fn amplitude(&self, n: usize) -> Complex64 {
        self.amplitudes[n]
    }

    /// Probability mass beyond the cutoff, when known analytically.
    pub fn tail_mass(&self) -> f64 {
        self.tail_mass
    }

    /// Squared norm of the retained amplitudes.
    pub fn retained_mass(&self) -> f64 {
        self.amplitudes.norm_squared()
    }

    pub fn normalized(&self) -> Self {
        let norm = self.amplitudes.norm();
        Self {
            amplitudes: &self.amplitudes / c(norm),
            tail_mass: 0.0,
        }
    }

    pub fn inner(&self, other: &Self) -> Result<Complex64> {
        same_dim(self.dim(), other.dim())?;
        Ok(linalg::inner(&self.amplitudes, &other.amplitudes))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QDeformation {
    q: f64,
    zeta: f64,
}

impl QDeformation {
    pub fn new(q: f64) -> Result<Self> {
        if !(q > 0.0) || !q.is_finite() {
            return Err(Error::ParameterRange {
                name: "q",
                value: q,
                reason: "deformation parameter must be positive and finite",
            });
        }
        Ok(Self { q, zeta: q.ln() })
    }

    /// From the squeezing parameter `zeta = ln q`.
    pub fn from_zeta(zeta: f64) -> Result<Self> {
        if !zeta.is_finite() {
            return Err(Error::ParameterRange {
                name: "zeta",
                value: zeta,
                reason: "squeezing parameter must be finite",
            });
        }
        Ok(Self {
            q: zeta.exp(),
            zeta,
        })
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    pub fn zeta(&self) -> f64 {
        self.zeta
    }
}

fn check_dim(dim: usize) -> Result<()> {
    if dim < 2 {
        return Err(Error::InvalidDimension { dim, min: 2 });
    }
    Ok(())
}

fn same_dim(left: usize, right: usize) -> Result<()> {
    if left != right {
        return Err(Error::DimensionMismatch { left, right });
    }
    Ok(())
}

/// `a|n> = sqrt(n)|n-1>`.
pub fn annihilation(dim: usize) -> Result<FockOperator> {
    check_dim(dim)?;
    let mut m = CMatrix::zeros(dim, dim);
    for n in 1..dim {
        m[(n - 1, n)] = c((n as f64).sqrt());
    }
    Ok(FockOperator { matrix: m })
}

pub fn creation(dim: usize) -> Result<FockOperator> {
    Ok(annihilation(dim)?.adjoint())
}

/// `N = a^dagger a`, formed as the matrix product.
pub fn number(dim: usize) -> Result<FockOperator> {
    let a = annihilation(dim)?;
    Ok(&a.adjoint() * &a)
}

/// `P(n >= dim)` for a Poisson distribution of the given mean.
pub fn poisson_tail(mean: f64, dim: usize) -> f64 {
    if mean <= 0.0 {
        return 0.0;
    }
    let k = dim as f64;
    if k <= mean + 1.0 {
        // head sum is small relative to one; cancellation is harmless here
        let mut term = (-mean).exp();
        let mut head = 0.0;
        for n in 0..dim {
            if n > 0 {
                term *= mean / n as f64;
            }
            head += term;
        }
        return (1.0 - head).max(0.0);
    }
    // terms decrease monotonically from n = dim upward
    let log_first = -mean + k * mean.ln() - ln_factorial(dim);
    let mut term = 1.0;
    let mut sum = 0.0;
    let mut n = dim;
    loop {
        sum += term;
        n += 1;
        term *= mean / n as f64;
        if term < 1e-17 * sum {
            break;
        }
    }
    (log_first + sum.ln()).exp()
}

fn ln_factorial(n: usize) -> f64 {
    (1..=n).map(|k| (k as f64).ln()).sum()
}

/// Smallest cutoff whose Poisson tail is below `tolerance`.
pub fn required_cutoff(mean: f64, tolerance: f64) -> usize {
    let mut dim = 2;
    while poisson_tail(mean, dim) > tolerance {
        dim += 1;
    }
    dim
}

pub fn coherent_state(alpha: Complex64, dim: usize) -> Result<FockState> {
    coherent_state_with_tolerance(alpha, dim, DEFAULT_TAIL_TOLERANCE)
}

/// `e^{-|alpha|^2/2} sum_n alpha^n / sqrt(n!) |n>` truncated at `dim`.
pub fn coherent_state_with_tolerance(
    alpha: Complex64,
    dim: usize,
    tolerance: f64,
) -> Result<FockState> {
    check_dim(dim)?;
    let mean = alpha.norm_sqr();
    let tail_mass = poisson_tail(mean, dim);
    if tail_mass > tolerance {
        return Err(Error::CutoffTooSmall {
            dim,
            required: required_cutoff(mean, tolerance),
            tail_mass,
            tolerance,
        });
    }
    let mut amplitudes = Vec::with_capacity(dim);
    let mut amp = c((-0.5 * mean).exp());
    amplitudes.push(amp);
    for n in 1..dim {
        amp = amp * alpha / (n as f64).sqrt();
        amplitudes.push(amp);
    }
    Ok(FockState {
        amplitudes: CVector::from_vec(amplitudes),
        tail_mass,
    })
}

/// The fractal operator `q^N`: diagonal with entries `q^n`.
pub fn fractal_operator(q: QDeformation, dim: usize) -> Result<FockOperator> {
    check_dim(dim)?;
    let diag = CVector::from_iterator(dim, (0..dim).map(|n| c(q.q().powi(n as i32))));
    Ok(FockOperator {
        matrix: CMatrix::from_diagonal(&diag),
    })
}

/// Scalar relating the unnormalized image of a coherent state under `q^N`
/// to the normalized coherent state of label `q alpha`:
/// `q^N |alpha> = exp((|q alpha|^2 - |alpha|^2)/2) |q alpha>`.
pub fn fractal_image_factor(q: QDeformation, alpha: Complex64) -> f64 {
    (0.5 * ((alpha * q.q()).norm_sqr() - alpha.norm_sqr())).exp()
}

/// `<q alpha| a^n |q alpha>`, the n-th stage seen through the lens.
pub fn magnifying_lens(q: QDeformation, alpha: Complex64, n: u32, dim: usize) -> Result<Complex64> {
    magnifying_lens_with_tolerance(q, alpha, n, dim, DEFAULT_TAIL_TOLERANCE)
}

pub fn magnifying_lens_with_tolerance(
    q: QDeformation,
    alpha: Complex64,
    n: u32,
    dim: usize,
    tolerance: f64,
) -> Result<Complex64> {
    check_dim(dim)?;
    let label = alpha * q.q();
    let shift = n as usize;
    // a^n pulls amplitudes down by n levels, so the last n retained levels
    // lose their partners; the usable cutoff is dim - n.
    let usable = dim.saturating_sub(shift);
    let tail_mass = if usable == 0 {
        1.0
    } else {
        poisson_tail(label.norm_sqr(), usable)
    };
    if usable < 2 || tail_mass > tolerance {
        return Err(Error::CutoffTooSmall {
            dim,
            required: required_cutoff(label.norm_sqr(), tolerance) + shift,
            tail_mass,
            tolerance,
        });
    }
    let psi = coherent_state_with_tolerance(label, dim, tolerance)?;
    let a = annihilation(dim)?;
    let mut lowered = psi.amplitudes.clone();
    for _ in 0..n {
        lowered = a.matrix() * lowered;
    }
    Ok(linalg::inner(&psi.amplitudes, &lowered))
}

/// `exp(-(zeta/2)(a^2 - a^dagger^2))` on the truncated space.
pub fn single_mode_squeeze(zeta: f64, dim: usize) -> Result<FockOperator> {
    if !(zeta.abs() <= MAX_SQUEEZE) {
        return Err(Error::ParameterRange {
            name: "zeta",
            value: zeta,
            reason: "squeezing parameter must satisfy |zeta| <= 5",
        });
    }
    Ok(squeeze_generator(zeta, dim)?.exp())
}

/// The anti-Hermitian exponent `-(zeta/2)(a^2 - a^dagger^2)`.
pub fn squeeze_generator(zeta: f64, dim: usize) -> Result<FockOperator> {
    let a = annihilation(dim)?;
    let a2 = &a * &a;
    let ad2 = a2.adjoint();
    Ok(a2.sub(&ad2)?.scale(c(-0.5 * zeta)))
}

pub fn commutator(a: &FockOperator, b: &FockOperator) -> Result<FockOperator> {
    same_dim(a.dim(), b.dim())?;
    Ok(FockOperator {
        matrix: linalg::commutator(&a.matrix, &b.matrix),
    })
}

pub fn expectation(op: &FockOperator, psi: &FockState) -> Result<Complex64> {
    same_dim(op.dim(), psi.dim())?;
    Ok(linalg::inner(&psi.amplitudes, &(&op.matrix * &psi.amplitudes)))
}

/// Max-abs deviation of `[a, a^dagger]` from the identity on the indices
/// below `dim - 1`, where the truncated ladder is exact.
pub fn ccr_block_deviation(dim: usize) -> Result<f64> {
    let a = annihilation(dim)?;
    let comm = commutator(&a, &a.adjoint())?;
    Ok(comm.block_deviation(&CMatrix::identity(dim, dim), dim - 1))
}
