//! Quantum doubled oscillator: the A/B modes, the fractal Hamiltonian, the
//! SU(1,1) evolution of the vacuum, the entropy operator and the doubled
//! fractal-operator identity.
//!
//! Two-mode operators act on the tensor basis `|n_A, n_B>` with index
//! `n_A * cutoff + n_B`. States produced from the vacuum by the interaction
//! Hamiltonian stay in the pair subspace `|n, n>` and are stored there.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fock::{annihilation, single_mode_squeeze, DEFAULT_TAIL_TOLERANCE, MAX_SQUEEZE};
use crate::linalg::{self, c, expm, kron, operator_norm, restrict, two_mode_interior, CMatrix, CVector, I};

/// Default number of top levels per mode dropped when comparing operators.
pub const DEFAULT_MARGIN: usize = 2;

/// Largest per-mode cutoff for which a dense two-mode exponential is built.
pub const MAX_DENSE_CUTOFF: usize = 40;

#[derive(Debug, Clone, PartialEq)]
pub struct TwoModeState {
    cutoff: usize,
    pair_amplitudes: CVector,
    full_support: bool,
    tail_mass: f64,
}

impl TwoModeState {
    /// State supported on the pair subspace; `pair_amplitudes[n]` is the
    /// coefficient of `|n, n>`.
    pub fn from_pairs(pair_amplitudes: Vec<Complex64>, tail_mass: f64) -> Result<Self> {
        if pair_amplitudes.is_empty() {
            return Err(Error::InvalidDimension { dim: 0, min: 1 });
        }
        Ok(Self {
            cutoff: pair_amplitudes.len(),
            pair_amplitudes: CVector::from_vec(pair_amplitudes),
            full_support: false,
            tail_mass,
        })
    }

    pub fn vacuum(cutoff: usize) -> Result<Self> {
        if cutoff == 0 {
            return Err(Error::InvalidDimension { dim: 0, min: 1 });
        }
        let mut amps = vec![c(0.0); cutoff];
        amps[0] = c(1.0);
        Self::from_pairs(amps, 0.0)
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    pub fn pair_amplitudes(&self) -> &CVector {
        &self.pair_amplitudes
    }

    pub fn pair_amplitude(&self, n: usize) -> Complex64 {
        self.pair_amplitudes.get(n).copied().unwrap_or(c(0.0))
    }

    pub fn full_support(&self) -> bool {
        self.full_support
    }

    pub fn tail_mass(&self) -> f64 {
        self.tail_mass
    }

    pub fn retained_mass(&self) -> f64 {
        self.pair_amplitudes.norm_squared()
    }

    /// `1 - retained mass`.
    pub fn truncation_deficit(&self) -> f64 {
        1.0 - self.retained_mass()
    }

    /// Dense amplitude vector on the full `cutoff^2` tensor basis.
    pub fn to_tensor(&self) -> CVector {
        let k = self.cutoff;
        let mut v = CVector::zeros(k * k);
        for n in 0..k {
            v[n * k + n] = self.pair_amplitudes[n];
        }
        v
    }

    /// `<C> = <A^dagger A - B^dagger B>/2`; every basis state `|n, n>`
    /// has `n_A = n_B`, so this vanishes identically.
    pub fn casimir_expectation(&self) -> f64 {
        0.0
    }

    /// `<A^dagger A>`; equals `<B^dagger B>` on the pair subspace.
    pub fn mean_occupation(&self) -> f64 {
        self.pair_amplitudes
            .iter()
            .enumerate()
            .map(|(n, z)| n as f64 * z.norm_sqr())
            .sum()
    }
}

/// Ladder operators of the two modes, the SU(1,1) generators
/// `J+ = A^dagger B^dagger`, `J- = A B`, `J2 = -(i/2)(J+ - J-)` and
/// `C = (A^dagger A - B^dagger B)/2`, so that `H0 = 2 Omega C` and
/// `H_I = -2 Gamma J2`.
#[derive(Debug, Clone)]
pub struct TwoModeAlgebra {
    cutoff: usize,
    pub a_mode: CMatrix,
    pub b_mode: CMatrix,
    pub j_plus: CMatrix,
    pub j_minus: CMatrix,
    pub j2: CMatrix,
    pub casimir: CMatrix,
}

pub fn build_modes(cutoff: usize) -> Result<TwoModeAlgebra> {
    if cutoff < 4 {
        return Err(Error::InvalidDimension { dim: cutoff, min: 4 });
    }
    let a = annihilation(cutoff)?.into_matrix();
    let id = CMatrix::identity(cutoff, cutoff);
    let a_mode = kron(&a, &id);
    let b_mode = kron(&id, &a);
    let j_plus = a_mode.adjoint() * b_mode.adjoint();
    let j_minus = &a_mode * &b_mode;
    let j2 = (&j_plus - &j_minus) * Complex64::new(0.0, -0.5);
    let casimir = (a_mode.adjoint() * &a_mode - b_mode.adjoint() * &b_mode) * c(0.5);
    Ok(TwoModeAlgebra {
        cutoff,
        a_mode,
        b_mode,
        j_plus,
        j_minus,
        j2,
        casimir,
    })
}

impl TwoModeAlgebra {
    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    /// `H0 = Omega (A^dagger A - B^dagger B)`.
    pub fn h0(&self, omega: f64) -> CMatrix {
        &self.casimir * c(2.0 * omega)
    }

    /// `H_I = i Gamma (A^dagger B^dagger - A B)`.
    pub fn h_interaction(&self, gamma: f64) -> CMatrix {
        &self.j2 * c(-2.0 * gamma)
    }

    /// Interior-block deviations of the mode commutators from
    /// `[A, A^dagger] = 1 = [B, B^dagger]`, `[A, B] = 0 = [A, B^dagger]`.
    pub fn ccr_deviations(&self, margin: usize) -> [f64; 4] {
        let idx = two_mode_interior(self.cutoff, margin);
        let one = CMatrix::identity(idx.len(), idx.len());
        let dev = |m: CMatrix, target: &CMatrix| operator_norm(&(restrict(&m, &idx) - target));
        let zero = CMatrix::zeros(idx.len(), idx.len());
        [
            dev(linalg::commutator(&self.a_mode, &self.a_mode.adjoint()), &one),
            dev(linalg::commutator(&self.b_mode, &self.b_mode.adjoint()), &one),
            dev(linalg::commutator(&self.a_mode, &self.b_mode), &zero),
            dev(linalg::commutator(&self.a_mode, &self.b_mode.adjoint()), &zero),
        ]
    }

    /// `|| [H0, H_I] ||` on the interior block.
    pub fn hamiltonian_commutator(&self, omega: f64, gamma: f64, margin: usize) -> f64 {
        let comm = linalg::commutator(&self.h0(omega), &self.h_interaction(gamma));
        operator_norm(&restrict(&comm, &two_mode_interior(self.cutoff, margin)))
    }

    /// Largest matrix element of `H_I` leading out of the pair subspace.
    pub fn pair_subspace_leakage(&self, gamma: f64) -> f64 {
        let h = self.h_interaction(gamma);
        let k = self.cutoff;
        let mut worst = 0.0f64;
        for n in 0..k {
            let col = n * k + n;
            for row in 0..k * k {
                if row / k != row % k {
                    worst = worst.max(h[(row, col)].norm());
                }
            }
        }
        worst
    }
}

fn check_gamma_t(gamma: f64, t: f64) -> Result<f64> {
    let x = gamma * t;
    if !(gamma >= 0.0) || !(t >= 0.0) || !x.is_finite() {
        return Err(Error::ParameterRange {
            name: "Gamma t",
            value: x,
            reason: "Gamma and t must be non-negative and finite",
        });
    }
    Ok(x)
}

/// Probability outside the first `cutoff` pairs, `tanh^(2 cutoff)(Gamma t)`.
pub fn pair_tail_mass(gamma_t: f64, cutoff: usize) -> f64 {
    if gamma_t == 0.0 {
        return 0.0;
    }
    (2.0 * cutoff as f64 * gamma_t.tanh().ln()).exp()
}

/// Smallest pair cutoff whose tail mass is below `tolerance`.
pub fn required_pair_cutoff(gamma_t: f64, tolerance: f64) -> usize {
    if gamma_t == 0.0 {
        return 1;
    }
    let per_pair = 2.0 * gamma_t.tanh().ln();
    if per_pair == 0.0 {
        return usize::MAX;
    }
    let k = (tolerance.ln() / per_pair).ceil().max(1.0) as usize;
    // guard against rounding at the boundary
    if pair_tail_mass(gamma_t, k) < tolerance {
        k
    } else {
        k + 1
    }
}

/// `ln cosh x` without overflow.
fn ln_cosh(x: f64) -> f64 {
    let x = x.abs();
    x + (-2.0 * x).exp().ln_1p() - std::f64::consts::LN_2
}

/// `|0(t)> = (1/cosh Gamma t) sum_n tanh^n(Gamma t) |n, n>`.
pub fn vacuum_evolution(gamma: f64, t: f64, cutoff: usize) -> Result<TwoModeState> {
    vacuum_evolution_with_tolerance(gamma, t, cutoff, DEFAULT_TAIL_TOLERANCE)
}

pub fn vacuum_evolution_with_tolerance(
    gamma: f64,
    t: f64,
    cutoff: usize,
    tolerance: f64,
) -> Result<TwoModeState> {
    let x = check_gamma_t(gamma, t)?;
    if cutoff == 0 {
        return Err(Error::InvalidDimension { dim: 0, min: 1 });
    }
    let tail_mass = pair_tail_mass(x, cutoff);
    if tail_mass >= tolerance {
        return Err(Error::CutoffTooSmall {
            dim: cutoff,
            required: required_pair_cutoff(x, tolerance),
            tail_mass,
            tolerance,
        });
    }
    let ln_tanh = x.tanh().ln();
    let ln_c0 = -ln_cosh(x);
    let amps = (0..cutoff)
        .map(|n| {
            if n == 0 {
                c(ln_c0.exp())
            } else if x == 0.0 {
                c(0.0)
            } else {
                c((ln_c0 + n as f64 * ln_tanh).exp())
            }
        })
        .collect();
    TwoModeState::from_pairs(amps, tail_mass)
}

/// The generator `A^dagger B^dagger - A B` restricted to the pair subspace:
/// `|n,n> -> (n+1)|n+1,n+1> - n|n-1,n-1>`.
pub fn pair_generator(cutoff: usize) -> CMatrix {
    let mut g = CMatrix::zeros(cutoff, cutoff);
    for n in 0..cutoff.saturating_sub(1) {
        g[(n + 1, n)] = c((n + 1) as f64);
        g[(n, n + 1)] = c(-((n + 1) as f64));
    }
    g
}

/// `exp(-i t H_I) |0,0>` by a matrix exponential on the pair subspace.
/// No tail precondition: the result carries whatever truncation error the
/// cutoff implies.
pub fn vacuum_evolution_expm(gamma: f64, t: f64, cutoff: usize) -> Result<TwoModeState> {
    let x = check_gamma_t(gamma, t)?;
    if cutoff == 0 {
        return Err(Error::InvalidDimension { dim: 0, min: 1 });
    }
    let u = expm(&(pair_generator(cutoff) * c(x)));
    let amps = u.column(0).iter().copied().collect();
    TwoModeState::from_pairs(amps, pair_tail_mass(x, cutoff))
}

/// `<0(t)|0> = exp(-ln cosh Gamma t)`.
pub fn vacuum_fidelity(gamma: f64, t: f64) -> Result<f64> {
    Ok((-ln_cosh(check_gamma_t(gamma, t)?)).exp())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Mode {
    A,
    B,
}

/// `S_X = -(X^dagger X ln sinh^2 - X X^dagger ln cosh^2)` for `X = A` or `B`.
/// Diagonal in the tensor basis and a function of `n_X` only, so only the
/// single-mode diagonal is stored.
#[derive(Debug, Clone, PartialEq)]
pub struct EntropyOperator {
    mode: Mode,
    single: Vec<f64>,
}

impl EntropyOperator {
    pub fn cutoff(&self) -> usize {
        self.single.len()
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    /// Diagonal entry on the tensor basis vector `|n_A, n_B>`.
    pub fn entry(&self, n_a: usize, n_b: usize) -> f64 {
        match self.mode {
            Mode::A => self.single[n_a],
            Mode::B => self.single[n_b],
        }
    }

    pub fn to_matrix(&self) -> CMatrix {
        let k = self.cutoff();
        CMatrix::from_diagonal(&CVector::from_fn(k * k, |idx, _| c(self.entry(idx / k, idx % k))))
    }

    pub fn expectation(&self, psi: &TwoModeState) -> Result<f64> {
        if psi.cutoff() != self.cutoff() {
            return Err(Error::DimensionMismatch {
                left: self.cutoff(),
                right: psi.cutoff(),
            });
        }
        Ok(psi
            .pair_amplitudes()
            .iter()
            .enumerate()
            .map(|(n, z)| z.norm_sqr() * self.entry(n, n))
            .sum())
    }
}

pub fn entropy_operator(gamma: f64, t: f64, cutoff: usize, mode: Mode) -> Result<EntropyOperator> {
    let x = check_gamma_t(gamma, t)?;
    if x == 0.0 {
        return Err(Error::SingularEntropy { limit: 0.0 });
    }
    if cutoff < 2 {
        return Err(Error::InvalidDimension { dim: cutoff, min: 2 });
    }
    // truncated ladder: a^dagger a = n, a a^dagger = n + 1 except 0 on the top level
    let raised_lowered = |n: usize| if n + 1 < cutoff { (n + 1) as f64 } else { 0.0 };
    let ln_cosh2 = 2.0 * ln_cosh(x);
    let ln_sinh2 = ln_cosh2 + 2.0 * x.tanh().ln();
    let single = (0..cutoff)
        .map(|n| -(n as f64 * ln_sinh2 - raised_lowered(n) * ln_cosh2))
        .collect();
    Ok(EntropyOperator { mode, single })
}

/// `<0(t)| S_A |0(t)>`.
pub fn entropy_expectation(gamma: f64, t: f64, cutoff: usize) -> Result<f64> {
    entropy_expectation_for(gamma, t, cutoff, Mode::A)
}

pub fn entropy_expectation_for(gamma: f64, t: f64, cutoff: usize, mode: Mode) -> Result<f64> {
    let op = entropy_operator(gamma, t, cutoff, mode)?;
    op.expectation(&vacuum_evolution(gamma, t, cutoff)?)
}

/// `cosh^2 ln cosh^2 - sinh^2 ln sinh^2` at `x = Gamma t`; 0 at `x = 0`.
pub fn entropy_closed_form(gamma_t: f64) -> f64 {
    if gamma_t == 0.0 {
        return 0.0;
    }
    let ln_cosh2 = 2.0 * ln_cosh(gamma_t);
    let ln_sinh2 = ln_cosh2 + 2.0 * gamma_t.tanh().ln();
    ln_cosh2.exp() * ln_cosh2 - ln_sinh2.exp() * ln_sinh2
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Thermodynamics {
    /// `<2 Omega C>`.
    pub internal_energy: f64,
    /// `2 <J2>`.
    pub entropy: f64,
    pub temperature: f64,
    /// `U - T S`.
    pub free_energy: f64,
    /// `<H0 + H_I>`; equals the free energy.
    pub hamiltonian: f64,
    /// Central difference of `F(T) = U - T S` at fixed state.
    pub d_free_energy_d_temperature: f64,
    /// `-2 <J2>`.
    pub minus_two_j2: f64,
    /// `<S_A>` from the entropy operator; the analytic limit 0 at `t = 0`.
    pub entropy_operator_expectation: f64,
}

/// Expectation of `J2` on a pair-subspace state.
pub fn j2_expectation(psi: &TwoModeState) -> f64 {
    let g = pair_generator(psi.cutoff());
    let amps = psi.pair_amplitudes();
    (linalg::inner(amps, &(&g * amps)) * Complex64::new(0.0, -0.5)).re
}

pub fn thermodynamics(gamma: f64, omega: f64, t: f64, cutoff: usize) -> Result<Thermodynamics> {
    let psi = vacuum_evolution(gamma, t, cutoff)?;
    let internal_energy = 2.0 * omega * psi.casimir_expectation();
    let j2 = j2_expectation(&psi);
    let entropy = 2.0 * j2;
    let temperature = gamma;
    let free = |temp: f64| internal_energy - temp * entropy;
    let h = 1e-4 * temperature.abs().max(1.0);
    let d_free = (free(temperature + h) - free(temperature - h)) / (2.0 * h);
    let entropy_operator_expectation = match entropy_expectation(gamma, t, cutoff) {
        Ok(s) => s,
        Err(Error::SingularEntropy { limit }) => limit,
        Err(e) => return Err(e),
    };
    Ok(Thermodynamics {
        internal_energy,
        entropy,
        temperature,
        free_energy: free(temperature),
        hamiltonian: internal_energy - 2.0 * gamma * j2,
        d_free_energy_d_temperature: d_free,
        minus_two_j2: -2.0 * j2,
        entropy_operator_expectation,
    })
}

/// Operators of the doubled fractal identity on a two-mode space:
/// `c`, `c~` and `C = (c + c~)/sqrt 2`, `D = (c - c~)/sqrt 2`.
struct DoubledModes {
    c: CMatrix,
    c_tilde: CMatrix,
}

impl DoubledModes {
    fn new(cutoff: usize) -> Result<Self> {
        if cutoff < 8 {
            return Err(Error::InvalidDimension { dim: cutoff, min: 8 });
        }
        let a = annihilation(cutoff)?.into_matrix();
        let id = CMatrix::identity(cutoff, cutoff);
        Ok(Self {
            c: kron(&a, &id),
            c_tilde: kron(&id, &a),
        })
    }

    fn squeeze_part(x: &CMatrix) -> CMatrix {
        x * x - x.adjoint() * x.adjoint()
    }

    /// `(C^dagger D^dagger - C D)` built from the given pair of modes.
    fn cross_part(first: &CMatrix, second: &CMatrix) -> CMatrix {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let big_c = (first + second) * c(s);
        let big_d = (first - second) * c(s);
        big_c.adjoint() * big_d.adjoint() - big_c * big_d
    }
}

fn identity_deviation(first: &CMatrix, second: &CMatrix, cutoff: usize, margin: usize) -> f64 {
    let lhs = DoubledModes::squeeze_part(first) - DoubledModes::squeeze_part(second);
    let rhs = DoubledModes::cross_part(first, second) * c(-2.0);
    operator_norm(&restrict(&(lhs - rhs), &two_mode_interior(cutoff, margin)))
}

/// `|| (c^2 - c^dagger^2) - (c~^2 - c~^dagger^2) + 2(C^dagger D^dagger - C D) ||`
/// on the interior block.
pub fn doubled_fractal_identity(cutoff: usize) -> Result<f64> {
    doubled_fractal_identity_with_margin(cutoff, DEFAULT_MARGIN)
}

pub fn doubled_fractal_identity_with_margin(cutoff: usize, margin: usize) -> Result<f64> {
    let m = DoubledModes::new(cutoff)?;
    Ok(identity_deviation(&m.c, &m.c_tilde, cutoff, margin))
}

/// The same identity with `c` and `c~` exchanged: both sides change sign
/// (`D -> -D`), so the deviation must stay at rounding level.
pub fn doubled_fractal_identity_swapped(cutoff: usize) -> Result<f64> {
    let m = DoubledModes::new(cutoff)?;
    Ok(identity_deviation(&m.c_tilde, &m.c, cutoff, DEFAULT_MARGIN))
}

/// `<n_c, n_c~| C^dagger D^dagger |0,0>`.
pub fn cross_pair_element(cutoff: usize, n_c: usize, n_c_tilde: usize) -> Result<Complex64> {
    let m = DoubledModes::new(cutoff)?;
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let big_c = (&m.c + &m.c_tilde) * c(s);
    let big_d = (&m.c - &m.c_tilde) * c(s);
    let op = big_c.adjoint() * big_d.adjoint();
    Ok(op[(n_c * cutoff + n_c_tilde, 0)])
}

/// Dense two-mode operator on the `cutoff^2` tensor basis.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoModeOperator {
    cutoff: usize,
    matrix: CMatrix,
}

impl TwoModeOperator {
    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }
}

fn check_squeeze(gamma_t: f64) -> Result<()> {
    if gamma_t > MAX_SQUEEZE {
        return Err(Error::ParameterRange {
            name: "Gamma t",
            value: gamma_t,
            reason: "squeezing parameter must satisfy |zeta| <= 5",
        });
    }
    Ok(())
}

/// The exponent `-(Gamma t/2)[(a^2 - a^dagger^2) - (b^2 - b^dagger^2)]`.
pub fn two_mode_squeeze_exponent(gamma: f64, t: f64, cutoff: usize) -> Result<TwoModeOperator> {
    let x = check_gamma_t(gamma, t)?;
    check_squeeze(x)?;
    check_dense_cutoff(cutoff)?;
    let a = annihilation(cutoff)?.into_matrix();
    let single = &a * &a - a.adjoint() * a.adjoint();
    let id = CMatrix::identity(cutoff, cutoff);
    let matrix = (kron(&single, &id) - kron(&id, &single)) * c(-0.5 * x);
    Ok(TwoModeOperator { cutoff, matrix })
}

fn check_dense_cutoff(cutoff: usize) -> Result<()> {
    if cutoff < 4 {
        return Err(Error::InvalidDimension { dim: cutoff, min: 4 });
    }
    if cutoff > MAX_DENSE_CUTOFF {
        return Err(Error::ParameterRange {
            name: "cutoff",
            value: cutoff as f64,
            reason: "dense two-mode operators are limited to 40 levels per mode",
        });
    }
    Ok(())
}

/// `U(t) = exp(-(Gamma t/2)[(a^2 - a^dagger^2) - (b^2 - b^dagger^2)])`.
/// The two terms act on different modes, so `U(t)` is the tensor product of
/// single-mode squeezes with parameters `Gamma t` and `-Gamma t`.
pub fn two_mode_squeeze_generator(gamma: f64, t: f64, cutoff: usize) -> Result<TwoModeOperator> {
    let x = check_gamma_t(gamma, t)?;
    check_squeeze(x)?;
    check_dense_cutoff(cutoff)?;
    let ua = single_mode_squeeze(x, cutoff)?.into_matrix();
    let ub = single_mode_squeeze(-x, cutoff)?.into_matrix();
    Ok(TwoModeOperator {
        cutoff,
        matrix: kron(&ua, &ub),
    })
}

/// Squeezing parameter read back from a two-mode exponent `X`, using
/// `X = zeta (A B - A^dagger B^dagger)` and
/// `A^dagger B^dagger |0,0> = (|2,0> - |0,2>)/sqrt 2` in the `a, b` basis.
pub fn read_squeezing_parameter(exponent: &TwoModeOperator) -> f64 {
    let k = exponent.cutoff;
    let m = &exponent.matrix;
    -(m[(2 * k, 0)].re - m[(2, 0)].re) * std::f64::consts::FRAC_1_SQRT_2
}

fn ln_factorials(n: usize) -> Vec<f64> {
    let mut out = vec![0.0; n + 1];
    for k in 1..=n {
        out[k] = out[k - 1] + (k as f64).ln();
    }
    out
}

/// Rewrites a pair-subspace state `sum_n c_n |n,n>_{AB}` in the `a, b`
/// number basis with `A = (a+b)/sqrt 2`, `B = (a-b)/sqrt 2`. Since
/// `A^dagger B^dagger = (a^dagger^2 - b^dagger^2)/2`,
/// `|n,n>_{AB} = sum_{k+l=n} (-1)^l sqrt((2k)!(2l)!) / (2^n k! l!) |2k,2l>_{ab}`.
/// Entry `(i, j)` of the result is the amplitude on `|i>_a |j>_b`.
pub fn pair_state_to_mode_basis(psi: &TwoModeState, mode_cutoff: usize) -> Result<CMatrix> {
    let k_pairs = psi.cutoff();
    let needed = 2 * (k_pairs - 1) + 1;
    if mode_cutoff < needed {
        return Err(Error::InvalidDimension {
            dim: mode_cutoff,
            min: needed,
        });
    }
    let lf = ln_factorials(2 * k_pairs);
    let mut out = CMatrix::zeros(mode_cutoff, mode_cutoff);
    for n in 0..k_pairs {
        let cn = psi.pair_amplitude(n);
        for k in 0..=n {
            let l = n - k;
            let ln_mag = 0.5 * (lf[2 * k] + lf[2 * l]) - n as f64 * std::f64::consts::LN_2 - lf[k] - lf[l];
            let sign = if l % 2 == 0 { 1.0 } else { -1.0 };
            out[(2 * k, 2 * l)] += cn * (sign * ln_mag.exp());
        }
    }
    Ok(out)
}

/// Max amplitude difference between `U(t)|0,0>` (product of single-mode
/// squeezed vacua at `mode_cutoff` levels) and the closed-form evolved
/// vacuum rewritten in the `a, b` basis, over the components `|2k, 2l>` with
/// `k + l` inside the retained pair range. Odd components vanish in both.
pub fn two_mode_squeeze_check(gamma: f64, t: f64, mode_cutoff: usize) -> Result<f64> {
    let x = check_gamma_t(gamma, t)?;
    check_squeeze(x)?;
    let pairs = required_pair_cutoff(x, DEFAULT_TAIL_TOLERANCE);
    if 2 * pairs > mode_cutoff {
        return Err(Error::CutoffTooSmall {
            dim: mode_cutoff,
            required: 2 * pairs,
            tail_mass: pair_tail_mass(x, mode_cutoff / 2),
            tolerance: DEFAULT_TAIL_TOLERANCE,
        });
    }
    let psi = vacuum_evolution(gamma, t, pairs)?;
    let expected = pair_state_to_mode_basis(&psi, mode_cutoff)?;
    let va = single_mode_squeeze(x, mode_cutoff)?.into_matrix().column(0).into_owned();
    let vb = single_mode_squeeze(-x, mode_cutoff)?.into_matrix().column(0).into_owned();
    let actual = &va * vb.transpose();
    let mut worst = 0.0f64;
    for i in 0..mode_cutoff {
        for j in 0..mode_cutoff {
            if i % 2 == 1 || j % 2 == 1 || (i + j) / 2 < pairs {
                worst = worst.max((actual[(i, j)] - expected[(i, j)]).norm());
            }
        }
    }
    Ok(worst)
}

/// `exp(-i t H_I)|0,0>` on the full tensor space; a cross-check of the
/// pair-subspace evolution for small cutoffs.
pub fn full_space_evolution(gamma: f64, t: f64, cutoff: usize) -> Result<CVector> {
    check_gamma_t(gamma, t)?;
    check_dense_cutoff(cutoff)?;
    let alg = build_modes(cutoff)?;
    let u = expm(&(alg.h_interaction(gamma) * (-I * t)));
    Ok(u.column(0).into_owned())
}
