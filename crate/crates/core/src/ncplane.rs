//! Noncommutative plane: quantized squared radii in the length and
//! q-deformed schemes, the deformed ladder operator and its Pythagoras
//! spectrum, interference phases, the velocity and `xi` commutators of the
//! doubled oscillator, the zero-point uncertainty and the stage energies.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fock::annihilation;
use crate::linalg::{self, c, kron, operator_norm, restrict, two_mode_interior, CMatrix, I};
use crate::spiral::MechanicalParams;

/// Top levels dropped when checking canonical commutators.
pub const CCR_MARGIN: usize = 2;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum Scale {
    Length(f64),
    Deformation(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NCParams {
    scale: Scale,
    gamma: Option<f64>,
}

fn positive(name: &'static str, value: f64) -> Result<f64> {
    if !(value > 0.0) || !value.is_finite() {
        return Err(Error::ParameterRange {
            name,
            value,
            reason: "must be positive and finite",
        });
    }
    Ok(value)
}

impl NCParams {
    pub fn length(l: f64) -> Result<Self> {
        Ok(Self {
            scale: Scale::Length(positive("L", l)?),
            gamma: None,
        })
    }

    pub fn deformation(q: f64) -> Result<Self> {
        Ok(Self {
            scale: Scale::Deformation(positive("q", q)?),
            gamma: None,
        })
    }

    /// Length scheme with `L^2 = 1/gamma`.
    pub fn dissipative(gamma: f64) -> Result<Self> {
        let gamma = positive("gamma", gamma)?;
        Ok(Self {
            scale: Scale::Length(gamma.sqrt().recip()),
            gamma: Some(gamma),
        })
    }

    /// Length scheme with an explicit damping constant; `L^2 gamma` must be 1.
    pub fn length_with_gamma(l: f64, gamma: f64) -> Result<Self> {
        let l = positive("L", l)?;
        let gamma = positive("gamma", gamma)?;
        if (l * l * gamma - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidParameter(format!(
                "L^2 = {} does not match 1/gamma = {}",
                l * l,
                1.0 / gamma
            )));
        }
        Ok(Self {
            scale: Scale::Length(l),
            gamma: Some(gamma),
        })
    }

    pub fn scale(&self) -> Scale {
        self.scale
    }

    pub fn gamma(&self) -> Option<f64> {
        self.gamma
    }

    /// Squared unit of the plane: `L^2` or `q^2`.
    pub fn unit_squared(&self) -> f64 {
        match self.scale {
            Scale::Length(l) => l * l,
            Scale::Deformation(q) => q * q,
        }
    }
}

/// `delta_n^2` for `n = 0..=n_max`: `L^2 (2n+1)` or `2 q^2 (n + 1/2)`.
pub fn quantized_radii(params: &NCParams, n_max: usize) -> Vec<f64> {
    (0..=n_max)
        .map(|n| match params.scale {
            Scale::Length(l) => l * l * (2 * n + 1) as f64,
            Scale::Deformation(q) => 2.0 * q * q * (n as f64 + 0.5),
        })
        .collect()
}

/// Phase between two paths enclosing `area`: `A/L^2`, `A/q^2`, or
/// `A gamma` when a damping constant is set.
pub fn interference_phase(area: f64, params: &NCParams) -> Result<f64> {
    if !(area >= 0.0) {
        return Err(Error::ParameterRange {
            name: "area",
            value: area,
            reason: "enclosed area must be non-negative",
        });
    }
    Ok(match params.gamma {
        Some(g) => area * g,
        None => area / params.unit_squared(),
    })
}

/// `E_n = q^2 (n + 1/2)`.
pub fn fractal_energy(q: f64, n: usize) -> f64 {
    q * q * (n as f64 + 0.5)
}

/// Position and momentum quadratures `x = (a + a^dagger)/sqrt 2`,
/// `p = (a - a^dagger)/(i sqrt 2)`.
fn quadratures(cutoff: usize) -> Result<(CMatrix, CMatrix)> {
    let a = annihilation(cutoff)?.into_matrix();
    let ad = a.adjoint();
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let x = (&a + &ad) * c(s);
    let p = (&a - &ad) * Complex64::new(0.0, -s);
    Ok((x, p))
}

#[derive(Debug, Clone)]
pub struct DeformedLadder {
    pub q: f64,
    pub z: CMatrix,
    pub z_dagger: CMatrix,
    /// `x1 = x`.
    pub x1: CMatrix,
    /// `x2 = q^2 p`.
    pub x2: CMatrix,
}

/// `z_q = (x + i q^2 p)/(q sqrt 2)` and the plane coordinates.
pub fn deformed_ladder(q: f64, cutoff: usize) -> Result<DeformedLadder> {
    let q = positive("q", q)?;
    if cutoff < 4 {
        return Err(Error::InvalidDimension { dim: cutoff, min: 4 });
    }
    let (x, p) = quadratures(cutoff)?;
    let x2 = &p * c(q * q);
    let z = (&x + &x2 * I) * c(1.0 / (q * std::f64::consts::SQRT_2));
    Ok(DeformedLadder {
        q,
        z_dagger: z.adjoint(),
        z,
        x1: x,
        x2,
    })
}

fn leading_block_norm(m: &CMatrix, keep: usize) -> f64 {
    operator_norm(&m.view((0, 0), (keep, keep)).into_owned())
}

impl DeformedLadder {
    pub fn cutoff(&self) -> usize {
        self.z.nrows()
    }

    /// `|| [z_q, z_q^dagger] - 1 ||` on the leading block.
    pub fn ladder_ccr_deviation(&self, margin: usize) -> f64 {
        let k = self.cutoff().saturating_sub(margin);
        let comm = linalg::commutator(&self.z, &self.z_dagger) - CMatrix::identity(self.cutoff(), self.cutoff());
        leading_block_norm(&comm, k)
    }

    /// `|| [x1, x2] - i q^2 ||` on the leading block.
    pub fn plane_ccr_deviation(&self, margin: usize) -> f64 {
        let k = self.cutoff().saturating_sub(margin);
        let comm = linalg::commutator(&self.x1, &self.x2)
            - CMatrix::identity(self.cutoff(), self.cutoff()) * (I * self.q * self.q);
        leading_block_norm(&comm, k)
    }

    /// `x1^2 + x2^2`; real symmetric in the number basis.
    pub fn pythagoras(&self) -> DMatrix<f64> {
        (&self.x1 * &self.x1 + &self.x2 * &self.x2).map(|z| z.re)
    }
}

/// Ascending eigenvalues of the truncated `x1^2 + x2^2`.
pub fn plane_spectrum(q: f64, cutoff: usize) -> Result<Vec<f64>> {
    let ladder = deformed_ladder(q, cutoff)?;
    let mut values: Vec<f64> = SymmetricEigen::new(ladder.pythagoras()).eigenvalues.iter().copied().collect();
    values.sort_by(f64::total_cmp);
    Ok(values)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpectrumComparison {
    pub q: f64,
    pub cutoff: usize,
    /// Number of lowest levels compared.
    pub compared: usize,
    /// Largest relative error against `2 q^2 (n + 1/2)` over those levels.
    pub max_relative_error: f64,
    /// Length of the prefix of levels matching within the tolerance.
    pub accurate_levels: usize,
}

/// Default spectrum margin `ceil(cutoff / 8)`.
pub fn spectrum_margin(cutoff: usize) -> usize {
    cutoff.div_ceil(8)
}

/// Compares the lowest `min(cutoff/2, cutoff - margin)` eigenvalues of the
/// truncated `x1^2 + x2^2` with `2 q^2 (n + 1/2)`.
pub fn spectrum_comparison(q: f64, cutoff: usize, margin: usize, tolerance: f64) -> Result<SpectrumComparison> {
    let values = plane_spectrum(q, cutoff)?;
    let compared = (cutoff / 2).min(cutoff.saturating_sub(margin));
    let rel = |n: usize| {
        let exact = 2.0 * q * q * (n as f64 + 0.5);
        (values[n] - exact).abs() / exact
    };
    let max_relative_error = (0..compared).map(rel).fold(0.0, f64::max);
    let accurate_levels = (0..cutoff).take_while(|&n| rel(n) < tolerance).count();
    Ok(SpectrumComparison {
        q,
        cutoff,
        compared,
        max_relative_error,
        accurate_levels,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct VelocityCommutators {
    /// `|| [v+, v-] + i gamma/m^2 ||` on the interior block.
    pub velocity_deviation: f64,
    /// `|| [xi+, xi-] - i/gamma ||` on the interior block.
    pub xi_deviation: f64,
    /// `<0,0| [xi+, xi-] |0,0>`.
    pub xi_value: Complex64,
}

/// Quantizes `(z+, p_z+)` and `(z-, p_z-)` as independent canonical pairs
/// on two truncated modes and forms `v+- = (p_z-+ -+ gamma z+-/2)/m`,
/// `xi+- = -+(m/gamma) v+-`.
pub fn velocity_xi_commutators(mech: &MechanicalParams, cutoff: usize) -> Result<VelocityCommutators> {
    if cutoff < 8 {
        return Err(Error::InvalidDimension { dim: cutoff, min: 8 });
    }
    let (m, gamma) = (mech.m, mech.gamma);
    let (x, p) = quadratures(cutoff)?;
    let id = CMatrix::identity(cutoff, cutoff);
    let (z_plus, p_plus) = (kron(&x, &id), kron(&p, &id));
    let (z_minus, p_minus) = (kron(&id, &x), kron(&id, &p));
    let v_plus = (&p_minus - &z_plus * c(0.5 * gamma)) * c(1.0 / m);
    let v_minus = (&p_plus + &z_minus * c(0.5 * gamma)) * c(1.0 / m);
    let xi_plus = &v_plus * c(-m / gamma);
    let xi_minus = &v_minus * c(m / gamma);

    let idx = two_mode_interior(cutoff, CCR_MARGIN);
    let one = CMatrix::identity(idx.len(), idx.len());
    let vv = restrict(&linalg::commutator(&v_plus, &v_minus), &idx);
    let xx = restrict(&linalg::commutator(&xi_plus, &xi_minus), &idx);
    Ok(VelocityCommutators {
        velocity_deviation: operator_norm(&(vv + &one * (I * (gamma / (m * m))))),
        xi_deviation: operator_norm(&(&xx - &one * (I / gamma))),
        xi_value: xx[(0, 0)],
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Uncertainty {
    pub product: f64,
    /// `q^2 / 2`.
    pub bound: f64,
}

/// `Delta x1 Delta x2` on the `level`-th eigenvector of `z_q^dagger z_q`.
pub fn uncertainty_at_level(q: f64, cutoff: usize, level: usize) -> Result<Uncertainty> {
    if cutoff < 16 {
        return Err(Error::InvalidDimension { dim: cutoff, min: 16 });
    }
    let ladder = deformed_ladder(q, cutoff)?;
    // z_q has real entries: x is real and i p is real
    let number_q = (&ladder.z_dagger * &ladder.z).map(|z| z.re);
    let eig = SymmetricEigen::new(number_q);
    let mut order: Vec<usize> = (0..cutoff).collect();
    // The truncated z_q is singular for odd cutoffs; its spurious zero mode
    // lives on the top levels, so ties are broken by the mean occupation.
    let occupation = |col: usize| -> f64 {
        eig.eigenvectors
            .column(col)
            .iter()
            .enumerate()
            .map(|(n, v)| n as f64 * v * v)
            .sum()
    };
    order.sort_by(|&i, &j| {
        let (ei, ej) = (eig.eigenvalues[i], eig.eigenvalues[j]);
        if (ei - ej).abs() < 1e-8 {
            occupation(i).total_cmp(&occupation(j))
        } else {
            ei.total_cmp(&ej)
        }
    });
    let col = order.get(level).copied().ok_or_else(|| {
        Error::InvalidParameter(format!("level {level} outside cutoff {cutoff}"))
    })?;
    let psi: nalgebra::DVector<Complex64> = eig.eigenvectors.column(col).map(c);
    let spread = |op: &CMatrix| {
        let mean = linalg::inner(&psi, &(op * &psi)).re;
        let square = linalg::inner(&psi, &(op * (op * &psi))).re;
        (square - mean * mean).max(0.0).sqrt()
    };
    Ok(Uncertainty {
        product: spread(&ladder.x1) * spread(&ladder.x2),
        bound: 0.5 * q * q,
    })
}

/// Ground-state uncertainty product and the bound `q^2/2`.
pub fn uncertainty_check(q: f64, cutoff: usize) -> Result<Uncertainty> {
    uncertainty_at_level(q, cutoff, 0)
}
